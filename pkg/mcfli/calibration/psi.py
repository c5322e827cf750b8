"""Eight-step phase-shifting interferometry against a reference core."""
from dataclasses import dataclass
import logging
from pathlib import Path

import numpy as np
from scipy import fft as sfft

from mcfli.calibration.fields import WavefieldSet
from mcfli.core.grid import Grid
from mcfli.core.io import write_json
from mcfli.exceptions import CalibrationError
from mcfli.schemas.calibration import FringeFrameSchema, FringeManifestSchema

logger = logging.getLogger(__name__)

STEPS = 8
FLOOR_RATIO = 1e-6
# noisy references are masked below this many noise standard deviations
NOISE_FLOOR_SIGMAS = 3.0
MAX_MASKED_FRACTION = 0.5


def phase_steps() -> np.ndarray:
    return 2 * np.pi * np.arange(STEPS) / STEPS


@dataclass(frozen=True, eq=False)
class FringeStack:
    """Frames ``(Q, 8, N)``: core q with the reference shifted by 2 pi k / 8, plus |E_ref|^2."""

    grid: Grid
    frames: np.ndarray
    reference: np.ndarray
    reference_core: int = 0
    noise_level: float = 0.0

    @property
    def Q(self) -> int:
        return self.frames.shape[0]

    @property
    def frame_count(self) -> int:
        return self.frames.shape[0] * self.frames.shape[1] + 1


def render_fringes(fields: WavefieldSet, noise_sigma: float = 0.0, seed=0) -> FringeStack:
    """
    Render I_q(x; phi_k) = |E_ref(x) exp(i phi_k) + E_q(x)|^2 for every core.

    Args:
        fields (WavefieldSet): true fields, ``fields.reference`` is the reference core
        noise_sigma (float): std of additive Gaussian noise, relative to the brightest frame
        seed: noise seed

    Returns:
        FringeStack: 8 Q frames and the reference-only frame, all nonnegative
    """
    E = fields.fields
    reference = E[fields.reference]
    shifts = np.exp(1j * phase_steps())
    frames = np.abs(reference[None, None, :] * shifts[None, :, None] + E[:, None, :]) ** 2
    reference_frame = np.abs(reference) ** 2
    scale = 0.0
    if noise_sigma > 0:
        rng = np.random.default_rng(seed)
        scale = noise_sigma * frames.max()
        frames = np.maximum(frames + rng.normal(0.0, scale, size=frames.shape), 0.0)
        reference_frame = np.maximum(reference_frame + rng.normal(0.0, scale, size=reference_frame.shape), 0.0)
    stack = FringeStack(fields.grid, frames, reference_frame, fields.reference, float(scale))
    logger.info("Rendered %d fringe frames for %d cores", stack.frame_count, stack.Q)
    return stack


def recover_fields(stack: FringeStack, floor_ratio: float = FLOOR_RATIO) -> WavefieldSet:
    """Referenced fields from the last coefficient of the 8-point DFT along the phase steps.

    Pixels where the reference intensity is below ``floor_ratio`` times its
    maximum, or below three noise standard deviations for noisy stacks, are
    masked and set to zero.
    """
    reference = stack.reference
    floor = max(floor_ratio * reference.max(), NOISE_FLOOR_SIGMAS * stack.noise_level)
    mask = reference > floor
    masked_fraction = 1.0 - mask.mean()
    if masked_fraction > MAX_MASKED_FRACTION:
        raise CalibrationError(
            f"reference intensity below floor on {100 * masked_fraction:.1f}% of the field of view"
        )
    coefficient = sfft.fft(stack.frames, axis=1)[:, STEPS - 1, :]
    amplitude = np.sqrt(np.where(mask, reference, 1.0))
    fields = np.where(mask, coefficient / (STEPS * amplitude), 0.0)
    logger.info("Recovered %d fields, %.2f%% of pixels masked", stack.Q, 100 * masked_fraction)
    return WavefieldSet(stack.grid, fields, stack.reference_core, referenced=True, mask=mask)


def write_fringes(stack: FringeStack, directory) -> Path:
    """One flat little-endian float64 file per frame plus ``manifest.json``."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    frames = []
    for q in range(stack.Q):
        for k, phase in enumerate(phase_steps()):
            name = f"core{q:03d}_step{k}.f64"
            stack.frames[q, k].astype("<f8").tofile(directory / name)
            frames.append(FringeFrameSchema(core=q, step=k, phase=float(phase), file=name))
    stack.reference.astype("<f8").tofile(directory / "reference.f64")
    manifest = FringeManifestSchema(
        grid=stack.grid.to_schema(),
        num_cores=stack.Q,
        reference_core=stack.reference_core,
        steps=STEPS,
        noise_level=stack.noise_level,
        reference_file="reference.f64",
        frames=frames,
    )
    return write_json(directory / "manifest.json", manifest)


def read_fringes(directory) -> FringeStack:
    directory = Path(directory)
    manifest = FringeManifestSchema.model_validate_json((directory / "manifest.json").read_text())
    grid = Grid.from_schema(manifest.grid)
    frames = np.empty((manifest.num_cores, manifest.steps, grid.N))
    for frame in manifest.frames:
        frames[frame.core, frame.step] = np.fromfile(directory / frame.file, dtype="<f8")
    reference = np.fromfile(directory / manifest.reference_file, dtype="<f8")
    return FringeStack(grid, frames, reference, manifest.reference_core, manifest.noise_level)
