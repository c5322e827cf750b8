"""Simulated 2-D imaging: SROP acquisition of a scene, TV reconstruction, raster-scan comparison."""
from dataclasses import dataclass, field
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from mcfli.core.grid import Grid, make_grid
from mcfli.core.io import read_pgm, write_array, write_json, write_pgm
from mcfli.core.layout import CoreLayout, fermat_spiral_layout
from mcfli.core.rng import child_seed
from mcfli.core.scene import SceneImage, cartoon_scene, gaussian_vignette
from mcfli.core.sketches import draw_sketches
from mcfli.exceptions import ConfigError, DimensionError, GridMismatchError
from mcfli.schemas.reports import DemoReportSchema
from mcfli.schemas.solver import SolverConfig
from mcfli.sensing.combined import CombinedOperator
from mcfli.sensing.illumination import rs_scan
from mcfli.sensing.noise import add_noise
from mcfli.sensing.srop import debias
from mcfli.solvers.metrics import vignetted_snr
from mcfli.solvers.primal_dual import solve_tv_nonneg

logger = logging.getLogger(__name__)

DEMO_N1 = 64
DEMO_Q = 110
DEMO_VIGNETTE_WIDTH = 0.3
DEMO_QUANT_BITS = 8
RHO_DECADES = (-4, -3, -2, -1, 0)
SWEEP_CONFIG = SolverConfig(max_iterations=300, rtol=1e-5)
DEMO_CONFIG = SolverConfig(max_iterations=1500, rtol=1e-6)


@dataclass
class DemoReport:
    Q: int
    M: int
    n1: int
    solver: str
    rho: float
    snr_db: float
    rs_snr_db: float
    iterations: int
    converged: bool
    estimate: np.ndarray = field(repr=False)
    rs_image: np.ndarray = field(repr=False)
    rho_sweep: Dict[float, float] = field(default_factory=dict)
    files: List[str] = field(default_factory=list)

    def to_schema(self) -> DemoReportSchema:
        return DemoReportSchema(
            Q=self.Q, M=self.M, n1=self.n1, solver=self.solver, rho=self.rho,
            snr_db=self.snr_db, rs_snr_db=self.rs_snr_db, iterations=self.iterations,
            converged=self.converged,
            rho_sweep={f"{k:.3g}": v for k, v in self.rho_sweep.items()},
            files=self.files,
        )


def load_scene(scene: Union[None, str, Path, SceneImage], grid: Grid) -> SceneImage:
    if scene is None:
        return cartoon_scene(grid)
    if isinstance(scene, SceneImage):
        if scene.grid != grid:
            raise GridMismatchError("demo scene grid differs from the demo grid")
        return scene
    image = read_pgm(scene)
    if image.shape != grid.shape:
        raise DimensionError(f"scene file is {image.shape}, demo grid is {grid.shape}")
    return SceneImage(grid, image)


def rs_image(scene: SceneImage, layout: CoreLayout) -> np.ndarray:
    """Raster-scan image scaled so a unit spike at the origin peaks at 1."""
    grid = layout.grid
    return rs_scan(scene, layout) / (grid.pixel_area * layout.Q ** 2)


def _fitted_snr(image: np.ndarray, truth: np.ndarray, vignette: np.ndarray) -> float:
    """Vignetted SNR after the least-squares gain on the vignetted truth."""
    target = (truth * vignette).ravel()
    image = image.ravel()
    gain = float(image @ target / max(image @ image, np.finfo(float).tiny))
    return vignetted_snr(gain * image, target, np.ones_like(target))


def select_rho(operator: CombinedOperator, y_c: np.ndarray, scene: SceneImage,
               vignette: np.ndarray, config: SolverConfig = SWEEP_CONFIG) -> tuple[float, Dict[float, float]]:
    """Logarithmic sweep of rho around ||B^T y|| / M, scored by vignetted SNR against the truth."""
    base = float(np.abs(operator.adjoint(y_c)).max()) / operator.M
    scores = {}
    for decade in RHO_DECADES:
        rho = base * 10.0 ** decade
        result = solve_tv_nonneg(operator, y_c, rho=rho, config=config)
        scores[rho] = vignetted_snr(result.estimate, scene.vector, vignette)
        logger.info("rho=%.3g: %.2f dB", rho, scores[rho])
    best = max(scores, key=scores.get)
    return best, scores


def run_imaging_demo(
    scene=None,
    layout: Optional[CoreLayout] = None,
    M: int = 3000,
    solver: str = "tv",
    out=None,
    rho: Optional[float] = None,
    config: Optional[SolverConfig] = None,
    seed: int = 0,
    noise_level: float = 0.0,
    vignette_width: float = DEMO_VIGNETTE_WIDTH,
) -> DemoReport:
    """
    Simulate SROP imaging of a 2-D scene and reconstruct it by nonnegative TV.

    Args:
        scene: SceneImage, PGM path or None for the cartoon
        layout (CoreLayout): 2-D layout; defaults to a Q=110 Fermat spiral on a 64 x 64 grid
        M (int): number of sketches (8-bit phases)
        solver (str): only "tv"
        out: output directory for images, arrays and the JSON report
        rho (float): TV weight; chosen by a logarithmic sweep when None
        config (SolverConfig): TV solver settings
        seed (int): master seed of sketches and noise
        noise_level (float): std of additive Gaussian noise on the raw measurements
        vignette_width (float): width of the Gaussian vignetting window, in fields of view

    Returns:
        DemoReport: vignetted SNRs of the reconstruction and of the raster-scan image
    """
    if solver != "tv":
        raise ConfigError(f"unknown imaging solver {solver!r}")
    if layout is None:
        layout = fermat_spiral_layout(make_grid(2, DEMO_N1, 1.0), DEMO_Q)
    grid = layout.grid
    if grid.dim != 2:
        raise DimensionError("the imaging demo needs a 2-D layout")
    config = config or DEMO_CONFIG

    w = gaussian_vignette(grid, vignette_width)
    scene = load_scene(scene, grid)
    observed = SceneImage(grid, scene.values, vignette=w)
    sketches = draw_sketches(layout.Q, M, child_seed(seed, 1), quant_bits=DEMO_QUANT_BITS)
    operator = CombinedOperator(layout, sketches, vignette=w)

    y_c = operator.forward(scene.vector)
    if noise_level > 0:
        # D(y + n) = y_c + D n
        y_c = debias(add_noise(y_c, "gaussian", child_seed(seed, 2), noise_level)[0])

    sweep = {}
    if rho is None:
        rho, sweep = select_rho(operator, y_c, scene, w)
    result = solve_tv_nonneg(operator, y_c, rho=rho, config=config)
    snr_db = vignetted_snr(result.estimate, scene.vector, w)

    rs = rs_image(observed, layout)
    rs_snr_db = _fitted_snr(rs, scene.values, w)
    logger.info("Demo Q=%d M=%d: TV %.2f dB, raster scan %.2f dB", layout.Q, M, snr_db, rs_snr_db)

    report = DemoReport(layout.Q, M, grid.n1, solver, float(rho), snr_db, rs_snr_db, result.iterations,
                        result.converged, grid.reshape(result.estimate), rs, sweep)
    if out is not None:
        out = Path(out)
        estimate = grid.reshape(result.estimate)
        files = [
            write_pgm(out / "truth.pgm", scene.values * w),
            write_pgm(out / "estimate.pgm", estimate * w),
            write_pgm(out / "raster_scan.pgm", rs),
            write_array(out / "estimate.mcfa", estimate),
            result.write_traces(out / "traces.csv"),
        ]
        report.files = [str(f) for f in files]
        write_json(out / "report.json", report.to_schema())
    return report


def imaging_snr_curve(layouts: Dict[str, CoreLayout], M_values: Sequence[int], rho: Optional[float] = None,
                      config: Optional[SolverConfig] = None, seed: int = 0) -> pd.DataFrame:
    """Vignetted SNR per layout and M, on the same scene."""
    rows = []
    for name, layout in layouts.items():
        for M in M_values:
            report = run_imaging_demo(layout=layout, M=M, rho=rho, config=config, seed=seed)
            rows.append({"layout": name, "Q": layout.Q, "M": M, "snr_db": report.snr_db,
                         "rs_snr_db": report.rs_snr_db, "rho": report.rho})
    return pd.DataFrame(rows)
