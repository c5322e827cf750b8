"""File formats.

Binary arrays (``.mcfa``): little-endian header ``b"MCFA"``, uint32 version,
uint32 dtype tag (1 = complex128, 2 = float64), uint32 ndim, ndim x uint64
shape, then the row-major payload (complex entries as interleaved re, im).
"""
import logging
import struct
from pathlib import Path

import numpy as np
from pydantic import BaseModel

from mcfli.exceptions import DimensionError

logger = logging.getLogger(__name__)

MAGIC = b"MCFA"
VERSION = 1
DTYPE_TAGS = {1: np.dtype("<c16"), 2: np.dtype("<f8")}


def write_array(path, array) -> Path:
    array = np.asarray(array)
    tag = 1 if np.iscomplexobj(array) else 2
    data = np.ascontiguousarray(array, dtype=DTYPE_TAGS[tag])
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<III", VERSION, tag, data.ndim))
        fh.write(struct.pack(f"<{data.ndim}Q", *data.shape))
        fh.write(data.tobytes(order="C"))
    logger.info("Wrote %s array %s to %s", data.dtype, data.shape, path)
    return path


def read_array(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    if raw[:4] != MAGIC:
        raise DimensionError(f"{path} is not an MCFA array file")
    version, tag, ndim = struct.unpack_from("<III", raw, 4)
    if version != VERSION or tag not in DTYPE_TAGS:
        raise DimensionError(f"unsupported MCFA version {version} or dtype tag {tag}")
    shape = struct.unpack_from(f"<{ndim}Q", raw, 16)
    offset = 16 + 8 * ndim
    return np.frombuffer(raw, dtype=DTYPE_TAGS[tag], offset=offset).reshape(shape).copy()


def write_pgm(path, image, vmin=None, vmax=None) -> Path:
    """8-bit binary PGM (P5) of a 2-D real image, linearly mapped from [vmin, vmax]."""
    image = np.asarray(image, dtype=float)
    if image.ndim == 1:
        image = image[None, :]
    if image.ndim != 2:
        raise DimensionError("PGM export needs a 1-D or 2-D image")
    lo = image.min() if vmin is None else vmin
    hi = image.max() if vmax is None else vmax
    scaled = np.zeros_like(image) if hi <= lo else (image - lo) / (hi - lo)
    pixels = np.clip(np.rint(255 * scaled), 0, 255).astype(np.uint8)
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("wb") as fh:
        fh.write(f"P5\n{pixels.shape[1]} {pixels.shape[0]}\n255\n".encode("ascii"))
        fh.write(pixels.tobytes())
    logger.info("Wrote image %s to %s", pixels.shape, path)
    return path


def read_pgm(path) -> np.ndarray:
    """Reads a P5 graymap written by :func:`write_pgm`, values scaled to [0, 1]."""
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos:pos + 1].isspace():
            pos += 1
        start = pos
        while not raw[pos:pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos])
    if tokens[0] != b"P5":
        raise DimensionError(f"{path} is not a binary PGM")
    width, height, maxval = (int(t) for t in tokens[1:])
    pixels = np.frombuffer(raw, dtype=np.uint8, offset=pos + 1, count=width * height)
    return pixels.reshape(height, width).astype(float) / maxval


def write_json(path, schema: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(schema.model_dump_json(indent=2))
    logger.info("Wrote %s to %s", type(schema).__name__, path)
    return path
