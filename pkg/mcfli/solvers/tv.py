import numpy as np


def gradient(image) -> np.ndarray:
    """Forward differences along every axis, Neumann boundary; shape ``(ndim, *image.shape)``."""
    image = np.asarray(image, dtype=float)
    g = np.zeros((image.ndim,) + image.shape)
    for axis in range(image.ndim):
        diff = np.diff(image, axis=axis)
        index = [slice(None)] * image.ndim
        index[axis] = slice(0, -1)
        g[(axis,) + tuple(index)] = diff
    return g


def divergence(field) -> np.ndarray:
    """Negative adjoint of :func:`gradient`."""
    field = np.asarray(field, dtype=float)
    out = np.zeros(field.shape[1:])
    for axis in range(field.shape[0]):
        p = field[axis]
        index = [slice(None)] * p.ndim
        index[axis] = slice(0, -1)
        interior = np.zeros_like(p)
        interior[tuple(index)] = p[tuple(index)]
        # d_i = p_i - p_{i-1}, with p_{-1} = 0 and p_{n-1} treated as 0
        shifted = np.zeros_like(p)
        dst = [slice(None)] * p.ndim
        dst[axis] = slice(1, None)
        src = [slice(None)] * p.ndim
        src[axis] = slice(0, -1)
        shifted[tuple(dst)] = interior[tuple(src)]
        out += interior - shifted
    return out


def total_variation(image) -> float:
    """Isotropic total variation."""
    g = gradient(image)
    return float(np.sum(np.sqrt(np.sum(g * g, axis=0))))
