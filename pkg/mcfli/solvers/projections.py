import numpy as np

from mcfli.exceptions import DimensionError


def soft_threshold(v, threshold: float) -> np.ndarray:
    """Proximal operator of threshold * ||.||_1."""
    v = np.asarray(v, dtype=float)
    return np.sign(v) * np.maximum(np.abs(v) - threshold, 0.0)


def _simplex_threshold(u: np.ndarray, radius: float) -> float:
    """Threshold theta with sum(max(u - theta, 0)) = radius, for u >= 0 with sum(u) > radius."""
    # stable sort keeps the choice of active set deterministic under ties
    s = np.sort(u, kind="stable")[::-1]
    cssv = np.cumsum(s)
    rho = np.nonzero(s * np.arange(1, s.size + 1) > (cssv - radius))[0][-1]
    return float(cssv[rho] - radius) / (rho + 1)


def project_l1_ball(v, radius: float) -> np.ndarray:
    """Euclidean projection onto {w : ||w||_1 <= radius}

    Parameters
    ----------
    v : (n,) numpy array
        vector to project
    radius : float
        radius of the l1 ball, zero projects to the origin

    Returns
    -------
    w : (n,) numpy array
        projection of v

    Notes
    -----
    Sort-based reduction to the simplex, O(n log n).
    """
    v = np.asarray(v, dtype=float)
    if v.ndim != 1:
        raise DimensionError("project_l1_ball expects a vector")
    if radius < 0:
        raise ValueError(f"radius must be nonnegative, got {radius}")
    if radius == 0:
        return np.zeros_like(v)
    u = np.abs(v)
    if u.sum() <= radius:
        return v.copy()
    return soft_threshold(v, _simplex_threshold(u, radius))


def project_l1_ball_bisection(v, radius: float, iterations: int = 200) -> np.ndarray:
    """Reference projection: bisection on the soft threshold."""
    v = np.asarray(v, dtype=float)
    if radius <= 0:
        return np.zeros_like(v)
    u = np.abs(v)
    if u.sum() <= radius:
        return v.copy()
    lo, hi = 0.0, float(u.max())
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        if np.maximum(u - mid, 0.0).sum() > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo <= np.finfo(float).eps * max(hi, 1.0):
            break
    return soft_threshold(v, 0.5 * (lo + hi))


def project_centered_l1_ball(v, center, radius: float) -> np.ndarray:
    """Projection onto {w : ||w - center||_1 <= radius}."""
    center = np.asarray(center, dtype=float)
    return center + project_l1_ball(np.asarray(v, dtype=float) - center, radius)


def project_psd(H) -> np.ndarray:
    """Projection of a Hermitian matrix onto the PSD cone (negative eigenvalues clipped)."""
    H = np.asarray(H, dtype=complex)
    H = 0.5 * (H + H.conj().T)
    eigenvalues, vectors = np.linalg.eigh(H)
    clipped = np.maximum(eigenvalues, 0.0)
    return (vectors * clipped) @ vectors.conj().T


def project_nonnegative(v) -> np.ndarray:
    return np.maximum(np.asarray(v, dtype=float), 0.0)


def project_l2_inf_ball(q, radius: float) -> np.ndarray:
    """Pixelwise projection of a gradient field ``(dim, ...)`` onto the l2 ball of ``radius``."""
    magnitude = np.sqrt(np.sum(q * q, axis=0))
    return q / np.maximum(1.0, magnitude / radius)
