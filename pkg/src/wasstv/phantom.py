"""Test images: Shepp-Logan, Gaussian blobs and mass-preserving warps."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.ndimage import map_coordinates

# Modified (Toft) Shepp-Logan table: intensity, semi-axis a (x), semi-axis b (y),
# center x0, center y0, rotation in degrees. Coordinates span [-1, 1].
SHEPP_LOGAN_ELLIPSES = np.array(
    [
        [1.0, 0.69, 0.92, 0.0, 0.0, 0.0],
        [-0.8, 0.6624, 0.8740, 0.0, -0.0184, 0.0],
        [-0.2, 0.1100, 0.3100, 0.22, 0.0, -18.0],
        [-0.2, 0.1600, 0.4100, -0.22, 0.0, 18.0],
        [0.1, 0.2100, 0.2500, 0.0, 0.35, 0.0],
        [0.1, 0.0460, 0.0460, 0.0, 0.1, 0.0],
        [0.1, 0.0460, 0.0460, 0.0, -0.1, 0.0],
        [0.1, 0.0460, 0.0230, -0.08, -0.605, 0.0],
        [0.1, 0.0230, 0.0230, 0.0, -0.606, 0.0],
        [0.1, 0.0230, 0.0460, 0.06, -0.605, 0.0],
    ]
)


def _ellipse_coords(n: int) -> tuple[np.ndarray, np.ndarray]:
    # pixel centers; axis 0 is x, axis 1 is y
    c = (2 * np.arange(n) + 1) / n - 1
    return np.meshgrid(c, c, indexing="ij")


def shepp_logan(n: int) -> np.ndarray:
    """n x n modified Shepp-Logan phantom with values in [0, 1]."""
    if n < 16:
        raise ValueError("Shepp-Logan needs n >= 16")
    x, y = _ellipse_coords(n)
    img = np.zeros((n, n))
    for rho, a, b, x0, y0, phi in SHEPP_LOGAN_ELLIPSES:
        ph = np.deg2rad(phi)
        xr = (x - x0) * np.cos(ph) + (y - y0) * np.sin(ph)
        yr = -(x - x0) * np.sin(ph) + (y - y0) * np.cos(ph)
        img[(xr / a) ** 2 + (yr / b) ** 2 <= 1.0] += rho
    # float sums such as 1 - 0.8 + 0.1 can leave 1e-17 noise
    img = np.round(img, 12)
    return np.clip(img, 0.0, 1.0)


def gaussian_blob(n: int, center: tuple[float, float], sigma_g: float, mass: float = 1.0) -> np.ndarray:
    """Isotropic Gaussian on the n x n unit-square grid, rescaled to ``mass``.

    Mass is measured as ``sum * dx * dy`` with dx = dy = 1/(n-1).
    """
    if sigma_g <= 0:
        raise ValueError("sigma_g must be positive")
    cx, cy = center
    if min(cx, cy, 1 - cx, 1 - cy) < 3 * sigma_g:
        raise ValueError(f"blob at {center} with sigma {sigma_g} is not inside the unit square")
    h = 1.0 / (n - 1)
    t = np.arange(n) * h
    x, y = np.meshgrid(t, t, indexing="ij")
    g = np.exp(-((x - cx) ** 2 + (y - cy) ** 2) / (2 * sigma_g**2))
    return g * (mass / (g.sum() * h * h))


@dataclass(frozen=True)
class DeformationSpec:
    """Sinusoidal displacement d(x, y) = (amp_x sin(2 pi fx y), amp_y sin(2 pi fy x))."""

    amp_x: float = 0.05
    amp_y: float = 0.05
    freq_x: int = 2
    freq_y: int = 2
    seed: int = 0

    def __post_init__(self):
        if abs(self.amp_x) > 0.2 or abs(self.amp_y) > 0.2:
            raise ValueError("warp amplitudes above 0.2 can fold the image over")


def warp_template(u: np.ndarray, spec: DeformationSpec) -> np.ndarray:
    """Backward-warp ``u`` by ``spec`` (bilinear, edge-clamped), keeping total mass."""
    u = np.asarray(u, dtype=float)
    if np.any(u < 0):
        raise ValueError("warp_template expects a nonnegative image")
    n_x, n_y = u.shape
    if spec.amp_x == 0 and spec.amp_y == 0:
        return u.copy()
    x = np.linspace(0.0, 1.0, n_x)[:, None]
    y = np.linspace(0.0, 1.0, n_y)[None, :]
    sx = x + spec.amp_x * np.sin(2 * np.pi * spec.freq_x * y)
    sy = y + spec.amp_y * np.sin(2 * np.pi * spec.freq_y * x)
    coords = np.stack(np.broadcast_arrays(sx * (n_x - 1), sy * (n_y - 1)))
    out = map_coordinates(u, coords, order=1, mode="nearest")
    total = out.sum()
    if total > 0:
        out *= u.sum() / total
    return out


def remap_intensity(u: np.ndarray, gamma: float = 1.0, invert: bool = False) -> np.ndarray:
    """Crude second-modality emulation: gamma curve, optional inversion inside the support."""
    v = np.clip(u, 0.0, None)
    peak = v.max()
    if peak > 0:
        v = (v / peak) ** gamma * peak
    if invert:
        support = u > 0
        v = np.where(support, peak - v + 0.05 * peak, 0.0)
    return v
