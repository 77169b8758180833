"""Space-time grid and field containers.

All tensors use (time, x, y) index order. Densities live on the centered
grid (k, i, j); the two momentum components live on staggered grids, with
``mx[k, i, j]`` holding the value at x = (i - 1/2) dx for i = 0..n_x and
``my[k, i, j]`` the value at y = (j - 1/2) dy for j = 0..n_y.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class SpaceTimeGrid:
    """Uniform discretization of the unit cube [0,1]^2 x [0,1]."""

    n_x: int
    n_y: int
    n_t: int

    def __post_init__(self):
        if min(self.n_x, self.n_y, self.n_t) < 2:
            raise ValueError(
                f"grid needs at least 2 points per axis, got "
                f"({self.n_x}, {self.n_y}, {self.n_t})"
            )

    @property
    def dx(self) -> float:
        return 1.0 / (self.n_x - 1)

    @property
    def dy(self) -> float:
        return 1.0 / (self.n_y - 1)

    @property
    def dt(self) -> float:
        return 1.0 / (self.n_t - 1)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n_t, self.n_x, self.n_y)

    @property
    def image_shape(self) -> tuple[int, int]:
        return (self.n_x, self.n_y)

    @property
    def mx_shape(self) -> tuple[int, int, int]:
        return (self.n_t, self.n_x + 1, self.n_y)

    @property
    def my_shape(self) -> tuple[int, int, int]:
        return (self.n_t, self.n_x, self.n_y + 1)

    @classmethod
    def for_image(cls, image: np.ndarray, n_t: int) -> "SpaceTimeGrid":
        n_x, n_y = np.shape(image)
        return cls(n_x, n_y, n_t)

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def zero_momentum(self) -> "MomentumField":
        return MomentumField(np.zeros(self.mx_shape), np.zeros(self.my_shape))


class MomentumField:
    """Staggered momentum pair with the zero-flux boundary pinned.

    Construction copies nothing but zeroes the boundary faces of the arrays
    it is given, so the invariant holds for every instance.
    """

    __slots__ = ("mx", "my")

    def __init__(self, mx: np.ndarray, my: np.ndarray):
        mx = np.asarray(mx, dtype=float)
        my = np.asarray(my, dtype=float)
        n_t, nxp1, n_y = mx.shape
        if my.shape != (n_t, nxp1 - 1, n_y + 1):
            raise ValueError(f"incompatible staggered shapes {mx.shape} and {my.shape}")
        mx[:, 0, :] = 0.0
        mx[:, -1, :] = 0.0
        my[:, :, 0] = 0.0
        my[:, :, -1] = 0.0
        self.mx = mx
        self.my = my

    @property
    def n_t(self) -> int:
        return self.mx.shape[0]

    def copy(self) -> "MomentumField":
        return MomentumField(self.mx.copy(), self.my.copy())

    def __add__(self, other: "MomentumField") -> "MomentumField":
        return MomentumField(self.mx + other.mx, self.my + other.my)

    def __sub__(self, other: "MomentumField") -> "MomentumField":
        return MomentumField(self.mx - other.mx, self.my - other.my)

    def __mul__(self, c: float) -> "MomentumField":
        return MomentumField(self.mx * c, self.my * c)

    __rmul__ = __mul__

    def dot(self, other: "MomentumField") -> float:
        return float(np.sum(self.mx * other.mx) + np.sum(self.my * other.my))

    def norm_sq(self) -> float:
        return self.dot(self)

    @classmethod
    def random(cls, grid: SpaceTimeGrid, rng: np.random.Generator) -> "MomentumField":
        return cls(rng.standard_normal(grid.mx_shape), rng.standard_normal(grid.my_shape))


@dataclass
class DualState:
    """Multipliers for the continuity constraint, data term and TV term."""

    lam: np.ndarray  # (n_t, n_x, n_y)
    eta: np.ndarray  # complex (n_x, n_y), zero off the sampling mask
    zeta: np.ndarray  # (2, n_x, n_y)

    @classmethod
    def zeros(cls, grid: SpaceTimeGrid) -> "DualState":
        return cls(
            lam=np.zeros(grid.shape),
            eta=np.zeros(grid.image_shape, dtype=complex),
            zeta=np.zeros((2,) + grid.image_shape),
        )

    def copy(self) -> "DualState":
        return DualState(self.lam.copy(), self.eta.copy(), self.zeta.copy())


def time_slice(rho: np.ndarray, k: int) -> np.ndarray:
    """Return the (n_x, n_y) density image at time index ``k`` (a copy)."""
    n_t = rho.shape[0]
    if not 0 <= k < n_t:
        raise IndexError(f"time index {k} out of range for n_t={n_t}")
    return rho[k].copy()


def total_mass(img: np.ndarray, grid: SpaceTimeGrid) -> float:
    return float(np.sum(img) * grid.dx * grid.dy)
