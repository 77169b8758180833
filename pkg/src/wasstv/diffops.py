"""Finite-difference operators on the centered/staggered space-time grid.

Every operator comes with its adjoint under the plain (unweighted) sum of
entrywise products, which is what the primal-dual iteration needs.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .grid import MomentumField, SpaceTimeGrid


def dt_forward(rho: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """One-sided differences at both ends of [0,1], centered in between."""
    dt = grid.dt
    out = np.empty_like(rho, dtype=float)
    out[0] = (rho[1] - rho[0]) / dt
    out[1:-1] = (rho[2:] - rho[:-2]) / (2 * dt)
    out[-1] = (rho[-1] - rho[-2]) / dt
    return out


@lru_cache(maxsize=None)
def _dt_matrix(n_t: int) -> np.ndarray:
    grid = SpaceTimeGrid(2, 2, n_t)
    return dt_forward(np.eye(n_t).reshape(n_t, n_t, 1), grid)[:, :, 0]


def dt_adjoint(lam: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    n_t, dt = grid.n_t, grid.dt
    if n_t < 4:
        # five-branch stencil below needs two distinct interior neighbours
        return np.tensordot(_dt_matrix(n_t).T, lam, axes=(1, 0))
    out = np.empty_like(lam, dtype=float)
    out[0] = (-lam[1] / 2 - lam[0]) / dt
    out[1] = (-lam[2] / 2 + lam[0]) / dt
    out[2:-2] = (-lam[3:-1] + lam[1:-3]) / (2 * dt)
    out[-2] = (-lam[-1] + lam[-3] / 2) / dt
    out[-1] = (lam[-1] + lam[-2] / 2) / dt
    return out


def divergence(m: MomentumField, grid: SpaceTimeGrid) -> np.ndarray:
    return (m.mx[:, 1:, :] - m.mx[:, :-1, :]) / grid.dx + (
        m.my[:, :, 1:] - m.my[:, :, :-1]
    ) / grid.dy


def div_adjoint(lam: np.ndarray, grid: SpaceTimeGrid) -> MomentumField:
    """Return div^T lam = -(d_x lam, d_y lam) on the staggered faces."""
    n_t, n_x, n_y = lam.shape
    mx = np.zeros((n_t, n_x + 1, n_y))
    my = np.zeros((n_t, n_x, n_y + 1))
    mx[:, 1:-1, :] = -(lam[:, 1:, :] - lam[:, :-1, :]) / grid.dx
    my[:, :, 1:-1] = -(lam[:, :, 1:] - lam[:, :, :-1]) / grid.dy
    return MomentumField(mx, my)


def grad_spatial(u: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Forward differences with a zero last row/column, stacked as (2, n_x, n_y)."""
    g = np.zeros((2,) + u.shape)
    g[0, :-1, :] = (u[1:, :] - u[:-1, :]) / grid.dx
    g[1, :, :-1] = (u[:, 1:] - u[:, :-1]) / grid.dy
    return g


def grad_adjoint(zeta: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    """Exact transpose of :func:`grad_spatial` (a negative backward divergence)."""
    zx, zy = zeta[0], zeta[1]
    out = np.zeros(zx.shape)
    out[:-1, :] -= zx[:-1, :] / grid.dx
    out[1:, :] += zx[:-1, :] / grid.dx
    out[:, :-1] -= zy[:, :-1] / grid.dy
    out[:, 1:] += zy[:, :-1] / grid.dy
    return out


def center_average(m: MomentumField) -> tuple[np.ndarray, np.ndarray]:
    """Average each staggered component onto the centered grid."""
    return (
        0.5 * (m.mx[:, 1:, :] + m.mx[:, :-1, :]),
        0.5 * (m.my[:, :, 1:] + m.my[:, :, :-1]),
    )
