"""Primal-dual solver for Benamou-Brenier + TV regularized reconstruction.

The template ``mu`` is pinned as the first time slice of a density path
``rho`` whose last slice is the reconstruction. The path and its momentum
``m`` are tied together by the continuity equation, enforced through the
multiplier ``lam``; the last slice is coupled to the k-space data (``eta``)
and to an isotropic TV term (``zeta``).
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Literal

import numpy as np

from . import transport
from .diffops import (
    center_average,
    div_adjoint,
    divergence,
    dt_adjoint,
    dt_forward,
    grad_adjoint,
    grad_spatial,
)
from .forward import KSpaceData, SamplingMask, fourier_adjoint, fourier_forward
from .grid import DualState, MomentumField, SpaceTimeGrid, total_mass

log = logging.getLogger(__name__)


class NonFiniteError(FloatingPointError):
    pass


@dataclass
class SolverConfig:
    alpha: float = 100.0
    beta: float = 0.001
    tau: float = 0.001
    sigma: float = 0.01
    n_t: int = 15
    max_iters: int = 5000
    rel_tol: float = 1e-6
    mode: Literal["reconstruct", "geodesic"] = "reconstruct"
    log_every: int = 100
    threads: int = 1

    def __post_init__(self):
        if self.mode == "reconstruct" and self.alpha <= 0:
            raise ValueError("alpha must be positive")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.tau <= 0 or self.sigma <= 0:
            raise ValueError("step sizes must be positive")
        if self.n_t < 2 or self.max_iters < 0 or self.rel_tol < 0 or self.log_every < 1:
            raise ValueError("invalid iteration controls")
        if self.mode not in ("reconstruct", "geodesic"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")


@dataclass
class IterationRecord:
    iter: int
    J: float
    bb: float
    fidelity: float
    tv: float
    mass_drift: float
    rel_change: float

    CSV_FIELDS = ("iter", "J", "bb", "fidelity", "tv", "mass_drift", "rel_change")

    def row(self) -> list:
        return [getattr(self, k) for k in self.CSV_FIELDS]


@dataclass
class SolverState:
    rho: np.ndarray
    m: MomentumField
    rho_bar: np.ndarray
    m_bar: MomentumField
    duals: DualState
    iter: int = 0
    history: list[IterationRecord] = field(default_factory=list)

    @property
    def reconstruction(self) -> np.ndarray:
        return self.rho[-1].copy()


# ---------------------------------------------------------------- pointwise

def project_linf_ball(zeta: np.ndarray, beta: float) -> np.ndarray:
    """Scale each pixel vector (zeta_x, zeta_y) back into the l2 ball of radius beta."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    if beta == 0:
        return np.zeros_like(zeta)
    norm = np.sqrt(zeta[0] ** 2 + zeta[1] ** 2)
    return zeta / np.maximum(1.0, norm / beta)


def _bisect_root(a, s, iters=200):
    """Largest root of x^2 (x - a) = s (s > 0) by bisection on [max(a,0), max(a,0) + s^(1/3)]."""
    lo = np.maximum(a, 0.0)
    hi = lo + np.cbrt(s)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        up = mid * mid * (mid - a) - s > 0
        hi = np.where(up, mid, hi)
        lo = np.where(up, lo, mid)
        if np.all(hi - lo <= 4 * np.finfo(float).eps * np.maximum(1.0, hi)):
            break
    return 0.5 * (lo + hi)


def rho_prox(rho_tilde, s, tau: float):
    """max(0, largest real root of (rho + tau)^2 (rho - rho_tilde) = s), elementwise.

    In x = rho + tau the cubic reads x^3 - a x^2 - s = 0 with a = rho_tilde + tau.
    The largest root exceeds tau exactly when tau^2 rho_tilde + s > 0; all
    other cells are clamped to 0. For s > 0 the depressed cubic has a single
    real root whenever that root can be positive, so Cardano's formula is
    used, followed by Newton polishing and a bisection fallback.
    """
    scalar = np.ndim(rho_tilde) == 0 and np.ndim(s) == 0
    rt = np.asarray(rho_tilde, dtype=float)
    s = np.asarray(s, dtype=float)
    rt, s = np.broadcast_arrays(rt, s)
    a = rt + tau
    positive = tau * tau * rt + s > 0
    out = np.zeros(rt.shape)

    zero_s = positive & (s == 0)
    out[zero_s] = rt[zero_s]

    idx = positive & (s > 0)
    if np.any(idx):
        ai, si = a[idx], s[idx]
        c = ai**3 / 27.0
        disc = si * (c + si / 4.0)
        one_root = disc > 0
        x = np.empty_like(ai)
        # A > 0 whenever disc > 0, so the second cube root is taken via A*B = (a^2/9)^3
        big = c + si / 2.0 + np.sqrt(np.where(one_root, disc, 0.0))
        cb = np.cbrt(np.where(one_root, big, 1.0))
        x = np.where(one_root, cb + ai * ai / (9.0 * cb) + ai / 3.0, np.maximum(ai, 0.0))
        for _ in range(3):
            fx = x * x * (x - ai) - si
            fp = x * (3.0 * x - 2.0 * ai)
            x = np.where(fp > 0, x - fx / np.where(fp > 0, fp, 1.0), x)
        res = np.abs(x * x * (x - ai) - si)
        scale = np.maximum.reduce([np.ones_like(ai), np.abs(ai) ** 3, si])
        bad = ~(res <= 1e-12 * scale) | (x < np.maximum(ai, 0.0))
        if np.any(bad):
            x[bad] = _bisect_root(ai[bad], si[bad])
        out[idx] = np.maximum(x - tau, 0.0)
    return float(out) if scalar else out


def momentum_update(m_tilde: MomentumField, rho_new: np.ndarray, tau: float) -> MomentumField:
    """Shrink each face momentum by the face density r: m = r m~ / (r + tau), r = mean of neighbours."""
    sx = rho_new[:, 1:, :] + rho_new[:, :-1, :]
    sy = rho_new[:, :, 1:] + rho_new[:, :, :-1]
    mx = np.zeros_like(m_tilde.mx)
    my = np.zeros_like(m_tilde.my)
    mx[:, 1:-1, :] = sx / (sx + 2 * tau) * m_tilde.mx[:, 1:-1, :]
    my[:, :, 1:-1] = sy / (sy + 2 * tau) * m_tilde.my[:, :, 1:-1]
    return MomentumField(mx, my)


# ---------------------------------------------------------------- iteration

def dual_update(state: SolverState, config: SolverConfig, f: KSpaceData | None, grid: SpaceTimeGrid) -> DualState:
    d = state.duals
    sig = config.sigma
    lam = d.lam + sig * (dt_forward(state.rho_bar, grid) + divergence(state.m_bar, grid))
    if config.mode == "geodesic":
        return DualState(lam, d.eta.copy(), d.zeta.copy())
    last = state.rho_bar[-1]
    k_last = fourier_forward(last, f.mask, workers=config.threads).values
    eta = (d.eta + sig * (k_last - f.values)) / (1.0 + sig / config.alpha)
    eta[~f.mask.keep] = 0.0
    zeta = project_linf_ball(d.zeta + sig * grad_spatial(last, grid), config.beta)
    return DualState(lam, eta, zeta)


def _prox_cells(rho_tilde, s, tau, threads):
    if threads == 1:
        return rho_prox(rho_tilde, s, tau)
    out = np.empty_like(rho_tilde)
    chunks = np.array_split(np.arange(rho_tilde.shape[0]), threads)

    def work(ks):
        if ks.size:
            out[ks[0] : ks[-1] + 1] = rho_prox(rho_tilde[ks[0] : ks[-1] + 1], s[ks[0] : ks[-1] + 1], tau)

    with ThreadPoolExecutor(threads) as pool:
        list(pool.map(work, chunks))
    return out


def primal_update(
    state: SolverState,
    duals: DualState,
    config: SolverConfig,
    f: KSpaceData | None,
    mu: np.ndarray,
    grid: SpaceTimeGrid,
    nu: np.ndarray | None = None,
) -> tuple[np.ndarray, MomentumField]:
    tau = config.tau
    m_tilde = state.m - tau * div_adjoint(duals.lam, grid)
    rho_tilde = state.rho - tau * dt_adjoint(duals.lam, grid)
    if config.mode == "reconstruct":
        eta_data = KSpaceData(duals.eta, f.mask)
        rho_tilde[-1] -= tau * (
            fourier_adjoint(eta_data, workers=config.threads) + grad_adjoint(duals.zeta, grid)
        )
    mbx, mby = center_average(m_tilde)
    # (tau/8)((m_{i+1/2} + m_{i-1/2})^2 + ...) written with the centered averages
    s = 0.5 * tau * (mbx * mbx + mby * mby)
    rho_new = _prox_cells(rho_tilde, s, tau, config.threads)
    # pin before the momentum step so face momenta see the densities they end up with
    rho_new[0] = mu
    if config.mode == "geodesic":
        rho_new[-1] = nu
    m_new = momentum_update(m_tilde, rho_new, tau)
    return rho_new, m_new


def objective(
    rho: np.ndarray,
    m: MomentumField,
    f: KSpaceData | None,
    config: SolverConfig,
    grid: SpaceTimeGrid,
) -> dict:
    """Energy terms of J = B + (alpha/2)||K rho_1 - f||^2 + beta TV(rho_1)."""
    bb = transport.bb_energy(rho, m, grid)
    fidelity = tv = 0.0
    if config.mode == "reconstruct":
        last = rho[-1]
        resid = fourier_forward(last, f.mask, workers=config.threads).values - f.values
        fidelity = 0.5 * config.alpha * float(np.sum(resid.real**2 + resid.imag**2))
        g = grad_spatial(last, grid)
        tv = config.beta * float(np.sum(np.sqrt(g[0] ** 2 + g[1] ** 2))) * grid.dx * grid.dy
    return {"J": bb + fidelity + tv, "bb": bb, "fidelity": fidelity, "tv": tv}


def operator_norm(grid: SpaceTimeGrid, mask: SamplingMask | None, iters: int = 20, seed: int = 0) -> float:
    """Power-iteration estimate of the norm of the stacked linear map (rho, m) -> (lam, eta, zeta)."""
    rng = np.random.default_rng(seed)
    rho = rng.standard_normal(grid.shape)
    m = MomentumField.random(grid, rng)
    est = 0.0
    for _ in range(iters):
        nrm = math.sqrt(np.sum(rho * rho) + m.norm_sq())
        rho, m = rho / nrm, m * (1.0 / nrm)
        lam = dt_forward(rho, grid) + divergence(m, grid)
        new_rho = dt_adjoint(lam, grid)
        if mask is not None:
            kk = fourier_forward(rho[-1], mask)
            new_rho[-1] += fourier_adjoint(kk) + grad_adjoint(grad_spatial(rho[-1], grid), grid)
        new_m = div_adjoint(lam, grid)
        est = math.sqrt(math.sqrt(np.sum(new_rho * new_rho) + new_m.norm_sq()))
        rho, m = new_rho, new_m
    return est


def _check_finite(it: int, **fields):
    for name, arr in fields.items():
        if not np.isfinite(np.sum(arr)):
            raise NonFiniteError(f"non-finite values in {name} at iteration {it}")


def _run(
    state: SolverState,
    config: SolverConfig,
    f: KSpaceData | None,
    mu: np.ndarray,
    grid: SpaceTimeGrid,
    nu: np.ndarray | None,
    callback: Callable[[SolverState], None] | None,
) -> SolverState:
    mask = f.mask if f is not None else None
    knorm = operator_norm(grid, mask)
    if config.tau * config.sigma * knorm**2 >= 1:
        log.warning(
            "tau*sigma*||K||^2 = %.3g >= 1 (||K|| ~ %.4g); iteration may diverge",
            config.tau * config.sigma * knorm**2,
            knorm,
        )
    for it in range(1, config.max_iters + 1):
        duals = dual_update(state, config, f, grid)
        rho_new, m_new = primal_update(state, duals, config, f, mu, grid, nu)
        _check_finite(it, rho=rho_new, mx=m_new.mx, my=m_new.my, lam=duals.lam)

        d_rho = rho_new - state.rho
        dm = m_new - state.m
        num = math.sqrt(np.sum(d_rho * d_rho) + dm.norm_sq())
        den = math.sqrt(np.sum(state.rho * state.rho) + state.m.norm_sq())
        rel_change = num / den if den > 0 else num

        state.rho_bar = 2 * rho_new - state.rho
        state.m_bar = 2 * m_new - state.m
        state.rho, state.m, state.duals, state.iter = rho_new, m_new, duals, it

        done = rel_change <= config.rel_tol or it == config.max_iters
        if it % config.log_every == 0 or done:
            terms = objective(state.rho, state.m, f, config, grid)
            drift = transport.mass_drift(transport.mass_profile(state.rho, grid))
            state.history.append(IterationRecord(it, rel_change=rel_change, mass_drift=drift, **terms))
            log.debug("iter %d J=%.6g rel_change=%.3g", it, terms["J"], rel_change)
            if callback is not None:
                callback(state)
        if done:
            break
    return state


def _initial_state(rho0: np.ndarray, grid: SpaceTimeGrid) -> SolverState:
    m0 = grid.zero_momentum()
    return SolverState(
        rho=rho0,
        m=m0,
        rho_bar=rho0.copy(),
        m_bar=m0.copy(),
        duals=DualState.zeros(grid),
    )


def reconstruct(
    f: KSpaceData,
    mu: np.ndarray,
    config: SolverConfig,
    grid: SpaceTimeGrid | None = None,
    callback: Callable[[SolverState], None] | None = None,
) -> tuple[SolverState, transport.TransportDiagnostics]:
    """Reconstruct the image behind ``f`` as the end point of a transport path from ``mu``."""
    mu = np.asarray(mu, dtype=float)
    grid = grid or SpaceTimeGrid.for_image(mu, config.n_t)
    if config.mode != "reconstruct":
        config = replace(config, mode="reconstruct")
    if np.any(mu < 0) or total_mass(mu, grid) <= 0:
        raise ValueError("template must be nonnegative with positive mass")
    rho0 = np.repeat(mu[None], grid.n_t, axis=0)
    state = _run(_initial_state(rho0, grid), config, f, mu, grid, None, callback)
    return state, transport.diagnostics(state.rho, state.m, grid)


def transport_geodesic(
    mu: np.ndarray,
    nu: np.ndarray,
    config: SolverConfig,
    grid: SpaceTimeGrid | None = None,
    callback: Callable[[SolverState], None] | None = None,
) -> tuple[SolverState, transport.TransportDiagnostics]:
    """Balanced dynamic transport between two pinned end slices."""
    mu = np.asarray(mu, dtype=float)
    nu = np.asarray(nu, dtype=float)
    grid = grid or SpaceTimeGrid.for_image(mu, config.n_t)
    m_mu, m_nu = total_mass(mu, grid), total_mass(nu, grid)
    if abs(m_mu - m_nu) > 1e-6 * m_mu:
        raise ValueError(f"endpoint masses differ: {m_mu:.9g} vs {m_nu:.9g}")
    config = replace(config, mode="geodesic", alpha=0.0, beta=0.0)
    t = np.linspace(0.0, 1.0, grid.n_t)[:, None, None]
    rho0 = (1 - t) * mu[None] + t * nu[None]
    state = _run(_initial_state(rho0, grid), config, None, mu, grid, nu, callback)
    return state, transport.diagnostics(state.rho, state.m, grid)
