"""PSNR and global (single-window) SSIM."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C1 = 0.01**2
C2 = 0.03**2


@dataclass
class QualityReport:
    psnr_db: float
    ssim: float


def _check(u, ref):
    u = np.asarray(u, dtype=float)
    ref = np.asarray(ref, dtype=float)
    if u.shape != ref.shape:
        raise ValueError(f"shape mismatch: {u.shape} vs {ref.shape}")
    return u, ref


def psnr(u, ref, channels: int = 1) -> float:
    """10 log10(M N / ||u - ref||^2) for unit peak intensity; inf for identical images."""
    u, ref = _check(u, ref)
    err = float(np.sum((u - ref) ** 2))
    if err == 0.0:
        return float("inf")
    return 10.0 * np.log10(channels * u.size / err)


def ssim(u, ref, c1: float = C1, c2: float = C2) -> float:
    u, ref = _check(u, ref)
    if c1 <= 0 or c2 <= 0:
        raise ValueError("c1 and c2 must be positive")
    mu_u, mu_r = u.mean(), ref.mean()
    du, dr = u - mu_u, ref - mu_r
    var_u, var_r = np.mean(du * du), np.mean(dr * dr)
    cov = np.mean(du * dr)
    num = (2 * mu_u * mu_r + c1) * (2 * cov + c2)
    den = (mu_u**2 + mu_r**2 + c1) * (var_u + var_r + c2)
    return float(num / den)


def quality(u, ref) -> QualityReport:
    return QualityReport(psnr(u, ref), ssim(u, ref))
