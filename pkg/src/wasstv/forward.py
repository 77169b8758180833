"""Undersampled Fourier measurements: radial masks, K, K^T and zero filling."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
import scipy.fft


@dataclass(frozen=True)
class SamplingMask:
    keep: np.ndarray  # bool (n_x, n_y), DC at index (0, 0)
    n_spokes: int

    @property
    def rate(self) -> float:
        return float(np.count_nonzero(self.keep)) / self.keep.size

    @property
    def shape(self) -> tuple[int, int]:
        return self.keep.shape

    @classmethod
    def full(cls, n_x: int, n_y: int) -> "SamplingMask":
        return cls(np.ones((n_x, n_y), dtype=bool), 0)

    def save(self, path: str | Path) -> None:
        n_x, n_y = self.keep.shape
        lines = [f"mask {n_x} {n_y} {self.n_spokes} {self.rate:.10g}"]
        lines += ["".join("1" if v else "0" for v in row) for row in self.keep]
        Path(path).write_text("\n".join(lines) + "\n")

    @classmethod
    def load(cls, path: str | Path) -> "SamplingMask":
        header, *rows = Path(path).read_text().split()
        if header != "mask":
            raise ValueError(f"{path}: not a mask file")
        n_x, n_y, n_spokes = (int(v) for v in rows[:3])
        rows = rows[4:]
        if len(rows) != n_x or any(len(r) != n_y for r in rows):
            raise ValueError(f"{path}: body does not match header size {n_x}x{n_y}")
        keep = np.array([[c == "1" for c in r] for r in rows], dtype=bool)
        return cls(keep, n_spokes)


@dataclass
class KSpaceData:
    values: np.ndarray  # complex (n_x, n_y), zero off the mask
    mask: SamplingMask


def make_radial_mask(n_x: int, n_y: int, n_spokes: int) -> SamplingMask:
    """Equispaced radial spokes through the k-space center.

    A frequency pixel is kept when its center lies within half a pixel of
    one of the lines at angles ``(s + 1/2) * pi / n_spokes``. The pattern is built
    in centered coordinates, closed under point reflection (so spokes of
    even-sized grids stay centrally symmetric after wrap-around) and then
    shifted so that DC sits at index (0, 0).
    """
    if n_spokes < 1:
        raise ValueError("n_spokes must be >= 1")
    if n_x < 4 or n_y < 4:
        raise ValueError("mask needs n_x, n_y >= 4")
    px = np.arange(n_x)[:, None] - n_x // 2
    py = np.arange(n_y)[None, :] - n_y // 2
    keep = np.zeros((n_x, n_y), dtype=bool)
    for s in range(n_spokes):
        # half-step offset: no spoke is axis-aligned, which matches the
        # published 128/196-pixel rates better than starting at angle 0
        theta = (s + 0.5) * np.pi / n_spokes
        dist = np.abs(-np.sin(theta) * px + np.cos(theta) * py)
        keep |= dist <= 0.5 + 1e-12
    keep = np.fft.ifftshift(keep)
    keep |= _point_reflect(keep)
    return SamplingMask(keep, n_spokes)


def _point_reflect(a: np.ndarray) -> np.ndarray:
    return np.roll(a[::-1, ::-1], 1, axis=(0, 1))


def fourier_forward(u: np.ndarray, mask: SamplingMask, workers: int = 1) -> KSpaceData:
    """Unitary 2-D DFT of ``u`` restricted to the mask."""
    values = scipy.fft.fft2(u, norm="ortho", workers=workers)
    values[~mask.keep] = 0.0
    return KSpaceData(values, mask)


def fourier_adjoint(f: KSpaceData, workers: int = 1) -> np.ndarray:
    """Real part of the unitary inverse DFT; adjoint of :func:`fourier_forward`."""
    values = np.where(f.mask.keep, f.values, 0.0)
    return scipy.fft.ifft2(values, norm="ortho", workers=workers).real


def zero_fill_recon(f: KSpaceData) -> np.ndarray:
    return fourier_adjoint(f)
