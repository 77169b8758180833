"""Image files: 16-bit binary PGM and raw little-endian float64 with a text header.

Writes go through :class:`AtomicWriter`, which stages every file next to
its destination and only renames once the whole batch has been produced.
"""

from __future__ import annotations

import os
from pathlib import Path

import numpy as np


def write_f64(path, img: np.ndarray) -> None:
    img = np.asarray(img, dtype="<f8")
    n_x, n_y = img.shape
    with open(path, "wb") as fh:
        fh.write(f"f64 {n_x} {n_y}\n".encode())
        fh.write(img.tobytes(order="C"))


def read_f64(path) -> np.ndarray:
    with open(path, "rb") as fh:
        header = fh.readline().decode().split()
        if len(header) != 3 or header[0] != "f64":
            raise ValueError(f"{path}: missing 'f64 <n_x> <n_y>' header")
        n_x, n_y = int(header[1]), int(header[2])
        data = np.frombuffer(fh.read(), dtype="<f8")
    if data.size != n_x * n_y:
        raise ValueError(f"{path}: expected {n_x * n_y} values, found {data.size}")
    return data.reshape(n_x, n_y).astype(float)


def write_pgm(path, img: np.ndarray) -> None:
    """P5 with maxval 65535; [0, 1] maps linearly, values outside are clipped."""
    img = np.asarray(img, dtype=float)
    n_x, n_y = img.shape
    q = np.round(np.clip(img, 0.0, 1.0) * 65535).astype(">u2")
    with open(path, "wb") as fh:
        # PGM is width x height; rows of the file are our x index
        fh.write(f"P5\n{n_y} {n_x}\n65535\n".encode())
        fh.write(q.tobytes())


def read_pgm(path) -> np.ndarray:
    raw = Path(path).read_bytes()
    tokens = []
    pos = 0
    while len(tokens) < 4:
        while raw[pos : pos + 1].isspace():
            pos += 1
        if raw[pos : pos + 1] == b"#":
            pos = raw.index(b"\n", pos) + 1
            continue
        start = pos
        while not raw[pos : pos + 1].isspace():
            pos += 1
        tokens.append(raw[start:pos].decode())
    pos += 1
    magic, width, height, maxval = tokens[0], int(tokens[1]), int(tokens[2]), int(tokens[3])
    if magic != "P5":
        raise ValueError(f"{path}: only binary P5 PGM is supported")
    dtype = ">u2" if maxval > 255 else "u1"
    data = np.frombuffer(raw, dtype=dtype, count=width * height, offset=pos)
    return data.reshape(height, width).astype(float) / maxval


def read_image(path) -> np.ndarray:
    path = Path(path)
    with open(path, "rb") as fh:
        head = fh.read(3)
    if head.startswith(b"P5"):
        return read_pgm(path)
    if head == b"f64":
        return read_f64(path)
    raise ValueError(f"{path}: unrecognised image format (expected P5 PGM or f64)")


class AtomicWriter:
    """Collect output files and publish them together, or not at all."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self._staged: list[tuple[Path, Path]] = []

    def path(self, name: str) -> Path:
        final = self.out_dir / name
        final.parent.mkdir(parents=True, exist_ok=True)
        tmp = final.with_name(f".{final.name}.partial")
        self._staged.append((tmp, final))
        return tmp

    def commit(self) -> list[Path]:
        for tmp, final in self._staged:
            os.replace(tmp, final)
        done = [final for _, final in self._staged]
        self._staged.clear()
        return done

    def abort(self) -> None:
        for tmp, _ in self._staged:
            tmp.unlink(missing_ok=True)
        self._staged.clear()

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        if exc_type is None:
            self.commit()
        else:
            self.abort()
        return False
