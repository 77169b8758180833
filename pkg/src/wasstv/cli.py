"""Command-line entry point: ``wasstv {mask,reconstruct,transport,metrics}``."""

from __future__ import annotations

import argparse
import csv
import logging
import math
import sys
from pathlib import Path

import numpy as np

from . import imageio
from .baseline import TvConfig, tv_reconstruct
from .forward import SamplingMask, fourier_forward, make_radial_mask, zero_fill_recon
from .grid import SpaceTimeGrid, total_mass
from .metrics import psnr, ssim
from .phantom import DeformationSpec, gaussian_blob, remap_intensity, shepp_logan, warp_template
from .solver import IterationRecord, SolverConfig, reconstruct, transport_geodesic
from .transport import w2_estimate

log = logging.getLogger("wasstv")

# defaults used when neither the command line nor a config file sets a value
DEFAULTS = {
    "size": 128,
    "spokes": 10,
    "alpha": 100.0,
    "beta": 0.001,
    "tau": 0.001,
    "sigma": 0.01,
    "alpha_tv": 0.001,
    "nt": 15,
    "iters": 5000,
    "tol": 1e-6,
    "method": "wtv",
    "image": "shepp_logan",
    "template": None,
    "warp": None,
    "remap": None,
    "mask": None,
    "out": "out",
    "seed": 0,
    "threads": 1,
    "log_every": 100,
    "renormalize": False,
}
TRANSPORT_DEFAULTS = {"tau": 0.3, "sigma": 1e-4, "iters": 8000}


class UsageError(Exception):
    pass


def _kv(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, text.split(",")):
        if "=" not in part:
            raise UsageError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def parse_warp(text: str, seed: int = 0) -> DeformationSpec:
    """``amp=0.05,freq=2`` or per-axis ``amp_x=..,amp_y=..,freq_x=..,freq_y=..``."""
    kv = _kv(text)
    amp = float(kv.pop("amp", 0.05))
    freq = int(kv.pop("freq", 2))
    spec = dict(amp_x=amp, amp_y=amp, freq_x=freq, freq_y=freq, seed=seed)
    for key in ("amp_x", "amp_y"):
        if key in kv:
            spec[key] = float(kv.pop(key))
    for key in ("freq_x", "freq_y"):
        if key in kv:
            spec[key] = int(kv.pop(key))
    if kv:
        raise UsageError(f"unknown warp keys: {sorted(kv)}")
    return DeformationSpec(**spec)


def load_source(text: str, size: int) -> np.ndarray:
    """A file path, ``shepp_logan[:n]`` or ``gaussian:cx,cy,sigma[,mass]``."""
    name, _, arg = text.partition(":")
    if name in ("shepp_logan", "shepp"):
        return shepp_logan(int(arg) if arg else size)
    if name in ("gaussian", "gauss"):
        vals = [float(v) for v in arg.split(",")]
        if len(vals) not in (3, 4):
            raise UsageError("gaussian needs cx,cy,sigma[,mass]")
        return gaussian_blob(size, (vals[0], vals[1]), vals[2], *vals[3:])
    path = Path(text)
    if not path.exists():
        raise UsageError(f"no such image file or generator: {text}")
    return imageio.read_image(path)


def read_config_file(path) -> dict:
    out = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}: bad config line {raw!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        out[k.replace("-", "_")] = v
    return out


def resolve(args: argparse.Namespace, defaults: dict) -> argparse.Namespace:
    """CLI flags > config file > defaults; config strings are coerced by the default's type."""
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    merged = {}
    for key, default in defaults.items():
        val = getattr(args, key, None)
        if val is None and key in cfg:
            val = cfg[key]
            if isinstance(default, bool):
                val = val.lower() in ("1", "true", "yes")
            elif default is not None:
                val = type(default)(val)
        merged[key] = default if val is None else val
    ns = argparse.Namespace(**vars(args))
    for k, v in merged.items():
        setattr(ns, k, v)
    return ns


# ---------------------------------------------------------------- commands

def cmd_mask(args) -> int:
    a = resolve(args, DEFAULTS)
    if a.spokes < 1 or a.size < 4:
        raise UsageError("need --size >= 4 and --spokes >= 1")
    mask = make_radial_mask(a.size, a.size, a.spokes)
    out = Path(a.out)
    name = out.name if out.suffix == ".txt" else "mask.txt"
    with imageio.AtomicWriter(out.parent if out.suffix == ".txt" else out) as w:
        mask.save(w.path(name))
    print(f"rate={mask.rate:.6f} ({100 * mask.rate:.2f}%) spokes={a.spokes}")
    return 0


def _write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def _fmt(v: float) -> str:
    return repr(round(float(v), 10)) if math.isfinite(v) else ("inf" if v > 0 else "-inf")


def _build_template(a, truth: np.ndarray, grid: SpaceTimeGrid) -> np.ndarray:
    if a.template and a.warp:
        raise UsageError("give either --template or --warp, not both")
    if a.template:
        tmpl = load_source(a.template, truth.shape[0])
    else:
        tmpl = warp_template(truth, parse_warp(a.warp or "amp=0.05,freq=2", a.seed))
    if a.remap:
        kv = _kv(a.remap)
        tmpl = remap_intensity(tmpl, float(kv.get("gamma", 1.0)), kv.get("invert", "0") in ("1", "true"))
        a.renormalize = True
    if tmpl.shape != truth.shape:
        raise UsageError(f"template shape {tmpl.shape} differs from image shape {truth.shape}")
    m_img, m_tmpl = total_mass(truth, grid), total_mass(tmpl, grid)
    if a.renormalize and m_tmpl > 0:
        tmpl = tmpl * (m_img / m_tmpl)
    elif abs(m_img - m_tmpl) > 1e-6 * m_img:
        raise UsageError(
            f"template mass {m_tmpl:.6g} != image mass {m_img:.6g}; the transport prior "
            "conserves mass, so the template must be renormalized (pass --renormalize)"
        )
    return tmpl


def cmd_reconstruct(args) -> int:
    a = resolve(args, DEFAULTS)
    truth = load_source(a.image, a.size)
    n_x, n_y = truth.shape
    grid = SpaceTimeGrid(n_x, n_y, a.nt)
    if a.mask:
        mask = SamplingMask.load(a.mask)
        if mask.shape != truth.shape:
            raise UsageError(f"mask shape {mask.shape} differs from image shape {truth.shape}")
    else:
        if a.spokes < 1:
            raise UsageError("--spokes must be >= 1")
        mask = make_radial_mask(n_x, n_y, a.spokes)
    f = fourier_forward(truth, mask, workers=a.threads)  # noise-free data
    log.info("sampling rate %.2f%%", 100 * mask.rate)

    out = Path(a.out)
    with imageio.AtomicWriter(out) as w:
        history: list[IterationRecord] = []
        mass_drift = bb = float("nan")
        if a.method == "zerofill":
            recon = zero_fill_recon(f)
        elif a.method == "tv":
            cfg = TvConfig(alpha_tv=a.alpha_tv, max_iters=a.iters, rel_tol=a.tol, log_every=a.log_every, threads=a.threads)
            recon = tv_reconstruct(f, cfg, grid, history=history)
            bb = 0.0
        elif a.method == "wtv":
            tmpl = _build_template(a, truth, grid)
            cfg = SolverConfig(
                alpha=a.alpha, beta=a.beta, tau=a.tau, sigma=a.sigma, n_t=a.nt,
                max_iters=a.iters, rel_tol=a.tol, log_every=a.log_every, threads=a.threads,
            )
            state, diag = reconstruct(f, tmpl, cfg, grid)
            history = state.history
            recon = state.reconstruction
            mass_drift, bb = diag.mass_drift, diag.bb_energy
            imageio.write_f64(w.path("template.f64"), tmpl)
            for k in range(grid.n_t):
                imageio.write_f64(w.path(f"density/rho_{k:03d}.f64"), state.rho[k])
        else:
            raise UsageError(f"unknown method {a.method!r}")

        p, s = psnr(recon, truth), ssim(recon, truth)
        if a.method != "zerofill":
            imageio.write_f64(w.path("reconstruction.f64"), recon)
            imageio.write_pgm(w.path("reconstruction.pgm"), recon)
            _write_csv(w.path("convergence.csv"), IterationRecord.CSV_FIELDS, [h.row() for h in history])
        _write_csv(
            w.path("quality.csv"),
            ["method", "psnr_db", "ssim", "mass_drift", "bb_energy"],
            [[a.method, _fmt(p), _fmt(s), _fmt(mass_drift), _fmt(bb)]],
        )
    print(f"{a.method},{_fmt(p)},{_fmt(s)}")
    return 0


def cmd_transport(args) -> int:
    a = resolve(args, {**DEFAULTS, **TRANSPORT_DEFAULTS})
    mu = load_source(args.source, a.size)
    nu = load_source(args.target, a.size)
    if mu.shape != nu.shape:
        raise UsageError(f"shape mismatch {mu.shape} vs {nu.shape}")
    grid = SpaceTimeGrid(*mu.shape, a.nt)
    cfg = SolverConfig(tau=a.tau, sigma=a.sigma, n_t=a.nt, max_iters=a.iters, rel_tol=a.tol,
                       log_every=a.log_every, threads=a.threads)
    try:
        state, diag = transport_geodesic(mu, nu, cfg, grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    w2 = w2_estimate(state.rho, state.m, grid)
    with imageio.AtomicWriter(a.out) as w:
        for k in range(grid.n_t):
            imageio.write_f64(w.path(f"geodesic/rho_{k:03d}.f64"), state.rho[k])
        _write_csv(w.path("convergence.csv"), IterationRecord.CSV_FIELDS, [h.row() for h in state.history])
        _write_csv(
            w.path("transport.csv"),
            ["bb_energy", "w2_estimate", "mass_drift", "iters"],
            [[_fmt(diag.bb_energy), _fmt(w2), _fmt(diag.mass_drift), state.iter]],
        )
    print(f"bb_energy={_fmt(diag.bb_energy)} w2_estimate={_fmt(w2)}")
    return 0


def cmd_metrics(args) -> int:
    u = load_source(args.image_a, DEFAULTS["size"])
    ref = load_source(args.image_b, DEFAULTS["size"])
    if u.shape != ref.shape:
        raise UsageError(f"shape mismatch: {u.shape} vs {ref.shape}")
    print(f"{_fmt(psnr(u, ref))},{_fmt(ssim(u, ref))}")
    return 0


# ---------------------------------------------------------------- parser

def _common(p: argparse.ArgumentParser) -> None:
    # every default is None so that config-file values can fill the gaps
    p.add_argument("--config", help="file of key=value lines (CLI flags take precedence)")
    p.add_argument("--size", type=int)
    p.add_argument("--out")
    p.add_argument("--seed", type=int)
    p.add_argument("--threads", type=int)


def _solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tau", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--nt", type=int)
    p.add_argument("--iters", type=int)
    p.add_argument("--tol", type=float)
    p.add_argument("--log-every", dest="log_every", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wasstv", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("mask", help="write a radial sampling mask")
    _common(p)
    p.add_argument("--spokes", type=int)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("reconstruct", help="simulate data and reconstruct")
    _common(p)
    _solver_flags(p)
    p.add_argument("--method", choices=["zerofill", "tv", "wtv"])
    p.add_argument("--spokes", type=int)
    p.add_argument("--alpha", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--alpha-tv", dest="alpha_tv", type=float)
    p.add_argument("--image")
    p.add_argument("--template")
    p.add_argument("--warp", help="amp=..,freq=.. (default amp=0.05,freq=2)")
    p.add_argument("--remap", help="gamma=<g>,invert=<0|1>")
    p.add_argument("--renormalize", action="store_true", default=None)
    p.add_argument("--mask")
    p.set_defaults(func=cmd_reconstruct)

    p = sub.add_parser("transport", help="transport geodesic between two images")
    _common(p)
    _solver_flags(p)
    p.add_argument("source")
    p.add_argument("target")
    p.set_defaults(func=cmd_transport)

    p = sub.add_parser("metrics", help="print psnr_db,ssim of IMAGE_A against IMAGE_B")
    p.add_argument("image_a")
    p.add_argument("image_b")
    p.set_defaults(func=cmd_metrics)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"wasstv {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
