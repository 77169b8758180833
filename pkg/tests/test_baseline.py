import numpy as np
import pytest

from wasstv.baseline import TvConfig, stacked_norm, total_variation, tv_objective, tv_reconstruct
from wasstv.forward import SamplingMask, fourier_forward, make_radial_mask, zero_fill_recon
from wasstv.grid import SpaceTimeGrid
from wasstv.metrics import psnr
from wasstv.phantom import shepp_logan


def test_total_variation_examples():
    g = SpaceTimeGrid(4, 4, 2)
    assert total_variation(np.ones((4, 4)), g) == 0
    step = np.zeros((4, 4))
    step[2:] = 1.0
    # one jump of height 1 along each of the 4 columns, no area weight
    assert total_variation(step, g) == pytest.approx(4 / g.dx)


def test_stacked_norm_bounds():
    g = SpaceTimeGrid(16, 16, 2)
    full = SamplingMask.full(16, 16)
    est = stacked_norm(g, full)
    grad_only = np.sqrt(8) / g.dx
    # ||K|| = 1 and ||grad|| <= sqrt(8)/h
    assert grad_only * 0.9 < est <= np.sqrt(1 + grad_only**2) * (1 + 1e-9)


def test_tv_config_validation():
    with pytest.raises(ValueError):
        TvConfig(alpha_tv=0)
    with pytest.raises(ValueError):
        TvConfig(tau=-1.0)


def test_tv_beats_zero_fill_and_decreases_objective():
    n = 48
    truth = shepp_logan(n)
    g = SpaceTimeGrid(n, n, 2)
    mask = make_radial_mask(n, n, 12)
    f = fourier_forward(truth, mask)
    zf = zero_fill_recon(f)
    history = []
    u = tv_reconstruct(f, TvConfig(alpha_tv=3e-4, max_iters=600, log_every=100), g, history)
    assert psnr(u, truth) > psnr(zf, truth)
    assert tv_objective(u, f, 3e-4, g) < tv_objective(zf, f, 3e-4, g)
    assert [h.iter for h in history][:2] == [100, 200]
    assert all(h.bb == 0 for h in history)


def test_tv_full_mask_small_weight_returns_data():
    n = 16
    truth = shepp_logan(n)
    f = fourier_forward(truth, SamplingMask.full(n, n))
    u = tv_reconstruct(f, TvConfig(alpha_tv=1e-9, max_iters=50))
    assert np.abs(u - truth).max() < 1e-6
