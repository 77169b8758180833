import numpy as np
import pytest

from wasstv.grid import DualState, MomentumField, SpaceTimeGrid, time_slice, total_mass


def test_spacings_cover_unit_interval():
    g = SpaceTimeGrid(5, 9, 15)
    assert g.dx * (g.n_x - 1) == pytest.approx(1.0, abs=1e-15)
    assert g.dy * (g.n_y - 1) == pytest.approx(1.0, abs=1e-15)
    assert g.dt == pytest.approx(1 / 14)


@pytest.mark.parametrize("shape", [(1, 4, 4), (4, 1, 4), (4, 4, 1)])
def test_grid_rejects_degenerate_axes(shape):
    with pytest.raises(ValueError):
        SpaceTimeGrid(*shape)


def test_time_slice():
    g = SpaceTimeGrid(4, 3, 15)
    rho = np.full(g.shape, 3.0)
    assert np.all(time_slice(rho, 7) == 3.0)
    ramp = np.broadcast_to(np.arange(15.0)[:, None, None], g.shape).copy()
    for k in range(15):
        assert np.all(time_slice(ramp, k) == k)
    with pytest.raises(IndexError):
        time_slice(rho, 15)
    with pytest.raises(IndexError):
        time_slice(rho, -1)


def test_time_slice_roundtrip_is_bit_exact(rng):
    rho = rng.random((6, 5, 4))
    copy = rho.copy()
    for k in range(6):
        copy[k] = time_slice(rho, k)
    assert np.array_equal(copy, rho)


def test_total_mass():
    assert total_mass(np.ones((3, 3)), SpaceTimeGrid(3, 3, 2)) == pytest.approx(2.25)
    assert total_mass(np.zeros((3, 3)), SpaceTimeGrid(3, 3, 2)) == 0.0
    img = np.zeros((5, 5))
    img[1, 3] = 4.0
    assert total_mass(img, SpaceTimeGrid(5, 5, 2)) == pytest.approx(0.25)


def test_momentum_shapes_and_zero_flux(rng):
    g = SpaceTimeGrid(6, 5, 4)
    m = MomentumField.random(g, rng)
    assert m.mx.size == (g.n_x + 1) * g.n_y * g.n_t
    assert m.my.size == g.n_x * (g.n_y + 1) * g.n_t
    for face in (m.mx[:, 0], m.mx[:, -1], m.my[:, :, 0], m.my[:, :, -1]):
        assert np.all(face == 0)
    # arithmetic keeps the invariant
    s = 2.0 * m + m
    assert np.all(s.mx[:, 0] == 0) and np.all(s.my[:, :, -1] == 0)


def test_momentum_shape_mismatch():
    with pytest.raises(ValueError):
        MomentumField(np.zeros((2, 5, 4)), np.zeros((2, 4, 4)))


def test_dual_zeros():
    d = DualState.zeros(SpaceTimeGrid(4, 5, 3))
    assert d.lam.shape == (3, 4, 5)
    assert d.eta.dtype == complex and d.eta.shape == (4, 5)
    assert d.zeta.shape == (2, 4, 5)
