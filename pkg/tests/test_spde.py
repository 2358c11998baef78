from math import sqrt

import numpy as np
import pytest

from simlab.errors import InputError, PositivityLossError
from simlab.fields import Hermite
from simlab.spde import (
    SHEGrid,
    SpectralOU,
    brownian_profile,
    cole_hopf_field,
    line_autocovariance_hermite0,
    she_evolve,
    stationary_she,
    torus_coefficients,
)


def test_ou_stationary_variance_and_step():
    ou = SpectralOU(32.0, 128)
    c = torus_coefficients(Hermite(0), 32.0, 128)
    rng = np.random.default_rng(1)
    Y = ou.sample_stationary(rng, 20000)
    y0 = ou.pair(Y, c)
    target = ou.autocovariance(c, 0.0)
    assert target == pytest.approx(0.25, rel=1e-6)
    var = y0.var()
    se = var * sqrt(2 / y0.size)
    assert abs(var - target) < 4 * se
    y1 = ou.pair(ou.step(Y, 0.5, rng), c)
    cov = np.mean(y0 * y1)
    se = np.std(y0 * y1) / sqrt(y0.size)
    assert abs(cov - ou.autocovariance(c, 0.5)) < 4 * se


def test_torus_and_line_autocovariance_agree_on_a_large_torus():
    ou = SpectralOU(64.0, 512)
    c = torus_coefficients(Hermite(0), 64.0, 512)
    for t in (0.0, 0.3, 1.0):
        assert ou.autocovariance(c, t) == pytest.approx(line_autocovariance_hermite0(0.25, 1.0, t), rel=1e-6)


def test_ou_rejects_bad_input():
    with pytest.raises(InputError):
        SpectralOU(10.0, 0)
    with pytest.raises(InputError):
        SpectralOU(10.0, 4).step(np.zeros((1, 5), complex), 0.0, np.random.default_rng())


def test_she_stability_bound():
    with pytest.raises(InputError):
        SHEGrid(np.ones((1, 64)), 0.125, 8.0, dt=0.125**2 / 2)
    with pytest.raises(InputError):
        SHEGrid(np.ones((1, 60)), 0.125, 8.0)
    g = SHEGrid(np.ones((1, 64)), 0.125, 8.0)
    assert g.dt == pytest.approx(0.125**2 / 4)


def test_she_positivity_loss_is_reported():
    g = SHEGrid(np.ones((4, 64)), 0.125, 8.0, coupling=40.0)
    with pytest.raises(PositivityLossError):
        she_evolve(g, 1.0, np.random.default_rng(0))


def test_she_evolve_lands_on_end_time():
    g = SHEGrid(np.ones((2, 64)), 0.125, 8.0)
    she_evolve(g, 0.01, np.random.default_rng(0))
    assert g.time == pytest.approx(0.01, abs=1e-15)
    assert np.all(g.z > 0)


def test_brownian_profile_variance():
    h = brownian_profile(np.random.default_rng(2), 20000, 64, 0.25, 0.25)
    assert np.all(h[:, 32] == 0)
    v = h[:, 48].var()  # 16 cells = distance 4
    assert abs(v - 1.0) < 4 * v * sqrt(2 / 20000)


def test_cole_hopf_at_time_zero_recovers_the_profile():
    rng = np.random.default_rng(3)
    g = stationary_she(rng, 4000, 0.0625, 32.0, coupling=1.0)
    u = Hermite(0)
    field = cole_hopf_field(g, u)
    h0 = np.log(g.z) / g.exponent
    assert np.allclose(field, -(h0 @ u.grad(g.points)) * g.dx)
    # pairing a Brownian path of variance chi with u' gives variance chi <u, u>
    var = field.var()
    assert abs(var - 0.25) < 4 * var * sqrt(2 / field.size)
