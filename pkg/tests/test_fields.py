from math import pi, sqrt

import numpy as np
import pytest
from scipy.integrate import quad

from simlab.dynamics import run
from simlab.errors import InputError
from simlab.fields import (
    CutoffLogistic,
    Hermite,
    Primitive,
    block_length,
    block_quadratic,
    energy_n,
    height_field,
    parse_test_function,
    quadratic_integrand,
    ring_grad,
    ring_lap,
    summation_by_parts_residual,
)
from simlab.fields.testfunctions import Shifted, logistic
from simlab.lattice import ModelSpec


def inner(f, g, r=30):
    return quad(lambda x: float(f(np.array([x]))[0] * g(np.array([x]))[0]), -r, r, limit=400)[0]


@pytest.mark.parametrize("j", range(5))
def test_hermite_orthonormal(j):
    for k in range(5):
        want = 1.0 if j == k else 0.0
        assert inner(Hermite(j).value, Hermite(k).value) == pytest.approx(want, abs=1e-9)


@pytest.mark.parametrize("ell", [0, 1, 2, 5])
def test_hermite_derivatives_match_finite_differences(ell):
    u = Hermite(ell)
    x = np.linspace(-6, 6, 37)
    h = 1e-4
    fd1 = (u.value(x + h) - u.value(x - h)) / (2 * h)
    fd2 = (u.value(x + h) - 2 * u.value(x) + u.value(x - h)) / h**2
    assert np.allclose(u.grad(x), fd1, atol=1e-7)
    assert np.allclose(u.lap(x), fd2, atol=1e-5)


@pytest.mark.parametrize("ell", [0, 1, 3])
def test_hermite_energy_closed_form(ell):
    u = Hermite(ell)
    assert u.energy() == pytest.approx((2 * ell + 1) / 4)
    assert inner(u.grad, u.grad) == pytest.approx(u.energy(), rel=1e-8)


@pytest.mark.parametrize("ell", [0, 1, 2, 4])
def test_hermite_primitive_and_mass(ell):
    u = Hermite(ell)
    x = np.linspace(-5, 5, 21)
    h = 1e-5
    fd = (u.primitive(x + h) - u.primitive(x - h)) / (2 * h)
    assert np.allclose(fd, u.value(x), atol=1e-8)
    assert abs(float(u.primitive(np.array([-40.0]))[0])) < 1e-12
    m = quad(lambda y: float(u.value(np.array([y]))[0]), -40, 40, limit=400)[0]
    assert u.mass == pytest.approx(m, abs=1e-10)
    assert float(u.primitive(np.array([40.0]))[0]) == pytest.approx(m, abs=1e-10)


def test_mass_of_lowest_hermite():
    assert Hermite(0).mass == pytest.approx((2 * pi) ** -0.25 * 2 * sqrt(pi))


def test_discrete_energy_converges():
    u = Hermite(2)
    errs = [abs(energy_n(u, n) - u.energy()) for n in (8, 16, 32)]
    assert errs[0] > errs[1] > errs[2]
    assert errs[2] < 1e-2


def test_cutoff_logistic_shape():
    u = CutoffLogistic(4.0)
    x = np.array([-3.0, -0.5, 0.0])
    assert np.allclose(u.value(x), logistic(x))
    assert np.all(u.value(np.array([4.0, 4.5, 10.0])) == 0)
    y = np.linspace(0.2, 3.8, 13)
    h = 1e-5
    fd = (u.value(y + h) - u.value(y - h)) / (2 * h)
    assert np.allclose(u.grad(y), fd, atol=1e-6)


def test_grammar():
    assert parse_test_function("hermite:3").ell == 3
    assert isinstance(parse_test_function("FM:8"), CutoffLogistic)
    assert isinstance(parse_test_function("primitive:hermite:2"), Primitive)
    s = parse_test_function("shift:1.5:hermite:0")
    assert isinstance(s, Shifted)
    assert float(s.value(np.array([1.5]))[0]) == pytest.approx(float(Hermite(0).value(np.array([0.0]))[0]))
    assert parse_test_function("scale:2:hermite:1").energy() == pytest.approx(4 * 0.75)
    for bad in ("bogus:1", "hermite:x", "hermite:-1", "tabulated:/no/such/file"):
        with pytest.raises(InputError):
            parse_test_function(bad)


def test_ring_difference_operators_sum_to_zero():
    v = np.random.default_rng(0).normal(size=50)
    assert abs(ring_grad(v, 7).sum()) < 1e-9
    assert abs(ring_lap(v, 7).sum()) < 1e-8


def test_summation_by_parts_and_height_identity():
    spec = ModelSpec(asymmetry=1.0, scale=8, ring_size=128)
    res = run(spec, seed=21, sample_times=[0.5])
    assert abs(summation_by_parts_residual(res.state, res.initial_occupancy, spec, Hermite(1))) < 1e-10
    prof = height_field(res.state, res.initial_occupancy, spec, -40, 40)
    assert np.array_equal(prof.from_initial, prof.from_current)
    with pytest.raises(InputError):
        height_field(res.state, res.initial_occupancy, spec, 1, 40)


def test_block_quadratic_is_centred_under_bernoulli():
    rng = np.random.default_rng(8)
    ell, rho = 5, 0.5
    vals = [block_quadratic(rng.random(40) < rho, ell, rho, x=3) for _ in range(40000)]
    vals = np.array(vals)
    assert abs(vals.mean()) < 4 * vals.std() / sqrt(vals.size)


def test_block_length_and_frame_precondition():
    assert block_length(0.25, 64) == 16
    with pytest.raises(InputError):
        block_length(0.0, 64)
    assert block_length(0.001, 64) == 1
    moving = ModelSpec(asymmetry=1.0, density=0.3, scale=8, ring_size=64)
    with pytest.raises(InputError):
        quadratic_integrand("A", moving, Hermite(0), 0.25)
