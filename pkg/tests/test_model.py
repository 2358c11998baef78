from fractions import Fraction

import numpy as np
import pytest

from simlab.errors import InputError, ModelError, NotGradientError
from simlab.lattice import (
    LocalFunction,
    ModelSpec,
    check_gradient_identity,
    drift_function,
    grand_canonical,
    thermodynamics,
    verify_conditions,
    verify_gradient,
)


def speed_change(beta):
    return LocalFunction.from_callable((-1, 2), lambda p: 1 + beta * (p[-1] + p[2]))


def test_constant_rate_conditions():
    rep = verify_conditions(ModelSpec())
    assert rep.ellipticity == 1 and rep.reversible and rep.finite_range


def test_rate_depending_on_origin_is_not_reversible():
    r = LocalFunction.from_callable((0,), lambda p: 1 + 0.5 * p[0])
    assert not verify_conditions(r).reversible


def test_rate_two_has_ellipticity_half():
    assert verify_conditions(LocalFunction.constant(2.0)).ellipticity == 0.5


def test_nonpositive_rate_rejected():
    with pytest.raises(ModelError):
        ModelSpec(rate=LocalFunction((0,), [1.0, 0.0]))


def test_spec_validation():
    with pytest.raises(InputError):
        ModelSpec(scale=8, ring_size=100)
    with pytest.raises(ModelError):
        ModelSpec(asymmetry=-4.0, scale=9, ring_size=9 * 32)
    ModelSpec(asymmetry=-3.0, scale=9, ring_size=9 * 32)


def test_spec_digest_is_stable_and_sensitive():
    a, b = ModelSpec(), ModelSpec()
    assert a.digest() == b.digest()
    assert a.digest() != a.replace(asymmetry=0.5).digest()
    assert ModelSpec.from_dict(a.to_dict()).digest() == a.digest()


def test_constant_rate_gradient_solution():
    omega = verify_gradient(LocalFunction.constant(1.0), (0, 1))
    assert check_gradient_identity(LocalFunction.constant(1.0), omega)
    # any solution differs from eta(0) by a constant
    d = omega - LocalFunction.occupation(0)
    vals = {round(v, 12) for v in d.table}
    assert len(vals) == 1


def test_speed_change_gradient_is_solved_exactly():
    r = speed_change(0.5)
    omega = verify_gradient(r, (-1, 0, 1, 2))
    assert check_gradient_identity(r, omega)
    th = thermodynamics(ModelSpec(rate=r, asymmetry=0.0), omega)
    # oracle from the closed form omega = eta(0) + beta(eta(-1)eta(0) + eta(0)eta(1) - eta(-1)eta(1))
    sigma = Fraction(1, 3)
    assert th.omega_poly.exact(sigma) == sigma + Fraction(1, 2) * sigma**2


def test_perturbed_rate_is_not_gradient():
    r = LocalFunction((0, 1), [1.0, 1.0, 1.1, 1.0])
    with pytest.raises(NotGradientError):
        verify_gradient(r, (0, 1))


def test_grand_canonical_examples():
    p = grand_canonical(LocalFunction.product((0, 1)))
    assert p.exact(Fraction(1, 3)) == Fraction(1, 9)
    assert p.derivative(2).exact(Fraction(0)) == 2
    q = grand_canonical(LocalFunction.from_callable((0, 1), lambda s: s[0] * (1 - s[1])))
    assert q.exact(Fraction(1, 4)) == Fraction(3, 16)


def test_grand_canonical_endpoints_match_table():
    rng = np.random.default_rng(3)
    f = LocalFunction((0, 1, 2), rng.normal(size=8))
    p = grand_canonical(f)
    assert float(p(0.0)) == pytest.approx(f.table[0])
    assert float(p(1.0)) == pytest.approx(f.table[-1])


def test_grand_canonical_agrees_with_bernoulli_sampling():
    rng = np.random.default_rng(4)
    f = LocalFunction((0, 1, 3), rng.normal(size=8))
    rho = 0.3
    eta = (rng.random((200000, 3)) < rho).astype(int)
    vals = f.table[eta[:, 0] + 2 * eta[:, 1] + 4 * eta[:, 2]]
    se = vals.std() / np.sqrt(len(vals))
    assert abs(vals.mean() - float(grand_canonical(f)(rho))) < 4 * se


def test_nonlinear_drift_is_centred_with_curvature_minus_two_a():
    spec = ModelSpec(asymmetry=1.5)
    p = grand_canonical(drift_function(spec))
    assert abs(float(p(0.5))) < 1e-12
    assert abs(float(p.derivative()(0.5))) < 1e-12
    assert float(p.derivative(2)(0.5)) == pytest.approx(-3.0)


def test_thermodynamics_constant_rate():
    th = thermodynamics(ModelSpec(asymmetry=1.0))
    assert float(th.diffusivity(0.3)) == pytest.approx(1.0)
    assert float(th.compressibility(0.3)) == pytest.approx(0.21)
    assert float(th.flux(0.3)) == pytest.approx(0.21)
