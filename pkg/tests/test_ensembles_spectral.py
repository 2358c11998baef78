from fractions import Fraction
from math import comb, cos, pi

import numpy as np
import pytest

from simlab.errors import InputError
from simlab.lattice import (
    LocalFunction,
    canonical_expectation,
    canonical_expectation_exact,
    canonical_second_moment,
    eoe_expansion_residual,
    h_minus_one_norm,
    sector_generator,
    spectral_gap,
    tower_defect,
)
from simlab.lattice.ensembles import centered_product


def test_pair_product_small_boxes():
    f = LocalFunction.product((1, 2))
    assert canonical_expectation(f, 2, 1) == 0
    assert canonical_expectation_exact(f, 4, 2) == Fraction(1, 6)


def test_exchangeability():
    f = LocalFunction.occupation(1)
    for ell in range(1, 9):
        for k in range(ell + 1):
            assert canonical_expectation_exact(f, ell, k) == Fraction(k, ell)


def test_k_out_of_range():
    with pytest.raises(InputError):
        canonical_expectation(LocalFunction.occupation(1), 4, 5)


def test_pair_product_closed_form():
    # psi(ell, k) = k(k-1) / (ell(ell-1)), enumerated independently
    f = LocalFunction.product((1, 2))
    for ell in (3, 7, 12):
        for k in range(ell + 1):
            assert canonical_expectation_exact(f, ell, k) == Fraction(k * (k - 1), ell * (ell - 1))


def test_tower_property():
    rng = np.random.default_rng(5)
    f = LocalFunction((1, 2, 3), [float(x) for x in rng.integers(-5, 5, size=8)])
    for ell in (3, 5, 9):
        assert tower_defect(f, Fraction(2, 7), ell) == 0


def test_expansion_residual_examples():
    f = LocalFunction.product((1, 2))
    # k=1 row: psi = 0, corrected mean 1/4 - (1/4)(2)/(2*2) = 1/8; k=0 and k=2 rows are exact
    assert eoe_expansion_residual(f, 2, "-") == pytest.approx(0.125)
    g = LocalFunction.occupation(1)
    assert eoe_expansion_residual(g, 10, "+") == 0
    assert eoe_expansion_residual(g, 10, "-") == 0


def test_minus_sign_gives_second_order_residual():
    f = LocalFunction.product((1, 2))
    r64, r128 = eoe_expansion_residual(f, 64, "-"), eoe_expansion_residual(f, 128, "-")
    assert r64 / r128 == pytest.approx(4, rel=0.05)
    p64, p128 = eoe_expansion_residual(f, 64, "+"), eoe_expansion_residual(f, 128, "+")
    assert p64 / p128 == pytest.approx(2, rel=0.05)


def test_centred_variance_case_one_is_chi_over_ell():
    f = centered_product((1,), Fraction(1, 2))
    for ell in (4, 16):
        assert canonical_second_moment(f, Fraction(1, 2), ell) == Fraction(1, 4 * ell)


def test_two_site_gap_is_two():
    assert spectral_gap(2, 1) == pytest.approx(2.0)


def test_single_state_sector_is_degenerate():
    assert spectral_gap(3, 3) == float("inf")


def test_one_particle_gap_matches_path_laplacian():
    # a single particle performs a unit-rate walk on a path of ell sites
    for ell in range(2, 10):
        assert spectral_gap(ell, 1) == pytest.approx(2 * (1 - cos(pi / ell)), rel=1e-10)


def test_generator_is_symmetric_with_zero_row_sums():
    S = sector_generator(6, 3, LocalFunction.constant(1.0))
    assert np.allclose(S, S.T)
    assert np.allclose(S.sum(axis=1), 0)
    assert S.shape == (comb(6, 3), comb(6, 3))


def test_dual_norm_of_an_eigenvector():
    S = sector_generator(6, 3, LocalFunction.constant(1.0))
    vals, vecs = np.linalg.eigh(S)
    j = 3
    v = vecs[:, j] * np.sqrt(len(vals))  # unit norm under the uniform sector measure
    assert h_minus_one_norm(v, 6, 3) == pytest.approx(1 / vals[j], rel=1e-9)


def test_dual_norm_requires_centring():
    with pytest.raises(InputError):
        h_minus_one_norm(np.ones(20), 6, 3)
    assert h_minus_one_norm(np.zeros(20), 6, 3) == 0
