import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from simlab.errors import InputError
from simlab.lattice import LocalFunction, evaluate


def test_indicator_at_origin():
    f = LocalFunction.occupation(0)
    assert evaluate(f, {0: 1}) == 1
    assert evaluate(f, {0: 0}) == 0


def test_constant_rate_ignores_pattern():
    r = LocalFunction.constant(1.0)
    assert r.evaluate({}) == 1
    assert r.evaluate({5: 1, -3: 0}) == 1


def test_product_on_one_zero_pattern():
    f = LocalFunction.product((0, 1))
    assert f.evaluate({0: 1, 1: 0}) == 0
    assert f.evaluate({0: 1, 1: 1}) == 1


def test_missing_offset_is_an_input_error():
    f = LocalFunction.product((0, 1))
    with pytest.raises(InputError):
        f.evaluate({0: 1})


def test_table_length_must_match_window():
    with pytest.raises(InputError):
        LocalFunction((0, 1), [0.0, 1.0, 2.0])
    with pytest.raises(InputError):
        LocalFunction((0, 0), [0, 0, 0, 0])


def test_bit_order_follows_window_order():
    f = LocalFunction((3, -1), [0, 1, 2, 3])
    assert f.evaluate({3: 1, -1: 0}) == 1
    assert f.evaluate({3: 0, -1: 1}) == 2


@settings(max_examples=60, deadline=None)
@given(
    window=st.lists(st.integers(-4, 4), min_size=1, max_size=4, unique=True),
    seed=st.integers(0, 2**31 - 1),
    flip=st.integers(-8, 8),
)
def test_sites_outside_window_never_matter(window, seed, flip):
    rng = np.random.default_rng(seed)
    f = LocalFunction(window, rng.normal(size=2 ** len(window)))
    pattern = {x: int(rng.integers(2)) for x in range(-8, 9)}
    before = f.evaluate(pattern)
    if flip not in window:
        pattern[flip] ^= 1
        assert f.evaluate(pattern) == before


@settings(max_examples=40, deadline=None)
@given(window=st.lists(st.integers(-3, 3), min_size=1, max_size=3, unique=True), seed=st.integers(0, 10**6))
def test_field_matches_pointwise_evaluation(window, seed):
    rng = np.random.default_rng(seed)
    f = LocalFunction(window, rng.normal(size=2 ** len(window)))
    eta = rng.integers(0, 2, size=12).astype(np.int8)
    field = f.field(eta)
    for x in range(12):
        pattern = {w: int(eta[(x + w) % 12]) for w in window}
        assert field[x] == pytest.approx(f.evaluate(pattern))


def test_json_round_trip():
    f = LocalFunction((-1, 2), [1.0, 1.5, 1.5, 2.0])
    g = LocalFunction.from_json(f.to_json())
    assert g.equals(f)
    doc = json.loads(f.to_json())
    assert doc["window"] == [-1, 2] and len(doc["table"]) == 4


def test_algebra_unions_windows():
    f = LocalFunction.occupation(0) * LocalFunction.occupation(1) - 0.25
    assert set(f.window) == {0, 1}
    assert f.evaluate({0: 1, 1: 1}) == pytest.approx(0.75)
    assert f.evaluate({0: 0, 1: 1}) == pytest.approx(-0.25)


def test_shift_and_normalize():
    f = LocalFunction.product((0, 1))
    g, k = f.normalized()
    assert min(g.window) == 1 and k == 1
    assert g.evaluate({1: 1, 2: 1}) == 1
    assert f.shift(3).window == (3, 4)


def test_pruned_drops_dummy_sites():
    f = LocalFunction.from_callable((0, 1, 2), lambda p: p[0])
    assert f.pruned().window == (0,)
