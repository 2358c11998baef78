import io

import numpy as np
import pytest

from simlab.dynamics import (
    LatticeState,
    LocalIntegrand,
    Simulation,
    bernoulli_law,
    bond_rate,
    exact_generator,
    index_state,
    run,
    state_index,
    stream,
    transition_law,
)
from simlab.errors import InputError, ResourceError
from simlab.lattice import LocalFunction, ModelSpec
from simlab.series import FieldSeries, read_jsonl, write_jsonl

SMALL = ModelSpec(asymmetry=1.0, scale=8, ring_size=64, horizon=1.0)


def test_bond_rate_boosts_leftward_jump():
    spec = ModelSpec(asymmetry=4.0, scale=4, ring_size=8)
    occ = np.array([0, 1, 0, 0, 1, 1, 0, 0])
    assert bond_rate(spec, occ, 0) == 16 * 3  # eta(1)(1-eta(0)) = 1, boost 1 + 4/2
    assert bond_rate(spec, occ, 1) == 16  # particle at 1 moving right
    assert bond_rate(spec, occ, 4) == 0  # both occupied
    assert bond_rate(spec, occ, 7) == 0  # both empty, wraps to site 0


def test_same_seed_same_trajectory():
    a = run(SMALL, seed=11, sample_times=[0.3]).state
    b = run(SMALL, seed=11, sample_times=[0.3]).state
    c = run(SMALL, seed=12, sample_times=[0.3]).state
    assert np.array_equal(a.occupancy, b.occupancy) and np.array_equal(a.currents, b.currents)
    assert not np.array_equal(a.currents, c.currents)


def test_extra_stops_do_not_change_the_path():
    coarse = run(SMALL, seed=5, sample_times=[0.5]).state
    fine = run(SMALL, seed=5, sample_times=list(np.linspace(0.01, 0.5, 50))).state
    assert np.array_equal(coarse.occupancy, fine.occupancy)
    assert np.array_equal(coarse.jumps, fine.jumps)


def test_particles_conserved_and_continuity_exact():
    res = run(SMALL, seed=2, sample_times=[1.0])
    assert res.state.particle_count == res.initial_occupancy.sum()
    assert not res.state.continuity_defect(res.initial_occupancy).any()
    right, left = res.state.right_left_counts()
    assert (right >= 0).all() and (left >= 0).all()
    assert res.events == res.state.jumps.sum()


def test_integrals_of_conserved_quantities_are_exact():
    N = SMALL.ring_size
    w = np.linspace(-1, 1, N) ** 2
    one = LocalIntegrand("one", LocalFunction.constant(1.0), w)
    mass = LocalIntegrand("mass", LocalFunction.occupation(0), np.ones(N))
    res = run(SMALL, seed=3, sample_times=[0.2, 0.7], integrands=[one, mass])
    k = res.initial_occupancy.sum()
    assert res.series["one"].at(0.7) == pytest.approx(0.7 * w.sum(), rel=1e-12)
    assert res.series["mass"].at(0.2) == pytest.approx(0.2 * k, rel=1e-12)


def test_integral_matches_fine_riemann_sum():
    spec = ModelSpec(asymmetry=0.0, scale=2, ring_size=16, horizon=2.0)
    f = LocalFunction.product((0, 1))
    w = np.arange(16.0)
    times = np.linspace(0, 2.0, 20001)
    res = run(spec, seed=9, sample_times=times, integrands=[LocalIntegrand("F", f, w)],
              observers={"f": lambda st: float(f.field(st.occupancy) @ w)})
    vals = np.array(res.series["f"].values)
    riemann = np.sum(vals[:-1] * np.diff(times))
    jumps = res.state.jumps.sum()
    # each jump moves the left-endpoint sum by at most one grid cell times the field range
    assert abs(res.series["F"].last - riemann) <= jumps * np.diff(times)[0] * w.sum() + 1e-9


def test_cannot_go_back_in_time():
    sim = Simulation(SMALL, seed=1)
    sim.advance_to(0.1)
    with pytest.raises(InputError):
        sim.advance_to(0.05)


def test_rate_audit_passes_in_debug_mode():
    sim = Simulation(SMALL, seed=4, debug=True)
    sim.advance_to(0.05)
    sim.check_rates(full=True)


def test_bad_inputs():
    with pytest.raises(InputError):
        run(SMALL, sample_times=[0.2, 0.1])
    with pytest.raises(InputError):
        Simulation(SMALL, initial=np.zeros(10, int))
    with pytest.raises(InputError):
        LatticeState.from_occupancy([0, 2, 1])


def test_tiny_ring_generator():
    spec = ModelSpec(asymmetry=1.0, scale=1, ring_size=6, density=0.5)
    Q = exact_generator(spec)
    assert np.allclose(Q.sum(axis=1), 0)
    pi = bernoulli_law(6, 0.3)
    assert np.abs(pi @ Q).max() < 1e-12
    law = transition_law(spec, 1.0, [1, 1, 1, 0, 0, 0])
    assert law.sum() == pytest.approx(1.0)
    counts = np.array([bin(s).count("1") for s in range(64)])
    assert law[counts != 3].sum() < 1e-12


def test_exact_generator_size_limit():
    with pytest.raises(ResourceError):
        exact_generator(ModelSpec(scale=1, ring_size=13))


def test_state_index_round_trip():
    for s in (0, 5, 37, 63):
        assert state_index(index_state(s, 6)) == s


def test_snapshot_round_trip():
    occ = np.array([1, 1, 1, 0, 0, 1, 0], np.int8)
    st = LatticeState.from_occupancy(occ)
    text = st.snapshot()
    assert text == "3x1,2x0,1x1,1x0"
    assert np.array_equal(LatticeState.decode_snapshot(text), occ)


def test_streams_are_independent_by_replica_and_lane():
    a = stream(7, 0).random(4)
    assert np.array_equal(a, stream(7, 0).random(4))
    assert not np.array_equal(a, stream(7, 1).random(4))
    assert not np.array_equal(a, stream(7, 0, lane=1).random(4))
    with pytest.raises(InputError):
        stream(-1)


def test_series_jsonl_round_trip():
    s = FieldSeries("Y", 3, "abc")
    s.append(0.0, 1.5)
    s.append(0.5, -2.0)
    buf = io.StringIO()
    write_jsonl([s], buf)
    buf.seek(0)
    back = read_jsonl(buf)[(3, "Y")]
    assert back.at(0.5) == -2.0 and back.last == -2.0
