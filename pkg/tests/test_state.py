import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from drlos.state import (DIV_CAP, ExperienceReplay, PopulationState, Record, assess_state,
                         compute_reward, indicator_state, make_record, push_record,
                         sample_training)

from conftest import make_population

finite = st.floats(-1e6, 1e6, allow_nan=False)
states = st.builds(PopulationState, finite, st.floats(0, 1e6), st.floats(0, 1e6))


def test_assess_state_hand_values():
    pop = make_population([[0.0, 1.0], [1.0, 0.0], [0.5, 0.5]], [0.0, 0.3, 0.6])
    s = assess_state(pop)
    assert s.con == pytest.approx(1.0)
    assert s.fea == pytest.approx(0.3)
    # ranges 1 and 1 sum to 2
    assert s.div == pytest.approx(0.5)


def test_assess_state_collapsed_population():
    pop = make_population([[0.3, 0.3]] * 4)
    assert assess_state(pop).div == DIV_CAP


def test_assess_state_empty():
    with pytest.raises(ValueError):
        assess_state(make_population([]))


@settings(max_examples=50)
@given(st.lists(st.tuples(st.floats(0, 10), st.floats(0, 10), st.floats(0, 5)),
                min_size=2, max_size=12), st.randoms())
def test_assess_state_permutation_invariant(rows, rnd):
    fs = [r[:2] for r in rows]
    cvs = [r[2] for r in rows]
    order = list(range(len(rows)))
    rnd.shuffle(order)
    a = assess_state(make_population(fs, cvs))
    b = assess_state(make_population([fs[i] for i in order], [cvs[i] for i in order]))
    assert a.con == pytest.approx(b.con)
    assert a.fea == pytest.approx(b.fea)
    assert a.div == b.div


def test_indicator_state_values():
    pop = make_population([[0.25, 0.75], [0.75, 0.25]], [0.0, 0.4])
    s = indicator_state(pop, ref_point=[1.0, 1.0])
    assert s.con == pytest.approx(1 - 0.3125)
    assert s.fea == pytest.approx(0.2)
    assert s.div == 0.0


def test_reward_is_decrease_in_sum():
    s = PopulationState(2.0, 1.0, 0.5)
    s2 = PopulationState(1.5, 0.5, 0.25)
    assert compute_reward(s, s2) == 1.25


@given(states, states)
def test_reward_antisymmetric(s, s2):
    assert compute_reward(s, s2) == pytest.approx(-compute_reward(s2, s), rel=1e-12, abs=1e-6)
    assert compute_reward(s, s) == 0.0


def test_record_layout():
    t = make_record(PopulationState(1, 2, 3), 2, PopulationState(0.5, 1, 1))
    assert t.as_row().tolist() == [1, 2, 3, 2, 3.5, 0.5, 1, 1]
    assert t.is_consistent()
    bad = Record(t.s, 2, 0.0, t.s_next)
    assert not bad.is_consistent()


def _rec(i):
    return make_record(PopulationState(i, 0, 0), 1, PopulationState(i + 1, 0, 0))


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 60), st.integers(0, 300))
def test_replay_fifo(ms_ep, pushes):
    ep = ExperienceReplay(ms_ep=ms_ep, rs_ep=1)
    for i in range(pushes):
        push_record(ep, _rec(i))
        assert len(ep) == min(i + 1, ms_ep)
    kept = [t.s.con for t in ep]
    assert kept == list(range(max(0, pushes - ms_ep), pushes))


def test_replay_ready_threshold():
    ep = ExperienceReplay(ms_ep=10, rs_ep=3)
    for i in range(3):
        assert not ep.ready
        ep.push(_rec(i))
    assert ep.ready


def test_replay_validation():
    with pytest.raises(ValueError):
        ExperienceReplay(ms_ep=0)
    with pytest.raises(ValueError):
        ExperienceReplay(rs_ep=0)


def test_sample_training_without_replacement(rng):
    ep = ExperienceReplay(ms_ep=100, rs_ep=1, records=[_rec(i) for i in range(40)])
    batch = sample_training(ep, 40, rng)
    assert sorted(t.s.con for t in batch) == list(range(40))
    assert len(ep.sample(10, rng)) == 10
    with pytest.raises(ValueError):
        sample_training(ep, 41, rng)
    with pytest.raises(ValueError):
        sample_training(ep, 0, rng)
