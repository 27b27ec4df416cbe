import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from combodose.core import (
    DoseGrid,
    StudyConfig,
    ToxicityScenario,
    TrialError,
    TrialState,
    UndefinedRateError,
    empirical_rate,
    overtoxic_set,
    record_cohort,
    replay_log,
    scenario_from_json,
    scenario_to_json,
    true_mtd_set,
)


def test_record_cohort_accumulates(grid):
    state = TrialState.empty(grid)
    state = record_cohort(state, (1, 1), 3, 0)
    assert state.counts((1, 1)) == (3, 0)
    state = record_cohort(state, (2, 1), 3, 2)
    state = record_cohort(state, (2, 1), 3, 0)
    assert state.counts((2, 1)) == (6, 2)
    assert state.current == (2, 1)
    assert state.total_patients == 9


def test_record_cohort_rejects_bad_input(grid):
    state = TrialState.empty(grid)
    with pytest.raises(TrialError):
        record_cohort(state, (6, 1), 3, 0)
    with pytest.raises(TrialError):
        record_cohort(state, (1, 1), 3, 4)
    finished = state.with_phase("finished")
    with pytest.raises(TrialError):
        record_cohort(finished, (1, 1), 3, 0)


def test_empirical_rate(grid):
    state = record_cohort(TrialState.empty(grid), (1, 1), 3, 0)
    assert empirical_rate(state, (1, 1)) == 0.0
    state = record_cohort(state, (2, 2), 6, 2)
    assert empirical_rate(state, (2, 2)) == pytest.approx(1 / 3)
    with pytest.raises(UndefinedRateError):
        empirical_rate(state, (3, 3))


@given(
    st.lists(
        st.tuples(
            st.integers(1, 4),
            st.integers(1, 3),
            st.integers(1, 6),
        ).flatmap(
            lambda t: st.integers(0, t[2]).map(lambda y: ((t[0], t[1]), t[2], y))
        ),
        max_size=25,
    )
)
@settings(max_examples=100, deadline=None)
def test_log_replay_roundtrip(cohorts):
    grid = DoseGrid(4, 3)
    state = TrialState.empty(grid)
    for dose, n, y in cohorts:
        state = record_cohort(state, dose, n, y)
    rebuilt = replay_log(grid, state.log)
    assert np.array_equal(rebuilt.n, state.n)
    assert np.array_equal(rebuilt.y, state.y)
    assert sum(r.patients for r in state.log) == state.total_patients
    assert np.all(state.y <= state.n)


def test_true_mtd_set_examples(grid):
    allhigh = ToxicityScenario(grid, np.full((5, 3), 0.9))
    assert true_mtd_set(allhigh, 0.3) == set()

    rates = np.full((5, 3), 0.9)
    rates[2, 1] = 0.30
    one = ToxicityScenario(DoseGrid(5, 3), rates)
    assert true_mtd_set(one, 0.3, 1e-6) == {(3, 2)}

    two = ToxicityScenario(DoseGrid(2, 2), np.array([[0.3, 0.5], [0.3, 0.6]]))
    assert true_mtd_set(two, 0.3) == {(1, 1), (2, 1)}


def test_true_mtd_set_permutation_invariance():
    rng = np.random.default_rng(3)
    rates = rng.uniform(0, 1, (4, 3))
    rates[1, 2] = 0.3
    sc = ToxicityScenario(DoseGrid(4, 3), rates)
    base = true_mtd_set(sc, 0.3)
    perm_a = rng.permutation(4)
    perm_b = rng.permutation(3)
    permuted = ToxicityScenario(DoseGrid(4, 3), rates[np.ix_(perm_a, perm_b)])
    got = true_mtd_set(permuted, 0.3)
    # map permuted coordinates back and compare
    back = {(int(perm_a[a - 1]) + 1, int(perm_b[b - 1]) + 1) for a, b in got}
    assert back == base


def test_overtoxic_set_strict():
    sc = ToxicityScenario(DoseGrid(2, 2), np.array([[0.3, 0.31], [0.3000000001, 0.6]]))
    assert overtoxic_set(sc, 0.3) == {(1, 2), (2, 2)}


def test_scenario_json_roundtrip(grid):
    rates = np.linspace(0.05, 0.65, 15).reshape(5, 3)
    sc = ToxicityScenario(grid, rates, "demo")
    obj = scenario_to_json(sc)
    assert len(obj["rates"]) == 3 and len(obj["rates"][0]) == 5  # K rows of J values
    back = scenario_from_json(obj)
    assert back.name == "demo"
    assert np.allclose(back.rates, rates)


def test_scenario_monotone_flag():
    good = ToxicityScenario(DoseGrid(2, 2), np.array([[0.1, 0.2], [0.2, 0.3]]))
    bad = ToxicityScenario(DoseGrid(2, 2), np.array([[0.2, 0.1], [0.3, 0.4]]))
    assert good.monotone and not bad.monotone


def test_study_config_validation():
    with pytest.raises(TrialError):
        StudyConfig(phi=1.5)
    with pytest.raises(TrialError):
        StudyConfig(max_n=61, cohort_size=3)
    with pytest.raises(TrialError):
        StudyConfig(early_stop_n=2, cohort_size=3)
    cfg = StudyConfig(max_n=60, cohort_size=3, early_stop_n=12)
    assert cfg.early_stop_n == 12


def test_true_mtd_set_from_scenario_file_orientation():
    # two target-rate cells down the first agent-A column of the file rows
    sc = scenario_from_json({"name": "two", "J": 2, "K": 2, "rates": [[0.3, 0.5], [0.3, 0.6]]})
    assert true_mtd_set(sc, 0.3) == {(1, 1), (1, 2)}
