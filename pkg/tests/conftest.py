import numpy as np
import pytest

from combodose.core import DoseGrid, StudyConfig, ToxicityScenario, TrialState, record_cohort


@pytest.fixture
def grid():
    return DoseGrid(5, 3)


@pytest.fixture
def study():
    return StudyConfig(phi=0.3, max_n=60, cohort_size=3, reps=1, seed=0)


@pytest.fixture
def mid_scenario(grid):
    rates = np.clip(np.add.outer(np.linspace(0.05, 0.3, 5), np.array([0.0, 0.1, 0.2])), 0, 1)
    return ToxicityScenario(grid, rates, "mid")


def make_state(grid, cohorts, phase="model"):
    """Build a trial state from (dose, patients, dlts) triples."""
    state = TrialState.empty(grid, phase)
    for dose, n, y in cohorts:
        state = record_cohort(state, dose, n, y)
    return state
