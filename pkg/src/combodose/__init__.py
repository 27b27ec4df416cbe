"""combodose: phase I combination dose-finding designs, simulation, and conduct."""

from .core import (
    CohortRecord,
    Decision,
    DoseGrid,
    MtdResult,
    StudyConfig,
    ToxicityScenario,
    TrialState,
    empirical_rate,
    load_scenario,
    record_cohort,
    replay_log,
    scenario_from_json,
    scenario_to_json,
    true_mtd_set,
)
from .designs import DESIGN_IDS, build_design
from .engine import DesignSpec, compute_metrics, run_study, run_trial

__version__ = "0.1.0"
