"""Request/response models and per-design parameter schemas for the conduct
service.  The design parameter models double as the machine-readable catalog
the web console uses to render configuration forms."""

from __future__ import annotations

from typing import Literal, Optional

from pydantic import BaseModel, Field, model_validator


class DoseModel(BaseModel):
    j: int = Field(ge=1, description="Agent A level (1-based)")
    k: int = Field(ge=1, description="Agent B level (1-based)")


class GridModel(BaseModel):
    J: int = Field(ge=1, description="Number of agent A levels")
    K: int = Field(ge=1, description="Number of agent B levels")


class StudyModel(BaseModel):
    phi: float = Field(0.3, gt=0, lt=1, description="Target toxicity probability")
    max_n: int = Field(60, ge=1, description="Maximum sample size")
    cohort_size: int = Field(3, ge=1, description="Patients per cohort")
    early_stop_n: Optional[int] = Field(
        None, ge=1, description="Stop once this many patients sit on the recommended dose"
    )


class CreateTrialRequest(BaseModel):
    design: str = Field(description="Design id from /api/designs")
    grid: GridModel
    study: StudyModel = StudyModel()
    params: dict = Field(default_factory=dict, description="Design-specific parameters")
    seed: int = Field(0, description="Session seed; fixes all randomized recommendations")
    name: Optional[str] = None


class DecisionModel(BaseModel):
    action: Literal["assign", "terminate"]
    dose: Optional[DoseModel] = None
    reason: str = ""


class CohortLogEntry(BaseModel):
    dose: DoseModel
    patients: int
    dlts: int


class TrialView(BaseModel):
    trial_id: str
    name: Optional[str]
    design: str
    params: dict
    grid: GridModel
    study: StudyModel
    seed: int
    revision: int
    phase: str
    patients: int
    dlts: int
    n: list[list[int]]
    y: list[list[int]]
    log: list[CohortLogEntry]
    estimates: Optional[list[list[float]]]
    recommendation: DecisionModel
    terminated: bool


class PostCohortRequest(BaseModel):
    dose: DoseModel
    patients: int = Field(ge=1)
    dlts: int = Field(ge=0)
    idempotency_key: Optional[str] = None
    expected_revision: Optional[int] = None
    override: bool = Field(
        False, description="Allow a dose different from the current recommendation"
    )
    note: Optional[str] = Field(None, description="Audit note, required with override")

    @model_validator(mode="after")
    def _counts(self):
        if self.dlts > self.patients:
            raise ValueError("dlts cannot exceed patients")
        return self


class PostCohortResponse(BaseModel):
    trial_id: str
    revision: int
    decision: DecisionModel
    estimates: Optional[list[list[float]]]
    phase: str
    applied: bool = True


class ErrorBody(BaseModel):
    code: str
    message: str
    detail: Optional[str] = None


# -- design parameter schemas (the /api/designs catalog) ---------------------


class CBoinParams(BaseModel):
    phi1: Optional[float] = Field(None, gt=0, lt=1, description="Under-dosing margin (default 0.6*phi)")
    phi2: Optional[float] = Field(None, gt=0, lt=1, description="Over-dosing margin (default 1.4*phi)")


class CKeyboardParams(BaseModel):
    eps1: float = Field(0.05, gt=0, description="Target key half-width below phi")
    eps2: float = Field(0.05, gt=0, description="Target key half-width above phi")


class PocrmParams(BaseModel):
    half_width: float = Field(0.05, gt=0, description="Skeleton indifference half-width")
    mtd_position: int = Field(11, ge=1, description="Skeleton position pinned at phi")


class BcrmParams(BaseModel):
    half_width: float = Field(0.05, gt=0)
    mtd_position: int = Field(11, ge=1)
    bootstrap: int = Field(500, ge=1, description="Bootstrap replicates per decision")
    jitter_eps: float = Field(1e-4, gt=0)
    eps_neighborhood: float = Field(0.12, gt=0, description="Half-width of the selection window")
    c_e: float = Field(0.85, gt=0, lt=1)
    c_d: float = Field(0.45, gt=0, lt=1)


class ProfileParams(BaseModel):
    profile_a: Optional[list[float]] = Field(None, description="Monotherapy toxicity of agent A per level")
    profile_b: Optional[list[float]] = Field(None, description="Monotherapy toxicity of agent B per level")


class I2dParams(ProfileParams):
    interaction: bool = Field(False, description="Include the interaction term in the surface")
    resolution: int = Field(61, ge=11, description="Quadrature nodes per dimension")


class CopulaParams(ProfileParams):
    c_e: float = Field(0.8, gt=0, lt=1)
    c_d: float = Field(0.45, gt=0, lt=1)
    resolution: int = Field(61, ge=11)
    allow_untried_mtd: bool = False


class DfcombParams(ProfileParams):
    c_e: float = Field(0.85, gt=0, lt=1)
    c_d: float = Field(0.45, gt=0, lt=1)
    delta: float = Field(0.12, gt=0, description="Half-width of the MTD selection window")


class GuessParams(BaseModel):
    guess_row: list[float] = Field(description="Prior toxicity guesses for (j, 1), one per agent A level")
    guess_col: list[float] = Field(description="Prior toxicity guesses for (1, k), one per agent B level")


class HierarchyParams(GuessParams):
    sigma2: float = Field(10.0, gt=0, description="Prior variance of the coefficients")
    k_const: Optional[float] = Field(None, description="Scaling constant (default: number of agent B levels)")


class GcrmParams(GuessParams):
    mu_alpha: float = -8.0
    mu_beta: float = 1.0
    s2_alpha: float = Field(1.0, gt=0)
    s2_beta: float = Field(1.0, gt=0)
    stop_threshold: float = Field(0.95, gt=0, lt=1)


PARAM_MODELS: dict[str, type[BaseModel]] = {
    "cboin": CBoinParams,
    "ckeyboard": CKeyboardParams,
    "pocrm": PocrmParams,
    "bcrm": BcrmParams,
    "i2d": I2dParams,
    "copula": CopulaParams,
    "dfcomb": DfcombParams,
    "hierarchy": HierarchyParams,
    "gcrm": GcrmParams,
}

DESIGN_BLURBS: dict[str, str] = {
    "cboin": "Interval design: compare the observed DLT fraction to fixed boundaries.",
    "ckeyboard": "Interval design: move toward the strongest posterior key.",
    "pocrm": "CRM averaged over six candidate complete orderings.",
    "bcrm": "CRM with bootstrap-updated orderings.",
    "i2d": "Power-type surface with a single-patient start-up sweep.",
    "copula": "Copula-linked marginal surface with probability cutoffs.",
    "dfcomb": "Logistic surface with interaction, diagonal start-up.",
    "hierarchy": "Hierarchical beta-binomial model, no start-up, diagonal moves.",
    "gcrm": "Proportional-odds logistic model, patient-by-patient conduct.",
}


class DesignInfo(BaseModel):
    id: str
    description: str
    cohort_unit: str
    params_schema: dict


class DesignCatalog(BaseModel):
    designs: list[DesignInfo]
