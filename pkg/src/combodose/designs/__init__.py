"""The nine dose-finding designs behind one contract."""

from ..core import DoseGrid, StudyConfig
from .base import DEFAULT_PROFILE, ALT_PROFILE, DoseFindingDesign, MonoProfile, decision_rng
from .bcrm import BcrmDesign
from .copula import CopulaDesign
from .dfcomb import DfcombDesign
from .gcrm import GcrmDesign
from .hierarchy import HierarchyDesign
from .i2d import I2dDesign
from .interval import CBoinDesign, CKeyboardDesign, boin_boundaries, keyboard_keys, select_mtd_isotonic
from .orderings import Ordering, enumerate_orderings, respects_partial_order
from .pocrm import PocrmDesign

DESIGN_CLASSES: dict[str, type[DoseFindingDesign]] = {
    cls.design_id: cls
    for cls in (
        I2dDesign,
        CopulaDesign,
        PocrmDesign,
        HierarchyDesign,
        DfcombDesign,
        GcrmDesign,
        BcrmDesign,
        CBoinDesign,
        CKeyboardDesign,
    )
}

DESIGN_IDS = tuple(DESIGN_CLASSES)


def build_design(design_id: str, grid: DoseGrid, study: StudyConfig, params: dict | None = None, scenario=None) -> DoseFindingDesign:
    """Instantiate a design from its id and a parameter mapping.

    Designs whose priors are guesses of the truth (hierarchy, gcrm) may pull
    those guesses from ``scenario`` when the params ask for it.
    """
    try:
        cls = DESIGN_CLASSES[design_id]
    except KeyError:
        valid = ", ".join(sorted(DESIGN_CLASSES))
        raise KeyError(f"unknown design '{design_id}'; valid ids: {valid}") from None
    return cls.from_params(grid, study, params or {}, scenario)


__all__ = [
    "DESIGN_CLASSES",
    "DESIGN_IDS",
    "DEFAULT_PROFILE",
    "ALT_PROFILE",
    "DoseFindingDesign",
    "MonoProfile",
    "decision_rng",
    "build_design",
    "BcrmDesign",
    "CopulaDesign",
    "DfcombDesign",
    "GcrmDesign",
    "HierarchyDesign",
    "I2dDesign",
    "CBoinDesign",
    "CKeyboardDesign",
    "PocrmDesign",
    "boin_boundaries",
    "keyboard_keys",
    "select_mtd_isotonic",
    "Ordering",
    "enumerate_orderings",
    "respects_partial_order",
]
