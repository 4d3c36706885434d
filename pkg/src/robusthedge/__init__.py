"""Quasi-sure superhedging on finite event trees under a family of martingale models."""
from .errors import *  # noqa: F401,F403
from .hedge import (
    DualityReport,
    HedgePlan,
    build_dual,
    build_primal,
    duality_report,
    in_cone,
    model_sup,
    superhedge,
    verify_superhedge,
)
from .lp import Constraint, LinearProgram, LpSolution, Status, solve
from .models import (
    Instance,
    Model,
    ModelFamily,
    binomial_instance,
    expectation,
    gap3_instance,
    gen_interval_instance,
    gen_nullset_instance,
    is_martingale_measure,
    l1_norm,
    make_family,
    make_model,
    node_mass,
    polar_set,
    seminorm,
)
from .tree import EventTree, make_claim, make_strategy, path_of, validate_tree, wealth

__version__ = "0.1.0"
