"""Equilibrium stock prices in networks of banks that cross-hold convertible debt."""

from .errors import *  # noqa: F401,F403
from .forward import LocalSystem, boundary_consistency_check, local_system, partition_of, phi, phi_hat, shift_vector
from .kernels import BACKEND
from .limits import (
    debt_cancellation_solve,
    eisenberg_noe_solve,
    equity_from_stock,
    limit_convergence_check,
    solve_equity,
)
from .matrix import check_diag_dominance, check_inverse_nonneg, check_sign_pattern, matrix_suite
from .model import (
    Fairness,
    FairnessClass,
    Network,
    Partition,
    classify_fairness,
    is_fair,
    load_network,
    network_from_dict,
    validate_network,
)
from .regions import GridMap, grid_map, overlap_summary, price_space_map
from .solver import (
    Equilibrium,
    EquilibriumSet,
    enumerate_equilibria,
    fair_inverse,
    fictitious_conversion,
    subfair_witness,
)
from .superfair import (
    FixedPointTrace,
    decompose,
    fixed_point_iterate,
    h_map,
    healthy_set,
    shift_lemma_checks,
    superfair_solve,
)

__version__ = "0.1.0"
