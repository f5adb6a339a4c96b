"""QSVT-based linear solver with a 1D Maxwell benchmark.

Layers, bottom to top: ``matkit`` (dense kernel + cyclic tridiagonal
solver), ``pade`` (compact-difference system and classical reference),
``phasekit`` (scalar polynomial evaluation and phase training),
``qsvt_op`` (block encoding and matrix-level sequences), ``qcsim``
(statevector circuit backend), ``maxwell`` (benchmark driver), ``cli``.
"""

from .matkit import NumericalError, SvdResult, solve_cyclic_tridiag, svd
from .pade import FieldState, Grid, PadeSystem, build_pade_system, classical_derivative
from .phasekit import (
    PhaseSchedule,
    eval_p_real,
    eval_qsvt_scalar,
    load_schedule,
    save_schedule,
    split_degree,
    train_phases,
)
from .qsvt_op import (
    BlockEncoding,
    QsvtSolveResult,
    apply_inverse,
    block_encode,
    build_p_real,
    cached_inverse,
    exact_inverse,
    sequence_even,
    sequence_odd,
    svd_oracle,
)
from .qcsim import CircuitLayout, StateVector, run_lcu_qsvt, state_prep
from .maxwell import MaxwellConfig, RunRecord, fidelity, initial_condition, l2_relative_error, run

__all__ = [
    "BlockEncoding",
    "CircuitLayout",
    "FieldState",
    "Grid",
    "MaxwellConfig",
    "NumericalError",
    "PadeSystem",
    "PhaseSchedule",
    "QsvtSolveResult",
    "RunRecord",
    "StateVector",
    "SvdResult",
    "apply_inverse",
    "block_encode",
    "build_p_real",
    "build_pade_system",
    "cached_inverse",
    "classical_derivative",
    "eval_p_real",
    "eval_qsvt_scalar",
    "exact_inverse",
    "fidelity",
    "initial_condition",
    "l2_relative_error",
    "load_schedule",
    "run",
    "run_lcu_qsvt",
    "save_schedule",
    "sequence_even",
    "sequence_odd",
    "solve_cyclic_tridiag",
    "split_degree",
    "state_prep",
    "svd",
    "svd_oracle",
    "train_phases",
]
