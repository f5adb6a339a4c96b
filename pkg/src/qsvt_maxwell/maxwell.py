"""Quantum-assisted time evolution of the 1D Maxwell benchmark.

Each step computes the two spatial derivatives through the approximate
inverse (cached polynomial matrix, statevector circuit, or SVD-exact
substitute) and advances the fields with the same semi-sequential Euler
update as the classical reference, which is evolved alongside for the
error metrics.  See ``pade`` for the time-unit convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import pade, phasekit, qcsim, qsvt_op
from .matkit import NumericalError
from .pade import FieldState, PadeSystem
from .phasekit import PhaseSchedule

__all__ = [
    "BACKENDS",
    "PULSE_CENTER",
    "PULSE_WIDTH",
    "FieldState",
    "MaxwellConfig",
    "RunRecord",
    "StatevectorInverse",
    "count_steps",
    "fidelity",
    "initial_condition",
    "l2_relative_error",
    "make_inverse",
    "quantum_step",
    "run",
]

PULSE_CENTER = 0.5
PULSE_WIDTH = 0.05

BACKENDS = ("operator", "statevector", "exact")

_REALITY_TOL = 1e-10


@dataclass
class MaxwellConfig:
    """Parameters of one benchmark run."""

    n: int
    dt: float = 0.01
    t_final: float = 0.5
    eps: float = 1.0
    mu: float = 1.0
    backend: str = "operator"
    schedule_path: str | None = None

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if self.t_final < self.dt:
            raise ValueError(f"t_final must be at least dt, got {self.t_final}")
        if self.eps <= 0 or self.mu <= 0:
            raise ValueError("eps and mu must be positive")
        if self.backend not in BACKENDS:
            raise ValueError(f"backend must be one of {BACKENDS}, got {self.backend!r}")


@dataclass
class RunRecord:
    """Per-step metrics and optional field snapshots of a benchmark run."""

    times: np.ndarray
    l2_rel_err: np.ndarray
    fidelity: np.ndarray
    snapshots: dict[int, dict[str, np.ndarray]] = field(default_factory=dict)


def initial_condition(n: int) -> FieldState:
    """Gaussian electric-field pulse at rest: peak 1 at z = 0.5, width 0.05."""
    grid = pade.make_grid(n)
    ex = np.exp(-((grid.z - PULSE_CENTER) ** 2) / (2.0 * PULSE_WIDTH**2))
    return FieldState(ex=ex, hy=np.zeros(n), t=0.0)


def l2_relative_error(q: np.ndarray, c: np.ndarray, normalized: bool = True) -> float:
    """Relative L2 distance between the two solutions.

    Both vectors are unit-normalized before differencing by default (the
    benchmark metric); pass ``normalized=False`` for the raw quotient.
    """
    q = np.asarray(q)
    c = np.asarray(c)
    norm_q, norm_c = np.linalg.norm(q), np.linalg.norm(c)
    if norm_c == 0.0:
        raise ValueError("classical reference has zero norm")
    if normalized:
        if norm_q == 0.0:
            raise ValueError("quantum solution has zero norm")
        return float(np.linalg.norm(q / norm_q - c / norm_c))
    return float(np.linalg.norm(q - c) / norm_c)


def fidelity(q: np.ndarray, c: np.ndarray) -> float:
    """Absolute overlap |<q_hat, c_hat>| of the unit-normalized vectors."""
    q = np.asarray(q)
    c = np.asarray(c)
    norm_q, norm_c = np.linalg.norm(q), np.linalg.norm(c)
    if norm_q == 0.0 or norm_c == 0.0:
        raise ValueError("fidelity of a zero vector is undefined")
    return float(abs(np.vdot(q, c)) / (norm_q * norm_c))


class StatevectorInverse:
    """Approximate-inverse applicator backed by the full circuit simulation."""

    def __init__(self, be: qsvt_op.BlockEncoding, sched: PhaseSchedule):
        self.encoding = be
        self.schedule = sched
        self.layout = qcsim.CircuitLayout.default(int(np.log2(be.n)))

    def apply(self, b: np.ndarray) -> np.ndarray:
        norm_b = float(np.linalg.norm(b))
        out, _ = qcsim.run_lcu_qsvt(self.encoding, self.schedule, b, self.layout)
        return (self.encoding.scale * norm_b / self.schedule.s) * out


def make_inverse(be: qsvt_op.BlockEncoding, sched: PhaseSchedule, backend: str):
    """Pick the derivative-solve backend for ``quantum_step``."""
    if backend == "operator":
        return qsvt_op.cached_inverse(be, sched)
    if backend == "statevector":
        return StatevectorInverse(be, sched)
    if backend == "exact":
        return qsvt_op.exact_inverse(be, sched.s)
    raise ValueError(f"backend must be one of {BACKENDS}, got {backend!r}")


def _solve_derivative(sys: PadeSystem, inv, f: np.ndarray) -> np.ndarray:
    b = sys.B @ f
    if np.linalg.norm(b) == 0.0:
        # state preparation of a zero vector is undefined; the derivative is 0
        return np.zeros(sys.n)
    x = inv.apply(b)
    if np.iscomplexobj(x):
        worst = float(np.abs(x.imag).max())
        if worst > _REALITY_TOL:
            raise NumericalError(f"derivative came back non-real (max imag {worst:.3e})")
        x = x.real
    return x


def quantum_step(
    state: FieldState,
    sys: PadeSystem,
    inv,
    dt: float,
    eps: float = 1.0,
    mu: float = 1.0,
) -> FieldState:
    """One Euler step with both spatial derivatives from the inverse applicator.

    Mirrors ``pade.classical_maxwell_step`` sub-step for sub-step, including
    the dt * h time-unit convention.
    """
    if state.ex.shape != (sys.n,) or state.hy.shape != (sys.n,):
        raise ValueError("field state does not match the grid size")
    step = dt * sys.h
    ex = state.ex - (step / eps) * _solve_derivative(sys, inv, state.hy)
    hy = state.hy - (step / mu) * _solve_derivative(sys, inv, ex)
    return FieldState(ex=ex, hy=hy, t=state.t + dt)


def count_steps(t_final: float, dt: float) -> int:
    """Number of Euler steps to cover (0, t_final] at step dt."""
    return max(1, math.ceil(t_final / dt - 1e-9))


def run(
    config: MaxwellConfig,
    schedule: PhaseSchedule | None = None,
    snapshot_steps: set[int] | None = None,
) -> RunRecord:
    """Evolve the benchmark and record per-step metrics against the reference.

    The schedule comes from ``config.schedule_path`` unless passed directly.
    The classical reference is advanced with the same scheme and step, so
    the recorded error isolates the inverse-approximation error.
    """
    if schedule is None:
        if config.schedule_path is None:
            raise ValueError("either a schedule or config.schedule_path is required")
        schedule = phasekit.load_schedule(config.schedule_path)

    sys = pade.build_pade_system(config.n)
    # rejects grids whose normalized spectrum falls outside the trained window
    be = qsvt_op.block_encode(sys.A, schedule.kappa)
    inv = make_inverse(be, schedule, config.backend)

    n_steps = count_steps(config.t_final, config.dt)
    if snapshot_steps is None:
        snapshot_steps = {n_steps}

    quantum = initial_condition(config.n)
    classical = initial_condition(config.n)
    grid = pade.make_grid(config.n)

    times = np.empty(n_steps)
    errs = np.empty(n_steps)
    fids = np.empty(n_steps)
    snapshots: dict[int, dict[str, np.ndarray]] = {}
    for k in range(1, n_steps + 1):
        quantum = quantum_step(quantum, sys, inv, config.dt, config.eps, config.mu)
        classical = pade.classical_maxwell_step(sys, classical, config.dt, config.eps, config.mu)
        times[k - 1] = k * config.dt
        errs[k - 1] = l2_relative_error(quantum.ex, classical.ex)
        fids[k - 1] = fidelity(quantum.ex, classical.ex)
        if k in snapshot_steps:
            snapshots[k] = {
                "z": grid.z.copy(),
                "ex_quantum": quantum.ex.copy(),
                "ex_classical": classical.ex.copy(),
                "hy_quantum": quantum.hy.copy(),
                "hy_classical": classical.hy.copy(),
            }
    return RunRecord(times=times, l2_rel_err=errs, fidelity=fids, snapshots=snapshots)
