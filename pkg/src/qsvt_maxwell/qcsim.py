"""Dense statevector simulation of the two-ancilla LCU/QSVT circuit.

Register layout (qubit 0 is the most significant amplitude-index bit):

    a1      -- selects the plain vs. conjugated sequence (real-part LCU)
    a2      -- selects the even vs. odd parity branch
    encode  -- the block-encoding dimension of U(A)
    system  -- n_sys qubits holding the 2^{n_sys}-dimensional vector

With the default layout the amplitudes with a1 = a2 = encode = 0 are the
first N entries of the state, so post-selection is a prefix slice.  Both
ancillas are split and recombined with Hadamards; the branch controlled on
a1 = 1 runs the phase-negated (conjugated) sequences, which realizes the
real-part extraction for a real block encoding.  The post-selected block
equals gamma_lcu * P_real(A_norm) b_hat with gamma_lcu = 1/2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matkit import NumericalError
from .phasekit import PhaseSchedule, sequence_ops
from .qsvt_op import BlockEncoding, projector_diagonal

__all__ = [
    "GAMMA_LCU",
    "CircuitLayout",
    "StateVector",
    "apply_projector_phase",
    "hadamard",
    "run_lcu_qsvt",
    "state_prep",
]

GAMMA_LCU = 0.5

_SQRT2_INV = 1.0 / np.sqrt(2.0)


@dataclass
class StateVector:
    n_qubits: int
    amps: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amps.copy())


@dataclass(frozen=True)
class CircuitLayout:
    """Qubit index assignment for the solver circuit (n_sys + 3 qubits)."""

    n_sys: int
    encode_qubit: int
    a1: int
    a2: int

    def __post_init__(self) -> None:
        n = self.n_qubits
        special = (self.a1, self.a2, self.encode_qubit)
        if len(set(special)) != 3 or any(q < 0 or q >= n for q in special):
            raise ValueError(f"ancilla/encode indices must be distinct and in [0, {n}), got {special}")

    @classmethod
    def default(cls, n_sys: int) -> "CircuitLayout":
        return cls(n_sys=n_sys, encode_qubit=2, a1=0, a2=1)

    @property
    def n_qubits(self) -> int:
        return self.n_sys + 3

    @property
    def system_qubits(self) -> tuple[int, ...]:
        taken = {self.a1, self.a2, self.encode_qubit}
        return tuple(q for q in range(self.n_qubits) if q not in taken)


def _system_indices(layout: CircuitLayout) -> np.ndarray:
    """Flat amplitude indices with all non-system qubits in |0>."""
    n = layout.n_qubits
    sys_values = np.arange(1 << layout.n_sys)
    idx = np.zeros(sys_values.shape[0], dtype=np.int64)
    for j, q in enumerate(layout.system_qubits):
        value_bit = layout.n_sys - 1 - j
        idx |= ((sys_values >> value_bit) & 1) << (n - 1 - q)
    return idx


def state_prep(b: np.ndarray, layout: CircuitLayout) -> StateVector:
    """Load b (normalized) into the system register; everything else |0>."""
    b = np.asarray(b, dtype=complex)
    expected = 1 << layout.n_sys
    if b.shape != (expected,):
        raise ValueError(f"vector length {b.shape} does not match 2^{layout.n_sys} = {expected}")
    norm = np.linalg.norm(b)
    if norm == 0.0:
        raise ValueError("cannot prepare a zero vector")
    amps = np.zeros(1 << layout.n_qubits, dtype=complex)
    amps[_system_indices(layout)] = b / norm
    return StateVector(layout.n_qubits, amps)


def hadamard(sv: StateVector, qubit: int) -> StateVector:
    t = sv.amps.reshape((2,) * sv.n_qubits).copy()
    t = np.moveaxis(t, qubit, 0)
    a0 = t[0].copy()
    t[0] = (a0 + t[1]) * _SQRT2_INV
    t[1] = (a0 - t[1]) * _SQRT2_INV
    t = np.moveaxis(t, 0, qubit)
    return StateVector(sv.n_qubits, np.ascontiguousarray(t).reshape(-1))


def apply_projector_phase(
    sv: StateVector,
    phi: float,
    layout: CircuitLayout,
    dagger_side: str = "row",
) -> StateVector:
    """Phase e^{+i phi} on the encode=|0> subspace, e^{-i phi} on encode=|1>.

    ``dagger_side`` distinguishes row- from column-subspace projectors; for a
    square encoded matrix both act identically, so it is accepted and ignored.
    """
    if dagger_side not in ("row", "col"):
        raise ValueError(f"dagger_side must be 'row' or 'col', got {dagger_side!r}")
    t = sv.amps.reshape((2,) * sv.n_qubits).copy()
    t = np.moveaxis(t, layout.encode_qubit, 0)
    t[0] *= np.exp(1j * phi)
    t[1] *= np.exp(-1j * phi)
    t = np.moveaxis(t, 0, layout.encode_qubit)
    return StateVector(sv.n_qubits, np.ascontiguousarray(t).reshape(-1))


def _apply_controlled_block(
    amps: np.ndarray,
    layout: CircuitLayout,
    a1_val: int,
    a2_val: int,
    mat: np.ndarray | None,
    diag: np.ndarray | None,
) -> None:
    """Apply a 2N x 2N operator on (encode, system) for one ancilla branch.

    Mutates ``amps`` in place; exactly one of ``mat``/``diag`` is given.
    """
    n = layout.n_qubits
    t = amps.reshape((2,) * n)
    src = (layout.a1, layout.a2, layout.encode_qubit) + layout.system_qubits
    t = np.moveaxis(t, src, range(n))
    sub = t[a1_val, a2_val]
    flat = sub.reshape(-1)  # may copy when the view is non-contiguous
    flat = diag * flat if diag is not None else mat @ flat
    t[a1_val, a2_val] = flat.reshape(sub.shape)


def run_lcu_qsvt(
    be: BlockEncoding,
    sched: PhaseSchedule,
    b: np.ndarray,
    layout: CircuitLayout | None = None,
    check_norms: bool = False,
) -> tuple[np.ndarray, float]:
    """Run the full two-ancilla circuit and post-select the solution block.

    Returns ``(vector, success_amp)`` where ``vector`` is the post-selected
    system state divided by the analytic LCU prefactor (so it equals
    P_real(A_norm) b_hat up to simulation round-off) and ``success_amp`` is
    the norm of the raw post-selected block.

    Raises:
        NumericalError: if the post-selected amplitude is numerically zero.
    """
    n_sys = int(np.log2(be.n))
    if 1 << n_sys != be.n:
        raise ValueError(f"encoded matrix size {be.n} is not a power of two")
    if layout is None:
        layout = CircuitLayout.default(n_sys)
    if layout.n_sys != n_sys:
        raise ValueError(f"layout is for {layout.n_sys} system qubits, matrix needs {n_sys}")

    def _norm_check(vec: np.ndarray, stage: str) -> None:
        if check_norms:
            norm = float(np.linalg.norm(vec))
            if abs(norm - 1.0) > 1e-10:
                raise NumericalError(f"statevector norm drifted at {stage}: {norm}")

    sv = state_prep(b, layout)
    sv = hadamard(sv, layout.a1)
    sv = hadamard(sv, layout.a2)
    amps = sv.amps
    _norm_check(amps, "ancilla split")

    n2 = 2 * be.n
    branches = (
        (0, 0, sched.phis_even, False),
        (0, 1, sched.phis_odd, False),
        (1, 0, sched.phis_even, True),
        (1, 1, sched.phis_odd, True),
    )
    for a1_val, a2_val, phis, conj in branches:
        u_base = be.u.conj() if conj else be.u
        u_dag = u_base.conj().T
        sign = -1.0 if conj else 1.0
        for kind, val in sequence_ops(phis):
            if kind == "phase":
                diag = projector_diagonal(sign * val, be.n, n2)
                _apply_controlled_block(amps, layout, a1_val, a2_val, None, diag)
            else:
                mat = u_base if val > 0 else u_dag
                _apply_controlled_block(amps, layout, a1_val, a2_val, mat, None)
            _norm_check(amps, f"branch ({a1_val},{a2_val})")

    sv = StateVector(layout.n_qubits, amps)
    sv = hadamard(sv, layout.a2)
    sv = hadamard(sv, layout.a1)
    _norm_check(sv.amps, "ancilla recombination")

    block = sv.amps[_system_indices(layout)]
    success_amp = float(np.linalg.norm(block))
    if success_amp < 1e-12:
        raise NumericalError(f"degenerate post-selection: success amplitude {success_amp:.3e}")
    return block / GAMMA_LCU, success_amp
