"""Matrix-level QSVT: Hermitian block encoding, phase sequences, and the solve.

The block encoding of a normalized matrix A (all singular values <= 1) is

    U(A) = [[A, sqrt(I - A A†)], [sqrt(I - A† A), -A†]]

which is unitary for any admissible A and Hermitian whenever A is.  The
even/odd sequences interleave U(A) with projector-controlled phases
exactly as in the scalar case (see ``phasekit.sequence_ops``); on a
symmetric positive definite A the top-left block of the product equals the
spectral reconstruction ``sum_k P(sigma_k) |w_k><v_k|``, which
``svd_oracle`` computes directly as an independent cross-check.

Scale bookkeeping for the linear solve: with A_norm = scale * A and a
schedule approximating s/x on the spectrum,

    x = A^{-1} b ~= (scale * ||b|| / s) * P_real(A_norm) (b / ||b||)
      = (scale / s) * P_real(A_norm) b.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matkit
from .matkit import NumericalError
from .phasekit import PhaseSchedule, sequence_ops

__all__ = [
    "BlockEncoding",
    "CachedInverse",
    "ProjectorPhase",
    "QsvtSolveResult",
    "apply_inverse",
    "block_encode",
    "build_p_real",
    "cached_inverse",
    "encode_normalized",
    "exact_inverse",
    "projector_diagonal",
    "sequence_even",
    "sequence_odd",
    "svd_oracle",
]

_UNITARY_TOL = 1e-10


@dataclass(frozen=True)
class BlockEncoding:
    """A normalized matrix, its scale factor, and the embedding unitary.

    ``a_norm = scale * a_original`` occupies the top-left block of ``u``.
    ``u`` is always unitary; it is Hermitian when the input is.
    """

    a_norm: np.ndarray
    scale: float
    u: np.ndarray

    @property
    def n(self) -> int:
        return self.a_norm.shape[0]


@dataclass(frozen=True)
class ProjectorPhase:
    """Diagonal phase operator e^{(-1)^{b_i} i phi} over the embedding space.

    ``signature`` holds the bits b_i; False marks the encoded block.
    """

    phi: float
    signature: np.ndarray

    def diagonal(self) -> np.ndarray:
        sign = np.where(self.signature, -1.0, 1.0)
        return np.exp(1j * self.phi * sign)

    def matrix(self) -> np.ndarray:
        return np.diag(self.diagonal())


@dataclass(frozen=True)
class QsvtSolveResult:
    """Solution estimate of A x = b with its rescale factor and residual."""

    x: np.ndarray
    gamma: float
    residual: float


def projector_diagonal(phi: float, n_encoded: int, n_total: int) -> np.ndarray:
    """Diagonal of Pi(phi): e^{+i phi} on the encoded block, e^{-i phi} off it."""
    d = np.full(n_total, np.exp(-1j * phi), dtype=complex)
    d[:n_encoded] = np.exp(1j * phi)
    return d


def _hermitian_sqrt(m: np.ndarray) -> np.ndarray:
    """Principal square root of a Hermitian PSD matrix via eigendecomposition."""
    w, q = np.linalg.eigh((m + m.conj().T) / 2.0)
    if w.min() < -1e-8:
        raise NumericalError(f"matrix is not positive semidefinite (min eigenvalue {w.min()})")
    w = np.clip(w, 0.0, None)
    return (q * np.sqrt(w)) @ q.conj().T


def encode_normalized(a_norm: np.ndarray) -> BlockEncoding:
    """Embed an already-normalized matrix (singular values <= 1, scale 1)."""
    a_norm = np.asarray(a_norm, dtype=complex)
    if a_norm.ndim != 2 or a_norm.shape[0] != a_norm.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a_norm.shape}")
    if not np.all(np.isfinite(a_norm)):
        raise ValueError("matrix contains non-finite entries")
    sv = np.linalg.svd(a_norm, compute_uv=False)
    if sv.max() > 1.0 + 1e-10:
        raise ValueError(f"matrix is not normalized: max singular value {sv.max()}")
    n = a_norm.shape[0]
    eye = np.eye(n)
    a_dag = a_norm.conj().T
    u = np.block(
        [
            [a_norm, _hermitian_sqrt(eye - a_norm @ a_dag)],
            [_hermitian_sqrt(eye - a_dag @ a_norm), -a_dag],
        ]
    )
    defect = matkit.unitarity_defect(u)
    if defect > _UNITARY_TOL:
        raise NumericalError(f"block encoding is not unitary: defect {defect:.3e}")
    return BlockEncoding(a_norm=a_norm, scale=1.0, u=u)


def block_encode(a: np.ndarray, kappa: float) -> BlockEncoding:
    """Normalize a matrix by its largest singular value and embed it.

    The normalized spectrum must fit the training window [1/kappa, 1]:
    matrices with condition number above ``kappa`` are rejected.
    """
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"matrix must be square, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    if kappa <= 1.0:
        raise ValueError(f"kappa must exceed 1, got {kappa}")
    sv = np.linalg.svd(a, compute_uv=False)
    s_max, s_min = float(sv.max()), float(sv.min())
    if s_min * kappa < s_max * (1.0 - 1e-12):
        raise ValueError(
            f"condition number {s_max / s_min if s_min else np.inf:.4g} exceeds kappa={kappa}: "
            f"sigma_min*kappa = {s_min * kappa:.6g} < sigma_max = {s_max:.6g}"
        )
    scale = 1.0 / s_max
    enc = encode_normalized(scale * a)
    return BlockEncoding(a_norm=enc.a_norm, scale=scale, u=enc.u)


def _sequence(be: BlockEncoding, phis: np.ndarray) -> np.ndarray:
    n = be.n
    n2 = 2 * n
    u_dag = be.u.conj().T
    res = np.eye(n2, dtype=complex)
    for kind, val in sequence_ops(phis):
        if kind == "phase":
            res = projector_diagonal(val, n, n2)[:, None] * res
        else:
            res = (be.u if val > 0 else u_dag) @ res
    return res[:n, :n]


def sequence_even(be: BlockEncoding, phis: np.ndarray) -> np.ndarray:
    """Top-left block of the even-parity sequence (d+1 phases, d even)."""
    phis = np.asarray(phis, dtype=float)
    if phis.shape[0] % 2 != 1:
        raise ValueError(
            f"even sequence needs an odd number of phases (degree+1), got {phis.shape[0]}"
        )
    return _sequence(be, phis)


def sequence_odd(be: BlockEncoding, phis: np.ndarray) -> np.ndarray:
    """Top-left block of the odd-parity sequence (d+1 phases, d odd)."""
    phis = np.asarray(phis, dtype=float)
    if phis.shape[0] % 2 != 0:
        raise ValueError(
            f"odd sequence needs an even number of phases (degree+1), got {phis.shape[0]}"
        )
    return _sequence(be, phis)


def svd_oracle(be: BlockEncoding, poly) -> np.ndarray:
    """Spectral evaluation sum_k poly(sigma_k) |w_k><v_k| of the encoded matrix."""
    res = matkit.svd(be.a_norm)
    values = np.array([poly(sv) for sv in res.singular_values], dtype=complex)
    return (res.left_vectors * values) @ res.right_vectors.conj().T


def build_p_real(be: BlockEncoding, sched: PhaseSchedule) -> np.ndarray:
    """Real part of P_even(A) + P_odd(A) as a real matrix.

    Entry-wise real part equals (M + conj(M)) / 2; for a real A the
    conjugated branch is realizable by negating every phase, so this is
    exactly the operator the two-ancilla circuit post-selects.
    """
    total = sequence_even(be, sched.phis_even) + sequence_odd(be, sched.phis_odd)
    return np.ascontiguousarray(total.real)


@dataclass(frozen=True)
class CachedInverse:
    """Precomputed approximate-inverse applicator for a fixed matrix.

    ``solve_matrix = (scale / s) * p_real`` maps b directly to the solution
    estimate of A x = b; the norm of b cancels against the state-prep
    normalization.
    """

    encoding: BlockEncoding
    s: float
    p_real: np.ndarray
    solve_matrix: np.ndarray

    def apply(self, b: np.ndarray) -> np.ndarray:
        return self.solve_matrix @ b


def cached_inverse(be: BlockEncoding, sched: PhaseSchedule) -> CachedInverse:
    """Build the cached P_real applicator for repeated solves against one A."""
    p_real = build_p_real(be, sched)
    return CachedInverse(
        encoding=be,
        s=sched.s,
        p_real=p_real,
        solve_matrix=(be.scale / sched.s) * p_real,
    )


def exact_inverse(be: BlockEncoding, s: float = 1.0) -> CachedInverse:
    """SVD-exact counterpart of ``cached_inverse`` (p_real = s / sigma).

    Substituting this for a trained schedule removes the polynomial
    approximation error entirely, leaving bit-level agreement with a
    classical solve as the expected behaviour.
    """
    p_real = np.ascontiguousarray(svd_oracle(be, lambda x: s / x).real)
    return CachedInverse(
        encoding=be,
        s=s,
        p_real=p_real,
        solve_matrix=(be.scale / s) * p_real,
    )


def apply_inverse(be: BlockEncoding, sched: PhaseSchedule, b: np.ndarray) -> QsvtSolveResult:
    """Solve A x = b through the trained polynomial of the inverse.

    The residual is measured against the original (unscaled) matrix.
    """
    b = np.asarray(b)
    norm_b = float(np.linalg.norm(b))
    if norm_b == 0.0:
        raise ValueError("right-hand side must be nonzero")
    inv = cached_inverse(be, sched)
    x = inv.apply(b)
    a_orig = be.a_norm / be.scale
    residual = float(np.linalg.norm(a_orig @ x - b) / norm_b)
    return QsvtSolveResult(x=x, gamma=be.scale * norm_b / sched.s, residual=residual)
