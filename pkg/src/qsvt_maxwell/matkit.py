"""Dense complex linear-algebra kernel and the cyclic tridiagonal solver.

Vectors and matrices are plain numpy arrays. Every function returns fresh
arrays and never mutates its inputs, so results are safe to share across
threads.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "NumericalError",
    "SvdResult",
    "adjoint",
    "matmul",
    "solve_cyclic_tridiag",
    "svd",
    "unitarity_defect",
]

# pivot / denominator magnitudes below this (relative to the coefficient
# scale) are treated as singular
_SINGULAR_RTOL = 1e-13


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a result within tolerance."""


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Complex matrix product with an explicit shape check."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape[-1] != b.shape[0]:
        raise ValueError(f"cannot multiply shapes {a.shape} and {b.shape}")
    return a @ b


def adjoint(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).conj().T


def unitarity_defect(m: np.ndarray) -> float:
    """max-norm of M†M - I; zero for an exactly unitary M."""
    m = np.asarray(m)
    eye = np.eye(m.shape[0])
    return float(np.abs(adjoint(m) @ m - eye).max())


@dataclass(frozen=True)
class SvdResult:
    """SVD with descending singular values and a deterministic sign gauge.

    ``left_vectors`` and ``right_vectors`` hold the vectors as columns, so
    the input factors as ``left_vectors @ diag(singular_values) @
    right_vectors.conj().T``.
    """

    singular_values: np.ndarray
    left_vectors: np.ndarray
    right_vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.left_vectors * self.singular_values) @ self.right_vectors.conj().T


def svd(m: np.ndarray) -> SvdResult:
    """Singular value decomposition of a dense matrix.

    Values come back sorted descending.  Each right vector is re-phased so
    its first non-negligible component is real and positive (the matching
    left vector gets the same phase), which makes the factorization
    reproducible across runs.
    """
    m = np.asarray(m, dtype=complex)
    if not np.all(np.isfinite(m)):
        raise ValueError("svd input contains non-finite entries")
    try:
        w, sv, vh = np.linalg.svd(m)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise NumericalError(f"svd did not converge: {exc}") from exc

    right = vh.conj().T
    left = w.copy()
    for k in range(sv.shape[0]):
        col = right[:, k]
        nz = np.flatnonzero(np.abs(col) > 1e-12)
        if nz.size == 0:
            continue
        phase = col[nz[0]] / abs(col[nz[0]])
        right[:, k] = col * np.conj(phase)
        left[:, k] = left[:, k] * np.conj(phase)
    return SvdResult(sv, left, right)


def _thomas_constant_off(diag: np.ndarray, off: float, rhs: np.ndarray) -> np.ndarray:
    """Tridiagonal solve with a per-row diagonal and constant off-diagonals."""
    n = diag.shape[0]
    scale = max(float(np.abs(diag).max()), abs(off))
    cp = np.empty(n - 1)
    dp = np.empty(n, dtype=np.result_type(rhs.dtype, float))

    piv = diag[0]
    if abs(piv) <= _SINGULAR_RTOL * scale:
        raise NumericalError("singular tridiagonal system (zero pivot)")
    cp[0] = off / piv
    dp[0] = rhs[0] / piv
    for i in range(1, n):
        piv = diag[i] - off * cp[i - 1]
        if abs(piv) <= _SINGULAR_RTOL * scale:
            raise NumericalError("singular tridiagonal system (zero pivot)")
        if i < n - 1:
            cp[i] = off / piv
        dp[i] = (rhs[i] - off * dp[i - 1]) / piv

    x = np.empty_like(dp)
    x[-1] = dp[-1]
    for i in range(n - 2, -1, -1):
        x[i] = dp[i] - cp[i] * x[i + 1]
    return x


def solve_cyclic_tridiag(diag: float, off: float, n: int, rhs: np.ndarray) -> np.ndarray:
    """Solve the periodic tridiagonal system with constant coefficients.

    The matrix has ``diag`` on the main diagonal and ``off`` on the two
    adjacent diagonals, with periodic wrap-around corners.  Uses the
    Sherman-Morrison rank-one correction over a plain Thomas sweep.

    Args:
        diag: main-diagonal value.
        off: value on the +/-1 diagonals (and the two wrap corners).
        n: system size, at least 3.
        rhs: right-hand side of length ``n`` (real or complex).

    Raises:
        NumericalError: if the system is singular to working precision.
    """
    if n < 3:
        raise ValueError(f"cyclic tridiagonal system needs n >= 3, got {n}")
    rhs = np.asarray(rhs)
    if rhs.shape != (n,):
        raise ValueError(f"rhs has shape {rhs.shape}, expected ({n},)")

    if off == 0.0:
        if diag == 0.0:
            raise NumericalError("singular system: zero matrix")
        return rhs / diag

    # corner entries are removed by the rank-one update u v^T with
    # u = (gamma, 0, ..., 0, off),  v = (1, 0, ..., 0, off/gamma)
    gamma = -diag if diag != 0.0 else off
    dvec = np.full(n, float(diag))
    dvec[0] -= gamma
    dvec[-1] -= off * off / gamma

    y = _thomas_constant_off(dvec, off, rhs)
    u = np.zeros(n)
    u[0] = gamma
    u[-1] = off
    z = _thomas_constant_off(dvec, off, u)

    vy = y[0] + (off / gamma) * y[-1]
    vz = z[0] + (off / gamma) * z[-1]
    denom = 1.0 + vz
    if abs(denom) <= _SINGULAR_RTOL:
        raise NumericalError("singular cyclic tridiagonal system")
    x = y - z * (vy / denom)
    if not np.all(np.isfinite(x)):
        raise NumericalError("cyclic tridiagonal solve produced non-finite values")
    return x
