"""Scalar QSP/QSVT polynomial evaluation and Adagrad training of phase angles.

The signal unitary for a scalar x in [-1, 1] is the reflection

    U(x) = [[x, sqrt(1-x^2)], [sqrt(1-x^2), -x]]

and the phase operator is Pi(phi) = diag(e^{i phi}, e^{-i phi}).  A phase
vector (phi_0, ..., phi_d) defines the alternating product

    Pi(phi_0) U Pi(phi_1) U^dag Pi(phi_2) U ... Pi(phi_d)

read right-to-left in application order, with d applications of U whose
dagger alternates starting from plain U.  Its top-left entry is a
degree-d polynomial in x with parity d and magnitude at most 1.

Training targets the scaled reciprocal s/x on [1/kappa, 1] through the
sum of an even-degree and an odd-degree branch; only the real part of the
sum is fitted.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .matkit import NumericalError

__all__ = [
    "ADAGRAD_EPS",
    "FD_STEP",
    "KAPPA_DEFAULT",
    "SAMPLE_COUNT",
    "S_DEFAULT",
    "LossReport",
    "PhaseSchedule",
    "eval_p_real",
    "eval_p_real_many",
    "eval_qsvt_scalar",
    "load_schedule",
    "loss",
    "loss_gradient",
    "relative_l2_error",
    "save_schedule",
    "scalar_u",
    "sequence_ops",
    "split_degree",
    "train_phases",
    "uniform_samples",
]

KAPPA_DEFAULT = 4.0
S_DEFAULT = 0.10145775
SAMPLE_COUNT = 100
ADAGRAD_EPS = 1e-8
FD_STEP = 1e-6

_SCHEDULE_FIELDS = (
    "d_even",
    "d_odd",
    "kappa",
    "s",
    "seed",
    "phis_even",
    "phis_odd",
    "final_loss",
    "loss_trace",
)


@dataclass
class PhaseSchedule:
    """Trained even/odd phase-angle vectors plus their target metadata."""

    phis_even: np.ndarray
    phis_odd: np.ndarray
    d_even: int
    d_odd: int
    kappa: float
    s: float
    seed: int
    final_loss: float
    loss_trace: np.ndarray = field(default_factory=lambda: np.empty(0))

    def __post_init__(self) -> None:
        self.phis_even = np.asarray(self.phis_even, dtype=float)
        self.phis_odd = np.asarray(self.phis_odd, dtype=float)
        self.loss_trace = np.asarray(self.loss_trace, dtype=float)
        self.validate()

    def validate(self) -> None:
        if self.d_even % 2 != 0 or self.d_even < 0:
            raise ValueError(f"d_even must be even and >= 0, got {self.d_even}")
        if self.d_odd % 2 != 1 or self.d_odd < 1:
            raise ValueError(f"d_odd must be odd and >= 1, got {self.d_odd}")
        if self.phis_even.shape != (self.d_even + 1,):
            raise ValueError(
                f"phis_even has length {self.phis_even.shape[0]}, expected {self.d_even + 1}"
            )
        if self.phis_odd.shape != (self.d_odd + 1,):
            raise ValueError(
                f"phis_odd has length {self.phis_odd.shape[0]}, expected {self.d_odd + 1}"
            )
        if not self.kappa > 1.0:
            raise ValueError(f"kappa must exceed 1, got {self.kappa}")
        # |s/x| <= s*kappa on [1/kappa, 1]; the target must stay bounded by 1
        if not 0.0 < self.s * self.kappa <= 1.0 + 1e-12:
            raise ValueError(f"s*kappa = {self.s * self.kappa} must lie in (0, 1]")

    @property
    def degree(self) -> int:
        """Total degree label d_even + d_odd (matches the CLI --degree flag)."""
        return self.d_even + self.d_odd


@dataclass(frozen=True)
class LossReport:
    iteration: int
    loss: float
    samples: np.ndarray


def split_degree(degree: int) -> tuple[int, int]:
    """Split a total degree into (even, odd) branch degrees.

    The two branch degrees are the consecutive integers summing to
    ``degree``, e.g. 21 -> (10, 11) and 11 -> (6, 5).
    """
    if degree % 2 != 1 or degree < 3:
        raise ValueError(f"total degree must be odd and >= 3, got {degree}")
    lo, hi = (degree - 1) // 2, (degree + 1) // 2
    return (lo, hi) if lo % 2 == 0 else (hi, lo)


def scalar_u(x: float) -> np.ndarray:
    """The 2x2 Hermitian signal unitary encoding a scalar x."""
    if abs(x) > 1.0 + 1e-12:
        raise ValueError(f"signal value must satisfy |x| <= 1, got {x}")
    c = np.sqrt(max(1.0 - x * x, 0.0))
    return np.array([[x, c], [c, -x]], dtype=complex)


def sequence_ops(phis: np.ndarray) -> list[tuple[str, float]]:
    """Gate stream of a phase vector, in application order.

    Yields ("phase", phi) and ("u", sign) entries; sign +1 means the signal
    unitary, -1 its adjoint.  The first gate applied is the phase with the
    highest index, and the signal alternates starting from +1.
    """
    phis = np.asarray(phis, dtype=float)
    d = phis.shape[0] - 1
    ops: list[tuple[str, float]] = [("phase", phis[d])]
    for k in range(d):
        ops.append(("u", 1.0 if k % 2 == 0 else -1.0))
        ops.append(("phase", phis[d - 1 - k]))
    return ops


def _eval_qsvt_batch(phis: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Top-left sequence entry for every x in ``xs`` (vectorized)."""
    xs = np.asarray(xs, dtype=float)
    c = np.sqrt(np.clip(1.0 - xs * xs, 0.0, None))
    u = np.empty((xs.shape[0], 2, 2), dtype=complex)
    u[:, 0, 0] = xs
    u[:, 0, 1] = c
    u[:, 1, 0] = c
    u[:, 1, 1] = -xs
    # U is real symmetric, so U and its adjoint coincide entry-wise
    res = None
    for kind, val in sequence_ops(phis):
        if kind == "phase":
            e = np.exp(1j * val)
            if res is None:
                res = np.zeros((xs.shape[0], 2, 2), dtype=complex)
                res[:, 0, 0] = e
                res[:, 1, 1] = np.conj(e)
            else:
                res[:, 0, :] *= e
                res[:, 1, :] *= np.conj(e)
        else:
            res = u @ res
    return res[:, 0, 0]


def eval_qsvt_scalar(phis: np.ndarray, parity: str, x: float) -> complex:
    """Evaluate the scalar QSVT polynomial of the given parity at x.

    Args:
        phis: phase vector of length degree + 1.
        parity: "even" or "odd"; must match the degree implied by ``phis``.
        x: point in [-1, 1].
    """
    phis = np.asarray(phis, dtype=float)
    d = phis.shape[0] - 1
    if parity not in ("even", "odd"):
        raise ValueError(f"parity must be 'even' or 'odd', got {parity!r}")
    if d % 2 != (0 if parity == "even" else 1):
        raise ValueError(
            f"{parity} parity needs an {parity}-degree sequence, got {d + 1} phases (degree {d})"
        )
    if abs(x) > 1.0 + 1e-12:
        raise ValueError(f"|x| <= 1 required, got {x}")
    return complex(_eval_qsvt_batch(phis, np.array([x]))[0])


def eval_p_real_many(sched: PhaseSchedule, xs: np.ndarray) -> np.ndarray:
    """Re[P_even(x) + P_odd(x)] on an array of points."""
    xs = np.asarray(xs, dtype=float)
    if np.any(np.abs(xs) > 1.0 + 1e-12):
        raise ValueError("evaluation points must satisfy |x| <= 1")
    total = _eval_qsvt_batch(sched.phis_even, xs) + _eval_qsvt_batch(sched.phis_odd, xs)
    return total.real


def eval_p_real(sched: PhaseSchedule, x: float) -> float:
    return float(eval_p_real_many(sched, np.array([x]))[0])


def uniform_samples(kappa: float = KAPPA_DEFAULT, count: int = SAMPLE_COUNT) -> np.ndarray:
    """Evenly spaced loss samples on [1/kappa, 1], endpoints included."""
    return np.linspace(1.0 / kappa, 1.0, count)


def _loss_theta(theta: np.ndarray, n_even: int, xs: np.ndarray, target: np.ndarray) -> float:
    total = _eval_qsvt_batch(theta[:n_even], xs) + _eval_qsvt_batch(theta[n_even:], xs)
    diff = total.real - target
    return float(np.mean(diff * diff))


def loss(sched: PhaseSchedule, samples: np.ndarray) -> float:
    """Mean squared error of Re[P_tot] against s/x over ``samples``."""
    samples = np.asarray(samples, dtype=float)
    if samples.size < 1:
        raise ValueError("need at least one sample point")
    if np.any(samples < 1.0 / sched.kappa - 1e-12) or np.any(samples > 1.0 + 1e-12):
        raise ValueError(f"samples must lie in [1/kappa, 1] = [{1.0 / sched.kappa}, 1]")
    theta = np.concatenate([sched.phis_even, sched.phis_odd])
    return _loss_theta(theta, sched.d_even + 1, samples, sched.s / samples)


def _gradient_theta(
    theta: np.ndarray,
    n_even: int,
    xs: np.ndarray,
    target: np.ndarray,
    step: float,
) -> np.ndarray:
    g = np.empty_like(theta)
    for j in range(theta.shape[0]):
        tp = theta.copy()
        tp[j] += step
        tm = theta.copy()
        tm[j] -= step
        g[j] = (_loss_theta(tp, n_even, xs, target) - _loss_theta(tm, n_even, xs, target)) / (
            2.0 * step
        )
    return g


def loss_gradient(sched: PhaseSchedule, samples: np.ndarray, step: float = FD_STEP) -> np.ndarray:
    """Central-difference gradient of the loss over the concatenated phases."""
    samples = np.asarray(samples, dtype=float)
    theta = np.concatenate([sched.phis_even, sched.phis_odd])
    return _gradient_theta(theta, sched.d_even + 1, samples, sched.s / samples, step)


def relative_l2_error(sched: PhaseSchedule, samples: np.ndarray | None = None) -> float:
    """Relative L2 distance between Re[P_tot] and s/x on the sample grid."""
    if samples is None:
        samples = uniform_samples(sched.kappa)
    samples = np.asarray(samples, dtype=float)
    target = sched.s / samples
    approx = eval_p_real_many(sched, samples)
    return float(np.linalg.norm(approx - target) / np.linalg.norm(target))


def train_phases(
    d_even: int,
    d_odd: int,
    kappa: float = KAPPA_DEFAULT,
    s: float = S_DEFAULT,
    iters: int = 100,
    lr: float = 0.1,
    seed: int = 0,
) -> PhaseSchedule:
    """Train phase angles for the scaled reciprocal target with Adagrad.

    Gradients come from per-parameter central differences on the loss; the
    Adagrad update is theta <- theta - lr * g / (sqrt(G) + eps) with G the
    element-wise running sum of squared gradients.  Angles start uniformly
    random in [0, 1).

    Returns a schedule carrying the per-iteration loss trace (one entry per
    iteration, recorded after the update).

    Raises:
        NumericalError: if the loss stops being finite, reporting the
            iteration at which it diverged.
    """
    if d_even % 2 != 0 or d_even < 0:
        raise ValueError(f"d_even must be even and >= 0, got {d_even}")
    if d_odd % 2 != 1 or d_odd < 1:
        raise ValueError(f"d_odd must be odd and >= 1, got {d_odd}")
    if iters < 1:
        raise ValueError(f"iters must be >= 1, got {iters}")
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")

    n_even = d_even + 1
    n_par = n_even + d_odd + 1
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0.0, 1.0, size=n_par)

    xs = uniform_samples(kappa)
    target = s / xs
    accum = np.zeros(n_par)
    trace = np.empty(iters)
    for it in range(iters):
        g = _gradient_theta(theta, n_even, xs, target, FD_STEP)
        accum += g * g
        theta = theta - lr * g / (np.sqrt(accum) + ADAGRAD_EPS)
        value = _loss_theta(theta, n_even, xs, target)
        if not np.isfinite(value):
            raise NumericalError(f"training loss diverged at iteration {it}")
        trace[it] = value

    return PhaseSchedule(
        phis_even=theta[:n_even].copy(),
        phis_odd=theta[n_even:].copy(),
        d_even=d_even,
        d_odd=d_odd,
        kappa=kappa,
        s=s,
        seed=seed,
        final_loss=float(trace[-1]),
        loss_trace=trace,
    )


def save_schedule(sched: PhaseSchedule, path: str | Path) -> None:
    """Write a schedule to JSON with full double precision."""
    payload = {
        "d_even": sched.d_even,
        "d_odd": sched.d_odd,
        "kappa": sched.kappa,
        "s": sched.s,
        "seed": sched.seed,
        "phis_even": sched.phis_even.tolist(),
        "phis_odd": sched.phis_odd.tolist(),
        "final_loss": sched.final_loss,
        "loss_trace": sched.loss_trace.tolist(),
    }
    Path(path).write_text(json.dumps(payload, indent=1))


def load_schedule(path: str | Path) -> PhaseSchedule:
    """Load a schedule from JSON, re-checking all invariants."""
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed schedule file {path}: {exc}") from exc
    for key in _SCHEDULE_FIELDS:
        if key not in raw:
            raise ValueError(f"schedule file {path} is missing field {key!r}")
    return PhaseSchedule(
        phis_even=np.asarray(raw["phis_even"], dtype=float),
        phis_odd=np.asarray(raw["phis_odd"], dtype=float),
        d_even=int(raw["d_even"]),
        d_odd=int(raw["d_odd"]),
        kappa=float(raw["kappa"]),
        s=float(raw["s"]),
        seed=int(raw["seed"]),
        final_loss=float(raw["final_loss"]),
        loss_trace=np.asarray(raw["loss_trace"], dtype=float),
    )
