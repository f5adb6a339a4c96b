"""Command-line surface: train phases, evaluate polynomials, solve systems,
and run the Maxwell benchmark.

Exit codes: 0 success, 1 validation error, 2 numerical failure.  All
emitted CSV numbers carry 17 significant digits so files round-trip
losslessly; reruns with identical flags produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import maxwell, pade, phasekit, qcsim, qsvt_op
from .matkit import NumericalError

__all__ = ["main"]

_DEFAULTS: dict[str, dict] = {
    "train-phases": {
        "degree": 21,
        "iters": 100,
        "lr": 0.1,
        "kappa": phasekit.KAPPA_DEFAULT,
        "s": phasekit.S_DEFAULT,
        "seed": 0,
        "out": "out",
    },
    "eval-poly": {"schedule": None, "out": "out"},
    "solve-linear": {
        "matrix": None,
        "rhs": None,
        "schedule": None,
        "backend": "operator",
        "out": "out",
    },
    "run-maxwell": {
        "n": 128,
        "dt": 0.01,
        "t_final": 0.5,
        "eps": 1.0,
        "mu": 1.0,
        "schedule": None,
        "backend": "operator",
        "grid_sweep": None,
        "out": "out",
    },
    "compare-backends": {
        "n": 16,
        "schedule": None,
        "trials": 5,
        "seed": 0,
        "tol": 1e-8,
        "out": "out",
    },
}


def _fmt(x) -> str:
    return f"{x:.17g}"


def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def _merge_config(args: argparse.Namespace, command: str) -> dict:
    """Resolve parameters with precedence flags > config file > defaults."""
    defaults = _DEFAULTS[command]
    merged = dict(defaults)
    if args.config is not None:
        cfg = json.loads(Path(args.config).read_text())
        unknown = set(cfg) - set(defaults)
        if unknown:
            raise ValueError(f"unknown config keys for {command}: {sorted(unknown)}")
        merged.update(cfg)
    for key in defaults:
        flag = getattr(args, key, None)
        if flag is not None:
            merged[key] = flag
    return merged


def _out_dir(params: dict) -> Path:
    out = Path(params["out"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_vector(path: str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=1)
    return data.reshape(-1)


def _load_matrix(path: str) -> np.ndarray:
    data = np.loadtxt(path, delimiter=",", ndmin=2)
    return data


def cmd_train_phases(args: argparse.Namespace) -> int:
    params = _merge_config(args, "train-phases")
    degree = int(params["degree"])
    d_even, d_odd = phasekit.split_degree(degree)
    sched = phasekit.train_phases(
        d_even,
        d_odd,
        kappa=float(params["kappa"]),
        s=float(params["s"]),
        iters=int(params["iters"]),
        lr=float(params["lr"]),
        seed=int(params["seed"]),
    )
    out = _out_dir(params)
    tag = f"deg{degree}_seed{params['seed']}"
    sched_path = out / f"schedule_{tag}.json"
    phasekit.save_schedule(sched, sched_path)
    trace_path = out / f"loss_trace_{tag}.csv"
    _write_csv(
        trace_path,
        ["iteration", "loss"],
        [(k, float(v)) for k, v in enumerate(sched.loss_trace)],
    )
    rel = phasekit.relative_l2_error(sched)
    print(f"trained degree {degree} (even {d_even} + odd {d_odd}), seed {params['seed']}")
    print(f"final loss {_fmt(sched.final_loss)}  relative L2 error {_fmt(rel)}")
    print(f"wrote {sched_path} and {trace_path}")
    return 0


def cmd_eval_poly(args: argparse.Namespace) -> int:
    params = _merge_config(args, "eval-poly")
    paths = params["schedule"]
    if not paths:
        raise ValueError("eval-poly requires at least one --schedule file")
    if isinstance(paths, str):
        paths = [paths]
    out = _out_dir(params)
    summary = []
    for path in paths:
        sched = phasekit.load_schedule(path)
        xs = phasekit.uniform_samples(sched.kappa)
        approx = phasekit.eval_p_real_many(sched, xs)
        target = sched.s / xs
        rel = float(np.linalg.norm(approx - target) / np.linalg.norm(target))
        stem = Path(path).stem
        _write_csv(
            out / f"poly_eval_{stem}.csv",
            ["x", "qsvt", "target"],
            zip(xs.tolist(), approx.tolist(), target.tolist()),
        )
        summary.append((stem, sched.degree, sched.seed, rel))
        print(f"{stem}: degree {sched.degree} seed {sched.seed} relative L2 error {_fmt(rel)}")
    if len(summary) > 1:
        _write_csv(out / "eval_summary.csv", ["schedule", "degree", "seed", "rel_l2_error"], summary)
    return 0


def cmd_solve_linear(args: argparse.Namespace) -> int:
    params = _merge_config(args, "solve-linear")
    for key in ("matrix", "rhs", "schedule"):
        if not params[key]:
            raise ValueError(f"solve-linear requires --{key}")
    a = _load_matrix(params["matrix"])
    b = _load_vector(params["rhs"])
    if a.shape[0] != a.shape[1] or a.shape[0] != b.shape[0]:
        raise ValueError(f"incompatible shapes: matrix {a.shape}, rhs {b.shape}")
    sched = phasekit.load_schedule(params["schedule"])
    be = qsvt_op.block_encode(a, sched.kappa)

    if params["backend"] == "statevector":
        inv = maxwell.StatevectorInverse(be, sched)
        x = inv.apply(b.astype(complex))
        x = x.real if np.abs(x.imag).max() < 1e-9 else x
        residual = float(np.linalg.norm(a @ x - b) / np.linalg.norm(b))
    else:
        result = qsvt_op.apply_inverse(be, sched, b)
        x, residual = result.x.real, result.residual

    x_ref = np.linalg.solve(a, b)
    rel_dev = float(np.linalg.norm(x - x_ref) / np.linalg.norm(x_ref))
    out = _out_dir(params)
    _write_csv(out / "solution.csv", ["x"], [(float(v),) for v in x])
    print(f"residual ||Ax - b|| / ||b|| = {_fmt(residual)}")
    print(f"relative deviation from classical solve = {_fmt(rel_dev)}")
    return 0


def _run_one_maxwell(n: int, params: dict, sched: phasekit.PhaseSchedule, out: Path, suffix: str) -> maxwell.RunRecord:
    config = maxwell.MaxwellConfig(
        n=n,
        dt=float(params["dt"]),
        t_final=float(params["t_final"]),
        eps=float(params["eps"]),
        mu=float(params["mu"]),
        backend=params["backend"],
    )
    record = maxwell.run(config, schedule=sched)
    _write_csv(
        out / f"run_record{suffix}.csv",
        ["step", "t", "l2_rel_err", "fidelity"],
        [
            (k + 1, float(record.times[k]), float(record.l2_rel_err[k]), float(record.fidelity[k]))
            for k in range(record.times.shape[0])
        ],
    )
    final_step = max(record.snapshots)
    snap = record.snapshots[final_step]
    _write_csv(
        out / f"snapshot_final{suffix}.csv",
        ["z", "ex_quantum", "ex_classical", "abs_error"],
        zip(
            snap["z"].tolist(),
            snap["ex_quantum"].tolist(),
            snap["ex_classical"].tolist(),
            np.abs(snap["ex_quantum"] - snap["ex_classical"]).tolist(),
        ),
    )
    return record


def cmd_run_maxwell(args: argparse.Namespace) -> int:
    params = _merge_config(args, "run-maxwell")
    if not params["schedule"]:
        raise ValueError("run-maxwell requires --schedule")
    sched = phasekit.load_schedule(params["schedule"])
    out = _out_dir(params)

    meta = {k: params[k] for k in sorted(params) if k != "out"}
    (_out_dir(params) / "run_meta.json").write_text(json.dumps(meta, indent=1))

    if params["grid_sweep"]:
        grids = [int(v) for v in str(params["grid_sweep"]).split(",") if v]
        summary = []
        for n in grids:
            record = _run_one_maxwell(n, params, sched, out, f"_n{n}")
            summary.append((n, float(record.l2_rel_err[-1]), float(record.fidelity[-1])))
            print(
                f"n={n}: final l2_rel_err {_fmt(summary[-1][1])} final fidelity {_fmt(summary[-1][2])}"
            )
        _write_csv(out / "sweep_summary.csv", ["n", "final_l2_rel_err", "final_fidelity"], summary)
        return 0

    record = _run_one_maxwell(int(params["n"]), params, sched, out, "")
    print(f"steps: {record.times.shape[0]}")
    print(f"final l2_rel_err {_fmt(float(record.l2_rel_err[-1]))}")
    print(f"final fidelity {_fmt(float(record.fidelity[-1]))}")
    return 0


def cmd_compare_backends(args: argparse.Namespace) -> int:
    params = _merge_config(args, "compare-backends")
    if not params["schedule"]:
        raise ValueError("compare-backends requires --schedule")
    sched = phasekit.load_schedule(params["schedule"])
    n = int(params["n"])
    sys_pade = pade.build_pade_system(n)
    be = qsvt_op.block_encode(sys_pade.A, sched.kappa)
    inv = qsvt_op.cached_inverse(be, sched)
    layout = qcsim.CircuitLayout.default(int(np.log2(n)))

    rng = np.random.default_rng(int(params["seed"]))
    rows = []
    worst = 0.0
    for trial in range(int(params["trials"])):
        b = rng.normal(size=n) + 1j * rng.normal(size=n)
        b_hat = b / np.linalg.norm(b)
        reference = inv.p_real @ b_hat
        circuit, _ = qcsim.run_lcu_qsvt(be, sched, b, layout)
        dev = float(np.abs(circuit - reference).max())
        worst = max(worst, dev)
        rows.append((trial, dev))
    out = _out_dir(params)
    _write_csv(out / "compare_backends.csv", ["trial", "max_abs_deviation"], rows)
    print(f"max deviation over {params['trials']} trials: {_fmt(worst)}")
    if worst > float(params["tol"]):
        raise NumericalError(f"backends deviate by {worst:.3e} > tol {params['tol']:.3e}")
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsvt-maxwell",
        description="QSVT linear solver and 1D Maxwell benchmark driver",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="JSON file with parameter defaults")
        p.add_argument("--out", help="output directory (default: out)")

    p = sub.add_parser("train-phases", help="train a phase schedule for the reciprocal target")
    p.add_argument("--degree", type=int, help="total polynomial degree (odd, >= 3)")
    p.add_argument("--iters", type=int)
    p.add_argument("--lr", type=float)
    p.add_argument("--kappa", type=float)
    p.add_argument("--s", type=float, dest="s", help="reciprocal scale factor")
    p.add_argument("--seed", type=int)
    common(p)

    p = sub.add_parser("eval-poly", help="evaluate schedules against the reciprocal target")
    p.add_argument("--schedule", nargs="+", help="schedule JSON file(s)")
    common(p)

    p = sub.add_parser("solve-linear", help="solve A x = b from CSV inputs")
    p.add_argument("--matrix", help="dense matrix CSV, one row per line")
    p.add_argument("--rhs", help="right-hand side CSV, one value per line")
    p.add_argument("--schedule")
    p.add_argument("--backend", choices=["operator", "statevector"])
    common(p)

    p = sub.add_parser("run-maxwell", help="run the 1D Maxwell benchmark")
    p.add_argument("--n", type=int)
    p.add_argument("--dt", type=float)
    p.add_argument("--t-final", type=float, dest="t_final")
    p.add_argument("--eps", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--schedule")
    p.add_argument("--backend", choices=["operator", "statevector", "exact"])
    p.add_argument("--grid-sweep", dest="grid_sweep", help="comma-separated grid sizes")
    common(p)

    p = sub.add_parser("compare-backends", help="cross-check circuit vs operator backend")
    p.add_argument("--n", type=int)
    p.add_argument("--schedule")
    p.add_argument("--trials", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--tol", type=float)
    common(p)

    return parser


_COMMANDS = {
    "train-phases": cmd_train_phases,
    "eval-poly": cmd_eval_poly,
    "solve-linear": cmd_solve_linear,
    "run-maxwell": cmd_run_maxwell,
    "compare-backends": cmd_compare_backends,
}


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
