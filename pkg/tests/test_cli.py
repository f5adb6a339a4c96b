import json

import numpy as np
import pytest

from qsvt_maxwell import cli, pade, phasekit


@pytest.fixture(scope="module")
def schedule_file(tmp_path_factory, best_deg21):
    path = tmp_path_factory.mktemp("sched") / "schedule_deg21.json"
    phasekit.save_schedule(best_deg21, path)
    return str(path)


def _read_csv(path):
    lines = path.read_text().strip().splitlines()
    header = lines[0].split(",")
    rows = [line.split(",") for line in lines[1:]]
    return header, rows


class TestTrainPhases:
    def test_writes_schedule_and_trace(self, tmp_path):
        out = tmp_path / "out"
        code = cli.main(
            ["train-phases", "--degree", "3", "--iters", "5", "--seed", "7", "--out", str(out)]
        )
        assert code == 0
        sched = phasekit.load_schedule(out / "schedule_deg3_seed7.json")
        assert (sched.d_even, sched.d_odd, sched.seed) == (2, 1, 7)
        header, rows = _read_csv(out / "loss_trace_deg3_seed7.csv")
        assert header == ["iteration", "loss"]
        assert len(rows) == 5

    def test_single_iteration_single_row(self, tmp_path):
        out = tmp_path / "out"
        assert cli.main(["train-phases", "--degree", "3", "--iters", "1", "--out", str(out)]) == 0
        _, rows = _read_csv(out / "loss_trace_deg3_seed0.csv")
        assert len(rows) == 1

    def test_even_degree_rejected(self, tmp_path, capsys):
        code = cli.main(["train-phases", "--degree", "20", "--out", str(tmp_path)])
        assert code == 1
        assert "odd" in capsys.readouterr().err


class TestEvalPoly:
    def test_reports_error_and_writes_curve(self, tmp_path, schedule_file, capsys, best_deg21):
        out = tmp_path / "out"
        assert cli.main(["eval-poly", "--schedule", schedule_file, "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert "relative L2 error" in printed
        reported = float(printed.rsplit(" ", 1)[-1])
        assert reported == pytest.approx(phasekit.relative_l2_error(best_deg21), rel=1e-12)
        assert reported <= 0.10
        header, rows = _read_csv(out / f"poly_eval_schedule_deg21.csv")
        assert header == ["x", "qsvt", "target"]
        assert len(rows) == 100
        # losslessly parseable back to the same doubles
        x0, q0, t0 = (float(v) for v in rows[0])
        assert x0 == 0.25
        assert q0 == pytest.approx(phasekit.eval_p_real(best_deg21, 0.25), abs=0)

    def test_batch_summary_and_degree_trend(self, tmp_path, trained, capsys):
        out = tmp_path / "out"
        paths = []
        for degree in (11, 21, 31, 41):
            for seed in (0, 1, 2):
                sched = trained(degree, seed)
                p = tmp_path / f"deg{degree}_seed{seed}.json"
                phasekit.save_schedule(sched, p)
                paths.append(str(p))
        assert cli.main(["eval-poly", "--schedule", *paths, "--out", str(out)]) == 0
        header, rows = _read_csv(out / "eval_summary.csv")
        assert header == ["schedule", "degree", "seed", "rel_l2_error"]
        errs: dict[int, list[float]] = {}
        for _, degree, _, err in rows:
            errs.setdefault(int(degree), []).append(float(err))
        med = {d: float(np.median(v)) for d, v in errs.items()}
        assert med[11] >= med[21] >= med[31]
        # the 100-iteration budget saturates past degree ~31; the highest
        # degree still clearly beats the lowest
        assert med[41] <= med[11]


class TestSolveLinear:
    def test_identity_system(self, tmp_path, schedule_file, capsys, best_deg21):
        a_path, b_path = tmp_path / "a.csv", tmp_path / "b.csv"
        np.savetxt(a_path, np.eye(4), delimiter=",")
        np.savetxt(b_path, np.arange(1.0, 5.0), delimiter=",")
        code = cli.main(
            ["solve-linear", "--matrix", str(a_path), "--rhs", str(b_path),
             "--schedule", schedule_file, "--out", str(tmp_path / "out")]
        )
        assert code == 0
        printed = capsys.readouterr().out
        dev = float(printed.strip().rsplit(" ", 1)[-1])
        assert dev <= 5.0 * phasekit.relative_l2_error(best_deg21)
        x = np.loadtxt(tmp_path / "out" / "solution.csv", delimiter=",", skiprows=1)
        assert x.shape == (4,)

    def test_pade_system_residual(self, tmp_path, schedule_file, capsys, best_deg21):
        sys64 = pade.build_pade_system(64)
        rng = np.random.default_rng(5)
        a_path, b_path = tmp_path / "a.csv", tmp_path / "b.csv"
        np.savetxt(a_path, sys64.A, delimiter=",")
        np.savetxt(b_path, rng.normal(size=64), delimiter=",")
        code = cli.main(
            ["solve-linear", "--matrix", str(a_path), "--rhs", str(b_path),
             "--schedule", schedule_file, "--out", str(tmp_path / "out")]
        )
        assert code == 0
        residual = float(capsys.readouterr().out.splitlines()[0].rsplit(" ", 1)[-1])
        assert residual <= 5.0 * phasekit.relative_l2_error(best_deg21)

    def test_ill_conditioned_matrix_fails_cleanly(self, tmp_path, schedule_file, capsys):
        a_path, b_path = tmp_path / "a.csv", tmp_path / "b.csv"
        np.savetxt(a_path, np.diag([1.0, 0.1]), delimiter=",")  # condition number 10 > 4
        np.savetxt(b_path, np.ones(2), delimiter=",")
        code = cli.main(
            ["solve-linear", "--matrix", str(a_path), "--rhs", str(b_path),
             "--schedule", schedule_file, "--out", str(tmp_path / "out")]
        )
        assert code == 1
        assert "sigma_min" in capsys.readouterr().err


class TestRunMaxwell:
    def test_default_run_outputs(self, tmp_path, schedule_file, capsys):
        out = tmp_path / "out"
        code = cli.main(
            ["run-maxwell", "--n", "16", "--schedule", schedule_file, "--out", str(out)]
        )
        assert code == 0
        assert "final fidelity" in capsys.readouterr().out
        header, rows = _read_csv(out / "run_record.csv")
        assert header == ["step", "t", "l2_rel_err", "fidelity"]
        assert len(rows) == 50
        header, rows = _read_csv(out / "snapshot_final.csv")
        assert header == ["z", "ex_quantum", "ex_classical", "abs_error"]
        assert len(rows) == 16

    def test_grid_sweep(self, tmp_path, schedule_file):
        out = tmp_path / "out"
        code = cli.main(
            ["run-maxwell", "--grid-sweep", "8,16", "--schedule", schedule_file,
             "--t-final", "0.1", "--out", str(out)]
        )
        assert code == 0
        header, rows = _read_csv(out / "sweep_summary.csv")
        assert header == ["n", "final_l2_rel_err", "final_fidelity"]
        assert [int(r[0]) for r in rows] == [8, 16]
        assert (out / "run_record_n8.csv").exists()
        assert (out / "run_record_n16.csv").exists()

    def test_statevector_backend_matches_operator(self, tmp_path, schedule_file):
        out_op = tmp_path / "op"
        out_sv = tmp_path / "sv"
        for backend, out in (("operator", out_op), ("statevector", out_sv)):
            code = cli.main(
                ["run-maxwell", "--n", "16", "--t-final", "0.1", "--backend", backend,
                 "--schedule", schedule_file, "--out", str(out)]
            )
            assert code == 0
        _, rows_op = _read_csv(out_op / "run_record.csv")
        _, rows_sv = _read_csv(out_sv / "run_record.csv")
        for r_op, r_sv in zip(rows_op, rows_sv):
            assert abs(float(r_op[2]) - float(r_sv[2])) <= 1e-8

    def test_rerun_byte_identical(self, tmp_path, schedule_file):
        out = tmp_path / "out"
        args = ["run-maxwell", "--n", "8", "--t-final", "0.05", "--schedule", schedule_file,
                "--out", str(out)]
        assert cli.main(args) == 0
        first = (out / "run_record.csv").read_bytes()
        meta_first = (out / "run_meta.json").read_bytes()
        assert cli.main(args) == 0
        assert (out / "run_record.csv").read_bytes() == first
        assert (out / "run_meta.json").read_bytes() == meta_first

    def test_missing_schedule_is_validation_error(self, tmp_path):
        assert cli.main(["run-maxwell", "--n", "16", "--out", str(tmp_path)]) == 1


class TestCompareBackends:
    def test_agreement_within_tolerance(self, tmp_path, schedule_file, capsys):
        code = cli.main(
            ["compare-backends", "--n", "16", "--schedule", schedule_file,
             "--trials", "3", "--out", str(tmp_path / "out")]
        )
        assert code == 0
        printed = capsys.readouterr().out
        assert float(printed.strip().rsplit(" ", 1)[-1]) <= 1e-8
        header, rows = _read_csv(tmp_path / "out" / "compare_backends.csv")
        assert header == ["trial", "max_abs_deviation"]
        assert len(rows) == 3

    def test_impossible_tolerance_is_numerical_failure(self, tmp_path, schedule_file):
        code = cli.main(
            ["compare-backends", "--n", "8", "--schedule", schedule_file,
             "--trials", "1", "--tol", "1e-30", "--out", str(tmp_path / "out")]
        )
        assert code == 2


class TestConfigHandling:
    def test_config_file_supplies_defaults_and_flags_win(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"degree": 3, "iters": 2, "seed": 3}))
        out = tmp_path / "out"
        code = cli.main(
            ["train-phases", "--config", str(cfg), "--seed", "4", "--out", str(out)]
        )
        assert code == 0
        sched = phasekit.load_schedule(out / "schedule_deg3_seed4.json")  # flag beat config
        assert sched.seed == 4
        assert sched.loss_trace.shape == (2,)  # config beat default

    def test_unknown_config_key_rejected(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"degrees": 3}))
        assert cli.main(["train-phases", "--config", str(cfg), "--out", str(tmp_path)]) == 1
        assert "unknown config key" in capsys.readouterr().err
