"""Command-line front end: exit codes are the machine contract."""

import json

from etagap.cli import main


def small_square_config(tmp_path, **over):
    raw = {
        "name": "cli_square",
        "metric": "euclidean",
        "domain": {
            "bounds": [["0", "3.141592653589793"], ["0", "3.141592653589793"]],
            "resolution": [48, 48],
        },
        "tensor": {"kind": "identity"},
        "drift": {"kind": "zero"},
        "solver": {"k": 10, "seed": 1},
        "bounds": {"theorems": ["thm11"], "k_range": [2, 8]},
        "verify": ["gap", "yang"],
    }
    raw.update(over)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(raw))
    return path


class TestSpectrumCommand:
    def test_builtin_square_exit_zero(self, tmp_path):
        code = main(
            [
                "spectrum",
                "square_laplacian",
                "--resolution",
                "48",
                "--out",
                str(tmp_path / "o"),
            ]
        )
        assert code == 0
        csv = (tmp_path / "o" / "spectrum.csv").read_text().splitlines()
        assert csv[0] == "j,lambda,residual,multiplicity_group"
        assert len(csv) == 13

    def test_missing_config_exit_3(self):
        assert main(["spectrum", "definitely_missing.json"]) == 3

    def test_k_exceeding_dofs_exit_3(self, tmp_path):
        cfg = small_square_config(tmp_path, solver={"k": 10_000})
        assert main(["spectrum", str(cfg)]) == 3

    def test_malformed_json_exit_3(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["spectrum", str(bad)]) == 3


class TestVerifyCommand:
    def test_square_gap_yang_exit_zero(self, tmp_path):
        cfg = small_square_config(tmp_path)
        code = main(["verify", str(cfg), "--checks", "gap,yang", "--out", str(tmp_path / "o")])
        assert code == 0
        summary = json.loads((tmp_path / "o" / "summary.json").read_text())
        assert summary["counts"]["fail"] == 0

    def test_negative_control_exit_one(self, tmp_path):
        cfg = small_square_config(
            tmp_path,
            bounds={"theorems": ["thm11"], "k_range": [2, 8], "c_scale": "1e-6"},
        )
        assert main(["verify", str(cfg), "--out", str(tmp_path / "o")]) == 1

    def test_unknown_check_exit_3(self, tmp_path):
        cfg = small_square_config(tmp_path)
        assert main(["verify", str(cfg), "--checks", "nonsense"]) == 3

    def test_degenerate_rows_skipped_exit_zero(self, tmp_path):
        # cor32 on the square skips multiplet rows but still exits 0
        cfg = small_square_config(tmp_path, verify=["gap", "cor32"])
        assert main(["verify", str(cfg), "--out", str(tmp_path / "o")]) == 0


class TestLemma31Command:
    def test_seeded_run_exit_zero(self, capsys):
        assert main(["lemma31", "--trials", "3000", "--seed", "5"]) == 0
        out = capsys.readouterr()
        assert "counterexamples=0" in out.err

    def test_zero_trials_exit_3(self):
        assert main(["lemma31", "--trials", "0"]) == 3

    def test_rerun_identical_stream(self, capsys):
        main(["lemma31", "--trials", "500", "--seed", "11"])
        first = capsys.readouterr()
        main(["lemma31", "--trials", "500", "--seed", "11"])
        second = capsys.readouterr()
        assert first.err == second.err
        assert first.out == second.out


class TestReportCommand:
    def test_render_summary(self, tmp_path, capsys):
        cfg = small_square_config(tmp_path)
        main(["verify", str(cfg), "--out", str(tmp_path / "o")])
        capsys.readouterr()
        code = main(["report", str(tmp_path / "o" / "summary.json")])
        assert code == 0
        out = capsys.readouterr()
        assert "thm11" in out.err

    def test_missing_summary_exit_3(self, tmp_path):
        assert main(["report", str(tmp_path / "nope.json")]) == 3


class TestUsage:
    def test_no_command_exit_3(self):
        assert main([]) == 3

    def test_unknown_flag_exit_3(self):
        assert main(["spectrum", "square_laplacian", "--frobnicate"]) == 3

    def test_thread_cap_env(self, monkeypatch):
        monkeypatch.setenv("ETAGAP_THREADS", "1")
        assert main(["lemma31", "--trials", "50", "--seed", "2"]) == 0
