"""End-to-end tests of the command-line interface via main(argv)."""
import json

import pytest

from squeezelab.cli import main


class TestPoint:
    """Single-point regime report"""

    def test_text_report(self, capsys):
        assert main(["point", "--chi", "0.5"]) == 0
        out = capsys.readouterr().out
        assert "coherent_feedback" in out
        assert "homodyne" in out
        assert "efficiency_threshold: 1" in out
        assert "monitored_stable_squeezing: yes" in out

    def test_json_report(self, capsys):
        assert main(["point", "--chi", "0.6", "--zeta", "0.9", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["eta_origin"] == "optimal"
        # (a + sqrt(a^2 + b)) / (2 zeta) at a = 0.2, b = 0.36
        assert doc["regimes"]["homodyne"]["sigma11"] == pytest.approx(
            (0.2 + 0.4**0.5) / 1.8, abs=1e-12
        )
        assert doc["efficiency_threshold"] == pytest.approx(0.8)

    def test_explicit_eta(self, capsys):
        assert main(["point", "--chi", "0.5", "--eta", "0.25", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["eta_origin"] == "given"
        assert doc["regimes"]["coherent_feedback"]["sigma11"] == pytest.approx(2.0 / 3.0)

    def test_missing_chi_is_usage_error(self, capsys):
        assert main(["point"]) == 2
        assert "chi" in capsys.readouterr().err

    def test_unstable_point_is_parameter_error(self, capsys):
        assert main(["point", "--chi", "1.5"]) == 2
        assert "error:" in capsys.readouterr().err

    def test_out_file(self, tmp_path, capsys):
        path = tmp_path / "point.json"
        assert main(["point", "--chi", "0.5", "--format", "json", "--out", str(path)]) == 0
        assert capsys.readouterr().out == ""
        assert json.loads(path.read_text())["chi"] == 0.5


class TestConfigPrecedence:
    """Flags > config file > defaults"""

    def test_config_supplies_parameters(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("chi = 0.7\nnbar = 2\n")
        assert main(["point", "--config", str(conf), "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["chi"] == 0.7
        assert doc["nbar"] == 2.0

    def test_flag_overrides_config(self, tmp_path, capsys):
        conf = tmp_path / "run.conf"
        conf.write_text("chi = 0.7\nzeta = 0.5\n")
        assert main(["point", "--config", str(conf), "--chi", "0.3", "--format", "json"]) == 0
        doc = json.loads(capsys.readouterr().out)
        assert doc["chi"] == 0.3
        assert doc["zeta"] == 0.5

    def test_missing_config_file_is_error(self, capsys):
        assert main(["point", "--config", "/nonexistent/run.conf", "--chi", "0.5"]) == 2
        assert "error:" in capsys.readouterr().err


class TestSweep:
    """Grid sweep output"""

    def test_csv_default(self, capsys):
        assert main(["sweep", "--grid-chi", "0.2:0.8:4"]) == 0
        lines = capsys.readouterr().out.strip().split("\n")
        assert lines[0].startswith("chi,gamma,nbar,zeta,eta,")
        assert len(lines) == 5

    def test_json_format(self, capsys):
        assert main(["sweep", "--grid-chi", "0.3:0.6:2", "--format", "json"]) == 0
        docs = json.loads(capsys.readouterr().out)
        assert len(docs) == 2

    def test_deterministic_bytes(self, tmp_path):
        paths = [tmp_path / "a.csv", tmp_path / "b.csv"]
        for path in paths:
            assert main(["sweep", "--grid-chi", "0.1:0.9:9", "--out", str(path)]) == 0
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_bad_grid_is_usage_error(self, capsys):
        assert main(["sweep", "--grid-chi", "0.1:0.9"]) == 2
        assert "start:stop:steps" in capsys.readouterr().err


class TestBoundSearch:
    """Certification campaign command"""

    def test_report_and_exit_code(self, capsys):
        assert main(["bound-search", "--trials", "60", "--seed", "1"]) == 0
        captured = capsys.readouterr()
        doc = json.loads(captured.out)
        assert doc["violations"] == 0
        assert doc["bound"] == 0.5
        assert doc["stable_count"] + doc["unstable_count"] == 60
        assert "trial 60/60" in captured.err

    def test_inconclusive_campaign_is_error(self, capsys):
        code = main(["bound-search", "--trials", "1", "--seed", "0", "--hamiltonian-scale", "50"])
        assert code == 2
        assert "no stable loops" in capsys.readouterr().err


class TestCompare:
    """Regime comparison table"""

    def test_table(self, capsys):
        assert main(["compare", "--grid-chi", "0.1:0.9:5"]) == 0
        out = capsys.readouterr().out
        assert "winner" in out
        assert "homodyne" in out
        assert "coherent_feedback" in out

    def test_unstable_rows_marked(self, capsys):
        assert main(["compare", "--grid-chi", "1.1:1.2:2"]) == 0
        assert "unstable" in capsys.readouterr().out


class TestVerify:
    """Self-check battery"""

    def test_all_checks_pass(self, capsys):
        assert main(["verify", "--trials", "60"]) == 0
        out = capsys.readouterr().out
        assert out.count(": PASS") == 8
        assert ": FAIL" not in out


class TestUsage:
    """Top-level argument handling"""

    def test_no_command_prints_usage(self, capsys):
        assert main([]) == 2
        assert "usage" in capsys.readouterr().err

    def test_unknown_flag(self, capsys):
        assert main(["point", "--frequency", "3"]) == 2

    def test_help_exits_zero(self, capsys):
        assert main(["--help"]) == 0
        assert "squeezelab" in capsys.readouterr().out
