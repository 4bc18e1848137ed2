"""
Tests for the Command-Line Entry Point
"""

import json

import pytest
import sys
from pathlib import Path
from unittest.mock import patch

# Add repository root to path
sys.path.insert(0, str(Path(__file__).parent.parent.parent))


@pytest.fixture(autouse=True)
def quiet_logging():
    """Keep CLI runs from reconfiguring the root logger."""
    with patch("evps.main.setup_logging") as mock:
        yield mock


class TestLogneg:
    """Tests for the logneg subcommand."""

    def test_bell_limit(self, capsys):
        """Test weak squeezing subtracts to one ebit."""
        from evps.main import main

        code = main(["logneg", "--modes", "2", "--r", "1e-3", "--k", "0", "--subtract",
                     "--splitting", "1:2"])
        assert code == 0
        assert float(capsys.readouterr().out.strip()) == pytest.approx(1.0, abs=1e-3)

    def test_k_does_not_change_initial_value(self, capsys):
        """Test --k leaves the pre-subtraction value unchanged."""
        from evps.main import main

        main(["logneg", "--modes", "2", "--r", "0.2", "--k", "0", "--splitting", "1:2"])
        main(["logneg", "--modes", "2", "--r", "0.2", "--k", "1", "--splitting", "1:2"])
        first, second = (float(v) for v in capsys.readouterr().out.split())
        assert first == pytest.approx(second, abs=1e-6)

    def test_direct_explicit(self, capsys):
        """Test an explicit labelling through the full tensor."""
        from evps.main import main

        code = main(["logneg", "--modes", "3", "--r", "0.2", "--direct", "--splitting", "1:2,3"])
        assert code == 0
        assert float(capsys.readouterr().out.strip()) > 0.0

    def test_several_splittings_labelled(self, capsys):
        """Test each splitting gets its own labelled line."""
        from evps.main import main

        main(["logneg", "--modes", "4", "--r", "0.2", "--splitting", "(AB)_{1/2}-C_{1/2}",
              "--splitting", "A|C:3"])
        lines = capsys.readouterr().out.strip().splitlines()
        assert lines[0].startswith("(AB)_{1/2}-C_{1/2}\t")
        assert lines[1].startswith("(AB)_{1/4}-C_{3/4}\t")

    def test_missing_modes_exit_two(self, capsys):
        """Test a missing mode count is a usage error."""
        from evps.main import main

        assert main(["logneg", "--splitting", "1:2"]) == 2
        assert "usage error" in capsys.readouterr().err

    def test_bad_splitting_exit_two(self):
        """Test an unparsable splitting is a usage error."""
        from evps.main import main

        assert main(["logneg", "--modes", "4", "--splitting", "A-B"]) == 2

    def test_ceiling_exit_one(self):
        """Test an exhausted cutoff ceiling is a numerical failure."""
        from evps.main import main

        code = main(["logneg", "--modes", "2", "--r", "0.2", "--cutoff", "3",
                     "--cutoff-ceiling", "3", "--splitting", "1:2"])
        assert code == 1


class TestSweeps:
    """Tests for the sweep subcommands."""

    def test_sweep_k_writes_outputs(self, tmp_path, capsys):
        """Test a k sweep writes CSV, JSON and the plot script."""
        from evps.main import main

        out = tmp_path / "fig.csv"
        code = main(["sweep-k", "--modes", "2", "--r", "0.2", "--k-min", "0", "--k-max", "0.1",
                     "--step", "0.05", "--out", str(out), "--emit-plot-script"])
        assert code == 0
        assert out.exists()
        assert (tmp_path / "fig.json").exists()
        assert (tmp_path / "fig.plot.py").exists()
        lines = out.read_text().splitlines()
        assert len(lines) == 4
        assert "wrote 3 rows" in capsys.readouterr().out

    def test_config_file_and_flag_precedence(self, tmp_path):
        """Test flags override the config file, which overrides defaults."""
        from evps.main import build_parser, resolve_config

        config_file = tmp_path / "sweep.json"
        config_file.write_text(json.dumps({
            "params": {"N": 4, "r": 0.3},
            "grid": [0.0, 1.0],
            "loss": 0.1,
        }))
        args = build_parser().parse_args(["sweep-k", "--config", str(config_file), "--r", "0.2"])
        config = resolve_config(args, "k_sweep")
        assert config.params.r == 0.2
        assert config.params.N == 4
        assert config.grid == [0.0, 1.0]
        assert config.loss == 0.1
        assert config.jobs == 1

    def test_default_grid_and_output(self):
        """Test missing grid and output fall back to the defaults."""
        from evps.main import build_parser, resolve_config

        args = build_parser().parse_args(["sweep-loss", "--modes", "4"])
        config = resolve_config(args, "loss_sweep")
        assert config.grid[0] == 0.0
        assert config.grid[-1] == 0.95
        assert len(config.grid) == 96
        assert config.output.name == "loss_sweep.csv"

    def test_asymptote_flag(self):
        """Test --asymptote appends large k values."""
        from evps.main import build_parser, resolve_config

        args = build_parser().parse_args(["sweep-k", "--modes", "4", "--k-max", "1",
                                          "--step", "0.5", "--asymptote"])
        assert resolve_config(args, "k_sweep").grid == [0.0, 0.5, 1.0, 5.0, 10.0, 50.0, 100.0]

    def test_unreadable_config_exit_two(self, tmp_path):
        """Test a malformed config file is a usage error."""
        from evps.main import main

        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["sweep-k", "--modes", "2", "--config", str(bad)]) == 2

    def test_invalid_loss_exit_two(self, tmp_path):
        """Test a loss outside [0, 1] fails validation with exit 2."""
        from evps.main import main

        assert main(["sweep-k", "--modes", "2", "--loss", "1.5",
                     "--out", str(tmp_path / "x.csv")]) == 2


class TestOptimaCommand:
    """Tests for the optima subcommand."""

    def test_from_saved_result(self, tmp_path, capsys):
        """Test optima reads a saved k sweep."""
        from evps.main import main

        out = tmp_path / "k.csv"
        main(["sweep-k", "--modes", "2", "--r", "0.2", "--k-max", "0.2", "--step", "0.1",
              "--out", str(out)])
        capsys.readouterr()
        code = main(["optima", "--from", str(tmp_path / "k.json"), "--criterion", "max-gain"])
        assert code == 0
        report = json.loads(capsys.readouterr().out)
        assert report["criterion"] == "max-gain"
        assert "(AB)_{1/2}-C_{1/2}" in report["argmax"]


class TestValidateCommand:
    """Tests for the validate subcommand."""

    def test_exit_code_follows_results(self, capsys):
        """Test exit 0 when every case passes and 1 otherwise."""
        from evps.main import main
        from evps.schemas import ValidationCase

        passing = [ValidationCase(name="ok", expected=1.0, observed=1.0, tolerance=1e-6)]
        failing = passing + [ValidationCase(name="bad", expected=1.0, observed=2.0, tolerance=1e-6)]
        with patch("evps.main.run_validation", return_value=passing):
            assert main(["validate"]) == 0
        with patch("evps.main.run_validation", return_value=failing):
            assert main(["validate"]) == 1
        out = capsys.readouterr().out
        assert "FAIL  bad" in out
        assert "1/2 cases passed" in out
