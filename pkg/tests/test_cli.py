"""
Integration Tests for the command line

Runs ``main`` end to end against the small presets of the test config.
"""

import json

import pandas as pd
import pytest

from app import EXIT_CONFIG, EXIT_OK, EXIT_RUNTIME, build_parser, main, resolve_request
from experiments import load_experiment_config
from utils.config_loader import load_config
from utils.exceptions import ConfigError


@pytest.fixture
def test_config(temp_config_file, quiet_logging):
    """Load the small test config before main() reads it."""
    return load_config(temp_config_file)


def _read_json(path):
    with open(path) as handle:
        return json.load(handle)


@pytest.mark.unit
class TestResolveRequest:
    """Test suite for flag-to-preset resolution."""

    def test_augment_defaults_to_plan(self):
        """Test that the plan name selects the preset."""
        args = build_parser().parse_args(["diagnose", "augment", "--plan", "lags-ladder", "--seed", "1"])
        request = resolve_request(args)
        assert request["command"] == "augment"
        assert request["experiment"] == "lags-ladder"

    def test_injectivity_defaults_to_model_stats(self):
        """Test that model and stats name the preset."""
        args = build_parser().parse_args(["diagnose", "injectivity", "--model", "ar1", "--stats", "acov1", "--seed", "1"])
        request = resolve_request(args)
        assert request["experiment"] == "ar1-acov1"
        assert request["overrides"]["statistic_sets"] == ["acov1"]

    def test_lv_mode_spelling(self):
        """Test that both spellings of the noise-matched mode are accepted."""
        args = build_parser().parse_args(["lv-study", "--mode", "noise-matched", "--seed", "1"])
        request = resolve_request(args)
        assert request["experiment"] == "lv-noise-matched"
        assert request["overrides"]["mode"] == "noise_matched"

    def test_workers_from_environment(self, monkeypatch):
        """Test that ABC_WORKERS fills in the worker count."""
        monkeypatch.setenv("ABC_WORKERS", "3")
        args = build_parser().parse_args(["analytic", "sweep", "--seed", "1"])
        assert resolve_request(args)["overrides"]["workers"] == 3

    def test_bad_workers_environment(self, monkeypatch):
        """Test that a non-integer ABC_WORKERS is a configuration error."""
        monkeypatch.setenv("ABC_WORKERS", "many")
        args = build_parser().parse_args(["analytic", "sweep", "--seed", "1"])
        with pytest.raises(ConfigError):
            resolve_request(args)

    def test_missing_subcommand(self):
        """Test that argparse rejects a bare command group."""
        with pytest.raises(SystemExit):
            build_parser().parse_args(["diagnose"])


@pytest.mark.unit
class TestExperimentConfig:
    """Test suite for experiment configuration merging."""

    def test_flags_override_preset(self, test_config):
        """Test that flag values win over the preset."""
        cfg = load_experiment_config("abc", "tiny-abc", overrides={"seed": 4, "n_draws": 300})
        assert cfg.n_draws == 300
        assert cfg.statistic_sets == ["eta2"]
        assert cfg.abc_config().quantile == 0.1

    def test_preset_for_other_command(self, test_config):
        """Test that a sweep preset cannot drive an ABC run."""
        with pytest.raises(ConfigError):
            load_experiment_config("abc", "tiny-sweep", overrides={"seed": 4})

    def test_unknown_setting(self, test_config, tmp_path):
        """Test that unknown keys in an experiment file are refused."""
        path = tmp_path / "exp.yaml"
        path.write_text("command: sweep\nseed: 1\nwibble: 3\n")
        with pytest.raises(ConfigError) as exc_info:
            load_experiment_config("sweep", path=str(path))
        assert exc_info.value.field == "wibble"

    def test_json_file_accepted(self, test_config, tmp_path):
        """Test that JSON experiment files parse."""
        path = tmp_path / "exp.json"
        path.write_text(json.dumps({"command": "sweep", "seed": 2, "delta": 0.3}))
        cfg = load_experiment_config("sweep", path=str(path))
        assert cfg.delta == 0.3


@pytest.mark.integration
class TestMain:
    """Test suite for main()."""

    def test_analytic_sweep(self, test_config, tmp_path):
        """Test a sweep run and its outputs."""
        out = tmp_path / "sweep"
        code = main(["analytic", "sweep", "--experiment", "tiny-sweep", "--seed", "3", "--out", str(out)])

        assert code == EXIT_OK
        frame = pd.read_csv(out / "sweep.csv")
        assert len(frame) == 8
        assert list(frame.columns) == ["order", "T", "epsilon", "x1", "x2", "prob_paper", "prob_oracle"]
        assert set(frame["order"]) == {"eps_then_T", "T_then_eps"}
        manifest = _read_json(out / "manifest.json")
        assert set(manifest["outputs"]) == {"sweep.csv", "sweep.json"}
        assert manifest["config"]["seed"] == 3

    def test_rerun_is_byte_identical(self, test_config, tmp_path):
        """Test that the same seed reproduces every data file."""
        checksums = []
        for name in ("a", "b"):
            out = tmp_path / name
            assert main(["analytic", "sweep", "--experiment", "tiny-sweep", "--seed", "3", "--out", str(out)]) == EXIT_OK
            checksums.append(_read_json(out / "manifest.json")["outputs"])
        assert checksums[0] == checksums[1]

    def test_missing_seed(self, test_config, tmp_path, capsys):
        """Test that a run without a seed is a configuration error."""
        code = main(["analytic", "sweep", "--experiment", "tiny-sweep", "--out", str(tmp_path / "x")])

        assert code == EXIT_CONFIG
        assert "seed" in capsys.readouterr().err

    def test_bad_yaml_reports_line(self, test_config, tmp_path, capsys):
        """Test that a parse error names its line."""
        path = tmp_path / "broken.yaml"
        path.write_text("command: sweep\nseed: 1\ndelta: [0.1\n")
        code = main(["analytic", "sweep", "--config", str(path)])

        assert code == EXIT_CONFIG
        assert "line" in capsys.readouterr().err

    def test_unknown_experiment(self, test_config, tmp_path):
        """Test that an unknown preset is a configuration error."""
        code = main(["analytic", "sweep", "--experiment", "nope", "--seed", "1", "--out", str(tmp_path / "x")])
        assert code == EXIT_CONFIG

    def test_runtime_error_exit_code(self, test_config, tmp_path):
        """Test that a model without an analytic binding exits with the runtime code."""
        code = main([
            "diagnose", "injectivity", "--model", "lotka_volterra", "--stats", "lv_olstats",
            "--seed", "1", "--out", str(tmp_path / "x"),
        ])
        assert code == EXIT_RUNTIME

    def test_abc_run(self, test_config, tmp_path):
        """Test an ABC run over one sample size."""
        out = tmp_path / "abc"
        code = main(["abc", "run", "--experiment", "tiny-abc", "--seed", "5", "--out", str(out)])

        assert code == EXIT_OK
        posterior = pd.read_csv(out / "posterior_eta2_T200.csv")
        assert list(posterior.columns) == ["theta1", "theta2", "distance"]
        assert len(posterior) == 50
        assert (out / "observed_T200.csv").exists()
        assert (out / "kde_eta2_T200_theta1.csv").exists()
        summary = _read_json(out / "summary.json")
        assert summary["runs"][0]["statistics"] == "eta2"

    def test_abc_run_without_acceptances(self, test_config, tmp_path):
        """Test that an ABC run accepting nothing still succeeds and names the empty run."""
        path = tmp_path / "tight.yaml"
        path.write_text(
            "command: abc\nmodel: ma2\ntheta0: [0.6, 0.2]\nsizes: [100]\nstatistic_sets: [eta2]\n"
            "n_draws: 50\nepsilon: 1.0e-12\nseed: 1\n"
        )
        out = tmp_path / "tight"
        code = main(["abc", "run", "--config", str(path), "--out", str(out)])

        assert code == EXIT_OK
        assert _read_json(out / "manifest.json")["empty_posteriors"] == ["eta2_T100"]
        consistency = pd.read_csv(out / "consistency_eta2.csv")
        assert bool(consistency["no_acceptances"].iloc[0])
        assert consistency["probability"].isna().all()

    def test_injectivity_from_file(self, test_config, tmp_path):
        """Test an analytic injectivity check driven by an experiment file."""
        path = tmp_path / "ar1.yaml"
        path.write_text(
            "command: injectivity\nmodel: ar1\nstatistic_sets: [acov1]\ntheta0: [0.5]\n"
            "bounds: [[-0.99, 0.99]]\nseed: 2\n"
        )
        out = tmp_path / "inj"
        code = main(["diagnose", "injectivity", "--config", str(path), "--out", str(out)])

        assert code == EXIT_OK
        payload = _read_json(out / "injectivity.json")
        assert payload["analytic"]["injective"] is True
        assert payload["preimage"]["solutions"] == [[pytest.approx(0.5)]]
        assert payload["preimage"]["infeasible_solutions"] == [[pytest.approx(-2.0)]]

    def test_lv_study(self, test_config, tmp_path):
        """Test a small deterministic LV study with the raw-path distance."""
        path = tmp_path / "lv.yaml"
        path.write_text(
            "command: lv\nmode: deterministic\nn_points: 150\nstatistic_sets: [raw_path]\n"
            "n_draws: 200\nquantile: 0.1\nseed: 3\n"
        )
        out = tmp_path / "lv"
        code = main(["lv-study", "--config", str(path), "--out", str(out)])

        assert code == EXIT_OK
        run = _read_json(out / "lv_study.json")["runs"][0]
        assert run["noise_floor"] == pytest.approx(0.5)
        assert run["statistics"] == "raw_path"
        assert len(run["posterior_mean"]) == 2
