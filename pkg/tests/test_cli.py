"""Tests for configuration handling, experiment records, and the CLI."""

import json

import numpy as np
import pytest
from click.testing import CliRunner

from swapgate.cli import (
    ConfigError,
    default_config,
    main,
    parse_config_text,
    resolve_config,
    run_circuit_map,
    run_drive_demo,
    run_experiment,
    run_fidelity_trace,
    run_scan_j2,
)


MINIMAL = """\
experiment = scan_j2
[grid]
points = 1
lo = 10.0
hi = 10.0
[run]
samples = 30
"""


@pytest.fixture(scope="module")
def one_point_record():
    cfg = resolve_config(parse_config_text(MINIMAL))
    return run_scan_j2(cfg)


class TestConfigFormat:
    def test_parse_types(self):
        text = """
        experiment = scan_j2
        [model]
        source = table_row
        row = 6
        [noise]
        gamma = 0.02
        channels = dephasing, photon_loss
        """
        raw = parse_config_text(text)
        assert raw[""]["experiment"] == "scan_j2"
        assert raw["model"]["row"] == 6
        assert raw["noise"]["gamma"] == 0.02
        assert raw["noise"]["channels"] == ["dephasing", "photon_loss"]

    def test_defaults_filled(self):
        cfg = resolve_config(parse_config_text(MINIMAL))
        assert cfg["noise"]["gamma"] == 0.01
        assert cfg["model"]["source"] == "table_row"
        assert cfg["grid"]["points"] == 1

    def test_unknown_key_rejected_with_name(self):
        text = MINIMAL + "\n[model]\nwobble = 3\n"
        with pytest.raises(ConfigError, match="wobble"):
            resolve_config(parse_config_text(text))

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError, match="plumbing"):
            resolve_config(parse_config_text(MINIMAL + "\n[plumbing]\nx = 1\n"))

    def test_missing_experiment_rejected(self):
        with pytest.raises(ConfigError, match="experiment"):
            resolve_config(parse_config_text("[model]\nrow = 6\n"))

    def test_unknown_experiment_rejected(self):
        with pytest.raises(ConfigError, match="unknown experiment"):
            resolve_config(parse_config_text("experiment = teleport\n"))

    def test_type_errors_are_located(self):
        with pytest.raises(ConfigError, match=r"\[model\] row"):
            resolve_config(
                parse_config_text("experiment = scan_j2\n[model]\nrow = six\n")
            )

    def test_parse_diagnostics_carry_line_numbers(self):
        with pytest.raises(ConfigError, match="line 2"):
            parse_config_text("experiment = scan_j2\nnot a key value\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError, match="duplicate"):
            parse_config_text("[run]\nseed = 1\nseed = 2\n")

    def test_round_trip_stability(self):
        cfg = resolve_config(parse_config_text(MINIMAL))
        text = cfg.to_text()
        cfg2 = resolve_config(parse_config_text(text))
        assert cfg2.sections == cfg.sections
        assert cfg2.to_text() == text

    def test_table_row_reference_resolves_published_circuit(self):
        cfg = default_config("circuit_map")
        record = run_circuit_map(cfg)
        # row 6 reference resolves to its published circuit values
        from swapgate.circuit_map import table_circuit_params

        assert cfg["model"]["row"] == 6
        assert table_circuit_params(6).e1 == 561.6


class TestRunRecords:
    def test_single_row_csv(self, one_point_record):
        csv = one_point_record.to_csv()
        lines = csv.strip().splitlines()
        assert len(lines) == 2  # header + one sample
        assert lines[0].startswith("j2_mhz,")
        assert "." in lines[1]

    def test_csv_determinism(self, one_point_record):
        cfg = resolve_config(parse_config_text(MINIMAL))
        again = run_scan_j2(cfg)
        assert again.to_csv() == one_point_record.to_csv()

    def test_json_summary_round_trip(self, one_point_record):
        payload = json.loads(one_point_record.to_json())
        assert payload["version"] == "1"
        assert payload["experiment"] == "scan_j2"
        # the embedded config parses back to the same resolved configuration
        embedded = resolve_config(parse_config_text(payload["config"]))
        assert embedded.sections == one_point_record.config.sections

    def test_scan_point_values_sane(self, one_point_record):
        row = dict(zip(one_point_record.columns, one_point_record.rows[0]))
        assert row["fbar_open"] > 0.95
        assert row["fbar_closed"] > 0.97
        assert row["tg_numeric_us"] < row["tg_analytic_us"]


class TestExperiments:
    def test_fidelity_trace(self):
        cfg = resolve_config(parse_config_text(
            "experiment = fidelity_trace\n[grid]\nwindow_hi = 1.05\n"
            "[run]\nsamples = 30\n"
        ))
        rec = run_fidelity_trace(cfg)
        assert rec.columns == ("t_us", "fbar", "fbar_noiseless")
        assert len(rec.rows) == 30
        assert rec.summary["peak_fidelity"] > 0.97

    def test_no_noise_flag_matches_zero_gamma(self):
        cfg = resolve_config(parse_config_text(
            "experiment = fidelity_trace\n[run]\nsamples = 12\n"
        ))
        rec_flag = run_fidelity_trace(cfg, no_noise=True)
        fbar, clean = np.array([r[1] for r in rec_flag.rows]), \
            np.array([r[2] for r in rec_flag.rows])
        assert np.allclose(fbar, clean)

    def test_drive_demo_runs(self):
        cfg = resolve_config(parse_config_text(
            "experiment = drive_demo\n[grid]\nn_durations = 4\n"
            "[noise]\ngamma = 0.0\n"
        ))
        rec = run_drive_demo(cfg)
        assert rec.summary["pi_transfer_probability"] > 0.98
        assert len(rec.rows) == 4

    def test_circuit_map_record(self):
        rec = run_circuit_map(default_config("circuit_map"))
        assert len(rec.rows) == 1
        row = dict(zip(rec.columns, rec.rows[0]))
        assert row["r23x_mhz"] - row["p23x_mhz"] == pytest.approx(
            2 * row["m23x_mhz"], rel=1e-9
        )

    def test_search_record(self):
        cfg = resolve_config(parse_config_text(
            "experiment = search\n[grid]\nn_restarts = 2\n"
            "max_evaluations = 60\nkeep_all = true\n"
        ))
        rec = run_experiment(cfg)
        assert rec.summary["n_results"] >= 1
        assert "cost" in rec.columns

    def test_n5_trace_runs(self):
        cfg = resolve_config(parse_config_text(
            "experiment = n5_trace\n[run]\nsamples = 20\n[noise]\ngamma = 0.0\n"
        ))
        rec = run_experiment(cfg)
        assert rec.summary["peak_fidelity"] > 0.96
        assert len(rec.rows) == 20

    def test_scan_delta_collapses_at_zero(self):
        cfg = resolve_config(parse_config_text(
            "experiment = scan_delta\n[grid]\npoints = 2\nlo = 450.0\n"
            "hi = 600.0\n[run]\nsamples = 40\n[noise]\ngamma = 0.0\n"
        ))
        rec = run_experiment(cfg)
        rows = [dict(zip(rec.columns, r)) for r in rec.rows]
        on_branch = rows[0]   # j2x = 450, delta = 300
        at_zero = rows[1]     # j2x = 600, delta = 0
        assert on_branch["fbar_open"] > 0.98
        assert at_zero["fbar_open"] < 0.75
        assert rec.summary["delta_values_mhz"] == [300.0, 0.0]

    def test_crosstalk_scan_runs(self):
        cfg = resolve_config(parse_config_text(
            "experiment = crosstalk_scan\n[grid]\nfractions_pct = 0.0, 5.0\n"
            "[run]\nsamples = 40\n[noise]\ngamma = 0.0\n"
        ))
        rec = run_experiment(cfg)
        rows = [dict(zip(rec.columns, r)) for r in rec.rows]
        assert rows[0]["jc_mhz"] == 0.0
        # zero injected coupling reproduces the plain-model open peak
        assert rows[0]["fbar_open_nn"] == pytest.approx(
            rows[0]["fbar_open_nnn"], abs=1e-12
        )
        assert abs(rows[1]["fbar_closed_plus_nn"] - rows[0]["fbar_closed_plus_nn"]) < 5e-3

    def test_qutrit_compare_runs(self):
        cfg = resolve_config(parse_config_text(
            "experiment = qutrit_compare\n[model]\nrows = 6\n"
            "[grid]\nconfigs = open\nwindow_hi = 1.05\n[run]\nsamples = 25\n"
        ))
        rec = run_experiment(cfg)
        peaks = rec.summary["peaks"]["row6_open"]
        assert abs(peaks["peak_shift"]) < 0.01
        assert peaks["qubit_peak"] > 0.98

    def test_scan_j1_runs(self):
        cfg = resolve_config(parse_config_text(
            "experiment = scan_j1\n[grid]\npoints = 1\nlo = 30.0\nhi = 30.0\n"
            "j2 = 300.0\n[run]\nsamples = 30\n[noise]\ngamma = 0.0\n"
        ))
        rec = run_experiment(cfg)
        row = dict(zip(rec.columns, rec.rows[0]))
        assert row["fbar_open"] > 0.95


class TestCommandLine:
    def test_help_lists_subcommands(self):
        runner = CliRunner()
        result = runner.invoke(main, ["--help"])
        assert result.exit_code == 0
        for name in ("trace", "scan-j2", "qutrit", "crosstalk", "n5",
                     "drive", "circuit-map", "search"):
            assert name in result.output

    def test_circuit_map_subcommand_writes_files(self, tmp_path):
        runner = CliRunner()
        out = tmp_path / "map.csv"
        result = runner.invoke(main, ["circuit-map", "--out", str(out)])
        assert result.exit_code == 0
        assert out.exists()
        assert out.with_suffix(".json").exists()

    def test_config_error_exit_code(self, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text("experiment = scan_j2\n[grid]\nbogus = 1\n")
        runner = CliRunner()
        result = runner.invoke(main, ["scan-j2", "--config", str(bad)])
        assert result.exit_code == 2
        assert "bogus" in result.output

    def test_kind_mismatch_is_config_error(self, tmp_path):
        cfgfile = tmp_path / "trace.cfg"
        cfgfile.write_text("experiment = fidelity_trace\n")
        runner = CliRunner()
        result = runner.invoke(main, ["scan-j2", "--config", str(cfgfile)])
        assert result.exit_code == 2

    def test_seed_override_lands_in_summary(self, tmp_path):
        cfgfile = tmp_path / "m.cfg"
        cfgfile.write_text(MINIMAL)
        out = tmp_path / "scan.csv"
        runner = CliRunner()
        result = runner.invoke(
            main, ["scan-j2", "--config", str(cfgfile), "--out", str(out),
                   "--seed", "42"],
        )
        assert result.exit_code == 0
        payload = json.loads(out.with_suffix(".json").read_text())
        assert payload["summary"]["seed"] == 42

    def test_byte_identical_csv_across_invocations(self, tmp_path):
        cfgfile = tmp_path / "m.cfg"
        cfgfile.write_text(MINIMAL)
        runner = CliRunner()
        outs = []
        for name in ("a.csv", "b.csv"):
            out = tmp_path / name
            result = runner.invoke(
                main, ["scan-j2", "--config", str(cfgfile), "--out", str(out)]
            )
            assert result.exit_code == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
