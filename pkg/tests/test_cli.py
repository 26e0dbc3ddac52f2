"""Command-line front end: parsing, precedence, formats, exit codes."""

import json
import math
import subprocess
import sys

import numpy as np
import pytest

from nbstates.cli import CliError, main, parse_config, read_grid_csv, run


def parse(*argv):
    return parse_config(list(argv))


class TestParsing:
    def test_grid_defaults(self):
        cfg = parse("wigner", "--eta", "0.5", "--m", "1")
        assert (cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max) == (-6, 6, -6, 6)
        assert (cfg.nx, cfg.ny) == (201, 201)
        assert cfg.tail_eps == 1e-12
        assert cfg.fmt == "csv"

    def test_stats_defaults_to_json(self):
        assert parse("stats", "--eta", "0.5", "--m", "1").fmt == "json"
        assert parse("stats", "--eta", "0.5", "--m", "1", "--format", "csv").fmt == "csv"

    def test_range_shortcut(self):
        cfg = parse("qfunc", "--eta", "0.5", "--m", "1", "--range", "2.5")
        assert (cfg.x_min, cfg.x_max, cfg.y_min, cfg.y_max) == (-2.5, 2.5, -2.5, 2.5)

    def test_range_overrides_explicit_bounds(self):
        cfg = parse(
            "qfunc", "--eta", "0.5", "--m", "1",
            "--x-min", "-1", "--range", "3",
        )
        assert cfg.x_min == -3.0

    @pytest.mark.parametrize(
        "argv,needle",
        [
            (("stats", "--eta", "0.5"), "--m"),
            (("stats", "--m", "2"), "--eta"),
            (("sdist", "--eta", "0.5", "--m", "1"), "--s"),
            (("evolve",), "--chi-t"),
            (("stats", "--eta", "1.5", "--m", "1"), "eta"),
            (("stats", "--eta", "0", "--m", "1"), "eta"),
            (("stats", "--eta", "0.5", "--m", "-1"), "m"),
            (("sdist", "--eta", "0.5", "--m", "1", "--s", "0.2"), "s"),
            (("evolve", "--chi-t", "-1"), "chi-t"),
            (("evolve", "--chi-t", "1", "--steps", "1"), "steps"),
            (("evolve", "--chi-t", "1", "--scheme", "parametric", "--m", "2"), "--m"),
            (("wigner", "--eta", "0.5", "--m", "1", "--nx", "1"), "nx"),
            (("wigner", "--eta", "0.5", "--m", "1", "--range", "-2"), "range"),
            (("wigner", "--eta", "0.5", "--m", "1", "--x-min", "2", "--x-max", "-2"), "bounds"),
            (("stats", "--eta", "0.5", "--m", "1", "--tail-eps", "0.1"), "tail-eps"),
        ],
    )
    def test_invalid_arguments_name_the_token(self, argv, needle):
        with pytest.raises(CliError, match=needle):
            parse(*argv)

    def test_unknown_flag_exits_1(self, capsys):
        assert main(["stats", "--eta", "0.5", "--m", "1", "--bogus", "3"]) == 1
        assert "--bogus" in capsys.readouterr().err

    def test_unknown_command_exits_1(self, capsys):
        assert main(["frobnicate"]) == 1

    def test_help_exits_0(self, capsys):
        assert main(["--help"]) == 0
        assert "verify" in capsys.readouterr().out


class TestConfigSources:
    def test_file_fills_and_flag_wins(self, tmp_path):
        f = tmp_path / "run.conf"
        f.write_text("eta = 0.5\nm = 3   # trailing comment\nformat = json\n")
        cfg = parse("stats", "--config", str(f), "--m", "4")
        assert cfg.eta == 0.5
        assert cfg.m == 4
        assert cfg.fmt == "json"

    def test_env_overrides_default_but_not_file(self, tmp_path, monkeypatch):
        monkeypatch.setenv("NBS_TAIL_EPS", "1e-9")
        cfg = parse("stats", "--eta", "0.5", "--m", "1")
        assert cfg.tail_eps == 1e-9
        f = tmp_path / "run.conf"
        f.write_text("tail_eps = 1e-10\n")
        cfg = parse("stats", "--eta", "0.5", "--m", "1", "--config", str(f))
        assert cfg.tail_eps == 1e-10
        cfg = parse(
            "stats", "--eta", "0.5", "--m", "1",
            "--config", str(f), "--tail-eps", "1e-11",
        )
        assert cfg.tail_eps == 1e-11

    def test_bad_env_value_is_an_argument_error(self, monkeypatch):
        monkeypatch.setenv("NBS_TAIL_EPS", "soon")
        with pytest.raises(CliError, match="NBS_TAIL_EPS"):
            parse("stats", "--eta", "0.5", "--m", "1")

    @pytest.mark.parametrize(
        "content,needle",
        [
            ("volume = 11\n", "volume"),
            ("m = 2.5\n", "m"),
            ("just a line\n", "key=value"),
        ],
    )
    def test_config_file_errors_name_the_line(self, tmp_path, content, needle):
        f = tmp_path / "bad.conf"
        f.write_text(content)
        with pytest.raises(CliError, match=needle):
            parse("stats", "--eta", "0.5", "--m", "1", "--config", str(f))

    def test_missing_config_file(self, tmp_path):
        with pytest.raises(CliError, match="cannot read"):
            parse("stats", "--eta", "0.5", "--m", "1",
                  "--config", str(tmp_path / "nope.conf"))


class TestStatsCommand:
    def test_json_report_values(self, capsys):
        assert main(["stats", "--eta", "0.8", "--m", "3"]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert round(payload["mandel_q"], 6) == -0.6875
        assert payload["mean"] == pytest.approx(4.0, abs=1e-12)
        assert payload["sub_poissonian_threshold"] == pytest.approx(
            4.0 - math.sqrt(12.0), abs=1e-12
        )

    def test_csv_report_row(self, capsys):
        assert main(["stats", "--eta", "0.8", "--m", "3", "--format", "csv"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0].startswith("# eta,m,mean")
        row = lines[1].split(",")
        assert float(row[0]) == 0.8
        assert int(row[1]) == 3
        assert round(float(row[4]), 6) == -0.6875


class TestGridCommands:
    def test_wigner_point_window(self, capsys):
        assert main([
            "wigner", "--eta", "1.0", "--m", "1",
            "--nx", "3", "--ny", "3", "--range", "0.0",
        ]) == 0
        _, values = read_grid_csv(capsys.readouterr().out)
        assert values.shape == (3, 3)
        assert np.allclose(values, -2.0 / math.pi, atol=1e-10)
        assert round(float(values[1, 1]), 5) == -0.63662

    def test_csv_round_trip_exact(self, tmp_path):
        out = tmp_path / "grid.csv"
        argv = [
            "qfunc", "--eta", "0.5", "--m", "2",
            "--nx", "7", "--ny", "5", "--range", "3", "-o", str(out),
        ]
        assert main(argv) == 0
        spec, values = read_grid_csv(out.read_text())
        assert (spec.nx, spec.ny) == (7, 5)
        assert spec.x_min == -3.0
        # byte-identical determinism on a repeated run
        first = out.read_bytes()
        assert main(argv) == 0
        assert out.read_bytes() == first
        # and the parsed values reproduce a direct evaluation exactly
        from nbstates import NBSParams, grid_evaluate, nbs

        direct = grid_evaluate(nbs(NBSParams(0.5, 2)), spec, "Q")
        assert np.array_equal(values, direct.values)

    def test_sdist_json_matches_interpolation_bounds(self, capsys):
        assert main([
            "sdist", "--eta", "0.5", "--m", "1", "--s", "-1",
            "--nx", "3", "--ny", "3", "--range", "1", "--format", "json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["nx"] == 3 and payload["ny"] == 3
        assert min(min(row) for row in payload["values"]) >= -1e-14

    @pytest.mark.parametrize(
        "text,needle",
        [
            ("1,2\n3,4\n", "header"),
            ("# 0,1,0,1,2,2\n1,2\n", "shape"),
            ("# 0,1,0,1\n1,2\n", "six fields"),
        ],
    )
    def test_read_grid_csv_rejects(self, text, needle):
        with pytest.raises(ValueError, match=needle):
            read_grid_csv(text)


class TestSqueezeScanCommand:
    def test_table_shape_and_values(self, capsys):
        assert main(["squeeze-scan", "--m", "7", "--eta-step", "0.1"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "# m=7"
        assert lines[1] == "# eta,mean_a,mean_a2,var_x,var_y"
        rows = [list(map(float, ln.split(","))) for ln in lines[2:]]
        assert len(rows) == 10
        assert all(r[3] * r[4] >= 1.0 / 16.0 - 1e-12 for r in rows)

    def test_json_keys(self, capsys):
        assert main([
            "squeeze-scan", "--m", "2", "--eta-step", "0.1", "--format", "json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["m"] == 2
        assert len(payload["eta"]) == len(payload["var_x"]) == 10


class TestEvolveCommand:
    def test_intensity_series(self, capsys):
        assert main(["evolve", "--chi-t", "1.0", "--m", "2", "--steps", "5"]) == 0
        lines = capsys.readouterr().out.splitlines()
        assert lines[0] == "# scheme=intensity m=2"
        rows = [list(map(float, ln.split(","))) for ln in lines[2:]]
        assert len(rows) == 5
        assert rows[0][0] == 0.0 and rows[-1][0] == 1.0
        assert all(abs(r[1] - 1.0) < 1e-9 for r in rows)
        assert all(abs(r[2] - 1.0) < 1e-9 for r in rows)

    def test_parametric_series_json(self, capsys):
        assert main([
            "evolve", "--chi-t", "1.5", "--scheme", "parametric",
            "--steps", "4", "--format", "json",
        ]) == 0
        payload = json.loads(capsys.readouterr().out)
        assert payload["scheme"] == "parametric"
        assert "m" not in payload
        assert all(abs(f - 1.0) < 1e-9 for f in payload["fidelity"])


class TestExitCodes:
    def test_numerical_failure_exits_2(self, capsys):
        # mean photon number ~ 1e6 cannot fit under the basis hard cap
        code = main(["qfunc", "--eta", "0.000001", "--m", "0",
                     "--nx", "3", "--ny", "3", "--range", "1"])
        assert code == 2
        assert "numerical failure" in capsys.readouterr().err

    def test_run_reports_argument_errors_as_1(self, capsys):
        assert main(["stats", "--eta", "nope", "--m", "1"]) == 1


class TestSubprocessEntry:
    def test_module_invocation_stats(self):
        proc = subprocess.run(
            [sys.executable, "-m", "nbstates", "stats", "--eta", "0.8", "--m", "3"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert round(json.loads(proc.stdout)["mandel_q"], 6) == -0.6875

    def test_module_invocation_bad_args(self):
        proc = subprocess.run(
            [sys.executable, "-m", "nbstates", "stats", "--eta", "2", "--m", "1"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 1
        assert "eta" in proc.stderr
