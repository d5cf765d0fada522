"""End-to-end CLI runs in a temp directory, exercising every subcommand."""
import json
import math

import pytest

from packetlab import cli
from packetlab.harness import CSV_HEADER


@pytest.fixture
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def test_resolve_defaults():
    cfg = cli.resolve(["er-test"])
    assert cfg.command == "er-test"
    assert cfg.mass == 1.0
    assert cfg.sigma == 5.0
    assert cfg.momenta == ((0.0, 0.0, pytest.approx(math.sqrt(3.0))),)
    assert cfg.times == (0.0, 5.0, 10.0, 20.0)
    assert cfg.methods == ("analytic",)
    assert cfg.quad_order == 40
    assert cfg.grid_points == 128
    assert cfg.grid_dimension == 1
    assert cfg.verdict_tolerance == 0.05
    assert cfg.out_base == "er-test"
    assert cfg.output_format == "csv"


def test_resolve_momentum_forms():
    cfg = cli.resolve(["dispersion", "--p", "2", "--p", "1,2,3"])
    assert cfg.momenta == ((0.0, 0.0, 2.0), (1.0, 2.0, 3.0))


def test_config_file_and_flag_precedence(in_tmp):
    config = in_tmp / "run.conf"
    config.write_text(
        "# sweep setup\n"
        "sigma = 7\n"
        "times = 0, 2, 4\n"
        "p = 0.5 2.0\n"
        "method = analytic oracle\n"
    )
    cfg = cli.resolve(["er-test", "--config", str(config)])
    assert cfg.sigma == 7.0
    assert cfg.times == (0.0, 2.0, 4.0)
    assert cfg.momenta == ((0.0, 0.0, 0.5), (0.0, 0.0, 2.0))
    assert cfg.methods == ("analytic", "oracle")
    # explicit flags beat the file
    cfg = cli.resolve(["er-test", "--config", str(config), "--sigma", "9"])
    assert cfg.sigma == 9.0
    assert cfg.times == (0.0, 2.0, 4.0)


def test_config_file_rejects_unknown_key(in_tmp, capsys):
    config = in_tmp / "bad.conf"
    config.write_text("wavelength = 3\n")
    assert cli.main(["er-test", "--config", str(config)]) == 1
    assert "unknown key" in capsys.readouterr().err


@pytest.mark.parametrize(
    "argv",
    [
        ["er-test", "--m", "abc"],
        ["er-test", "--m", "inf"],
        ["er-test", "--p", "1,2"],
        ["er-test", "--p", "-3"],
        ["er-test", "--times", ""],
        ["residual", "--kprime", "0,0"],
        ["er-test", "--quad-order", "4.5"],
        [],
        ["warp-drive"],
    ],
)
def test_bad_arguments_exit_1(in_tmp, capsys, argv):
    assert cli.main(argv) == 1
    assert capsys.readouterr().err.startswith("error:")


def test_help_exits_zero():
    with pytest.raises(SystemExit) as exc:
        cli.main(["--help"])
    assert exc.value.code == 0


def test_er_test_run(in_tmp, capsys):
    assert cli.main(["er-test"]) == 0
    out = capsys.readouterr().out
    assert "dilation fails" in out and "dilation holds" in out
    assert "wrote er-test.csv" in out
    lines = (in_tmp / "er-test.csv").read_text().splitlines()
    assert lines[0] == CSV_HEADER
    assert len(lines) == 1 + 3 * 4  # one momentum, 3 axes, 4 times
    echo = json.loads((in_tmp / "er-test_config.json").read_text())
    assert echo["command"] == "er-test"
    assert echo["sigma"] == 5.0
    assert echo["p"] == [[0.0, 0.0, math.sqrt(3.0)]]


def test_reruns_are_byte_identical(in_tmp):
    assert cli.main(["er-test", "--out", "a"]) == 0
    first_csv = (in_tmp / "a.csv").read_bytes()
    first_echo = (in_tmp / "a_config.json").read_bytes()
    assert cli.main(["er-test", "--out", "a"]) == 0
    assert (in_tmp / "a.csv").read_bytes() == first_csv
    assert (in_tmp / "a_config.json").read_bytes() == first_echo


def test_config_echo_round_trips(in_tmp):
    assert cli.main(["er-test", "--out", "a", "--sigma", "7"]) == 0
    echo = json.loads((in_tmp / "a_config.json").read_text())
    # rebuilding the command from the echo reproduces the echo
    argv = [
        echo["command"],
        "--m", repr(echo["m"]),
        "--sigma", repr(echo["sigma"]),
        "--times", ",".join(repr(t) for t in echo["times"]),
        "--quad-order", str(echo["quad_order"]),
        "--grid-n", str(echo["grid_n"]),
        "--dim", str(echo["dim"]),
        "--tolerance", repr(echo["tolerance"]),
        "--out", echo["out"],
        "--format", echo["format"],
    ]
    for entry in echo["p"]:
        argv += ["--p", ",".join(repr(c) for c in entry)]
    for method in echo["method"]:
        argv += ["--method", method]
    assert cli.resolve(argv).echo_dict() == echo


def test_sweep_writes_plot_data(in_tmp):
    assert (
        cli.main(["sweep", "--out", "s", "--p", "1", "--p", "1.7320508075688772"])
        == 0
    )
    for token in ("long", "trans1", "trans2"):
        data = (in_tmp / f"s_{token}_analytic.dat").read_text()
        assert data.startswith("# columns: t sigma_sq\n")
        assert data.count("# p =") == 2  # one block per momentum
        alpha = (in_tmp / f"s_alpha_{token}_analytic.dat").read_text().splitlines()
        assert alpha[0] == "# columns: gamma alpha"
        assert len(alpha) == 3  # header + one fitted row per momentum
    # longitudinal alphas are 3, transverse 1
    _, alpha_long = (in_tmp / "s_alpha_long_analytic.dat").read_text().split()[-2:]
    assert float(alpha_long) == pytest.approx(3.0, rel=1e-12)


def test_evolve_csv_and_slices(in_tmp):
    assert cli.main(["evolve", "--out", "ev", "--times", "0,5,10,20"]) == 0
    lines = (in_tmp / "ev.csv").read_text().splitlines()
    assert lines[0] == "t,norm,peak_density,wrapped,x3,sigma_sq_3"
    assert len(lines) == 5
    for index in range(4):
        slice_file = in_tmp / f"ev_t{index}_axis3.dat"
        body = slice_file.read_text().splitlines()
        assert body[1] == "# columns: x rho"
        assert len(body) == 2 + 128
    t20 = lines[4].split(",")
    assert float(t20[1]) == pytest.approx(1.0, abs=1e-12)  # norm
    assert t20[3] == "0"  # not wrapped
    assert float(t20[5]) == pytest.approx(25.064352935423397, rel=1e-10)


def test_evolve_json_format(in_tmp):
    assert cli.main(["evolve", "--out", "ev", "--format", "json"]) == 0
    payload = json.loads((in_tmp / "ev.json").read_text())
    assert payload["dim"] == 1
    assert len(payload["snapshots"]) == 4
    assert payload["snapshots"][0]["sigma_sq"][0] == pytest.approx(25.0, rel=1e-12)
    assert payload["failures"] == []


def test_evolve_oversized_horizon_exits_1(in_tmp, capsys):
    assert cli.main(["evolve", "--times", "0,5,10,5000"]) == 1
    assert "error:" in capsys.readouterr().err


def test_er_test_grid_failures_exit_2(in_tmp, capsys):
    code = cli.main(
        ["er-test", "--method", "grid", "--times", "0,5,10,5000", "--out", "g"]
    )
    assert code == 2
    captured = capsys.readouterr()
    assert "failed point:" in captured.err
    # the report is still written, with the failures recorded
    assert (in_tmp / "g.csv").exists()


def test_dispersion_grid_reports_longitudinal_axis_only(in_tmp):
    assert cli.main(["dispersion", "--method", "grid", "--out", "d"]) == 0
    lines = (in_tmp / "d.csv").read_text().splitlines()
    assert lines[0] == "m,sigma,p,gamma,axis,method,t,sigma_sq"
    rows = [l.split(",") for l in lines[1:]]
    assert len(rows) == 4  # one axis, four times
    assert all(r[4] == "3" and r[5] == "grid" for r in rows)
    final = float(rows[-1][7])
    assert final == pytest.approx(25.064352935423397, rel=1e-10)


def test_dispersion_three_methods(in_tmp):
    assert (
        cli.main(["dispersion", "--method", "analytic", "--method", "oracle", "--out", "d3"])
        == 0
    )
    lines = (in_tmp / "d3.csv").read_text().splitlines()
    assert len(lines) == 1 + 2 * 3 * 4  # 2 methods x 3 axes x 4 times


def test_unwritable_out_exits_3(in_tmp, capsys):
    assert cli.main(["er-test", "--out", "no_such_dir/x"]) == 3
    assert "i/o error:" in capsys.readouterr().err


def test_residual_csv(in_tmp):
    assert cli.main(["residual", "--out", "r"]) == 0
    lines = (in_tmp / "r.csv").read_text().splitlines()
    assert lines[0] == "lambda,kprime1,kprime2,kprime3,residual,residual_over_lambda_cubed"
    assert len(lines) == 5  # scales 1, 1/2, 1/4, 1/8
    ratios = [float(l.split(",")[5]) for l in lines[1:]]
    # cubic scaling: the normalized ratio settles to a nonzero constant
    assert abs(ratios[-2] - ratios[-1]) / abs(ratios[-1]) < 0.05
    assert abs(ratios[-1]) > 1e-6
