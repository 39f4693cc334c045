from pathlib import Path

import numpy as np
import pytest
from click.testing import CliRunner

from coopem import config
from coopem.cli import cli
from coopem.config import Quantity, RunConfig, parse_config, validate
from coopem.errors import ConfigError

FIGURES = Path(__file__).resolve().parents[1] / "figures"


@pytest.fixture
def runner():
    return CliRunner(mix_stderr=False) if "mix_stderr" in CliRunner.__init__.__code__.co_varnames else CliRunner()


def read_table(path):
    lines = Path(path).read_text().splitlines()
    header = [ln for ln in lines if not ln.startswith("#")][0]
    meta = dict(ln[2:].split(" = ", 1) for ln in lines if ln.startswith("# ") and " = " in ln)
    data = np.loadtxt(path, delimiter=",", comments="#", skiprows=lines.index(header) + 1, ndmin=2)
    return header.split(","), data, meta


def summary(output):
    return dict(ln.removeprefix("# ").split(" = ", 1) for ln in output.splitlines() if " = " in ln)


# -- documented examples ---------------------------------------------------------

def test_g2tau_superradiant_unit_pump(runner, tmp_path):
    out = tmp_path / "g2.csv"
    res = runner.invoke(cli, ["g2tau", "--scenario", "superradiant", "--gamma-p", "1.0", "--gamma-d", "0",
                              "--tau-max", "6", "--out", str(out)])
    assert res.exit_code == 0, res.output
    header, data, meta = read_table(out)
    assert header == ["tau [1/gamma]", "g2 [1]"]
    assert data[0, 0] == 0 and data[0, 1] == pytest.approx(1.0, abs=1e-6)
    assert data[-1, 0] == pytest.approx(6.0)
    assert meta["scenario"] == "superradiant" and meta["gamma_p"] == "1"


def test_pulsed_selective_dephased(runner):
    res = runner.invoke(cli, ["pulsed", "--scenario", "selective", "--gamma-d", "10", "--out", "/dev/null"])
    assert res.exit_code == 0, res.output
    s = summary(res.stdout)
    assert float(s["PeakHeight"]) == pytest.approx(1.000, abs=5e-4)
    assert float(s["PeakIntegral"]) == pytest.approx(0.5455, abs=5e-3)


def test_ratescan_gamma2eff(runner, tmp_path):
    out = tmp_path / "rates.csv"
    res = runner.invoke(cli, ["ratescan", "--quantity", "gamma2eff", "--kr-max", "15", "--out", str(out)])
    assert res.exit_code == 0, res.output
    _, data, _ = read_table(out)
    kr, g2 = data.T
    assert g2[0] == pytest.approx(2.0) and kr[-1] == pytest.approx(15.0)
    assert np.all((g2 >= 1 - 1e-12) & (g2 <= 2 + 1e-12))
    assert g2[-1] < 1.01
    assert float(summary(res.stdout)["value_at_pi"]) == pytest.approx(1.0, abs=1e-9)


def test_stdout_table_when_no_out(runner):
    res = runner.invoke(cli, ["decay", "--scenario", "superradiant", "--points", "11", "--t-max", "1"])
    assert res.exit_code == 0
    rows = [ln for ln in res.stdout.splitlines() if ln and not ln.startswith("#")]
    assert rows[0] == "t [1/gamma],intensity [I0]"
    assert float(rows[1].split(",")[1]) == pytest.approx(2.0)
    assert len(rows) == 12


def test_other_subcommands(runner):
    for args in (["pattern", "--scenario", "selective", "--points", "5"],
                 ["xiscan", "--aperture", "0.3", "--points", "5"],
                 ["oracle", "GbarSel", "-p", "window=integral", "-p", "gamma_d=10"],
                 ["oracle", "G2SingleTau", "--points", "4"],
                 ["--version"]):
        res = runner.invoke(cli, args)
        assert res.exit_code == 0, (args, res.output)
    res = runner.invoke(cli, ["oracle", "GbarSel", "-p", "window=integral", "-p", "gamma_d=10"])
    assert float(summary(res.stdout)["value"]) == pytest.approx(6 / 11)


# -- exit codes -------------------------------------------------------------------

def test_physics_error_exit_code(runner):
    res = runner.invoke(cli, ["g2tau", "--scenario", "superradiant"])
    assert res.exit_code == 3
    assert "NonUniqueStationaryStateError" in res.stderr


def test_zero_intensity_exit_code(runner):
    res = runner.invoke(cli, ["g2tau", "--scenario", "single"])
    assert res.exit_code == 3
    assert "ZeroIntensityError" in res.stderr


def test_config_error_exit_code_with_position(runner, tmp_path):
    cfg = tmp_path / "bad.ini"
    cfg.write_text("[run]\nquantity = g2tau\n[rates]\ngamma_p = fast\n")
    res = runner.invoke(cli, ["run", "--config", str(cfg)])
    assert res.exit_code == 2
    assert "line 4, column 11" in res.stderr


def test_invalid_values_exit_code(runner):
    res = runner.invoke(cli, ["pulsed", "--scenario", "selective", "--period", "1"])
    assert res.exit_code == 2
    assert "repetition time below 5/gamma" in res.stderr


def test_validate_command(runner, tmp_path):
    cfg = tmp_path / "p.ini"
    cfg.write_text("[run]\nquantity = pulsed\n[grid]\nperiod = 1\n")
    res = runner.invoke(cli, ["validate", "--config", str(cfg)])
    assert res.exit_code == 2
    assert "violation: line 4, column 10: repetition time below 5/gamma" in res.stdout
    cfg.write_text("[run]\nquantity = pulsed\n")
    res = runner.invoke(cli, ["validate", "--config", str(cfg)])
    assert res.exit_code == 0 and "no violations" in res.stdout


# -- config parsing and validation ------------------------------------------------

def test_parse_full_config():
    cfg = parse_config("""
[run]
quantity = g2tau
[scenario]
kind = selective
drive = pump
xi2 = 0.5
[rates]
gamma_p = 0.5   # inline comment
gamma_d = 10
I0 = 2
[grid]
tau_max = 8
points = 100
""")
    assert cfg.quantity is Quantity.G2TAU and cfg.kind == "selective" and cfg.xi2 == 0.5
    assert cfg.gamma_p == 0.5 and cfg.I0 == 2.0 and cfg.resolved_points == 100
    assert cfg.positions["gamma_d"] == (10, 11)
    assert validate(cfg) == []


@pytest.mark.parametrize("text,line,col", [
    ("[run]\nquantity = g2tau\n[bogus]\nx = 1\n", 3, 1),
    ("[rates]\ngamma_q = 1\n", 2, 11),
    ("quantity = decay\n", 1, 1),
    ("[grid]\npoints = 1.5\n", 2, 10),
    ("[run]\nquantity = spectrum\n", 2, 12),
    ("[rates]\ngamma_p = 1\ngamma_p = 2\n", 3, 1),
    ("[rates]\nthis line is broken\n", 2, 1),
])
def test_parse_errors_carry_position(text, line, col):
    with pytest.raises(ConfigError) as info:
        parse_config(text)
    assert (info.value.line, info.value.column) == (line, col)
    assert f"line {line}, column {col}" in str(info.value)


def test_load_missing_file():
    with pytest.raises(ConfigError, match="cannot read"):
        config.load_config("/nonexistent/run.ini")


def test_validate_examples():
    msgs = lambda cfg: [d.message for d in validate(cfg)]
    assert "repetition time below 5/gamma" in msgs(RunConfig(quantity=Quantity.PULSED, period=1.0))
    both = RunConfig(quantity=Quantity.G2TAU, kind="selective", drive="sym", gamma_p=0.5, omega=0.1)
    assert "coherent drive and incoherent pump are both nonzero" in msgs(both)
    assert validate(RunConfig(quantity=Quantity.G2TAU, kind="superradiant", gamma_p=1.0)) == []
    assert msgs(RunConfig(quantity=Quantity.DECAY, points=2 * 10**6))
    assert msgs(RunConfig(quantity=Quantity.G2TAU, kind="superradiant", xi2=0.5))
    assert msgs(RunConfig(quantity=Quantity.PULSED, points=2000))
    assert msgs(RunConfig(quantity=Quantity.DECAY, n_ee0=0.8, n_S0=0.4))
    assert msgs(RunConfig(quantity=Quantity.RATESCAN, observable="gamma9"))
    assert msgs(RunConfig())


def test_overrides_take_precedence():
    cfg = parse_config("[run]\nquantity = g2tau\n[rates]\ngamma_p = 0.5\n")
    cfg = cfg.with_overrides(gamma_p=2.0, gamma_d=None)
    assert cfg.gamma_p == 2.0 and cfg.gamma_d == 0.0


# -- determinism and figure configs ---------------------------------------------------

def test_byte_identical_outputs(runner, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["g2tau", "--scenario", "selective", "--gamma-p", "0.3", "--gamma-d", "2", "--points", "50"]
    assert runner.invoke(cli, [*args, "--out", str(a)]).exit_code == 0
    assert runner.invoke(cli, [*args, "--out", str(b)]).exit_code == 0
    assert a.read_bytes() == b.read_bytes()


FIGURE_CONFIGS = sorted(FIGURES.glob("*.ini"))


def test_every_figure_has_a_config():
    prefixes = {p.name.split("_")[0] for p in FIGURE_CONFIGS}
    assert prefixes == {"fig1c", "fig2a", "fig2b", "fig2c", "fig3c", "fig4a", "fig4b", "fig4c",
                        "fig5a", "fig5b", "fig5c"}


@pytest.mark.parametrize("path", FIGURE_CONFIGS, ids=lambda p: p.stem)
def test_figure_configs_validate(path):
    cfg = config.load_config(path)
    assert cfg.quantity is not None
    assert validate(cfg) == []


@pytest.mark.parametrize("name", ["fig2b_superradiant_gp1.0", "fig5c_selective_gd10"])
def test_figure_configs_reproduce_key_numbers(runner, tmp_path, name):
    out = tmp_path / "fig.csv"
    res = runner.invoke(cli, ["run", "--config", str(FIGURES / f"{name}.ini"), "--out", str(out)])
    assert res.exit_code == 0, res.output
    if name.startswith("fig2b"):
        _, data, _ = read_table(out)
        assert data[0, 1] == pytest.approx(1.0, abs=1e-6)
    else:
        assert float(summary(res.stdout)["PeakIntegral"]) == pytest.approx(6 / 11, abs=5e-3)
