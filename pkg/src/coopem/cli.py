"""Command-line front end: ``coopem <subcommand> [options]``.

Each analysis subcommand writes a delimited table (``#`` metadata header, a
header row naming columns and units, one sample per row) to ``--out`` or to
standard output, followed by a summary block. Exit codes: 0 success, 2
configuration error, 3 physics error.
"""

import math
import sys
import warnings
from dataclasses import dataclass, field

import click
import numpy as np
from scipy.integrate import simpson

from . import __version__, correlators, geometry, models, oracles, pulsed
from .config import (OBSERVABLES, Quantity, RunConfig, load_config, validate)
from .core import RateSet
from .errors import ConfigError, PhysicsError

EXIT_CONFIG = 2
EXIT_PHYSICS = 3


@dataclass
class Result:
    columns: list
    units: list
    data: np.ndarray
    meta: dict = field(default_factory=dict)
    summary: dict = field(default_factory=dict)


def _fmt(value):
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    return str(value)


def format_table(result, delimiter=","):
    lines = [f"# coopem {__version__}"]
    lines += [f"# {key} = {_fmt(value)}" for key, value in result.meta.items()]
    lines.append(delimiter.join(f"{c} [{u}]" for c, u in zip(result.columns, result.units)))
    for row in result.data:
        lines.append(delimiter.join(f"{v:.12e}" for v in row))
    return "\n".join(lines) + "\n"


def format_summary(result, prefix=""):
    return "".join(f"{prefix}{key} = {_fmt(value)}\n" for key, value in result.summary.items())


# -- execution ---------------------------------------------------------------

def _rates(cfg):
    return RateSet(gamma=cfg.gamma, gamma_p=cfg.gamma_p, gamma_d=cfg.gamma_d,
                   gamma_S=cfg.gamma_S, Omega=cfg.omega, I0=cfg.I0)


def _xi2(cfg):
    # a finite aperture fixes the visibility unless it is given explicitly
    if cfg.xi2 is not None:
        return cfg.xi2
    if cfg.kind == "selective" and cfg.aperture > 0:
        det = geometry.DetectorGeometry(aperture_half_angle=cfg.aperture)
        return abs(geometry.xi_factor(det, geometry.r_vector_at(cfg.kr, cfg.r_angle, det))) ** 2
    return 1.0


def _initial_state(cfg, dim):
    if dim == 2:
        return np.diag([cfg.n_ee0, 1 - cfg.n_ee0]).astype(complex)
    rho = cfg.n_ee0 * models.excited_state(4) + cfg.n_S0 * models.projector(models.psi_S)
    rho = rho + (1 - cfg.n_ee0 - cfg.n_S0) * models.ground_state(4)
    return rho


def _model(cfg):
    scenario = models.Scenario(cfg.kind, cfg.resolved_drive)
    return models.make_model(scenario, _rates(cfg), xi2=_xi2(cfg))


def _base_meta(cfg, model=None):
    meta = {"quantity": cfg.quantity.value}
    if model is not None:
        meta["scenario"] = model.kind.value
        meta["drive"] = model.scenario.drive.value
        meta.update(model.rates.as_dict())
        if model.kind is models.Kind.SELECTIVE:
            meta["xi2"] = model.xi2
    return meta


def _run_decay(cfg):
    model = _model(cfg)
    t = np.linspace(0.0, cfg.t_max, cfg.resolved_points)
    rho0 = _initial_state(cfg, model.dim)
    tr = correlators.intensity_trace(model, rho0, t)
    meta = _base_meta(cfg, model)
    meta.update(n_ee0=cfg.n_ee0, n_S0=cfg.n_S0)
    summary = {"intensity_t0": tr.y[0], "emitted_photons_window": simpson(tr.y, x=t) / model.I0}
    return Result(["t", "intensity"], ["1/gamma", "I0"], np.column_stack([t, tr.y]), meta, summary)


def _run_g2tau(cfg):
    model = _model(cfg)
    tau = np.linspace(0.0, cfg.tau_max, cfg.resolved_points)
    tr = correlators.g2_tau(model, tau)
    rho_ss = correlators.stationary(model)
    labels = ("e", "g") if model.dim == 2 else ("ee", "eg", "ge", "gg")
    summary = {f"stationary_population_{lab}": rho_ss[i, i].real for i, lab in enumerate(labels)}
    if model.dim == 4:
        summary["stationary_coherence_eg_ge"] = rho_ss[models.EG, models.GE].real
    summary["stationary_intensity"] = tr.meta["stationary_intensity"]
    summary["g2_0"] = tr.y[0]
    return Result(["tau", "g2"], ["1/gamma", "1"], np.column_stack([tau, tr.y]),
                  _base_meta(cfg, model), summary)


def _run_pulsed(cfg):
    model = _model(cfg)
    post = _initial_state(cfg, model.dim)
    pcfg = pulsed.PulseTrainConfig(T=cfg.period, post_pulse_state=post, n_periods=cfg.n_periods,
                                   tau_points=cfg.resolved_points)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", pulsed.ShortPeriodWarning)
        hist = pulsed.pulsed_histogram(model, pcfg)
    for w in caught:
        click.echo(f"warning: {w.message}", err=True)
    meta = _base_meta(cfg, model)
    meta.update(T=cfg.period, n_periods=cfg.n_periods, n_ee0=cfg.n_ee0, n_S0=cfg.n_S0,
                tau_points=hist.meta["tau_points"])
    foms = pulsed.figures_of_merit(hist)
    summary = {
        "PeakHeight": foms[pulsed.Window.PEAK_HEIGHT],
        "PeakIntegral": foms[pulsed.Window.PEAK_INTEGRAL],
        "residual_excitation_half_period": hist.meta["residual_excitation"],
    }
    return Result(["tau", "Gbar2"], ["1/gamma", "I0^2/gamma"],
                  np.column_stack([hist.tau, hist.values]), meta, summary)


def _pattern_state(cfg):
    if cfg.pattern_state == "excited":
        return models.excited_state(4)
    if cfg.pattern_state == "uncorrelated":
        return models.product_state(0.5)
    return models.projector(models.psi_k(cfg.k1_phase))


def _run_pattern(cfg):
    obs = cfg.resolved_observable
    phase = cfg.k1_phase + np.linspace(0.0, 2 * np.pi, cfg.resolved_points)
    tr = geometry.radiation_pattern(_pattern_state(cfg), phase, cfg.k1_phase, obs)
    meta = {"quantity": cfg.quantity.value, "observable": obs, "pattern_state": cfg.pattern_state,
            "k1_phase": cfg.k1_phase}
    summary = {"min": tr.y.min(), "max": tr.y.max(), "value_equal_phases": tr.y[0]}
    return Result(["k2_phase", obs], ["rad", "1"], np.column_stack([phase, tr.y]), meta, summary)


def _run_ratescan(cfg):
    obs = cfg.resolved_observable
    kr = np.linspace(0.0, cfg.kr_max, cfg.resolved_points)
    tr = geometry.rate_scan(kr, obs, cfg.gamma, cfg.dipole_cos2)
    meta = {"quantity": cfg.quantity.value, "observable": obs, "gamma": cfg.gamma,
            "dipole_cos2": cfg.dipole_cos2}
    summary = {"value_kr0": tr.y[0], "value_kr_max": tr.y[-1],
               "value_at_pi": geometry.rate_scan([np.pi], obs, cfg.gamma, cfg.dipole_cos2).y[0]}
    return Result(["kr", obs], ["1", "gamma"], np.column_stack([kr, tr.y]), meta, summary)


def _run_xiscan(cfg):
    kr = np.linspace(0.0, cfg.kr_max, cfg.resolved_points)
    det = geometry.DetectorGeometry(aperture_half_angle=cfg.aperture)
    tr = geometry.xi_scan(kr, det, cfg.r_angle)
    g2av = np.array([geometry.g2_average(math.sqrt(v)) for v in tr.y])
    meta = {"quantity": cfg.quantity.value, "aperture": cfg.aperture, "r_angle": cfg.r_angle}
    summary = {"xi2_min": tr.y.min(), "xi2_kr_max": tr.y[-1], "g2_av_kr_max": g2av[-1]}
    return Result(["kr", "xi2", "g2_av"], ["1", "1", "1"], np.column_stack([kr, tr.y, g2av]),
                  meta, summary)


_RUNNERS = {
    Quantity.DECAY: _run_decay,
    Quantity.G2TAU: _run_g2tau,
    Quantity.PULSED: _run_pulsed,
    Quantity.PATTERN: _run_pattern,
    Quantity.RATESCAN: _run_ratescan,
    Quantity.XISCAN: _run_xiscan,
}


def execute(cfg):
    """Validate and run ``cfg``; raises :class:`ConfigError` on violations."""
    problems = validate(cfg)
    if problems:
        first = problems[0]
        raise ConfigError("; ".join(str(p) if p.line is None else p.message for p in problems),
                          first.line, first.column)
    try:
        return _RUNNERS[cfg.quantity](cfg)
    except PhysicsError:
        raise
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def emit(result, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_table(result))
        click.echo(f"wrote {result.data.shape[0]} rows to {out}")
        click.echo(format_summary(result), nl=False)
    else:
        click.echo(format_table(result), nl=False)
        click.echo(format_summary(result, prefix="# "), nl=False)


def _fail(exc):
    if isinstance(exc, ConfigError):
        click.echo(f"config error: {exc}", err=True)
        sys.exit(EXIT_CONFIG)
    click.echo(f"physics error: {type(exc).__name__}: {exc}", err=True)
    sys.exit(EXIT_PHYSICS)


# -- click layer -------------------------------------------------------------

_COMMON = [
    click.option("--config", "config_path", type=click.Path(dir_okay=False), help="INI run configuration."),
    click.option("--scenario", type=click.Choice(["single", "distinguishable", "superradiant", "selective"])),
    click.option("--drive", type=click.Choice(["none", "pump", "sym", "antisym"]),
                 help="Default: pump if --gamma-p > 0, else none."),
    click.option("--gamma", type=float, help="Single-emitter decay rate (sets the units)."),
    click.option("--gamma-p", type=float, help="Incoherent pump rate."),
    click.option("--gamma-d", type=float, help="Local pure dephasing rate."),
    click.option("--gamma-s", type=float, help="Collective decay rate (default 2 gamma)."),
    click.option("--omega", type=float, help="Rabi frequency of the coherent drive."),
    click.option("--i0", "I0", type=float, help="Intensity unit."),
    click.option("--xi2", type=float, help="Detector visibility |xi|^2 (selective only)."),
    click.option("--kr", type=float, help="Emitter separation times wavenumber."),
    click.option("--aperture", type=float, help="Detector aperture half angle [rad]."),
    click.option("--r-angle", type=float, help="Angle between separation and detector axis [rad]."),
    click.option("--n-ee0", type=float, help="Initial / post-pulse doubly excited population."),
    click.option("--n-s0", "n_S0", type=float, help="Initial / post-pulse symmetric Dicke population."),
    click.option("--points", type=int, help="Number of samples."),
    click.option("--out", "output", type=click.Path(dir_okay=False), help="Output table path."),
]


def common_options(func):
    for opt in reversed(_COMMON):
        func = opt(func)
    return func


def _build_config(quantity, config_path, **flags):
    try:
        cfg = load_config(config_path) if config_path else RunConfig()
    except ConfigError as exc:
        _fail(exc)
    if quantity is not None:
        if cfg.quantity is not None and cfg.quantity is not quantity:
            line, col = cfg.positions.get("quantity", (None, None))
            _fail(ConfigError(f"config is for {cfg.quantity.value!r}, not {quantity.value!r}", line, col))
        flags["quantity"] = quantity
    if "scenario" in flags:
        flags["kind"] = flags.pop("scenario")
    return cfg.with_overrides(**flags)


def _run(quantity, config_path, flags):
    cfg = _build_config(quantity, config_path, **flags)
    try:
        result = execute(cfg)
    except (ConfigError, PhysicsError) as exc:
        _fail(exc)
    emit(result, cfg.output)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.version_option(__version__, prog_name="coopem")
def cli():
    """Photon statistics of two cooperative quantum emitters."""


@cli.command()
@common_options
@click.option("--t-max", type=float, help="End of the time grid [1/gamma].")
def decay(config_path, **flags):
    """Emitted intensity after preparation in the initial state."""
    _run(Quantity.DECAY, config_path, flags)


@cli.command()
@common_options
@click.option("--tau-max", type=float, help="End of the delay grid [1/gamma].")
def g2tau(config_path, **flags):
    """Stationary delay-time coincidences g2(inf, tau)."""
    _run(Quantity.G2TAU, config_path, flags)


@cli.command("pulsed")
@common_options
@click.option("--period", type=float, help="Pulse repetition time T [1/gamma].")
@click.option("--n-periods", type=int, help="Number of side peaks to resolve.")
def pulsed_cmd(config_path, **flags):
    """Pulse-train coincidence histogram and its peak ratios."""
    _run(Quantity.PULSED, config_path, flags)


@cli.command()
@common_options
@click.option("--quantity", "observable", type=click.Choice(OBSERVABLES[Quantity.PATTERN]))
@click.option("--state", "pattern_state", type=click.Choice(["excited", "uncorrelated", "collapsed"]))
@click.option("--k1-phase", type=float, help="Phase k1.r of the first detector [rad].")
def pattern(config_path, **flags):
    """Angle-resolved zero-delay signals versus the second detector phase."""
    _run(Quantity.PATTERN, config_path, flags)


@cli.command()
@common_options
@click.option("--quantity", "observable", type=click.Choice(OBSERVABLES[Quantity.RATESCAN]))
@click.option("--kr-max", type=float)
@click.option("--dipole-cos2", type=float, help="Squared cosine between dipole and separation.")
def ratescan(config_path, **flags):
    """Collective decay rates versus emitter separation."""
    _run(Quantity.RATESCAN, config_path, flags)


@cli.command()
@common_options
@click.option("--kr-max", type=float)
def xiscan(config_path, **flags):
    """Detector visibility |xi|^2 versus emitter separation."""
    _run(Quantity.XISCAN, config_path, flags)


@cli.command("run")
@click.option("--config", "config_path", type=click.Path(dir_okay=False), required=True)
@click.option("--out", "output", type=click.Path(dir_okay=False))
def run_cmd(config_path, output):
    """Run whatever quantity the config file selects."""
    _run(None, config_path, {"output": output})


@cli.command("validate")
@common_options
@click.option("--quantity", "quantity_name", type=click.Choice([q.value for q in Quantity]),
              help="Quantity to check against (default: the config's).")
@click.option("--t-max", type=float)
@click.option("--tau-max", type=float)
@click.option("--period", type=float)
@click.option("--n-periods", type=int)
@click.option("--kr-max", type=float)
def validate_cmd(config_path, quantity_name, **flags):
    """Check a configuration without running it; lists every violation."""
    cfg = _build_config(Quantity(quantity_name) if quantity_name else None, config_path, **flags)
    problems = validate(cfg)
    for p in problems:
        click.echo(f"violation: {p}")
    if problems:
        sys.exit(EXIT_CONFIG)
    click.echo("ok: no violations")


_ORACLE_COLUMNS = {
    oracles.OracleId.SupPopulations: ["n_ee", "n_S"],
    oracles.OracleId.SelPopulations: ["n_ee", "n_eg", "c"],
}
_SWEEPABLE = ("tau", "t", "kr", "delta_phase", "xi2", "gamma_d", "gamma_p")


def _parse_param(text):
    if "=" not in text:
        raise click.BadParameter(f"expected key=value, got {text!r}")
    key, value = text.split("=", 1)
    try:
        return key.strip(), float(value)
    except ValueError:
        return key.strip(), value.strip()


@cli.command("oracle")
@click.argument("oracle_id", type=click.Choice([o.value for o in oracles.OracleId]))
@click.option("-p", "--param", "params", multiple=True, help="Parameter as key=value (repeatable).")
@click.option("--sweep", help="Parameter swept over [--start, --stop].")
@click.option("--start", type=float, default=0.0, show_default=True)
@click.option("--stop", type=float, default=6.0, show_default=True)
@click.option("--points", type=int, default=601, show_default=True)
@click.option("--out", "output", type=click.Path(dir_okay=False))
def oracle_cmd(oracle_id, params, sweep, start, stop, points, output):
    """Tabulate a closed-form reference result."""
    oid = oracles.OracleId(oracle_id)
    kwargs = dict(_parse_param(p) for p in params)
    accepted = oracles.parameters(oid)
    if sweep is None and accepted[0] in _SWEEPABLE and accepted[0] not in kwargs:
        sweep = accepted[0]
    try:
        if not 1 <= points <= 10**6:
            raise ConfigError(f"points must lie in [1, 1000000], got {points}")
        if sweep is None:
            values = np.atleast_1d(np.asarray(oracles.evaluate(oid, **kwargs), dtype=float))
            names = _ORACLE_COLUMNS.get(oid, ["value"])
            result = Result(names, ["1"] * len(names), values[None, :],
                            {"oracle": oid.value, **kwargs},
                            dict(zip(names, values.tolist())))
        else:
            grid = np.linspace(start, stop, points)
            rows = [np.atleast_1d(np.asarray(oracles.evaluate(oid, **kwargs, **{sweep: x}), dtype=float))
                    for x in grid]
            data = np.column_stack([grid, np.array(rows)])
            names = _ORACLE_COLUMNS.get(oid, ["value"])
            result = Result([sweep, *names], ["1"] * (1 + len(names)), data,
                            {"oracle": oid.value, "sweep": sweep, **kwargs},
                            {"rows": len(grid)})
    except ValueError as exc:
        _fail(ConfigError(str(exc)))
    emit(result, output)


def main(argv=None):
    cli.main(args=argv, prog_name="coopem", standalone_mode=True)


if __name__ == "__main__":
    main()
