"""Pulse-train coincidence histograms and their figures of merit.

Pulses are instantaneous resets to ``post_pulse_state`` every ``T``. The
first photon is taken in ``[0, T/2]`` after a pulse; the second photon is
either from the same pulse (explicit two-time correlator) or, once the next
reset has happened, from a later pulse, in which case the reset makes the
correlator factorize exactly into ``I(t) I(s)`` with ``s`` the time since the
latest pulse.
"""

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np
from scipy.integrate import simpson

from . import models
from .core import RateSet, propagate
from .correlators import coincidence_lattice
from .errors import PhysicsError
from .models import Kind

RESIDUAL_EXCITATION_WARN = 1e-4


class Window(str, Enum):
    PEAK_HEIGHT = "height"
    PEAK_INTEGRAL = "integral"


class ShortPeriodWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PulseTrainConfig:
    """``tau_points`` samples span one period; the same step is used for the
    first-photon time, which therefore has ``(tau_points - 1)/2 + 1`` points."""

    T: float = 10.0
    post_pulse_state: np.ndarray = None
    n_periods: int = 2
    tau_points: int = 2001
    refine: bool = True

    def __post_init__(self):
        if self.T < 5.0:
            raise ValueError("repetition time below 5/gamma")
        if self.n_periods < 2:
            raise ValueError("need at least two periods to resolve the first side peak")
        if self.tau_points % 2 == 0:
            raise ValueError("tau_points must be odd so that T/2 lies on the grid")
        if self.t_grid_points < 401:
            raise ValueError("tau_points must give at least 401 first-photon time points")

    @property
    def step(self):
        return self.T / (self.tau_points - 1)

    @property
    def t_grid_points(self):
        return (self.tau_points - 1) // 2 + 1


@dataclass(frozen=True)
class Histogram:
    """Symmetric ``Gbar2(tau)`` on ``[-(n_periods - 1/2) T, (n_periods - 1/2) T]``."""

    tau: np.ndarray
    values: np.ndarray
    T: float
    step: float
    meta: dict = field(default_factory=dict)

    def samples(self):
        return list(zip(self.tau.tolist(), self.values.tolist()))

    def value_at(self, tau):
        idx = int(round((tau - self.tau[0]) / self.step))
        if not 0 <= idx < self.tau.size or abs(self.tau[idx] - tau) > 1e-9 * max(1.0, abs(tau)):
            raise ValueError(f"tau={tau} is not a histogram sample")
        return self.values[idx]

    def window_integral(self, center, width):
        half = 0.5 * width
        mask = (self.tau >= center - half - 1e-9 * self.T) & (self.tau <= center + half + 1e-9 * self.T)
        if mask.sum() < 2:
            raise ValueError("integration window does not contain enough samples")
        return simpson(self.values[mask], x=self.tau[mask])


def _segment_integral(values, step):
    if values.size < 2:
        return 0.0
    return simpson(values, dx=step)


def _histogram_half(G0, inten, N, J, n_tau, step):
    """``Gbar2(k*step)`` for ``k = 0..n_tau-1``.

    ``G0[j, k]`` is the same-pulse correlator, ``inten[i]`` the intensity ``i``
    steps after a pulse (``i = 0..N``, ``N`` steps per period), ``J`` the index
    of ``T/2``.
    """
    out = np.empty(n_tau)
    j_all = np.arange(J + 1)
    for k in range(n_tau):
        # second photon j + k steps after the first pulse; resets at multiples of N
        cuts = [m * N - k for m in range(1, (J + k) // N + 1) if 0 < m * N - k < J]
        bounds = [0, *cuts, J]
        total = 0.0
        for lo, hi in zip(bounds[:-1], bounds[1:]):
            j = j_all[lo:hi + 1]
            m = (lo + k) // N
            if m == 0:
                seg = G0[j, k]
            else:
                seg = inten[j] * inten[j + k - m * N]
            total += _segment_integral(seg, step)
        out[k] = total
    return out


def _build(model, post, cfg, tau_points):
    T = cfg.T
    N = tau_points - 1
    step = T / N
    J = N // 2
    n_tau = int(round((cfg.n_periods - 0.5) * N)) + 1
    G0, inten = coincidence_lattice(model, post, step, n_t=N + 1, n_tau=N + 1)
    half = _histogram_half(G0, inten, N, J, n_tau, step)
    tau_pos = step * np.arange(n_tau)
    tau = np.concatenate([-tau_pos[:0:-1], tau_pos])
    values = np.concatenate([half[:0:-1], half])
    return tau, values, step


def pulsed_histogram(model, cfg=None):
    """Coincidence histogram of ``model`` under the pulse train ``cfg``."""
    cfg = cfg or PulseTrainConfig()
    rates = model.rates
    if rates.gamma_p > 0 or rates.Omega > 0 or model.scenario.drive is not models.Drive.NONE:
        raise PhysicsError("pulsed excitation requires free decay between pulses (no pump or drive)")
    post = cfg.post_pulse_state
    if post is None:
        post = models.excited_state(model.dim)
    post = np.asarray(post, dtype=complex)

    half_state = propagate(model.liouvillian, post, 0.5 * cfg.T)
    residual = np.trace(model.number_operator() @ half_state).real
    if residual > RESIDUAL_EXCITATION_WARN:
        warnings.warn(
            f"residual excitation {residual:.2e} at T/2; the repetition time is short "
            "compared with the decay", ShortPeriodWarning, stacklevel=2)

    tau_points = cfg.tau_points
    tau, values, step = _build(model, post, cfg, tau_points)
    hist = Histogram(tau, values, cfg.T, step)
    if cfg.refine:
        for _ in range(3):
            coarse = _coarsen(hist)
            change = max(
                abs(gbar(hist, w) - gbar(coarse, w)) / max(abs(gbar(hist, w)), 1e-300)
                for w in Window
            ) if _has_reference(hist) else 0.0
            if change < 1e-3:
                break
            tau_points = 2 * (tau_points - 1) + 1
            tau, values, step = _build(model, post, cfg, tau_points)
            hist = Histogram(tau, values, cfg.T, step)
    meta = {
        "scenario": model.kind.value,
        **rates.as_dict(),
        "T": cfg.T,
        "n_periods": cfg.n_periods,
        "tau_points": tau_points,
        "residual_excitation": residual,
    }
    return Histogram(tau, values, cfg.T, step, meta)


def _coarsen(hist):
    # every other sample keeps tau = 0, T/2, T ... on the grid
    n = hist.tau.size
    mid = n // 2
    idx = np.arange(mid % 2, n, 2)
    return Histogram(hist.tau[idx], hist.values[idx], hist.T, 2 * hist.step)


def _has_reference(hist):
    return hist.value_at(hist.T) > 0


def peak_measures(hist, window, width=None):
    """``(Gbar2_0, Gbar2_1)`` of the zeroth and first peak.

    ``PEAK_HEIGHT`` returns the histogram values at ``tau = 0`` and ``tau = T``
    (the ``delta tau -> 0`` integrals per unit window width); ``PEAK_INTEGRAL``
    integrates windows of width ``width`` (default ``T``) centred on each peak.
    """
    window = Window(window)
    if window is Window.PEAK_HEIGHT:
        return hist.value_at(0.0), hist.value_at(hist.T)
    width = hist.T if width is None else width
    if not 0 < width <= hist.T:
        raise ValueError("integration window must lie in (0, T]")
    return hist.window_integral(0.0, width), hist.window_integral(hist.T, width)


def gbar(hist, window, width=None):
    """Ratio of zeroth- to first-peak coincidences for the chosen window."""
    G0, G1 = peak_measures(hist, window, width)
    if G1 <= 0:
        raise PhysicsError("first side peak is empty; the ratio is undefined")
    return G0 / G1


def gbar_analytic(scenario, rates=None, window=Window.PEAK_HEIGHT, n_ee0=1.0, n_S0=0.0,
                  n_eg0=None, c0=0.0):
    """Closed-form ``gbar`` for ideal superradiant or selectively detected emitters.

    Superradiant emitters are parametrized by the post-pulse populations of
    ``|e1 e2>`` and ``|psi_S>``; selective ones by ``n_ee0``, ``n_eg0`` and the
    coherence ``c0`` (``n_eg0`` defaults to ``n_S0 - c0``).
    """
    kind = Kind(scenario.kind if isinstance(scenario, models.Scenario) else scenario)
    rates = rates or RateSet()
    window = Window(window)
    g, gd = rates.gamma, rates.gamma_d
    if not 0.0 <= n_ee0 <= 1.0 or not 0.0 <= n_S0 <= 1.0 or n_ee0 + n_S0 > 1.0 + 1e-12:
        raise ValueError("initial occupations out of range")
    if kind is Kind.SUPERRADIANT:
        if gd != 0:
            raise ValueError("the superradiant closed form assumes no pure dephasing")
        if window is Window.PEAK_HEIGHT:
            den = 1.25 * n_ee0**2 + 0.5 * n_S0**2 + 1.5 * n_ee0 * n_S0
        else:
            den = 0.5 * (2.0 * n_ee0 + n_S0) ** 2
        if den == 0:
            raise ValueError("no emission from the given initial state")
        return n_ee0 / den
    if kind is Kind.SELECTIVE:
        if n_eg0 is None:
            n_eg0 = n_S0 - c0
        if n_eg0 < 0 or n_ee0 + 2 * n_eg0 > 1.0 + 1e-12 or abs(c0) > n_eg0 + 1e-12:
            raise ValueError("initial occupations out of range")
        a = n_eg0 + n_ee0
        if window is Window.PEAK_HEIGHT:
            G0 = n_ee0 / (2 * g)
            G1 = a**2 / (2 * g) + 2 * a * c0 / (2 * g + gd) + c0**2 / (2 * g + 2 * gd)
        else:
            G0 = n_ee0 / (2 * g) * (1 / g + 1 / (g + gd))
            G1 = (a / g + c0 / (g + gd)) ** 2
        if G1 == 0:
            raise ValueError("no emission from the given initial state")
        return G0 / G1
    raise ValueError(f"no closed form for scenario {kind.value!r}")


def figures_of_merit(hist):
    return {w: gbar(hist, w) for w in Window}
