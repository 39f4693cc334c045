import warnings

import numpy as np
import pytest

from coopem import models, oracles, pulsed
from coopem.core import RateSet
from coopem.errors import PhysicsError
from coopem.pulsed import PulseTrainConfig, Window

# superradiant, gamma_d = 10, T = 10, default lattice (converged to 1e-9)
SUP_GD10_HEIGHT = 0.9702372211


def hist(kind, gd=0.0, xi2=None, **cfg):
    kw = {} if xi2 is None else {"xi2": xi2}
    m = models.make_model(kind, RateSet(gamma_d=gd), **kw)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", pulsed.ShortPeriodWarning)
        return pulsed.pulsed_histogram(m, PulseTrainConfig(**cfg))


def relative_width(h):
    """Zeroth-peak integral per unit height, relative to the same for the side peak."""
    w0 = h.window_integral(0.0, h.T) / h.value_at(0.0)
    w1 = h.window_integral(h.T, h.T) / h.value_at(h.T)
    return w0 / w1


def sup_post_state(n_ee, n_S):
    return (n_ee * models.excited_state() + n_S * models.projector(models.psi_S)
            + (1 - n_ee - n_S) * models.ground_state())


def test_single_emitter_zeroth_peak_empty():
    h = hist("single")
    zeroth = np.abs(h.tau) <= h.T / 2
    assert np.max(np.abs(h.values[zeroth])) <= 1e-12
    assert h.value_at(h.T) > 0


@pytest.mark.parametrize("width", [0.1, 1.0, 3.0, 7.5, 10.0])
def test_distinguishable_half_for_every_window(width):
    h = hist("distinguishable", T=20.0)
    assert pulsed.gbar(h, Window.PEAK_INTEGRAL, width) == pytest.approx(0.5, abs=1e-3)
    assert pulsed.gbar(h, Window.PEAK_HEIGHT) == pytest.approx(0.5, abs=1e-6)


def test_superradiant_dephasing_narrows_zeroth_peak():
    h0, h10 = hist("superradiant"), hist("superradiant", 10.0)
    assert relative_width(h10) < 0.85 * relative_width(h0)
    for h in (h0, h10):
        assert pulsed.gbar(h, Window.PEAK_INTEGRAL) == pytest.approx(0.5, abs=2e-3)


def test_superradiant_dephased_golden():
    h = hist("superradiant", 10.0)
    assert pulsed.gbar(h, Window.PEAK_HEIGHT) == pytest.approx(SUP_GD10_HEIGHT, abs=1e-6)


def test_superradiant_dephased_long_period_limit():
    # T -> infinity limit of the same quantity is 228/235
    h = hist("superradiant", 10.0, T=40.0)
    assert pulsed.gbar(h, Window.PEAK_HEIGHT) == pytest.approx(228 / 235, abs=1e-6)


def test_gbar_analytic_examples():
    assert pulsed.gbar_analytic("superradiant", window="height") == pytest.approx(0.8)
    assert pulsed.gbar_analytic("superradiant", window="integral") == pytest.approx(0.5)
    assert pulsed.gbar_analytic("superradiant", n_ee0=0.0, n_S0=1.0) == 0.0
    sel0 = RateSet(gamma_d=0.0)
    assert pulsed.gbar_analytic("selective", sel0, "integral") == pytest.approx(1.0)
    assert pulsed.gbar_analytic("selective", RateSet(gamma_d=10), "integral") == pytest.approx(6 / 11)
    for gd in (0.0, 1.0, 10.0):
        assert pulsed.gbar_analytic("selective", RateSet(gamma_d=gd), "height") == pytest.approx(1.0)
        assert pulsed.gbar_analytic("selective", RateSet(gamma_d=gd), "integral") == pytest.approx(
            0.5 * (1 + 1 / (1 + gd)))
        assert pulsed.gbar_analytic("selective", RateSet(gamma_d=gd), "integral") == pytest.approx(
            oracles.gbar_sel("integral", gamma_d=gd))


def test_gbar_analytic_errors():
    with pytest.raises(ValueError):
        pulsed.gbar_analytic("superradiant", n_ee0=0.8, n_S0=0.5)
    with pytest.raises(ValueError):
        pulsed.gbar_analytic("superradiant", RateSet(gamma_d=1.0))
    with pytest.raises(ValueError):
        pulsed.gbar_analytic("distinguishable")
    with pytest.raises(ValueError):
        pulsed.gbar_analytic("superradiant", n_ee0=0.0, n_S0=0.0)


@pytest.mark.parametrize("trial", range(6))
def test_superradiant_numeric_vs_analytic(trial):
    rng = np.random.default_rng(40 + trial)
    n_ee = rng.uniform(0.2, 1.0)
    n_S = rng.uniform(0, 1 - n_ee)
    m = models.make_model("superradiant")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", pulsed.ShortPeriodWarning)
        h = pulsed.pulsed_histogram(m, PulseTrainConfig(post_pulse_state=sup_post_state(n_ee, n_S)))
    for w in Window:
        exact = pulsed.gbar_analytic("superradiant", window=w, n_ee0=n_ee, n_S0=n_S)
        assert pulsed.gbar(h, w) == pytest.approx(exact, rel=1e-2)
        assert exact == pytest.approx(oracles.gbar_sup(w.value, n_ee0=n_ee, n_S0=n_S), rel=1e-12)


@pytest.mark.parametrize("gd", [0.0, 1.0, 10.0])
def test_selective_numeric_vs_analytic(gd):
    h = hist("selective", gd)
    for w in Window:
        exact = pulsed.gbar_analytic("selective", RateSet(gamma_d=gd), w)
        assert pulsed.gbar(h, w) == pytest.approx(exact, rel=1e-2)


def test_selective_correlated_post_pulse_state():
    # a coherent single-excitation admixture changes the first side peak
    rho0 = models.embed_state((0.6, 0.15, 0.1))
    m = models.make_model("selective", RateSet(gamma_d=1.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", pulsed.ShortPeriodWarning)
        h = pulsed.pulsed_histogram(m, PulseTrainConfig(T=20.0, post_pulse_state=rho0))
    for w in Window:
        exact = pulsed.gbar_analytic("selective", RateSet(gamma_d=1.0), w, n_ee0=0.6, n_eg0=0.15, c0=0.1)
        assert pulsed.gbar(h, w) == pytest.approx(exact, rel=5e-3)


def test_intermediate_integrals_superradiant():
    h = hist("superradiant", T=20.0)
    for w in Window:
        G0, G1 = pulsed.peak_measures(h, w)
        assert G0 / 4 == pytest.approx(oracles.gbar_sup(w.value, part="G0"), rel=5e-3)
        assert G1 / 4 == pytest.approx(oracles.gbar_sup(w.value, part="G1"), rel=5e-3)


@pytest.mark.parametrize("gd", [0.0, 1.0, 10.0])
def test_intermediate_integrals_selective(gd):
    h = hist("selective", gd, T=20.0)
    for w in Window:
        G0, G1 = pulsed.peak_measures(h, w)
        assert G0 / 4 == pytest.approx(oracles.gbar_sel(w.value, gamma_d=gd, part="G0"), rel=5e-3)
        assert G1 / 4 == pytest.approx(oracles.gbar_sel(w.value, gamma_d=gd, part="G1"), rel=5e-3)


@pytest.mark.parametrize("kind", ["single", "distinguishable", "superradiant", "selective"])
def test_side_peaks_identical(kind):
    gd = 1.0 if kind != "single" else 0.0
    h = hist(kind, gd, n_periods=3)
    assert h.value_at(2 * h.T) == pytest.approx(h.value_at(h.T), rel=1e-6)
    # whole-window integrals also pick up the same-pulse tail beyond T/2, negligible only for
    # long T and fast decay (dephasing feeds the slowly decaying dark state of the superradiant pair)
    h = hist(kind, 0.0, n_periods=3, T=30.0)
    assert h.window_integral(2 * h.T, h.T) == pytest.approx(h.window_integral(h.T, h.T), rel=1e-5)


def test_histogram_symmetric_and_covering():
    h = hist("selective", 2.0)
    assert np.array_equal(h.values, h.values[::-1])
    assert h.tau[0] == pytest.approx(-1.5 * h.T) and h.tau[-1] == pytest.approx(1.5 * h.T)
    assert np.all(h.values >= 0)
    assert h.samples()[0][0] == pytest.approx(-1.5 * h.T)


def test_config_validation():
    with pytest.raises(ValueError, match="5/gamma"):
        PulseTrainConfig(T=4.0)
    with pytest.raises(ValueError):
        PulseTrainConfig(tau_points=2000)
    with pytest.raises(ValueError):
        PulseTrainConfig(tau_points=401)
    with pytest.raises(ValueError):
        PulseTrainConfig(n_periods=1)
    assert PulseTrainConfig().t_grid_points == 1001


def test_pump_rejected():
    m = models.make_model(("superradiant", "pump"), RateSet(gamma_p=1.0))
    with pytest.raises(PhysicsError):
        pulsed.pulsed_histogram(m)


def test_short_period_warning():
    m = models.make_model("distinguishable")
    with pytest.warns(pulsed.ShortPeriodWarning):
        pulsed.pulsed_histogram(m, PulseTrainConfig(T=10.0))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        pulsed.pulsed_histogram(m, PulseTrainConfig(T=30.0))


def test_window_checks():
    h = hist("distinguishable")
    with pytest.raises(ValueError):
        pulsed.peak_measures(h, Window.PEAK_INTEGRAL, width=2 * h.T)
    with pytest.raises(ValueError):
        h.value_at(0.123456789)
    assert set(pulsed.figures_of_merit(h)) == set(Window)


def test_refinement_converged():
    m = models.make_model("superradiant", RateSet(gamma_d=10.0))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", pulsed.ShortPeriodWarning)
        a = pulsed.pulsed_histogram(m, PulseTrainConfig(refine=False))
        b = pulsed.pulsed_histogram(m, PulseTrainConfig(tau_points=4001, refine=False))
    for w in Window:
        assert pulsed.gbar(a, w) == pytest.approx(pulsed.gbar(b, w), rel=1e-3)
