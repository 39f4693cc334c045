"""Closed-form reference results.

Nothing here touches the Lindblad machinery: every value is written down
directly from rate equations solved by hand, so agreement with the simulator
is an independent check. Times are in units of ``1/gamma`` only if ``gamma``
is left at 1.

Population oracles return tuples: ``PumpedPopulation`` gives ``n(t)``,
``SupPopulations`` gives ``(n_ee, n_S)`` and ``SelPopulations`` gives
``(n_ee, n_eg, c)``.
"""

import inspect
from enum import Enum

import numpy as np
from scipy import integrate, special


class OracleId(str, Enum):
    G2SingleTau = "G2SingleTau"
    G2DistTau = "G2DistTau"
    G2CoopTau = "G2CoopTau"
    CoherenceDecay = "CoherenceDecay"
    PumpedPopulation = "PumpedPopulation"
    SupPopulations = "SupPopulations"
    SupIntensity = "SupIntensity"
    SelPopulations = "SelPopulations"
    GbarSup = "GbarSup"
    GbarSel = "GbarSel"
    GammaSupScalar = "GammaSupScalar"
    GammaSupDipole = "GammaSupDipole"
    Gamma2Eff = "Gamma2Eff"
    G2AvXi = "G2AvXi"
    G2kkFactor = "G2kkFactor"


class OracleDomainError(ValueError):
    pass


_RATES = {"gamma", "gamma_p", "gamma_d", "gamma_S", "I0"}
_OCCUPATIONS = {"n0", "n_ee0", "n_S0", "n_eg0", "n_ee", "n_k1", "n_k2", "xi2", "cos2"}
_NONNEG = {"tau", "t", "kr", "aperture", *_RATES}


def _check(params):
    for key, value in params.items():
        if key in ("window", "part"):
            continue
        arr = np.asarray(value)
        if np.iscomplexobj(arr) or not np.all(np.isfinite(arr)):
            raise OracleDomainError(f"{key} must be finite and real, got {value!r}")
        if key in _NONNEG and np.any(arr < 0):
            raise OracleDomainError(f"{key} must be non-negative, got {value!r}")
        if key in _OCCUPATIONS and np.any((arr < 0) | (arr > 1)):
            raise OracleDomainError(f"{key} must lie in [0, 1], got {value!r}")
    if params.get("gamma", 1.0) == 0:
        raise OracleDomainError("gamma must be strictly positive")


# -- stationary coincidences ---------------------------------------------------

def g2_single_tau(tau, gamma=1.0, gamma_p=0.0):
    return 1.0 - np.exp(-(gamma + gamma_p) * np.asarray(tau))


def g2_dist_tau(tau, gamma=1.0, gamma_p=0.0):
    return 1.0 - 0.5 * np.exp(-(gamma + gamma_p) * np.asarray(tau))


def g2_coop_tau(tau, gamma=1.0, gamma_p=None, gamma_d=0.0, xi2=1.0):
    """Selective-detection coincidences; valid only at ``gamma_p = gamma``."""
    gamma_p = gamma if gamma_p is None else gamma_p
    if not np.isclose(gamma_p, gamma, rtol=1e-12, atol=0):
        raise OracleDomainError("the closed form holds only for gamma_p = gamma")
    tau = np.asarray(tau)
    return (1.0 - 0.5 * np.exp(-2 * gamma * tau)
            + 0.5 * xi2 * np.exp(-(gamma + gamma_p + gamma_d) * tau))


# -- populations -------------------------------------------------------------

def coherence_decay(t, c0=1.0, gamma=1.0, gamma_p=0.0, gamma_d=0.0):
    return c0 * np.exp(-(gamma + gamma_p + gamma_d) * np.asarray(t))


def pumped_population(t, n0=0.0, gamma=1.0, gamma_p=0.0):
    """Excited population of one pumped emitter."""
    n_inf = gamma_p / (gamma + gamma_p)
    return n_inf + (n0 - n_inf) * np.exp(-(gamma + gamma_p) * np.asarray(t))


def sup_populations(t, n_ee0=1.0, n_S0=0.0, gamma_S=2.0):
    t = np.asarray(t)
    e = np.exp(-gamma_S * t)
    return n_ee0 * e, (n_S0 + gamma_S * t * n_ee0) * e


def sup_intensity(t, n_ee0=1.0, n_S0=0.0, gamma_S=2.0, I0=1.0):
    t = np.asarray(t)
    return 2.0 * I0 * (n_ee0 + n_S0 + gamma_S * t * n_ee0) * np.exp(-gamma_S * t)


def sel_populations(t, n_ee0=1.0, n_eg0=0.0, c0=0.0, gamma=1.0, gamma_p=0.0, gamma_d=0.0):
    """``(n_ee, n_eg, c)`` in free decay (``gamma_p = 0``) or at ``gamma_p = gamma``."""
    t = np.asarray(t)
    c = c0 * np.exp(-(gamma + gamma_p + gamma_d) * t)
    if gamma_p == 0:
        e1, e2 = np.exp(-gamma * t), np.exp(-2 * gamma * t)
        return n_ee0 * e2, (n_eg0 + n_ee0) * e1 - n_ee0 * e2, c
    if np.isclose(gamma_p, gamma, rtol=1e-12, atol=0):
        e2, e4 = np.exp(-2 * gamma * t), np.exp(-4 * gamma * t)
        n_eg = 0.25 + (n_eg0 - 0.25) * e4
        n_ee = 0.25 + (n_ee0 + n_eg0 - 0.5) * e2 + (0.25 - n_eg0) * e4
        return n_ee, n_eg, c
    raise OracleDomainError("selective populations are tabulated for gamma_p = 0 or gamma_p = gamma")


# -- pulse-train ratios --------------------------------------------------------
# parts are the peak weights per 4 I0^2 (and per unit window width for "height")

def _window(window):
    w = str(getattr(window, "value", window)).lower()
    aliases = {"height": "height", "peakheight": "height", "integral": "integral",
               "peakintegral": "integral"}
    if w not in aliases:
        raise OracleDomainError(f"window must be PeakHeight or PeakIntegral, got {window!r}")
    return aliases[w]


def _ratio_or_part(G0, G1, part):
    if part == "G0":
        return G0
    if part == "G1":
        return G1
    if part != "ratio":
        raise OracleDomainError(f"part must be ratio, G0 or G1, got {part!r}")
    if G1 == 0:
        raise OracleDomainError("no emission from the given initial state")
    return G0 / G1


def gbar_sup(window="height", n_ee0=1.0, n_S0=0.0, gamma_S=2.0, part="ratio"):
    if n_ee0 + n_S0 > 1 + 1e-12:
        raise OracleDomainError("n_ee0 + n_S0 exceeds one")
    if _window(window) == "height":
        G0 = n_ee0 / gamma_S
        G1 = (2.5 * n_ee0**2 + 3 * n_ee0 * n_S0 + n_S0**2) / (2 * gamma_S)
    else:
        G0 = 2 * n_ee0 / gamma_S**2
        G1 = ((2 * n_ee0 + n_S0) / gamma_S) ** 2
    return _ratio_or_part(G0, G1, part)


def gbar_sel(window="height", n_ee0=1.0, n_eg0=0.0, c0=0.0, gamma=1.0, gamma_d=0.0, part="ratio"):
    if n_ee0 + 2 * n_eg0 > 1 + 1e-12 or abs(c0) > n_eg0 + 1e-12:
        raise OracleDomainError("initial occupations are not a valid state")
    a = n_eg0 + n_ee0
    if _window(window) == "height":
        G0 = n_ee0 / (2 * gamma)
        G1 = a**2 / (2 * gamma) + 2 * a * c0 / (2 * gamma + gamma_d) + c0**2 / (2 * gamma + 2 * gamma_d)
    else:
        G0 = n_ee0 / (2 * gamma) * (1 / gamma + 1 / (gamma + gamma_d))
        G1 = (a / gamma + c0 / (gamma + gamma_d)) ** 2
    return _ratio_or_part(G0, G1, part)


# -- geometry ----------------------------------------------------------------

def _j1_over_x(x):
    x = np.asarray(x, dtype=float)
    small = x < 1e-3
    xs = np.where(small, 1.0, x)
    x2 = x * x
    return np.where(small, 1 / 3 - x2 / 30 + x2 * x2 / 840, special.spherical_jn(1, xs) / xs)


def gamma_sup_scalar(kr, gamma=1.0):
    return 2.0 * gamma * special.spherical_jn(0, np.asarray(kr, dtype=float))


def gamma_sup_dipole(kr, gamma=1.0, cos2=1.0 / 3.0):
    """``cos2`` is the squared cosine between dipole and separation vector."""
    kr = np.asarray(kr, dtype=float)
    return 3.0 * gamma * ((1 - cos2) * special.spherical_jn(0, kr) - (1 - 3 * cos2) * _j1_over_x(kr))


def gamma2_eff(kr, gamma=1.0, cos2=1.0 / 3.0):
    s = gamma_sup_dipole(kr, gamma, cos2) / (2 * gamma)
    return gamma * (1 + s * s)


def xi_cap(kr, aperture, r_angle):
    """Visibility factor of a circular aperture (half angle ``aperture``) for
    emitters separated by ``kr`` at angle ``r_angle`` to the detector axis.

    The azimuthal integral is done analytically (Bessel ``J0``), leaving one
    adaptive quadrature in ``cos(theta)``.
    """
    if aperture == 0:
        return complex(np.exp(-1j * kr * np.cos(r_angle)))
    r_par, r_perp = kr * np.cos(r_angle), kr * np.sin(r_angle)
    lo = np.cos(aperture)

    def f(u, part):
        val = np.exp(-1j * u * r_par) * special.j0(r_perp * np.sqrt(max(1 - u * u, 0.0)))
        return val.real if part == 0 else val.imag

    opts = dict(epsabs=1e-13, epsrel=1e-12, limit=500)
    re = integrate.quad(f, lo, 1.0, args=(0,), **opts)[0]
    im = integrate.quad(f, lo, 1.0, args=(1,), **opts)[0]
    return complex(re, im) / (1 - lo)


def g2_av_xi(xi2=None, kr=None, aperture=None, r_angle=np.pi / 2):
    if xi2 is None:
        if kr is None or aperture is None:
            raise OracleDomainError("G2AvXi needs xi2, or kr and aperture")
        xi2 = abs(xi_cap(kr, aperture, r_angle)) ** 2
    return 0.5 * (1 + xi2)


def g2kk_factor(delta_phase=0.0, n_ee=0.25, n_k1=0.25, n_k2=None):
    """Zero-delay coincidences of two point detectors whose phases ``k.r``
    differ by ``delta_phase``."""
    n_k2 = n_k1 if n_k2 is None else n_k2
    den = (2 * n_ee + n_k1 + n_k2) ** 2
    if den == 0:
        raise OracleDomainError("no intensity in the detection channels")
    return (0.75 + 0.25 * np.cos(delta_phase)) * 4 * n_ee / den


_TABLE = {
    OracleId.G2SingleTau: g2_single_tau,
    OracleId.G2DistTau: g2_dist_tau,
    OracleId.G2CoopTau: g2_coop_tau,
    OracleId.CoherenceDecay: coherence_decay,
    OracleId.PumpedPopulation: pumped_population,
    OracleId.SupPopulations: sup_populations,
    OracleId.SupIntensity: sup_intensity,
    OracleId.SelPopulations: sel_populations,
    OracleId.GbarSup: gbar_sup,
    OracleId.GbarSel: gbar_sel,
    OracleId.GammaSupScalar: gamma_sup_scalar,
    OracleId.GammaSupDipole: gamma_sup_dipole,
    OracleId.Gamma2Eff: gamma2_eff,
    OracleId.G2AvXi: g2_av_xi,
    OracleId.G2kkFactor: g2kk_factor,
}


def parameters(oracle):
    """Names of the parameters accepted by ``oracle``."""
    return list(inspect.signature(_TABLE[OracleId(oracle)]).parameters)


def evaluate(oracle, **params):
    """Evaluate the closed form ``oracle`` with named parameters."""
    try:
        oid = OracleId(oracle)
    except ValueError:
        raise ValueError(f"unknown oracle {oracle!r}; choose from {[o.value for o in OracleId]}") from None
    func = _TABLE[oid]
    allowed = set(parameters(oid))
    unknown = set(params) - allowed
    if unknown:
        raise OracleDomainError(f"{oid.value} does not take {sorted(unknown)}; "
                                f"parameters are {sorted(allowed)}")
    _check(params)
    return func(**params)
