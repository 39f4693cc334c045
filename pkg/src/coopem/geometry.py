"""Wave-vector dependent quantities.

Collective decay rates versus emitter separation, the detector visibility
``xi`` of a finite aperture, and angle-resolved zero-delay coincidences.
Distances enter only through the dimensionless ``kr``; vectors ``r`` are in
units of ``1/k``.
"""

from dataclasses import dataclass

import numpy as np

from . import core
from .correlators import Axis, Trace
from .errors import QuadratureError, ZeroIntensityError
from .models import EE, GG, sigma_A, sigma_k, sigma_S, sm1, sm2

MAGIC_COS2 = 1.0 / 3.0
_SERIES_KR = 1e-4
# cos(x)/x^2 - sin(x)/x^3 cancels catastrophically long before 1e-4
_TAIL_SERIES_KR = 0.1


@dataclass(frozen=True)
class EmitterGeometry:
    kr: float
    dipole_tilt_cos2: float = MAGIC_COS2

    def __post_init__(self):
        if self.kr < 0:
            raise ValueError("kr must be non-negative")
        if not 0.0 <= self.dipole_tilt_cos2 <= 1.0:
            raise ValueError("dipole_tilt_cos2 must lie in [0, 1]")


@dataclass(frozen=True)
class DetectorGeometry:
    k0_direction: tuple = (0.0, 0.0, 1.0)
    aperture_half_angle: float = 0.0
    quadrature_order: int = 16

    def __post_init__(self):
        k0 = np.asarray(self.k0_direction, dtype=float)
        norm = np.linalg.norm(k0)
        if k0.shape != (3,) or norm == 0:
            raise ValueError("k0_direction must be a non-zero 3-vector")
        object.__setattr__(self, "k0_direction", tuple(k0 / norm))
        if not 0.0 <= self.aperture_half_angle < np.pi / 2:
            raise ValueError("aperture half angle must lie in [0, pi/2)")
        if self.quadrature_order < 8:
            raise ValueError("quadrature_order must be at least 8")


def _sinc(x):
    if x < _SERIES_KR:
        x2 = x * x
        return 1.0 - x2 / 6.0 + x2 * x2 / 120.0
    return np.sin(x) / x


def gamma_sup_scalar(g, gamma=1.0):
    """``2 gamma sin(kr)/kr`` for direction-independent coupling."""
    return 2.0 * gamma * _sinc(g.kr)


def gamma_sup_dipole(g, gamma=1.0):
    """Collective rate including the dipole radiation pattern."""
    x, a = g.kr, g.dipole_tilt_cos2
    sinc = _sinc(x)
    if x < _TAIL_SERIES_KR:
        x2 = x * x
        tail = -1.0 / 3.0 + x2 * (1.0 / 30.0 + x2 * (-1.0 / 840.0 + x2 * (1.0 / 45360.0 - x2 / 3991680.0)))
    else:
        tail = np.cos(x) / x**2 - np.sin(x) / x**3
    return 3.0 * gamma * ((1.0 - a) * sinc + (1.0 - 3.0 * a) * tail)


def gamma_ind(g, gamma=1.0, dipole=True):
    sup = gamma_sup_dipole(g, gamma) if dipole else gamma_sup_scalar(g, gamma)
    return gamma - 0.5 * sup


def gamma1_eff(g, gamma=1.0):
    """First-photon rate from ``|e1 e2>``; independent of the separation."""
    return 2.0 * gamma


def gamma2_eff(g, gamma=1.0):
    """Second-photon rate ``gamma [1 + (gamma_sup / 2 gamma)^2]``; at the magic
    angle this is ``gamma [1 + sinc(kr)^2]``."""
    overlap = gamma_sup_dipole(g, gamma) / (2.0 * gamma)
    return gamma * (1.0 + overlap * overlap)


def effective_liouvillian(g, gamma=1.0):
    """Free decay ``gamma_sup D[sigma_S] + gamma_ind (D[sigma_1] + D[sigma_2])``.

    ``gamma_sup`` turns negative beyond ``kr = pi``, so the generator is built in
    its diagonal form with the non-negative rates ``gamma + gamma_sup/2`` on
    ``sigma_S`` and ``gamma - gamma_sup/2`` on ``sigma_A``.
    """
    sup = gamma_sup_dipole(g, gamma)
    return core.build_liouvillian(None, [(gamma + 0.5 * sup, sigma_S), (gamma - 0.5 * sup, sigma_A)])


# -- discretized k-sphere ---------------------------------------------------

def sphere_directions(n_theta, n_phi):
    """Product grid on the unit sphere: Gauss-Legendre in ``cos(theta)``,
    uniform in ``phi``. Returns unit vectors and weights summing to one."""
    u, wu = np.polynomial.legendre.leggauss(n_theta)
    phi = 2.0 * np.pi * (np.arange(n_phi) + 0.5) / n_phi
    s = np.sqrt(1.0 - u * u)
    dirs = np.stack([
        np.outer(s, np.cos(phi)),
        np.outer(s, np.sin(phi)),
        np.outer(u, np.ones_like(phi)),
    ], axis=-1).reshape(-1, 3)
    weights = np.outer(wu / 2.0, np.full(n_phi, 1.0 / n_phi)).ravel()
    return dirs, weights


def magic_angle_dipole():
    """Dipole direction at the magic angle to ``r = z``."""
    cos_m = np.sqrt(MAGIC_COS2)
    return np.array([np.sqrt(1.0 - MAGIC_COS2), 0.0, cos_m])


def channel_rates(kr, n_theta=100, n_phi=200, dipole=None, gamma=1.0):
    """Per-direction rates ``gamma_k`` (summing to ``2 gamma``) and phases ``k.r``
    with ``r = kr * z``. ``dipole=None`` means direction-independent coupling;
    otherwise the weight is ``1 - (d.k)^2`` summed over both polarizations."""
    dirs, w = sphere_directions(n_theta, n_phi)
    if dipole is not None:
        d = np.asarray(dipole, dtype=float)
        d = d / np.linalg.norm(d)
        w = w * (1.0 - (dirs @ d) ** 2)
    rates = 2.0 * gamma * w / w.sum()
    phases = kr * dirs[:, 2]
    return rates, phases


def channel_sum_liouvillian(kr, n_theta=100, n_phi=200, dipole=None, gamma=1.0):
    """``sum_k gamma_k D[sigma_k]`` over a discretized sphere of directions."""
    rates, phases = channel_rates(kr, n_theta, n_phi, dipole, gamma)
    ops = (np.exp(0.5j * phases)[:, None, None] * sm1 + np.exp(-0.5j * phases)[:, None, None] * sm2) / np.sqrt(2)
    eye = np.eye(4)
    LdL = np.einsum("kji,kjl->kil", ops.conj(), ops)
    jump = np.einsum("k,kab,kcd->acbd", rates, ops.conj(), ops).reshape(16, 16)
    decay = np.einsum("k,kij->ij", rates, LdL)
    return jump - 0.5 * np.kron(eye, decay) - 0.5 * np.kron(decay.T, eye)


def intermediate_state(liouvillian):
    """Normalized gain term of the free-decay generator applied to ``|e1 e2>``,
    and its trace (the first-photon rate)."""
    rho = np.zeros((4, 4), dtype=complex)
    rho[EE, EE] = 1.0
    drho = core.apply_superop(liouvillian, rho)
    gain = drho.copy()
    gain[EE, EE] = 0.0
    gain[GG, GG] = 0.0
    rate = np.trace(gain).real
    return gain / rate, rate


# -- detector visibility ----------------------------------------------------

def _cap_frame(k0):
    k0 = np.asarray(k0, dtype=float)
    trial = np.array([1.0, 0.0, 0.0]) if abs(k0[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = np.cross(k0, trial)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(k0, e1)
    return e1, e2


def _xi_quadrature(k0, half_angle, r, order):
    e1, e2 = _cap_frame(k0)
    r_par = r @ k0
    r1, r2 = r @ e1, r @ e2
    # u = cos(theta) on [cos(alpha), 1]; phi on [0, 2 pi)
    x, w = np.polynomial.legendre.leggauss(order)
    a = np.cos(half_angle)
    u = 0.5 * (1 - a) * x + 0.5 * (1 + a)
    wu = w / 2.0
    xp, wp = np.polynomial.legendre.leggauss(2 * order)
    phi = np.pi * (xp + 1.0)
    wphi = wp / 2.0
    s = np.sqrt(np.clip(1.0 - u * u, 0.0, None))
    phase = (u * r_par)[:, None] + s[:, None] * (np.cos(phi) * r1 + np.sin(phi) * r2)[None, :]
    return complex(np.einsum("i,j,ij->", wu, wphi, np.exp(-1j * phase)))


def xi_factor(d, r_vector, max_order=1024, tol=1e-8):
    """Aperture average of ``exp(-i k.r)`` over the spherical cap of detected
    directions (``|k| = 1``); ``|xi|^2`` is the visibility of measurement-induced
    correlations. The order is doubled until successive results agree to
    ``tol`` (relative to ``max(|xi|, 1)``)."""
    r = np.asarray(r_vector, dtype=float)
    if r.shape != (3,):
        raise ValueError("r_vector must be a 3-vector")
    k0 = np.asarray(d.k0_direction)
    if d.aperture_half_angle == 0.0 or not np.any(r):
        return complex(np.exp(-1j * (k0 @ r)))
    order = d.quadrature_order
    prev = _xi_quadrature(k0, d.aperture_half_angle, r, order)
    while order < max_order:
        order *= 2
        cur = _xi_quadrature(k0, d.aperture_half_angle, r, order)
        if abs(cur - prev) <= tol * max(abs(cur), 1.0):
            return cur
        prev = cur
    raise QuadratureError(
        f"xi quadrature not converged at order {order} (last change {abs(cur - prev):.2e})"
    )


def r_vector_at(kr, angle, d=None):
    """Separation vector of length ``kr`` at ``angle`` from the detector axis."""
    k0 = np.asarray((d or DetectorGeometry()).k0_direction)
    e1, _ = _cap_frame(k0)
    return kr * (np.cos(angle) * k0 + np.sin(angle) * e1)


def g2_average(xi):
    """Zero-delay coincidences of uncorrelated, equally excited emitters seen
    through an aperture of visibility ``|xi|^2``."""
    return 0.5 * (1.0 + abs(xi) ** 2)


# -- angle-resolved coincidences --------------------------------------------

def _channel_sum(rho, phases):
    ops = [sigma_k(p) for p in phases]
    inten = sum(core.expectation(rho, L.conj().T @ L).real for L in ops)
    G2 = 0.0
    for L1 in ops:
        for L2 in ops:
            A = L2 @ L1
            G2 += core.expectation(rho, A.conj().T @ A).real
    return G2, inten


def g2_angle_resolved(k1_phase, k2_phase, rho):
    """Zero-delay coincidences of two point detectors at phases ``k0^(i).r``,
    summing over both detection channels for each photon."""
    G2, inten = _channel_sum(rho, (k1_phase, k2_phase))
    if inten <= 1e-14:
        raise ZeroIntensityError("no intensity in the selected detection channels")
    return G2 / inten**2


def cross_coincidence(k1_phase, k2_phase, rho):
    """``<s1^+ s2^+ s2^- s1^-> / (<s1^+ s1^-><s2^+ s2^->)`` for first photon in
    channel 1 and second in channel 2."""
    L1, L2 = sigma_k(k1_phase), sigma_k(k2_phase)
    A = L2 @ L1
    n1 = core.expectation(rho, L1.conj().T @ L1).real
    n2 = core.expectation(rho, L2.conj().T @ L2).real
    if n1 <= 1e-14 or n2 <= 1e-14:
        raise ZeroIntensityError("no intensity in one of the detection channels")
    return core.expectation(rho, A.conj().T @ A).real / (n1 * n2)


def channel_intensity(phase, rho):
    L = sigma_k(phase)
    return core.expectation(rho, L.conj().T @ L).real


def radiation_pattern(rho, phase_grid, k1_phase=0.0, quantity="g2"):
    """Sweep the second detector phase with the first fixed.

    ``quantity`` is ``"g2"`` (angle-resolved coincidences), ``"cross"``
    (detector-1/detector-2 cross coincidences) or ``"intensity"``
    (``<sigma_k^+ sigma_k^->`` at the second detector).
    """
    phase_grid = np.asarray(phase_grid, dtype=float)
    if quantity == "g2":
        values = [g2_angle_resolved(k1_phase, p, rho) for p in phase_grid]
    elif quantity == "cross":
        values = [cross_coincidence(k1_phase, p, rho) for p in phase_grid]
    elif quantity == "intensity":
        values = [channel_intensity(p, rho) for p in phase_grid]
    else:
        raise ValueError(f"unknown pattern quantity {quantity!r}")
    return Trace(Axis.PHASE, phase_grid, np.array(values), quantity, {"k1_phase": float(k1_phase)})


def rate_scan(kr_grid, quantity="gamma2eff", gamma=1.0, dipole_tilt_cos2=MAGIC_COS2):
    funcs = {
        "gamma2eff": gamma2_eff,
        "gammasup": gamma_sup_dipole,
        "gammasup_scalar": gamma_sup_scalar,
        "gammaind": gamma_ind,
    }
    if quantity not in funcs:
        raise ValueError(f"unknown rate quantity {quantity!r}; choose from {sorted(funcs)}")
    kr_grid = np.asarray(kr_grid, dtype=float)
    values = [funcs[quantity](EmitterGeometry(kr, dipole_tilt_cos2), gamma) for kr in kr_grid]
    return Trace(Axis.DISTANCE, kr_grid, np.array(values), quantity,
                 {"gamma": gamma, "dipole_tilt_cos2": dipole_tilt_cos2})


def xi_scan(kr_grid, d, angle=np.pi / 2):
    kr_grid = np.asarray(kr_grid, dtype=float)
    xi2 = np.array([abs(xi_factor(d, r_vector_at(kr, angle, d))) ** 2 for kr in kr_grid])
    return Trace(Axis.DISTANCE, kr_grid, xi2, "xi2",
                 {"aperture_half_angle": d.aperture_half_angle, "r_angle": float(angle)})
