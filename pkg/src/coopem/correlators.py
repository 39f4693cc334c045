"""Intensities and photon coincidences via the quantum regression theorem."""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import core
from .errors import ZeroIntensityError
from .models import EG, GE

DEFAULT_TAU_GRID = np.linspace(0.0, 6.0, 600)
INTENSITY_FLOOR = 1e-14


class Axis(str, Enum):
    TIME = "time"
    DELAY = "delay"
    PHASE = "phase"
    DISTANCE = "distance"


@dataclass(frozen=True)
class Trace:
    """Ordered samples of one quantity against time, delay, phase or ``kr``."""

    axis: Axis
    x: np.ndarray
    y: np.ndarray
    quantity: str
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        y = np.asarray(self.y)
        if x.ndim != 1 or y.shape != x.shape:
            raise ValueError("trace abscissa and values must be 1-d arrays of equal length")
        if x.size > 1 and np.any(np.diff(x) <= 0):
            raise ValueError("trace abscissae must be strictly increasing")
        if not np.all(np.isfinite(y)):
            raise ValueError("trace values must be finite")
        if self.quantity == "g2" and np.any(y < -1e-9):
            raise ValueError("normalized coincidences must be non-negative")
        object.__setattr__(self, "axis", Axis(self.axis))
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)

    def __len__(self):
        return self.x.size

    def samples(self):
        return list(zip(self.x.tolist(), self.y.tolist()))


def _observable(model):
    return sum(M.conj().T @ M for M in model.detection_ops)


def intensity(model, rho):
    """Detected intensity ``I0 * sum_a Tr[M_a^+ M_a rho]``."""
    return model.I0 * core.expectation(rho, _observable(model)).real


def qrt_collapse(rho, M):
    """Unnormalized post-detection state ``M rho M^+`` and its weight.

    The returned pseudo density matrix is not trace-normalized; its trace is
    the weight.
    """
    rho = np.asarray(rho, dtype=complex)
    M = np.asarray(M, dtype=complex)
    pseudo = M @ rho @ M.conj().T
    return float(np.trace(pseudo).real), pseudo


def collapse(model, rho):
    """Sum of pseudo states over the model's detection channels.

    For the selective scenario the single-excitation coherence of the result is
    scaled by the detector visibility ``|xi|^2``.
    """
    pseudo = sum(qrt_collapse(rho, M)[1] for M in model.detection_ops)
    if model.xi2 != 1.0:
        pseudo = pseudo.copy()
        pseudo[EG, GE] *= model.xi2
        pseudo[GE, EG] *= model.xi2
    return pseudo


def coincidences(model, rho, tau_grid):
    """Unnormalized ``G2(t, tau)`` for the state ``rho`` at the first detection."""
    pseudo = collapse(model, rho)
    obs = _observable(model)
    evolved = core.propagate_many(model.liouvillian, pseudo, tau_grid)
    return model.I0**2 * np.einsum("ij,tji->t", obs, evolved).real


def g2_zero(model, rho):
    """Normalized zero-delay coincidences ``G2(t,0)/I(t)^2``."""
    inten = intensity(model, rho)
    if inten <= INTENSITY_FLOOR:
        raise ZeroIntensityError("zero-delay coincidences are undefined at zero intensity")
    pseudo = collapse(model, rho)
    g0 = model.I0**2 * core.expectation(pseudo, _observable(model)).real
    return g0 / inten**2


def _meta(model, **extra):
    meta = {
        "scenario": model.kind.value,
        "drive": model.scenario.drive.value,
        **model.rates.as_dict(),
    }
    if model.xi2 != 1.0:
        meta["xi2"] = model.xi2
    meta.update(extra)
    return meta


def stationary(model):
    return core.stationary_state(model.liouvillian)


def g2_tau(model, tau_grid=None):
    """Stationary ``g2(inf, tau)`` normalized by the squared stationary intensity."""
    tau_grid = DEFAULT_TAU_GRID if tau_grid is None else np.asarray(tau_grid, dtype=float)
    rho_ss = stationary(model)
    inten = intensity(model, rho_ss)
    if inten <= INTENSITY_FLOOR:
        raise ZeroIntensityError("stationary intensity vanishes; g2 is undefined")
    G2 = coincidences(model, rho_ss, tau_grid)
    return Trace(Axis.DELAY, tau_grid, G2 / inten**2, "g2",
                 _meta(model, stationary_intensity=inten))


def g2_tau_from_state(model, rho0, t, tau_grid):
    """Unnormalized ``G2(t, tau)`` after evolving ``rho0`` for time ``t``."""
    if t < 0:
        raise ValueError("first-photon time must be non-negative")
    tau_grid = np.asarray(tau_grid, dtype=float)
    rho_t = core.propagate(model.liouvillian, rho0, t)
    return Trace(Axis.DELAY, tau_grid, coincidences(model, rho_t, tau_grid), "G2",
                 _meta(model, t=float(t)))


def intensity_trace(model, rho0, t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    states = core.propagate_many(model.liouvillian, rho0, t_grid)
    obs = _observable(model)
    values = model.I0 * np.einsum("ij,tji->t", obs, states).real
    return Trace(Axis.TIME, t_grid, values, "intensity", _meta(model))


def coincidence_lattice(model, rho0, step, n_t, n_tau):
    """``G2(t_j, tau_k)`` and ``I(t_j)`` on the lattice ``t_j = j*step``, ``tau_k = k*step``.

    Returns ``(G2, I)`` with ``G2`` of shape ``(n_t, n_tau)``. Both axes use the
    same exact step propagator, so grids stay commensurate for integration.
    """
    liou = model.liouvillian
    U = core.propagator(liou, step)
    n_states = max(n_t, 1)
    states = np.empty((n_states, liou.shape[0]), dtype=complex)
    v = core.vec(rho0)
    for j in range(n_states):
        states[j] = v
        v = U @ v
    obs_row = core.vec(_observable(model).T)
    inten = model.I0 * (states @ obs_row).real

    # collapse superoperator sum_a conj(M_a) (x) M_a, with the visibility factor
    C = sum(np.kron(M.conj(), M) for M in model.detection_ops)
    if model.xi2 != 1.0:
        dim = model.dim
        scale = np.ones(dim * dim)
        scale[EG + dim * GE] = model.xi2
        scale[GE + dim * EG] = model.xi2
        C = scale[:, None] * C
    pseudo = states @ C.T  # rows: vec of collapsed state at t_j

    rows = np.empty((n_tau, liou.shape[0]), dtype=complex)
    r = obs_row.copy()
    for k in range(n_tau):
        rows[k] = r
        r = r @ U
    G2 = model.I0**2 * (pseudo @ rows.T).real
    return G2, inten
