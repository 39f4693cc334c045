"""Scenario models: operators, jump structure and canonical states.

Two-emitter basis ordering is fixed as ``(|e1 e2>, |e1 g2>, |g1 e2>, |g1 g2>)``
(indices ``EE, EG, GE, GG``); the single emitter uses ``(|e>, |g>)``. Emitter
frequencies are removed by working in the resonant rotating frame.

For the selective-measurement scenario the detector phase is fixed by
``exp(i k0.r) = 1``, so the detected channel is the symmetric Dicke channel.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from . import core
from .core import RateSet

EE, EG, GE, GG = range(4)

SIGMA_MINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |g><e| in (e, g)
_I2 = np.eye(2, dtype=complex)

sm1 = np.kron(SIGMA_MINUS, _I2)
sm2 = np.kron(_I2, SIGMA_MINUS)
sp1 = sm1.conj().T
sp2 = sm2.conj().T
sigma_S = (sm1 + sm2) / np.sqrt(2)
sigma_A = (sm1 - sm2) / np.sqrt(2)

for _op in (sm1, sm2, sp1, sp2, sigma_S, sigma_A):
    _op.setflags(write=False)


def ket(index, dim=4):
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return v


psi_S = (ket(EG) + ket(GE)) / np.sqrt(2)
psi_A = (ket(EG) - ket(GE)) / np.sqrt(2)


def projector(v):
    v = np.asarray(v, dtype=complex)
    return np.outer(v, v.conj())


class Kind(str, Enum):
    SINGLE = "single"
    DISTINGUISHABLE = "distinguishable"
    SUPERRADIANT = "superradiant"
    SELECTIVE = "selective"


class Drive(str, Enum):
    NONE = "none"
    PUMP = "pump"
    SYM = "sym"
    ANTISYM = "antisym"


@dataclass(frozen=True)
class Scenario:
    kind: Kind
    drive: Drive = Drive.NONE

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind(self.kind))
        object.__setattr__(self, "drive", Drive(self.drive))
        if self.kind is Kind.SINGLE and self.drive not in (Drive.NONE, Drive.PUMP):
            raise ValueError("a single emitter supports only no drive or incoherent pumping")
        if self.kind is Kind.DISTINGUISHABLE and self.drive in (Drive.SYM, Drive.ANTISYM):
            raise ValueError("coherent driving is only modelled for superradiant or selective emitters")

    @property
    def dim(self):
        return 2 if self.kind is Kind.SINGLE else 4


@dataclass(frozen=True)
class ScenarioModel:
    """Everything needed to evolve a scenario and read out photon signals.

    ``detection_ops`` already carry the collective ``sqrt(2)``: intensities are
    ``I0 * sum_a <M_a^+ M_a>`` for every scenario. ``xi2`` is the detector
    visibility ``|xi|^2`` applied to the collapsed state (selective only).
    """

    scenario: Scenario
    rates: RateSet
    liouvillian: np.ndarray
    hamiltonian: np.ndarray
    jumps: tuple
    detection_ops: tuple
    initial_state: np.ndarray
    xi2: float = 1.0
    meta: dict = field(default_factory=dict)

    @property
    def dim(self):
        return self.scenario.dim

    @property
    def I0(self):
        return self.rates.I0

    @property
    def kind(self):
        return self.scenario.kind

    @property
    def is_collective(self):
        return self.kind in (Kind.SUPERRADIANT, Kind.SELECTIVE)

    def number_operator(self):
        """Total excitation number ``sum_i sigma_i^+ sigma_i^-``."""
        if self.dim == 2:
            return SIGMA_MINUS.conj().T @ SIGMA_MINUS
        return sp1 @ sm1 + sp2 @ sm2


def drive_hamiltonian(mode, Omega):
    """``(Omega/2)[(s1^+ + s1^-) +/- (s2^+ + s2^-)]`` for sym/antisym driving."""
    mode = Drive(mode)
    if mode not in (Drive.SYM, Drive.ANTISYM):
        raise ValueError(f"drive mode must be sym or antisym, got {mode.value!r}")
    if Omega < 0:
        raise ValueError("Rabi frequency must be non-negative")
    sign = 1.0 if mode is Drive.SYM else -1.0
    return 0.5 * Omega * ((sp1 + sm1) + sign * (sp2 + sm2))


def sigma_k(phase):
    """Lowering operator of the wave-vector channel with ``phase = k.r``."""
    return (np.exp(0.5j * phase) * sm1 + np.exp(-0.5j * phase) * sm2) / np.sqrt(2)


def psi_k(phase):
    """Intermediate state ``sigma_k |e1 e2>`` of the channel with ``phase = k.r``."""
    return (np.exp(-0.5j * phase) * ket(EG) + np.exp(0.5j * phase) * ket(GE)) / np.sqrt(2)


def excited_state(dim=4):
    return projector(ket(0, dim))


def ground_state(dim=4):
    return projector(ket(dim - 1, dim))


def product_state(n1, n2=None):
    """Uncorrelated two-emitter state with excited populations ``n1``, ``n2``."""
    if n2 is None:
        n2 = n1
    for n in (n1, n2):
        if not 0.0 <= n <= 1.0:
            raise ValueError(f"populations must lie in [0, 1], got {n!r}")
    r1 = np.diag([n1, 1 - n1]).astype(complex)
    r2 = np.diag([n2, 1 - n2]).astype(complex)
    return np.kron(r1, r2)


def _jumps_for(scenario, rates):
    g, gp, gd = rates.gamma, rates.gamma_p, rates.gamma_d
    pump = gp if scenario.drive is Drive.PUMP else 0.0
    if scenario.kind is Kind.SINGLE:
        sm = SIGMA_MINUS
        return [
            (pump, sm.conj().T),
            (g, sm),
            (gd, sm.conj().T @ sm),
        ]
    jumps = [
        (pump, sp1),
        (pump, sp2),
        (gd, sp1 @ sm1),
        (gd, sp2 @ sm2),
    ]
    if scenario.kind is Kind.SUPERRADIANT:
        jumps.append((rates.gamma_S, sigma_S))
    else:
        jumps += [(g, sm1), (g, sm2)]
    return jumps


def make_model(scenario, rates=None, xi2=1.0, initial_state=None):
    """Assemble the Liouvillian, detection operators and initial state."""
    if not isinstance(scenario, Scenario):
        scenario = Scenario(*scenario) if isinstance(scenario, tuple) else Scenario(scenario)
    rates = rates if rates is not None else RateSet()
    drive = scenario.drive
    if drive is not Drive.PUMP and rates.gamma_p > 0:
        raise ValueError(f"gamma_p > 0 requires incoherent pumping, drive is {drive.value!r}")
    if drive in (Drive.NONE, Drive.PUMP) and rates.Omega > 0:
        raise ValueError("Omega > 0 requires a coherent drive (sym or antisym)")
    if not 0.0 <= xi2 <= 1.0:
        raise ValueError(f"|xi|^2 must lie in [0, 1], got {xi2!r}")
    if xi2 != 1.0 and scenario.kind is not Kind.SELECTIVE:
        raise ValueError("a detector visibility |xi|^2 < 1 applies to the selective scenario only")

    dim = scenario.dim
    if drive in (Drive.SYM, Drive.ANTISYM):
        H = drive_hamiltonian(drive, rates.Omega)
    else:
        H = np.zeros((dim, dim), dtype=complex)
    jumps = tuple((rate, op) for rate, op in _jumps_for(scenario, rates) if rate > 0)
    liou = core.build_liouvillian(H, jumps)

    if scenario.kind is Kind.SINGLE:
        det = (SIGMA_MINUS,)
    elif scenario.kind is Kind.DISTINGUISHABLE:
        det = (sm1, sm2)
    else:
        det = (np.sqrt(2) * sigma_S,)

    if initial_state is None:
        initial_state = excited_state(dim)
    initial_state = np.asarray(initial_state, dtype=complex)
    if initial_state.shape != (dim, dim):
        raise ValueError(f"initial state must be {dim}x{dim}")
    return ScenarioModel(
        scenario=scenario,
        rates=rates,
        liouvillian=liou,
        hamiltonian=H,
        jumps=jumps,
        detection_ops=det,
        initial_state=initial_state,
        xi2=float(xi2),
    )


@dataclass(frozen=True)
class ReducedState:
    """Exchange-symmetric two-emitter state with ``exp(i k0.r) = 1``."""

    n_ee: float
    n_eg: float
    c: float

    def as_array(self):
        return np.array([self.n_ee, self.n_eg, self.c])


def reduce_state(rho, atol=1e-9):
    """Extract ``(n_ee, n_eg, c)`` from an exchange-symmetric state."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise ValueError("reduce_state needs a two-emitter (4x4) state")
    n_eg, n_ge = rho[EG, EG].real, rho[GE, GE].real
    if abs(n_eg - n_ge) > atol:
        raise ValueError(f"state is not exchange symmetric: n_eg={n_eg:.3e}, n_ge={n_ge:.3e}")
    c = rho[EG, GE]
    if abs(c.imag) > atol:
        raise ValueError(f"inter-emitter coherence has an imaginary part {c.imag:.3e}; "
                         "the phase convention exp(i k0.r)=1 requires it to be real")
    return ReducedState(rho[EE, EE].real, 0.5 * (n_eg + n_ge), c.real)


def embed_state(reduced):
    """Inverse of :func:`reduce_state` on the symmetric sector."""
    n_ee, n_eg, c = (reduced.n_ee, reduced.n_eg, reduced.c) if isinstance(reduced, ReducedState) else reduced
    rho = np.zeros((4, 4), dtype=complex)
    rho[EE, EE] = n_ee
    rho[EG, EG] = rho[GE, GE] = n_eg
    rho[EG, GE] = rho[GE, EG] = c
    rho[GG, GG] = 1.0 - n_ee - 2.0 * n_eg
    return rho


def reduced_generator(rates):
    """Matrix ``A`` and inhomogeneity ``b`` of the selective-model equations
    ``d/dt (n_ee, n_eg, c) = A (n_ee, n_eg, c) + b`` under incoherent pumping."""
    g, gp, gd = rates.gamma, rates.gamma_p, rates.gamma_d
    A = np.array([
        [-2 * g, 2 * gp, 0.0],
        [g - gp, -g - 3 * gp, 0.0],
        [0.0, 0.0, -g - gp - gd],
    ])
    b = np.array([0.0, gp, 0.0])
    return A, b
