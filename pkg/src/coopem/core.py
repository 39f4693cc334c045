"""Dense Lindblad machinery for small emitter systems.

States, operators and superoperators are plain complex ``numpy`` arrays.
Superoperators act on column-stacked density matrices::

    vec(rho) = rho.reshape(-1, order="F")
    vec(A @ X @ B) = kron(B.T, A) @ vec(X)

Every builder in the package goes through :func:`vec` / :func:`unvec`, so the
convention lives here only. Rates and times are in units of the single-emitter
decay rate unless a :class:`RateSet` says otherwise.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import NonUniqueStationaryStateError, PhysicsError

HERMITIAN_ATOL = 1e-12


@dataclass(frozen=True)
class RateSet:
    """Model rates. ``gamma_S`` defaults to the ideal collective value ``2*gamma``."""

    gamma: float = 1.0
    gamma_p: float = 0.0
    gamma_d: float = 0.0
    gamma_S: float = None
    Omega: float = 0.0
    I0: float = 1.0

    def __post_init__(self):
        if self.gamma_S is None:
            object.__setattr__(self, "gamma_S", 2.0 * self.gamma)
        for name in ("gamma", "gamma_p", "gamma_d", "gamma_S", "Omega", "I0"):
            value = getattr(self, name)
            if not np.isfinite(value) or value < 0:
                raise ValueError(f"{name} must be a finite non-negative number, got {value!r}")
        if self.gamma <= 0:
            raise ValueError("gamma must be strictly positive")

    def as_dict(self):
        return {
            "gamma": self.gamma,
            "gamma_p": self.gamma_p,
            "gamma_d": self.gamma_d,
            "gamma_S": self.gamma_S,
            "Omega": self.Omega,
            "I0": self.I0,
        }


def vec(rho):
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v, dim=None):
    v = np.asarray(v)
    if dim is None:
        dim = int(round(np.sqrt(v.size)))
    return v.reshape(dim, dim, order="F")


def is_hermitian(A, atol=HERMITIAN_ATOL):
    A = np.asarray(A)
    return A.ndim == 2 and A.shape[0] == A.shape[1] and np.allclose(A, A.conj().T, rtol=0, atol=atol)


def _check_same_dim(*mats):
    shapes = {np.shape(m) for m in mats}
    if len(shapes) != 1:
        raise ValueError(f"dimension mismatch between operators: {sorted(shapes)}")
    (shape,) = shapes
    if len(shape) != 2 or shape[0] != shape[1]:
        raise ValueError(f"expected square matrices, got shape {shape}")


def dissipator(L, rho):
    """Lindblad dissipator ``L rho L^+ - (L^+ L rho + rho L^+ L)/2``."""
    L = np.asarray(L, dtype=complex)
    rho = np.asarray(rho, dtype=complex)
    _check_same_dim(L, rho)
    LdL = L.conj().T @ L
    return L @ rho @ L.conj().T - 0.5 * (LdL @ rho + rho @ LdL)


def dissipator_superop(L):
    L = np.asarray(L, dtype=complex)
    eye = np.eye(L.shape[0])
    LdL = L.conj().T @ L
    return np.kron(L.conj(), L) - 0.5 * np.kron(eye, LdL) - 0.5 * np.kron(LdL.T, eye)


def commutator_superop(H):
    """Superoperator of ``-i[H, rho]``."""
    H = np.asarray(H, dtype=complex)
    eye = np.eye(H.shape[0])
    return -1j * (np.kron(eye, H) - np.kron(H.T, eye))


def build_liouvillian(H, jumps):
    """Liouvillian of ``d rho/dt = -i[H, rho] + sum_j rate_j D[L_j](rho)``.

    ``jumps`` is an iterable of ``(rate, L)`` pairs. ``H`` may be ``None`` when
    there is no coherent part, in which case the dimension is taken from the
    first jump operator.
    """
    jumps = [(float(rate), np.asarray(op, dtype=complex)) for rate, op in jumps]
    if H is None:
        if not jumps:
            raise ValueError("need a Hamiltonian or at least one jump operator")
        H = np.zeros_like(jumps[0][1])
    H = np.asarray(H, dtype=complex)
    _check_same_dim(H, *[op for _, op in jumps])
    if not is_hermitian(H):
        raise ValueError("Hamiltonian is not Hermitian")
    liou = commutator_superop(H)
    for rate, op in jumps:
        if not np.isfinite(rate) or rate < 0:
            raise ValueError(f"jump rates must be non-negative, got {rate!r}")
        if rate:
            liou = liou + rate * dissipator_superop(op)
    return liou


def apply_superop(S, rho):
    rho = np.asarray(rho, dtype=complex)
    return unvec(S @ vec(rho), rho.shape[0])


def propagator(liouvillian, t):
    if t < 0:
        raise ValueError(f"propagation time must be non-negative, got {t!r}")
    return expm(np.asarray(liouvillian) * t)


def propagate(liouvillian, rho0, t):
    """``exp(L t) rho0`` by dense matrix exponential."""
    rho0 = np.asarray(rho0, dtype=complex)
    return unvec(propagator(liouvillian, t) @ vec(rho0), rho0.shape[0])


def propagate_many(liouvillian, rho0, times):
    """Stack of ``exp(L t) rho0`` for every ``t`` in ``times``."""
    rho0 = np.asarray(rho0, dtype=complex)
    v0 = vec(rho0)
    dim = rho0.shape[0]
    return np.array([unvec(propagator(liouvillian, t) @ v0, dim) for t in times])


def relaxation_rates(liouvillian, atol=1e-9):
    """Non-zero decay rates ``-Re(lambda)`` of the Liouvillian spectrum, ascending."""
    ev = np.linalg.eigvals(liouvillian)
    rates = -ev.real[np.abs(ev) > atol]
    return np.sort(rates[rates > atol])


def stationary_state(liouvillian, cross_check=False, rtol=1e-10):
    """Unique trace-one null vector of the Liouvillian.

    The null space is read off the singular value decomposition; more than one
    (numerically) vanishing singular value raises
    :class:`NonUniqueStationaryStateError`. With ``cross_check`` the result is
    compared against propagation of the maximally mixed state up to
    ``t = 50 / (slowest non-zero rate)``.
    """
    liouvillian = np.asarray(liouvillian, dtype=complex)
    _, s, vh = np.linalg.svd(liouvillian)
    scale = max(1.0, s[0])
    null_dim = int(np.sum(s < rtol * scale))
    if null_dim > 1:
        raise NonUniqueStationaryStateError(
            f"stationary state is not unique (null space dimension {null_dim})"
        )
    if null_dim == 0 and s[-1] > 1e-7 * scale:
        raise PhysicsError("Liouvillian has no stationary state (smallest singular value "
                           f"{s[-1]:.3e})")
    rho = unvec(vh[-1].conj())
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise PhysicsError("null vector of the Liouvillian is traceless")
    rho = rho / tr
    rho = 0.5 * (rho + rho.conj().T)
    if cross_check:
        dim = rho.shape[0]
        rates = relaxation_rates(liouvillian)
        t_long = 50.0 / rates[0] if rates.size else 50.0
        rho_long = propagate(liouvillian, np.eye(dim) / dim, t_long)
        if not np.allclose(rho_long, rho, atol=1e-8, rtol=0):
            raise PhysicsError(
                "null-vector stationary state disagrees with long-time propagation "
                f"(max deviation {np.max(np.abs(rho_long - rho)):.3e})"
            )
    return rho


def expectation(rho, A):
    """``Tr[A rho]``."""
    rho = np.asarray(rho)
    A = np.asarray(A)
    _check_same_dim(rho, A)
    return complex(np.einsum("ij,ji->", A, rho))


def check_physical(rho, trace_atol=1e-10, herm_atol=HERMITIAN_ATOL, eig_atol=1e-9):
    """Raise ``ValueError`` unless ``rho`` is a Hermitian, unit-trace, PSD matrix."""
    rho = np.asarray(rho, dtype=complex)
    if not is_hermitian(rho, herm_atol):
        raise ValueError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > trace_atol:
        raise ValueError(f"density matrix trace is {np.trace(rho).real:.12g}, expected 1")
    if np.linalg.eigvalsh(rho).min() < -eig_atol:
        raise ValueError("density matrix has negative eigenvalues")
    return rho
