"""Brute-force engine on a truncated qubit x Fock space.

Nothing here uses the analytic results: the Hamiltonian
H = (Omega/omega) sz + a^dag a + lam sz (a + a^dag) (units of omega) is
diagonalized exactly and every observable is a trace over dense matrices.
Basis ordering is qubit-major: index = qubit * n_fock + m, with qubit 0
the sz = +1 state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from .errors import (
    DimensionMismatch,
    DimensionTooSmall,
    EigenFailure,
    TimeOrder,
    TruncationInsufficient,
    ValidationError,
)
from .model import (
    SIGN_PAIRS,
    CoherentSuperposition,
    Ground,
    ModelParams,
    OscillatorInit,
    QuasiResult,
    Squeezed,
    Thermal,
    validate,
)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)

MAX_N_FOCK = 640


@dataclass(frozen=True)
class FockConfig:
    n_fock: int = 40
    tol_truncation: float = 1e-8

    def __post_init__(self):
        if self.n_fock < 2:
            raise DimensionTooSmall(f"n_fock must be >= 2, got {self.n_fock}")


def annihilation(n: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(complex)


@dataclass
class FockRep:
    """Operators on the 2 * n_fock dimensional space, with a cached spectrum of H."""

    cfg: FockConfig
    params: ModelParams
    a: np.ndarray
    adag: np.ndarray
    q_tilde: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray
    H: np.ndarray
    _spectrum: tuple | None = field(default=None, repr=False)

    @property
    def n_fock(self) -> int:
        return self.cfg.n_fock

    @property
    def dim(self) -> int:
        return 2 * self.cfg.n_fock

    @property
    def spectrum(self):
        if self._spectrum is None:
            try:
                w, v = scipy.linalg.eigh(self.H)
            except (np.linalg.LinAlgError, ValueError) as exc:
                raise EigenFailure(str(exc)) from exc
            if not np.all(np.isfinite(w)):
                raise EigenFailure("non-finite eigenvalues")
            self._spectrum = (w, v)
        return self._spectrum

    def qubit_op(self, op2: np.ndarray) -> np.ndarray:
        return np.kron(op2, np.eye(self.n_fock))

    @cached_property
    def number(self) -> np.ndarray:
        return self.adag @ self.a


def build_space(cfg: FockConfig, params: ModelParams) -> FockRep:
    """Materialize operators and H for the given truncation."""
    p = validate(params)
    n = cfg.n_fock
    a = annihilation(n)
    adag = a.conj().T
    eye_f = np.eye(n)
    sz = np.kron(PAULI_Z, eye_f)
    x = a + adag
    H = p.big_omega_ratio * sz + np.kron(np.eye(2), adag @ a) + p.lam * np.kron(PAULI_Z, x)
    return FockRep(
        cfg=cfg,
        params=p,
        a=np.kron(np.eye(2), a),
        adag=np.kron(np.eye(2), adag),
        q_tilde=np.kron(np.eye(2), x / math.sqrt(2.0)),
        sx=np.kron(PAULI_X, eye_f),
        sy=np.kron(PAULI_Y, eye_f),
        sz=sz,
        H=H,
    )


def evolve_operator(rep: FockRep, tau: float) -> np.ndarray:
    """U(tau) = exp(-i H tau) from the eigendecomposition of H."""
    w, v = rep.spectrum
    return (v * np.exp(-1j * w * tau)) @ v.conj().T


# -- states ---------------------------------------------------------------------------


def _padded(n: int) -> int:
    return 2 * n + 40


def _truncate(vec_big: np.ndarray, n: int, tol: float, what: str) -> np.ndarray:
    vec = vec_big[:n]
    deficit = 1.0 - float(np.vdot(vec, vec).real)
    if deficit > tol:
        raise TruncationInsufficient(
            f"{what}: norm deficit {deficit:.3e} > {tol:.1e} at n_fock={n}"
        )
    return vec


def coherent_ket(n: int, xi: complex, tol: float = 1e-8) -> np.ndarray:
    """exp(xi a^dag - xi* a)|0>, exponentiated on an enlarged space then truncated."""
    big = _padded(n) + int(4 * abs(xi) ** 2)
    b = annihilation(big)
    gen = xi * b.conj().T - np.conj(xi) * b
    vec = scipy.linalg.expm(gen)[:, 0]
    return _truncate(vec, n, tol, f"coherent state xi={xi}")


def squeezed_ket(n: int, zeta: complex, tol: float = 1e-8) -> np.ndarray:
    """exp((zeta a^dag^2 - zeta* a^2)/2)|0> from its even-Fock series.

    Amplitudes c_2k = (e^{i theta} tanh r)^k sqrt((2k)!) / (2^k k! sqrt(cosh r)),
    built by a ratio recursion so large n_fock stays cheap.
    """
    r = abs(zeta)
    vec = np.zeros(n, dtype=complex)
    vec[0] = 1.0 / math.sqrt(math.cosh(r))
    ratio = np.exp(1j * np.angle(zeta)) * math.tanh(r) if r else 0.0
    for m in range(2, n, 2):
        vec[m] = vec[m - 2] * ratio * math.sqrt((m - 1) / m)
    return _truncate(vec, n, tol, f"squeezed state zeta={zeta}")


def thermal_populations(n: int, nbar: float, tol: float = 1e-8) -> np.ndarray:
    """Bose weights nbar^m / (1 + nbar)^(m+1) for m < n."""
    if nbar == 0:
        p = np.zeros(n)
        p[0] = 1.0
        return p
    m = np.arange(n)
    r = nbar / (1.0 + nbar)
    p = np.exp(m * math.log(r)) / (1.0 + nbar)
    deficit = r**n
    if deficit > tol:
        raise TruncationInsufficient(
            f"thermal state nbar={nbar}: population deficit {deficit:.3e} > {tol:.1e} at n_fock={n}"
        )
    return p


def initial_ket(rep: FockRep, init: OscillatorInit) -> np.ndarray | None:
    """|+> (x) oscillator ket, or None for the mixed thermal state."""
    n, tol = rep.n_fock, rep.cfg.tol_truncation
    if isinstance(init, Ground):
        osc = np.zeros(n, dtype=complex)
        osc[0] = 1.0
    elif isinstance(init, Thermal):
        if init.nbar == 0:
            return initial_ket(rep, Ground())
        return None
    elif isinstance(init, Squeezed):
        osc = squeezed_ket(n, init.zeta, tol)
    elif isinstance(init, CoherentSuperposition):
        raw = coherent_ket(n, complex(init.xi0), tol) + coherent_ket(n, complex(init.xi1), tol)
        osc = raw / np.linalg.norm(raw)
    else:
        raise ValidationError(f"unknown initial state {init!r}")
    return np.kron(PLUS, osc)


def build_initial(rep: FockRep, init: OscillatorInit) -> np.ndarray:
    """Density matrix |+><+| (x) rho_osc."""
    ket = initial_ket(rep, init)
    if ket is not None:
        return np.outer(ket, ket.conj())
    pops = thermal_populations(rep.n_fock, init.nbar, rep.cfg.tol_truncation)
    return np.kron(np.outer(PLUS, PLUS.conj()), np.diag(pops).astype(complex))


def initial_state(rep: FockRep, init: OscillatorInit) -> np.ndarray:
    """Ket for pure initial states, density matrix otherwise; both feed quasiprob_oracle."""
    ket = initial_ket(rep, init)
    return ket if ket is not None else build_initial(rep, init)


def default_n_fock(params: ModelParams, init: OscillatorInit) -> int:
    xi = 0.0
    if isinstance(init, CoherentSuperposition):
        xi = max(abs(init.xi0), abs(init.xi1))
    return max(40, math.ceil((xi + 4 * params.lam + 4) ** 2) + 10)


def auto_config(params: ModelParams, init: OscillatorInit, tol_truncation: float = 1e-8) -> FockConfig:
    """Smallest doubling of ``default_n_fock`` whose initial state fits the space.

    The state must lose less than tol_truncation / 100 of its norm so that the
    dynamics near the cutoff stay below the requested tolerance.
    """
    n = default_n_fock(params, init)
    margin = tol_truncation / 100
    while True:
        cfg = FockConfig(n, tol_truncation)
        try:
            if isinstance(init, Thermal):
                thermal_populations(n, init.nbar, margin)
            elif isinstance(init, Squeezed):
                squeezed_ket(n, init.zeta, margin)
            elif isinstance(init, CoherentSuperposition):
                coherent_ket(n, complex(init.xi0), margin)
                coherent_ket(n, complex(init.xi1), margin)
            return cfg
        except TruncationInsufficient:
            if n >= MAX_N_FOCK:
                raise
            n = min(2 * n, MAX_N_FOCK)


# -- observables ----------------------------------------------------------------------


def measurement_operator(rep: FockRep, sign: int, axis=None) -> np.ndarray:
    """M_sign = (1 + sign n.sigma)/2 acting as identity on the oscillator."""
    n = rep.params.n if axis is None else np.asarray(axis, dtype=float)
    ns = n[0] * PAULI_X + n[1] * PAULI_Y + n[2] * PAULI_Z
    return rep.qubit_op(0.5 * (np.eye(2) + sign * ns))


def heisenberg(rep: FockRep, op: np.ndarray, tau: float) -> np.ndarray:
    u = evolve_operator(rep, tau)
    return u.conj().T @ op @ u


def _tr(a: np.ndarray, b: np.ndarray) -> complex:
    """Tr[a b] without forming the product."""
    return complex(np.einsum("ij,ji->", a, b))


def quasiprob_oracle(rep: FockRep, rho0: np.ndarray, tau1: float, tau2: float, axis=None) -> QuasiResult:
    """q_{s1 s2} = Re Tr[M_s2(tau2) M_s1(tau1) rho0] for all four sign pairs.

    rho0 is a density matrix or, for pure states, a ket (faster path).

    The moments are read off the same Heisenberg operators:
    <Q_j> = Tr[(M_+ - M_-)(tau_j) rho0], C = Re Tr[Q(tau2) Q(tau1) rho0].
    """
    if tau1 > tau2:
        raise TimeOrder(f"need tau1 <= tau2, got {tau1} > {tau2}")
    if rho0.ndim == 1:
        return _quasiprob_ket(rep, rho0, tau1, tau2, axis)
    m1 = {s: heisenberg(rep, measurement_operator(rep, s, axis), tau1) for s in (1, -1)}
    m2 = {s: heisenberg(rep, measurement_operator(rep, s, axis), tau2) for s in (1, -1)}
    m1rho = {s: m1[s] @ rho0 for s in (1, -1)}
    q = {(s1, s2): _tr(m2[s2], m1rho[s1]).real for s1, s2 in SIGN_PAIRS}
    q1 = m1[1] - m1[-1]
    q2 = m2[1] - m2[-1]
    e1 = _tr(q1, rho0).real
    e2 = _tr(q2, rho0).real
    c = _tr(q2, q1 @ rho0).real
    return QuasiResult(q, e1, e2, c, float(tau1), float(tau2))


def _propagate(rep: FockRep, ket: np.ndarray, tau: float) -> np.ndarray:
    w, v = rep.spectrum
    return v @ (np.exp(-1j * w * tau) * (v.conj().T @ ket))


def _quasiprob_ket(rep, psi, tau1, tau2, axis) -> QuasiResult:
    # <psi|M2(t2) M1(t1)|psi> = <psi(t2)| M2 U(t2 - t1) M1 |psi(t1)>, all matrix-vector work
    m = {s: measurement_operator(rep, s, axis) for s in (1, -1)}
    q_op = m[1] - m[-1]
    at1 = _propagate(rep, psi, tau1)
    at2 = _propagate(rep, psi, tau2)
    bra = {s: m[s] @ at2 for s in (1, -1)}  # M is Hermitian
    moved = {s: _propagate(rep, m[s] @ at1, tau2 - tau1) for s in (1, -1)}
    q = {(s1, s2): np.vdot(bra[s2], moved[s1]).real for s1, s2 in SIGN_PAIRS}
    e1 = np.vdot(at1, q_op @ at1).real
    e2 = np.vdot(at2, q_op @ at2).real
    c = np.vdot(q_op @ at2, _propagate(rep, q_op @ at1, tau2 - tau1)).real
    return QuasiResult(q, float(e1), float(e2), float(c), float(tau1), float(tau2))


def sequential_probability(rep, rho0, tau1, tau2, a, b, axis=None) -> float:
    """P12(a, b) = Tr[M_b(tau2) M_a(tau1) rho0 M_a(tau1)]: projective measurements at both times."""
    ma = heisenberg(rep, measurement_operator(rep, a, axis), tau1)
    mb = heisenberg(rep, measurement_operator(rep, b, axis), tau2)
    return _tr(mb, ma @ rho0 @ ma.conj().T).real


def evolve_state(rep: FockRep, state: np.ndarray, tau: float) -> np.ndarray:
    u = evolve_operator(rep, tau)
    if state.ndim == 1:
        return u @ state
    return u @ state @ u.conj().T


def partial_transpose_qubit(rep: FockRep, rho: np.ndarray) -> np.ndarray:
    n = rep.n_fock
    r = rho.reshape(2, n, 2, n)
    return r.transpose(2, 1, 0, 3).reshape(2 * n, 2 * n)


def negativity_oracle(rep: FockRep, state: np.ndarray, tau: float = 0.0) -> float:
    """Sum of |negative eigenvalues| of the qubit partial transpose of the state at tau."""
    st = evolve_state(rep, state, tau) if tau else state
    rho = np.outer(st, st.conj()) if st.ndim == 1 else st
    pt = partial_transpose_qubit(rep, rho)
    try:
        ev = scipy.linalg.eigvalsh(0.5 * (pt + pt.conj().T))
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise EigenFailure(str(exc)) from exc
    return float(-ev[ev < 0].sum())


def fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """|<a|b>|^2 for normalized kets."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    for name, v in (("a", a), ("b", b)):
        if abs(np.linalg.norm(v) - 1.0) > 1e-8:
            raise ValidationError(f"state {name} is not normalized")
    return float(min(1.0, abs(np.vdot(a, b)) ** 2))


def cat_state(rep: FockRep, tau: float) -> np.ndarray:
    """(e^{-i W tau}|0>|lam alpha> + e^{i W tau}|1>|-lam alpha>)/sqrt 2 with alpha = e^{-i tau} - 1."""
    p = rep.params
    d = p.lam * (np.exp(-1j * tau) - 1.0)
    w = p.big_omega_ratio * tau
    up = np.exp(-1j * w) * coherent_ket(rep.n_fock, d, rep.cfg.tol_truncation)
    dn = np.exp(1j * w) * coherent_ket(rep.n_fock, -d, rep.cfg.tol_truncation)
    return np.concatenate([up, dn]) / math.sqrt(2.0)


def superposition_state(rep: FockRep, xi0: complex, xi1: complex, tau: float):
    """Exact and large-amplitude approximate evolution of |+> (x) (|xi0> + |xi1>).

    The approximation keeps the phase exp(+-lam(-alpha* xi* + alpha xi)/2) of each
    branch but drops the lam*alpha shift of the coherent amplitude, so each
    branch is |xi_j e^{-i tau}>.  The qubit precession phases exp(-+i W tau)
    are kept on both.  Returns (exact, approx, fidelity), both kets normalized.
    """
    p = rep.params
    n, tol = rep.n_fock, rep.cfg.tol_truncation
    psi0 = initial_ket(rep, CoherentSuperposition(xi0, xi1))
    exact = evolve_operator(rep, tau) @ psi0
    alpha = np.exp(-1j * tau) - 1.0
    w = p.big_omega_ratio * tau
    up = np.zeros(n, dtype=complex)
    dn = np.zeros(n, dtype=complex)
    for xi in (complex(xi0), complex(xi1)):
        phase = p.lam * (-np.conj(alpha) * np.conj(xi) + alpha * xi) / 2
        ket = coherent_ket(n, xi * np.exp(-1j * tau), tol)
        up += np.exp(phase) * ket
        dn += np.exp(-phase) * ket
    approx = np.concatenate([np.exp(-1j * w) * up, np.exp(1j * w) * dn])
    approx /= np.linalg.norm(approx)
    return exact, approx, fidelity(exact / np.linalg.norm(exact), approx)
