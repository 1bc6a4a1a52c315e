"""Analytic two-time statistics of the gravitationally coupled qubit-oscillator.

Every function takes dimensionless times tau = omega t and broadcasts over
numpy arrays where that is natural, so scans evaluate whole grids at once.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import SmallCouplingWarning, TimeOrder, UnsupportedInit, UnsupportedRegime
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

SMALL_LAMBDA_LIMIT = 0.3
MINIMA_LAMBDA_LIMIT = 0.1


def kernel_alpha_beta(tau):
    """Return (omega*alpha, omega^2*beta) = (exp(-i tau) - 1, tau - sin tau)."""
    tau = np.asarray(tau, dtype=float)
    alpha = np.expm1(-1j * tau) if tau.ndim else complex(np.expm1(-1j * float(tau)))
    beta = tau - np.sin(tau)
    if tau.ndim == 0:
        return alpha, float(beta)
    return alpha, beta


def kernel_theta(tau1, tau2, lam):
    """Phase 16 lam^2 sin((tau2-tau1)/2) sin(tau2/2) sin(tau1/2)."""
    out = 16.0 * lam * lam * np.sin((tau2 - tau1) / 2) * np.sin(tau2 / 2) * np.sin(tau1 / 2)
    return out if np.ndim(out) else float(out)


def kernel_theta_sum_form(tau1, tau2, lam):
    """Same phase written as 4 lam^2 (sin(tau2-tau1) - sin tau2 + sin tau1)."""
    out = 4.0 * lam * lam * (np.sin(tau2 - tau1) - np.sin(tau2) + np.sin(tau1))
    return out if np.ndim(out) else float(out)


def _check_init(init: OscillatorInit) -> None:
    if isinstance(init, CoherentSuperposition):
        raise UnsupportedInit("no closed form for a coherent-state superposition; use the Fock oracle")
    if not isinstance(init, (Ground, Thermal, Squeezed)):
        raise UnsupportedInit(f"unknown initial state {init!r}")


def decoherence_exponent(tau_a, tau_b, lam, init: OscillatorInit):
    """Exponent D with overlap factor exp(-D) for a displacement between tau_a and tau_b.

    Ground gives 8 lam^2 sin^2((tau_b - tau_a)/2); the thermal state multiplies
    that by 2 nbar + 1.  For the squeezed state the exponent is
    2 lam^2 |(e^{i tau_b} - e^{i tau_a}) cosh r - (e^{-i tau_b} - e^{-i tau_a}) e^{i theta} sinh r|^2.
    """
    lam2 = lam * lam
    if isinstance(init, Squeezed):
        ua = np.exp(1j * np.asarray(tau_a, dtype=float))
        ub = np.exp(1j * np.asarray(tau_b, dtype=float))
        d = ub - ua
        rot = complex(math.cos(init.theta), math.sin(init.theta))
        w = d * math.cosh(init.zeta_abs) - np.conj(d) * rot * math.sinh(init.zeta_abs)
        return 2.0 * lam2 * np.abs(w) ** 2
    s = np.sin((np.asarray(tau_b, dtype=float) - tau_a) / 2)
    base = 8.0 * lam2 * s * s
    if isinstance(init, Thermal):
        return (2.0 * init.nbar + 1.0) * base
    return base


def _expect_q(tau, p: ModelParams, init):
    tau = np.asarray(tau, dtype=float)
    return np.cos(2 * p.big_omega_ratio * tau - p.phi) * np.exp(
        -decoherence_exponent(0.0, tau, p.lam, init)
    )


def _correlation(tau1, tau2, p: ModelParams, init):
    tau1 = np.asarray(tau1, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    return (
        np.cos(kernel_theta(tau1, tau2, p.lam))
        * np.cos(2 * p.big_omega_ratio * (tau2 - tau1))
        * np.exp(-decoherence_exponent(tau1, tau2, p.lam, init))
    )


def _prepare(params, init):
    _check_init(init)
    return validate(params, closed_form=True)


def expect_q(tau, params: ModelParams, init: OscillatorInit = Ground()):
    """<n.sigma(tau)> for the qubit prepared in |+>."""
    p = _prepare(params, init)
    out = _expect_q(tau, p, init)
    return out if np.ndim(out) else float(out)


def correlation(tau1, tau2, params: ModelParams, init: OscillatorInit = Ground()):
    """Symmetrized two-time correlator C(tau2, tau1); symmetric in its arguments."""
    p = _prepare(params, init)
    out = _correlation(tau1, tau2, p, init)
    return out if np.ndim(out) else float(out)


def quasiprob_arrays(tau1, tau2, params: ModelParams, init: OscillatorInit = Ground()):
    """Vectorized q for every sign pair; no time-order check.

    Returns a dict (s1, s2) -> array broadcast from ``tau1`` and ``tau2``.
    """
    p = _prepare(params, init)
    e1 = _expect_q(tau1, p, init)
    e2 = _expect_q(tau2, p, init)
    c = _correlation(tau1, tau2, p, init)
    return {(s1, s2): 0.25 * (1.0 + s1 * e1 + s2 * e2 + s1 * s2 * c) for s1, s2 in SIGN_PAIRS}


def quasiprob(tau1: float, tau2: float, params: ModelParams, init: OscillatorInit = Ground()) -> QuasiResult:
    """Two-time quasiprobability for all four sign pairs at (tau1, tau2)."""
    if tau1 > tau2:
        raise TimeOrder(f"need tau1 <= tau2, got {tau1} > {tau2}")
    p = _prepare(params, init)
    e1 = float(_expect_q(tau1, p, init))
    e2 = float(_expect_q(tau2, p, init))
    c = float(_correlation(tau1, tau2, p, init))
    return QuasiResult.from_moments(e1, e2, c, float(tau1), float(tau2))


# -- entanglement -------------------------------------------------------------------


def negativity_closed(tau, lam: float):
    """Negativity of the evolved cat state, 0.5 sqrt(1 - exp(-16 lam^2 sin^2(tau/2)))."""
    s = np.sin(np.asarray(tau, dtype=float) / 2)
    out = 0.5 * np.sqrt(-np.expm1(-16.0 * lam * lam * s * s))
    return out if np.ndim(out) else float(out)


def suppression_factor(negativity):
    """1 - sqrt(1 - 4 N^2): monotone in N on [0, 1/2]."""
    n = np.asarray(negativity, dtype=float)
    out = 1.0 - np.sqrt(np.clip(1.0 - 4.0 * n * n, 0.0, None))
    return out if np.ndim(out) else float(out)


@dataclass
class NegativityDecomposition:
    """q(0, tau2) split into its zero-coupling value and the entanglement correction."""

    result: QuasiResult
    free: dict
    correction: dict
    negativity: float


def quasiprob_negativity_form(tau2: float, params: ModelParams) -> NegativityDecomposition:
    """Quasiprobability with tau1 = 0 for the ground state, written through N(tau2).

    ``free`` holds the lam = 0 values and ``correction`` the added piece
    -(1 - sqrt(1 - 4N^2)) (s2 cos(2 Omega tau2 - phi) + s1 s2 cos(2 Omega tau2)) / 4.
    """
    p = validate(params, closed_form=True)
    n = negativity_closed(tau2, p.lam)
    supp = suppression_factor(n)
    c_phi = math.cos(p.phi)
    c2 = math.cos(2 * p.big_omega_ratio * tau2 - p.phi)
    c12 = math.cos(2 * p.big_omega_ratio * tau2)
    free, corr, q = {}, {}, {}
    for s1, s2 in SIGN_PAIRS:
        bracket = s2 * c2 + s1 * s2 * c12
        free[(s1, s2)] = 0.25 * (1.0 + s1 * c_phi + bracket)
        corr[(s1, s2)] = -0.25 * supp * bracket
        q[(s1, s2)] = free[(s1, s2)] + corr[(s1, s2)]
    visibility = 1.0 - supp
    res = QuasiResult(q, c_phi, c2 * visibility, c12 * visibility, 0.0, float(tau2))
    return NegativityDecomposition(res, free, corr, float(n))


# -- small coupling ------------------------------------------------------------------


def _warn_large(lam, limit):
    if lam > limit:
        warnings.warn(
            f"lambda={lam:g} exceeds {limit:g}; small-coupling result is unreliable",
            SmallCouplingWarning,
            stacklevel=3,
        )


def quasiprob_small_lambda(tau1, tau2, params: ModelParams, s1: int, s2: int):
    """O(lam^2) expansion of q for the ground state with Omega = 0, phi = 0."""
    p = validate(params, closed_form=True)
    if p.big_omega_ratio != 0 or abs(math.sin(p.phi)) > 1e-12 or math.cos(p.phi) < 0:
        raise UnsupportedRegime("expansion holds for Omega = 0 and phi = 0 only")
    _warn_large(p.lam, SMALL_LAMBDA_LIMIT)
    tau1 = np.asarray(tau1, dtype=float)
    tau2 = np.asarray(tau2, dtype=float)
    sq = lambda x: np.sin(x / 2) ** 2  # noqa: E731
    out = 0.25 * (1 + s1 + s2 + s1 * s2) - 2.0 * p.lam2 * (
        s1 * sq(tau1) + s2 * sq(tau2) + s1 * s2 * sq(tau2 - tau1)
    )
    return out if np.ndim(out) else float(out)


# minima of the O(lam^2) expansion, n = m = 0 representatives, in units of pi
GROUND_MINIMA_LOCI = (
    (2 / 3, 7 / 3, 1, -1),
    (4 / 3, 5 / 3, 1, -1),
    (1 / 3, 2 / 3, -1, 1),
    (5 / 3, 10 / 3, -1, 1),
    (1 / 3, 5 / 3, -1, -1),
    (5 / 3, 7 / 3, -1, -1),
)


def ground_minima_loci():
    """The six (tau1, tau2, s1, s2) families where the expansion reaches -lam^2/2."""
    return [(a * math.pi, b * math.pi, s1, s2) for a, b, s1, s2 in GROUND_MINIMA_LOCI]


def min_quasiprob_predicted(init: OscillatorInit, lam: float):
    """Predicted minimum of q for small coupling and where it is reached.

    Ground: -lam^2/2; thermal: -(lam^2/2)(2 nbar + 1) at the same loci;
    squeezed: order -(lam^2/2) exp(2|zeta|) with no loci (they are not pinned
    down analytically).
    """
    _check_init(init)
    _warn_large(lam, MINIMA_LAMBDA_LIMIT)
    base = -0.5 * lam * lam
    if isinstance(init, Thermal):
        return base * (2.0 * init.nbar + 1.0), ground_minima_loci()
    if isinstance(init, Squeezed):
        return base * math.exp(2.0 * init.zeta_abs), []
    return base, ground_minima_loci()
