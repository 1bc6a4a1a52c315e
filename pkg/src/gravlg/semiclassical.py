"""Newton-Schroedinger (mean-field) comparison model.

The oscillator is reduced to its means x = <a + a^dag> and p, the qubit to a
Bloch vector.  In units of omega,

    dx/dtau = p,    dp/dtau = -x - 2 lam <sz>,
    dB/dtau = 2 (Omega/omega + lam x) z_hat x B,

which is the mean-field reduction of H = W sz + a^dag a + lam sz (a + a^dag).
The accumulated precession angle is integrated alongside so that a
no-collapse quasiprobability can be formed from the same trajectory.

Two-time statistics need a rule for what the first measurement does; the
default ``"collapse"`` rule projects the qubit onto +-n at tau1 and keeps
propagating the mean field, which yields an ordinary joint probability.  The
``"meanfield"`` rule skips the collapse and builds q from <Q(tau1)>,
<Q(tau2)> and the correlator of the mean-field Heisenberg operators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonEquatorialAxis, StepTooLarge, ValidationError
from .model import SIGN_PAIRS, ModelParams, validate

DEFAULT_DTAU = 2 * math.pi / 2000
BLOCH_DRIFT_TOL = 1e-6

# state vector layout: x, p, bx, by, bz, precession angle
_X, _P, _BX, _BY, _BZ, _ANG = range(6)


@dataclass
class MeanFieldState:
    q_mean: float = 0.0
    p_mean: float = 0.0
    bloch: tuple[float, float, float] = (1.0, 0.0, 0.0)
    time: float = 0.0

    def __post_init__(self):
        if np.linalg.norm(self.bloch) > 1 + 1e-12:
            raise ValidationError(f"|bloch| > 1: {self.bloch}")

    def as_array(self) -> np.ndarray:
        return np.array([self.q_mean, self.p_mean, *self.bloch, 0.0])


@dataclass
class Trajectory:
    times: np.ndarray
    q_mean: np.ndarray
    p_mean: np.ndarray
    bloch: np.ndarray  # (n, 3)
    angle: np.ndarray

    def state(self, i: int) -> MeanFieldState:
        return MeanFieldState(float(self.q_mean[i]), float(self.p_mean[i]), tuple(self.bloch[i]), float(self.times[i]))


def _rhs(y: np.ndarray, lam: float, w: float) -> np.ndarray:
    d = np.empty_like(y)
    x = y[..., _X]
    rate = 2.0 * (w + lam * x)
    d[..., _X] = y[..., _P]
    d[..., _P] = -x - 2.0 * lam * y[..., _BZ]
    d[..., _BX] = -rate * y[..., _BY]
    d[..., _BY] = rate * y[..., _BX]
    d[..., _BZ] = 0.0
    d[..., _ANG] = rate
    return d


def _rk4_step(y, h, lam, w):
    k1 = _rhs(y, lam, w)
    k2 = _rhs(y + 0.5 * h * k1, lam, w)
    k3 = _rhs(y + 0.5 * h * k2, lam, w)
    k4 = _rhs(y + h * k3, lam, w)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _integrate(y0: np.ndarray, lam: float, w: float, dtau: float, steps: int, record_every: int = 1):
    """RK4 over ``steps`` steps; y0 may carry leading batch dimensions."""
    y = np.array(y0, dtype=float)
    norm0 = np.linalg.norm(y[..., _BX:_BZ + 1], axis=-1)
    out = [y.copy()]
    for k in range(1, steps + 1):
        y = _rk4_step(y, dtau, lam, w)
        if k % record_every == 0:
            out.append(y.copy())
    drift = np.max(np.abs(np.linalg.norm(y[..., _BX:_BZ + 1], axis=-1) - norm0))
    if drift > BLOCH_DRIFT_TOL:
        raise StepTooLarge(f"|bloch| drifted by {drift:.2e}; reduce dtau")
    return np.stack(out)


def ns_evolve(state: MeanFieldState, params: ModelParams, dtau: float = DEFAULT_DTAU, steps: int = 1000) -> Trajectory:
    """Integrate the mean-field equations with fixed-step RK4."""
    if not dtau > 0:
        raise ValidationError(f"dtau must be > 0, got {dtau}")
    p = validate(params)
    ys = _integrate(state.as_array(), p.lam, p.big_omega_ratio, dtau, int(steps))
    times = state.time + dtau * np.arange(ys.shape[0])
    return Trajectory(times, ys[:, _X], ys[:, _P], ys[:, _BX:_BZ + 1], ys[:, _ANG])


def _evolve_to(y0, tau, p, dtau):
    if tau <= 0:
        return np.array(y0, dtype=float)
    steps = max(1, math.ceil(tau / dtau - 1e-9))
    return _integrate(y0, p.lam, p.big_omega_ratio, tau / steps, steps)[-1]


def _equatorial(params):
    p = validate(params)
    if not p.is_equatorial:
        raise NonEquatorialAxis("the Newton-Schroedinger statistics need an axis in the x-y plane")
    return p


def _collapsed(y: np.ndarray, n: np.ndarray, sign) -> np.ndarray:
    out = np.array(y, dtype=float)
    sign = np.asarray(sign, dtype=float)
    out[..., _BX] = sign * n[0]
    out[..., _BY] = sign * n[1]
    out[..., _BZ] = sign * n[2]
    return out


def _outcome_prob(sign, component):
    # Born probability of outcome sign; the clip only absorbs rounding of |n| = 1
    return np.clip(0.5 * (1 + sign * component), 0.0, 1.0)


def _meanfield_q(y1, y2, n, s1, s2):
    e1 = y1[..., _BX:_BZ + 1] @ n
    e2 = y2[..., _BX:_BZ + 1] @ n
    c = np.cos(y2[..., _ANG] - y1[..., _ANG])
    return 0.25 * (1 + s1 * e1 + s2 * e2 + s1 * s2 * c)


def ns_quasiprob(tau1: float, tau2: float, params: ModelParams, s1: int, s2: int,
                 dtau: float = DEFAULT_DTAU, initial: MeanFieldState | None = None,
                 rule: str = "collapse") -> float:
    """Two-time statistic for the mean-field model started from |+>, <x> = <p> = 0.

    With ``rule="collapse"`` (default) this is the joint probability of
    outcomes s1 at tau1 and s2 at tau2 and is never negative.
    """
    if tau1 > tau2:
        raise ValidationError(f"need tau1 <= tau2, got {tau1} > {tau2}")
    p = _equatorial(params)
    n = p.n
    y0 = (initial or MeanFieldState()).as_array()
    y1 = _evolve_to(y0, tau1, p, dtau)
    if rule == "meanfield":
        y2 = _evolve_to(y1, tau2 - tau1, p, dtau)
        return float(_meanfield_q(y1, y2, n, s1, s2))
    if rule != "collapse":
        raise ValidationError(f"unknown rule {rule!r}")
    p1 = float(_outcome_prob(s1, y1[_BX:_BZ + 1] @ n))
    y2 = _evolve_to(_collapsed(y1, n, s1), tau2 - tau1, p, dtau)
    p2 = float(_outcome_prob(s2, y2[_BX:_BZ + 1] @ n))
    return p1 * p2


def ns_scan(axis: np.ndarray, params: ModelParams, dtau: float = DEFAULT_DTAU,
            rule: str = "collapse", initial: MeanFieldState | None = None):
    """ns_quasiprob on the square grid axis x axis (tau1 rows, tau2 columns).

    ``axis`` must be uniformly spaced from 0.  One trajectory supplies every
    tau1 state; all post-measurement branches are then integrated together.
    Cells with tau1 > tau2 are NaN.  Also returns the largest |<x>| seen.
    """
    axis = np.asarray(axis, dtype=float)
    p = _equatorial(params)
    n = p.n
    m = axis.size
    spacing = axis[1] - axis[0] if m > 1 else 0.0
    if m > 1 and (abs(axis[0]) > 1e-12 or not np.allclose(np.diff(axis), spacing, rtol=0, atol=1e-12)):
        raise ValidationError("ns_scan needs a uniform axis starting at 0")
    sub = max(1, math.ceil(spacing / dtau - 1e-9)) if m > 1 else 1
    h = spacing / sub if m > 1 else dtau
    y0 = (initial or MeanFieldState()).as_array()
    traj = _integrate(y0, p.lam, p.big_omega_ratio, h, sub * (m - 1), record_every=sub)
    max_x = float(np.max(np.abs(traj[:, _X])))
    out = {pair: np.full((m, m), np.nan) for pair in SIGN_PAIRS}
    if rule == "meanfield":
        i, j = np.triu_indices(m)
        for s1, s2 in SIGN_PAIRS:
            out[(s1, s2)][i, j] = _meanfield_q(traj[i], traj[j], n, s1, s2)
        return out, max_x
    if rule != "collapse":
        raise ValidationError(f"unknown rule {rule!r}")
    signs = np.array([1.0, -1.0])
    # branches[k, i]: state right after outcome signs[k] at axis[i]
    branches = _collapsed(np.broadcast_to(traj, (2,) + traj.shape), n, signs[:, None])
    prop = _integrate(branches, p.lam, p.big_omega_ratio, h, sub * (m - 1), record_every=sub)
    max_x = max(max_x, float(np.max(np.abs(prop[..., _X]))))
    p1 = _outcome_prob(signs[:, None], (traj[:, _BX:_BZ + 1] @ n)[None, :])
    for i in range(m):
        lag = np.arange(m - i)
        for k, s1 in enumerate((1, -1)):
            later = prop[lag, k, i, _BX:_BZ + 1] @ n
            for s2 in (1, -1):
                p2 = _outcome_prob(s2, later)
                out[(s1, s2)][i, i:] = p1[k, i] * p2
    return out, max_x
