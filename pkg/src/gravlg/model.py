"""Parameter and state types shared by every engine, plus the SI-unit estimator.

All times inside the library are the dimensionless phase ``tau = omega * t``.
The oscillator frequency only enters when converting to or from SI units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Union

import numpy as np

from .errors import (
    EquatorialAxisRequired,
    InvalidSetup,
    MissingDensity,
    NegativeCoupling,
    NonUnitAxis,
)

SIGNS = (1, -1)
SIGN_PAIRS = ((1, 1), (1, -1), (-1, 1), (-1, -1))
PAIR_LABELS = {(1, 1): "pp", (1, -1): "pm", (-1, 1): "mp", (-1, -1): "mm"}

AXIS_TOL = 1e-12

# CODATA 2018
G_NEWTON = 6.674300000e-11  # m^3 kg^-1 s^-2
HBAR = 1.054571817e-34  # J s
K_BOLTZMANN = 1.380649000e-23  # J / K


@dataclass(frozen=True)
class ModelParams:
    """Dimensionless system parameters.

    ``lam`` is the coupling g/omega, ``big_omega_ratio`` the qubit splitting
    Omega/omega and ``phi`` the azimuth of the measurement axis.  ``axis`` may
    be given explicitly; when omitted it is (cos phi, sin phi, 0).
    """

    lam: float
    omega: float = 1.0
    big_omega_ratio: float = 0.0
    phi: float = 0.0
    axis: tuple[float, float, float] | None = None

    @property
    def lam2(self) -> float:
        return self.lam * self.lam

    @property
    def n(self) -> np.ndarray:
        if self.axis is None:
            return np.array([math.cos(self.phi), math.sin(self.phi), 0.0])
        return np.asarray(self.axis, dtype=float)

    @property
    def is_equatorial(self) -> bool:
        return self.axis is None or abs(self.axis[2]) <= AXIS_TOL

    @classmethod
    def from_lambda2(cls, lambda2: float, **kw) -> "ModelParams":
        if lambda2 < 0:
            raise NegativeCoupling(f"lambda^2 must be >= 0, got {lambda2}")
        return cls(lam=math.sqrt(lambda2), **kw)

    def with_(self, **kw) -> "ModelParams":
        return replace(self, **kw)


def validate(params: ModelParams, closed_form: bool = False) -> ModelParams:
    """Return normalized parameters or raise.

    The axis is filled in from ``phi`` when absent and renormalized when its
    length deviates from one by no more than ``AXIS_TOL``.  With
    ``closed_form=True`` a non-equatorial axis is refused; for an equatorial
    axis ``phi`` is then taken from the axis direction.
    """
    if not (params.lam >= 0):
        raise NegativeCoupling(f"lambda must be >= 0, got {params.lam}")
    if not (params.omega > 0):
        raise InvalidSetup(f"omega must be > 0, got {params.omega}")
    if params.axis is None:
        return replace(params, axis=(math.cos(params.phi), math.sin(params.phi), 0.0))
    v = np.asarray(params.axis, dtype=float)
    if v.shape != (3,):
        raise NonUnitAxis(f"axis must have three components, got {params.axis!r}")
    norm = float(np.linalg.norm(v))
    if abs(norm - 1.0) > AXIS_TOL:
        raise NonUnitAxis(f"|axis| = {norm!r}, expected 1")
    v = v / norm
    phi = params.phi
    if abs(v[2]) > AXIS_TOL:
        if closed_form:
            raise EquatorialAxisRequired(
                "closed-form expressions need an axis in the x-y plane"
            )
    else:
        v[2] = 0.0
        phi = math.atan2(v[1], v[0])
    return replace(params, axis=(float(v[0]), float(v[1]), float(v[2])), phi=phi)


# -- oscillator initial states -------------------------------------------------


@dataclass(frozen=True)
class Ground:
    pass


@dataclass(frozen=True)
class Thermal:
    nbar: float

    def __post_init__(self):
        if not self.nbar >= 0:
            raise InvalidSetup(f"nbar must be >= 0, got {self.nbar}")


@dataclass(frozen=True)
class Squeezed:
    """Squeezed vacuum S(zeta)|0> with zeta = zeta_abs * exp(i theta)."""

    zeta_abs: float
    theta: float = 0.0

    def __post_init__(self):
        if not self.zeta_abs >= 0:
            raise InvalidSetup(f"zeta_abs must be >= 0, got {self.zeta_abs}")

    @classmethod
    def from_complex(cls, zeta: complex) -> "Squeezed":
        zeta = complex(zeta)
        return cls(abs(zeta), math.atan2(zeta.imag, zeta.real) if zeta else 0.0)

    @classmethod
    def real(cls, zeta: float) -> "Squeezed":
        return cls(abs(zeta), 0.0 if zeta >= 0 else math.pi)

    @property
    def zeta(self) -> complex:
        return self.zeta_abs * complex(math.cos(self.theta), math.sin(self.theta))


@dataclass(frozen=True)
class CoherentSuperposition:
    """Oscillator in (|xi0> + |xi1>) up to normalization."""

    xi0: complex
    xi1: complex


OscillatorInit = Union[Ground, Thermal, Squeezed, CoherentSuperposition]


def init_label(init: OscillatorInit) -> str:
    if isinstance(init, Thermal):
        return f"thermal(nbar={init.nbar:g})"
    if isinstance(init, Squeezed):
        return f"squeezed(|zeta|={init.zeta_abs:g}, theta={init.theta:g})"
    if isinstance(init, CoherentSuperposition):
        return f"superposition(xi0={init.xi0}, xi1={init.xi1})"
    return "ground"


# -- results -------------------------------------------------------------------


@dataclass
class QuasiResult:
    """The four two-time quasiprobabilities with the moments they encode."""

    q: dict[tuple[int, int], float]
    expect_q1: float
    expect_q2: float
    corr: float
    t1: float
    t2: float
    flags: tuple[str, ...] = field(default_factory=tuple)

    def __getitem__(self, pair: tuple[int, int]) -> float:
        return self.q[pair]

    @property
    def minimum(self) -> float:
        return min(self.q.values())

    def marginal_defects(self) -> dict[str, float]:
        """Absolute mismatch of each sum rule tying q to the moments."""
        q = self.q
        return {
            "total": abs(sum(q.values()) - 1.0),
            "expect_q1": abs(sum(s1 * v for (s1, _), v in q.items()) - self.expect_q1),
            "expect_q2": abs(sum(s2 * v for (_, s2), v in q.items()) - self.expect_q2),
            "corr": abs(sum(s1 * s2 * v for (s1, s2), v in q.items()) - self.corr),
        }

    @classmethod
    def from_moments(cls, expect_q1, expect_q2, corr, t1, t2, flags=()):
        q = {
            (s1, s2): 0.25 * (1.0 + s1 * expect_q1 + s2 * expect_q2 + s1 * s2 * corr)
            for s1, s2 in SIGN_PAIRS
        }
        return cls(q, float(expect_q1), float(expect_q2), float(corr), t1, t2, tuple(flags))


# -- SI units --------------------------------------------------------------------


@dataclass(frozen=True)
class PhysicalSetup:
    """Laboratory parameters in SI units.

    Give exactly one of the oscillator mass ``M`` or the density ``rho``; with
    ``rho`` the oscillator is a sphere of radius ``ell`` (M = 4 pi rho ell^3 / 3).
    ``L`` defaults to ``ell``.
    """

    m: float
    ell: float
    omega_si: float
    M: float | None = None
    rho: float | None = None
    L: float | None = None
    T: float = 300.0
    G: float = G_NEWTON
    hbar: float = HBAR
    kB: float = K_BOLTZMANN

    def __post_init__(self):
        if (self.M is None) == (self.rho is None):
            raise InvalidSetup("give exactly one of M or rho")
        for name in ("m", "ell", "omega_si", "T", "G", "hbar", "kB", "M", "rho", "L"):
            v = getattr(self, name)
            if v is not None and not v > 0:
                raise InvalidSetup(f"{name} must be > 0, got {v}")

    @property
    def separation(self) -> float:
        return self.ell if self.L is None else self.L

    @property
    def oscillator_mass(self) -> float:
        if self.M is not None:
            return self.M
        return 4.0 * math.pi * self.rho * self.ell**3 / 3.0


M_CESIUM = 2.2e-25  # kg, as used for the reference estimate
REFERENCE_OMEGA = 2 * math.pi / 10.0  # rad/s


def reference_setup(**overrides) -> PhysicalSetup:
    """Cesium atom, 20 g/cm^3 sphere, 10 s period, 1 mm split, 300 K."""
    kw = dict(m=M_CESIUM, rho=20e3, omega_si=REFERENCE_OMEGA, ell=1e-3, T=300.0)
    kw.update(overrides)
    return PhysicalSetup(**kw)


class SIEstimate(NamedTuple):
    lambda_sq: float
    nbar: float
    lambda_sq_approx: float | None = None

    @property
    def nbar_lambda_sq(self) -> float:
        lam2 = self.lambda_sq if self.lambda_sq_approx is None else self.lambda_sq_approx
        return self.nbar * lam2


def dimensionless_from_si(setup: PhysicalSetup, approximate: bool = False) -> SIEstimate:
    """Convert a laboratory setup to (lambda^2, nbar).

    lambda^2 = G^2 m^2 M ell^2 / (2 hbar omega^3 (L^2 + ell^2/4)^3) and
    nbar = kB T / (2 hbar omega).  With ``approximate=True`` the density form
    G^2 m^2 rho / (hbar ell omega^3) (sphere of radius ell, L ~ ell) is added;
    ``nbar_lambda_sq`` then uses it.
    """
    s = setup
    w = s.omega_si
    M = s.oscillator_mass
    r2 = s.separation**2 + s.ell**2 / 4.0
    lam2 = s.G**2 * s.m**2 * M * s.ell**2 / (2.0 * w**3 * s.hbar * r2**3)
    nbar = s.kB * s.T / (2.0 * s.hbar * w)
    approx = None
    if approximate:
        if s.rho is None:
            raise MissingDensity("the approximate lambda^2 needs the density rho")
        approx = s.G**2 * s.m**2 * s.rho / (s.hbar * s.ell * w**3)
    return SIEstimate(lam2, nbar, approx)
