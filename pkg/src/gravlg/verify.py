"""Randomized agreement check between the closed forms and the Fock oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import closed_form, fock
from .model import SIGN_PAIRS, Ground, ModelParams, Squeezed, Thermal

DEFAULT_TOL = 1e-8


@dataclass
class Case:
    params: ModelParams
    init: object
    tau1: float
    tau2: float


@dataclass
class CaseReport:
    case: Case
    n_fock: int
    max_abs_diff: float


def random_cases(count: int = 100, seed: int = 0, lam_max: float = 0.1, omega_max: float = 2.0,
                 tau_max: float = 4 * math.pi, nbar_max: float = 2.0, zeta_max: float = 1.0):
    """Parameter tuples drawn uniformly; initial states cycle ground/thermal/squeezed."""
    rng = np.random.default_rng(seed)
    cases = []
    for k in range(count):
        params = ModelParams(
            lam=float(rng.uniform(0, lam_max)),
            big_omega_ratio=float(rng.uniform(0, omega_max)),
            phi=float(rng.uniform(0, 2 * math.pi)),
        )
        t = np.sort(rng.uniform(0, tau_max, 2))
        kind = k % 3
        if kind == 0:
            init = Ground()
        elif kind == 1:
            init = Thermal(float(rng.uniform(0, nbar_max)))
        else:
            init = Squeezed(float(rng.uniform(0, zeta_max)), float(rng.uniform(0, 2 * math.pi)))
        cases.append(Case(params, init, float(t[0]), float(t[1])))
    return cases


def compare(case: Case, n_fock: int | None = None) -> CaseReport:
    cfg = fock.FockConfig(n_fock) if n_fock else fock.auto_config(case.params, case.init)
    rep = fock.build_space(cfg, case.params)
    rho = fock.initial_state(rep, case.init)
    oracle = fock.quasiprob_oracle(rep, rho, case.tau1, case.tau2)
    closed = closed_form.quasiprob(case.tau1, case.tau2, case.params, case.init)
    diff = max(abs(oracle.q[p] - closed.q[p]) for p in SIGN_PAIRS)
    return CaseReport(case, cfg.n_fock, diff)


def run_suite(count: int = 100, seed: int = 0, **kw) -> list[CaseReport]:
    return [compare(c) for c in random_cases(count, seed, **kw)]
