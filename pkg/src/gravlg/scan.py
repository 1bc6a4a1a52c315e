"""(tau1, tau2) scans, negative-region masks and local minimum refinement."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.ndimage
from scipy.optimize import minimize_scalar

from . import closed_form, fock
from .errors import EngineUnavailable, NotALocalMin, ValidationError
from .model import SIGN_PAIRS, Ground, ModelParams, OscillatorInit, validate
from .semiclassical import DEFAULT_DTAU, ns_scan

ENGINES = ("closed", "oracle", "ns")
DEFAULT_WINDOW = (0.0, 4 * math.pi)
DEFAULT_RESOLUTION = 401
MAX_ORACLE_RESOLUTION = 101
# q values above -NEG_ATOL count as non-negative (rounding of exact zeros)
NEG_ATOL = 1e-12


@dataclass
class ScanMeta:
    params: ModelParams
    init: OscillatorInit = field(default_factory=Ground)
    engine: str = "closed"
    n_fock: int | None = None


@dataclass
class ScanGrid:
    """q sampled on tau1_axis x tau2_axis; cells with tau1 > tau2 hold NaN."""

    tau1_axis: np.ndarray
    tau2_axis: np.ndarray
    values: dict
    meta: ScanMeta | None = None

    def __post_init__(self):
        for ax in (self.tau1_axis, self.tau2_axis):
            if ax.size > 1 and not np.all(np.diff(ax) > 0):
                raise ValidationError("scan axes must be strictly increasing")
        for v in self.values.values():
            if v.shape != (self.tau1_axis.size, self.tau2_axis.size):
                raise ValidationError("value matrix does not match the axes")

    @property
    def populated(self) -> np.ndarray:
        return self.tau1_axis[:, None] <= self.tau2_axis[None, :]

    def evaluator(self, pair) -> Callable[[float, float], float]:
        """Pointwise q for ``pair`` using the engine that produced the grid."""
        if self.meta is None:
            raise ValidationError("grid has no model metadata to evaluate")
        m = self.meta
        if m.engine == "closed":
            return lambda t1, t2: float(closed_form.quasiprob_arrays(t1, t2, m.params, m.init)[pair])
        if m.engine == "oracle":
            cfg = fock.FockConfig(m.n_fock) if m.n_fock else fock.auto_config(m.params, m.init)
            rep = fock.build_space(cfg, m.params)
            rho = fock.initial_state(rep, m.init)
            return lambda t1, t2: fock.quasiprob_oracle(rep, rho, min(t1, t2), max(t1, t2)).q[pair]
        raise EngineUnavailable(f"no pointwise evaluator for engine {m.engine!r}")


def _axis(tau_range, resolution):
    lo, hi = tau_range
    if resolution < 2:
        raise ValidationError(f"resolution must be >= 2, got {resolution}")
    if not hi > lo:
        raise ValidationError(f"empty scan window {tau_range}")
    return np.linspace(lo, hi, resolution)


def _closed_rows(axis, rows, params, init):
    t1 = axis[rows][:, None]
    t2 = axis[None, :]
    return closed_form.quasiprob_arrays(t1, t2, params, init)


def _oracle_values(axis, params, init, n_fock):
    cfg = fock.FockConfig(n_fock) if n_fock else fock.auto_config(params, init)
    rep = fock.build_space(cfg, params)
    rho = fock.build_initial(rep, init)
    ms = {s: fock.measurement_operator(rep, s) for s in (1, -1)}
    heis = [{s: fock.heisenberg(rep, ms[s], t) for s in (1, -1)} for t in axis]
    m = axis.size
    out = {pair: np.full((m, m), np.nan) for pair in SIGN_PAIRS}
    for i in range(m):
        left = {s: heis[i][s] @ rho for s in (1, -1)}
        for j in range(i, m):
            for s1, s2 in SIGN_PAIRS:
                # Re Tr[M_s2(t2) M_s1(t1) rho]
                out[(s1, s2)][i, j] = np.einsum("ij,ji->", heis[j][s2], left[s1]).real
    return out, cfg.n_fock


def grid_scan(tau_range=DEFAULT_WINDOW, resolution: int = DEFAULT_RESOLUTION,
              params: ModelParams | None = None, init: OscillatorInit = Ground(),
              engine: str = "closed", workers: int = 1, n_fock: int | None = None,
              max_oracle_resolution: int = MAX_ORACLE_RESOLUTION) -> ScanGrid:
    """Evaluate all four q on a square grid over ``tau_range``.

    Rows (tau1) are split into chunks evaluated by ``workers`` threads and
    merged in row order, so the result does not depend on the worker count.
    """
    if params is None:
        raise ValidationError("params are required")
    if engine not in ENGINES:
        raise EngineUnavailable(f"unknown engine {engine!r}; choose from {ENGINES}")
    axis = _axis(tau_range, resolution)
    params = validate(params, closed_form=engine == "closed")
    m = axis.size
    used_n = None
    if engine == "closed":
        closed_form._check_init(init)
        chunks = np.array_split(np.arange(m), max(1, min(workers, m)))
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(pool.map(lambda r: _closed_rows(axis, r, params, init), chunks))
        else:
            parts = [_closed_rows(axis, r, params, init) for r in chunks]
        values = {pair: np.concatenate([p[pair] for p in parts], axis=0) for pair in SIGN_PAIRS}
    elif engine == "oracle":
        if resolution > max_oracle_resolution:
            raise EngineUnavailable(
                f"oracle scans are capped at resolution {max_oracle_resolution}, got {resolution}"
            )
        values, used_n = _oracle_values(axis, params, init, n_fock)
    else:
        if tau_range[0] != 0:
            raise EngineUnavailable("semiclassical scans must start at tau = 0")
        if not isinstance(init, Ground):
            raise EngineUnavailable("semiclassical scans use the symmetric ground start only")
        values, _ = ns_scan(axis, params, DEFAULT_DTAU)
    lower = axis[:, None] > axis[None, :]
    for v in values.values():
        v[lower] = np.nan
    return ScanGrid(axis, axis.copy(), values, ScanMeta(params, init, engine, used_n))


# -- negative regions ---------------------------------------------------------------------


@dataclass
class Component:
    label: int
    size: int
    bbox: tuple[int, int, int, int]  # row_min, row_max, col_min, col_max (inclusive)
    min_value: float
    min_cell: tuple[int, int]
    min_tau: tuple[float, float]


@dataclass
class RegionMask:
    mask: np.ndarray
    labels: np.ndarray
    components: list
    pair: tuple[int, int]

    @property
    def n_components(self) -> int:
        return len(self.components)

    @property
    def n_negative(self) -> int:
        return int(self.mask.sum())


_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]])


def region_mask(grid: ScanGrid, pair=(1, -1), atol: float = NEG_ATOL) -> RegionMask:
    """Cells with q < -atol, grouped into 4-connected components.

    Each component reports its minimum cell; ties go to the smallest (row, col).
    """
    v = grid.values[pair]
    mask = np.nan_to_num(v, nan=np.inf) < -atol
    labels, count = scipy.ndimage.label(mask, structure=_FOUR_CONNECTED)
    comps = []
    for lab in range(1, count + 1):
        cells = np.argwhere(labels == lab)  # row-major order
        vals = v[cells[:, 0], cells[:, 1]]
        k = int(np.argmin(vals))
        r, c = (int(x) for x in cells[k])
        comps.append(Component(
            lab, len(cells),
            (int(cells[:, 0].min()), int(cells[:, 0].max()), int(cells[:, 1].min()), int(cells[:, 1].max())),
            float(vals[k]), (r, c), (float(grid.tau1_axis[r]), float(grid.tau2_axis[c])),
        ))
    return RegionMask(mask, labels, comps, pair)


# -- minimum refinement ---------------------------------------------------------------------


def _is_local_min(v, r, c):
    here = v[r, c]
    if not np.isfinite(here):
        return False
    rows, cols = v.shape
    for dr in (-1, 0, 1):
        for dc in (-1, 0, 1):
            rr, cc = r + dr, c + dc
            if (dr or dc) and 0 <= rr < rows and 0 <= cc < cols and np.isfinite(v[rr, cc]):
                if v[rr, cc] < here:
                    return False
    return True


def refine_minimum(grid: ScanGrid, seed, pair=(1, -1), objective=None,
                   tol: float = 1e-12, max_sweeps: int = 200):
    """Coordinate descent from a locally minimal grid cell.

    Alternates bounded one-dimensional minimizations in tau1 and tau2 inside a
    bracket that starts at two grid spacings and halves after every sweep,
    stopping once a sweep changes q by less than ``tol``.  tau1 <= tau2 is
    enforced throughout.  ``objective(t1, t2)`` overrides the grid's engine.
    Returns (tau1, tau2, q_min).
    """
    r, c = seed
    v = grid.values[pair]
    if not _is_local_min(v, r, c):
        raise NotALocalMin(f"cell {seed} is not a local minimum of q{pair}")
    f = objective or grid.evaluator(pair)
    t1, t2 = float(grid.tau1_axis[r]), float(grid.tau2_axis[c])
    lo1, hi1 = grid.tau1_axis[0], grid.tau1_axis[-1]
    lo2, hi2 = grid.tau2_axis[0], grid.tau2_axis[-1]
    step = 2.0 * max(np.diff(grid.tau1_axis).max(initial=0.0), np.diff(grid.tau2_axis).max(initial=0.0))
    best = f(t1, t2)
    for _ in range(max_sweeps):
        start = best
        a, b = max(lo1, t1 - step), min(hi1, t1 + step, t2)
        if b > a:
            res = minimize_scalar(lambda x: f(x, t2), bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < best:
                t1, best = float(res.x), float(res.fun)
        a, b = max(lo2, t2 - step, t1), min(hi2, t2 + step)
        if b > a:
            res = minimize_scalar(lambda x: f(t1, x), bounds=(a, b), method="bounded",
                                  options={"xatol": 1e-12})
            if res.fun < best:
                t2, best = float(res.x), float(res.fun)
        step *= 0.5
        if abs(start - best) < tol and step < 1e-6:
            break
    return t1, t2, best


def local_minima(grid: ScanGrid, pair=(1, -1), atol: float = NEG_ATOL):
    """Minimum cell of each negative component, in component order."""
    return [comp.min_cell for comp in region_mask(grid, pair, atol).components]
