"""CSV serialization and JSON run configuration."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from .errors import IoError, ParseError, SchemaError
from .model import (
    PAIR_LABELS,
    SIGN_PAIRS,
    CoherentSuperposition,
    Ground,
    ModelParams,
    OscillatorInit,
    QuasiResult,
    Squeezed,
    Thermal,
)

GRID_COLUMNS = ["tau1", "tau2"] + [f"q_{PAIR_LABELS[p]}" for p in SIGN_PAIRS]
MASK_COLUMNS = ["tau1", "tau2"] + [f"neg_{PAIR_LABELS[p]}" for p in SIGN_PAIRS]
QUASI_KEYS = [f"q_{PAIR_LABELS[p]}" for p in SIGN_PAIRS] + ["expect_q1", "expect_q2", "corr"]


def fmt(x) -> str:
    """17 significant digits: enough to round-trip any double."""
    if isinstance(x, (bool, np.bool_)):
        return str(int(x))
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".17g")


def _open(path):
    try:
        return open(path, "w", newline="", encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


def write_rows(path, header, rows) -> None:
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(x) if not isinstance(x, str) else x for x in row])


def quasi_rows(result: QuasiResult):
    vals = [result.q[p] for p in SIGN_PAIRS] + [result.expect_q1, result.expect_q2, result.corr]
    return list(zip(QUASI_KEYS, vals))


def grid_rows(grid):
    """(tau1, tau2, q_pp, q_pm, q_mp, q_mm) for populated cells, row-major."""
    if grid is None:
        return []
    rows = []
    for i, t1 in enumerate(grid.tau1_axis):
        for j, t2 in enumerate(grid.tau2_axis):
            vals = [grid.values[p][i, j] for p in SIGN_PAIRS]
            if all(np.isfinite(vals)):
                rows.append([t1, t2, *vals])
    return rows


def write_csv(result, path) -> None:
    """Write a QuasiResult as key,value rows, a ScanGrid (or None) as grid rows,
    or a mapping as key,value rows."""
    from .scan import ScanGrid

    if isinstance(result, QuasiResult):
        write_rows(path, ["key", "value"], quasi_rows(result))
    elif result is None or isinstance(result, ScanGrid):
        write_rows(path, GRID_COLUMNS, grid_rows(result))
    elif isinstance(result, dict):
        write_rows(path, ["key", "value"], list(result.items()))
    else:
        raise TypeError(f"cannot serialize {type(result).__name__}")


def write_mask_csv(grid, masks, path) -> None:
    rows = []
    for i, t1 in enumerate(grid.tau1_axis):
        for j, t2 in enumerate(grid.tau2_axis):
            if t1 <= t2:
                rows.append([t1, t2, *(int(masks[p].mask[i, j]) for p in SIGN_PAIRS)])
    write_rows(path, MASK_COLUMNS, rows)


def read_csv(path):
    """Return (header, rows) with numeric fields parsed as float."""
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            rows = [[_num(x) for x in row] for row in reader]
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    return header, rows


def _num(x):
    try:
        return float(x)
    except ValueError:
        return x


def read_quasi_csv(path) -> dict:
    header, rows = read_csv(path)
    if header != ["key", "value"]:
        raise ParseError(f"{path}: expected key,value header")
    return {k: v for k, v in rows}


def write_sidecar(path, meta: dict) -> None:
    try:
        Path(path).write_text(json.dumps(meta, indent=2, sort_keys=True, default=str) + "\n")
    except OSError as exc:
        raise IoError(f"cannot write {path}: {exc}") from exc


# -- configuration --------------------------------------------------------------------------

INIT_KINDS = ("ground", "thermal", "squeezed", "superposition")
ENGINE_CHOICES = ("closed", "oracle", "ns")

# key -> (types, default, where the default comes from)
CONFIG_FIELDS = {
    "lambda": ((int, float), None, "coupling g/omega; give this or lambda2"),
    "lambda2": ((int, float), None, "squared coupling; give this or lambda"),
    "omega_ratio": ((int, float), 0.0, "Omega/omega = 0: gravity alone drives the qubit"),
    "phi": ((int, float), 0.0, "measurement axis along x"),
    "t1": ((int, float), 0.0, "first measurement at the initial time"),
    "t2": ((int, float), None, "required by eval"),
    "s1": ((int,), 1, "first outcome +1"),
    "s2": ((int,), -1, "second outcome -1: the pair with a ground-state violation"),
    "init": ((dict,), None, "ground state of the oscillator"),
    "engine": ((str,), "closed", "analytic expressions"),
    "tau_range": ((list,), [0.0, 4 * math.pi], "two oscillator periods, covers the n=m=0 minima"),
    "resolution": ((int,), 401, "401 x 401 closed-form grid"),
    "n_fock": ((int,), None, "chosen from the state's Fock tail"),
    "workers": ((int,), 1, "serial scan; any value gives identical output"),
    "output": ((str,), None, "print to stdout"),
}
INIT_FIELDS = {
    "kind": (str,),
    "nbar": (int, float),
    "zeta_abs": (int, float),
    "theta": (int, float),
    "zeta": (int, float),
    "xi0": (list, int, float),
    "xi1": (list, int, float),
}


@dataclass
class RunConfig:
    params: ModelParams
    init: OscillatorInit = field(default_factory=Ground)
    t1: float = 0.0
    t2: float | None = None
    s1: int = 1
    s2: int = -1
    engine: str = "closed"
    tau_range: tuple[float, float] = (0.0, 4 * math.pi)
    resolution: int = 401
    n_fock: int | None = None
    workers: int = 1
    output: str | None = None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["init"] = {"kind": type(self.init).__name__, **asdict(self.init)}
        return d


def _complex(v, path):
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if isinstance(v, list) and len(v) == 2 and all(isinstance(x, (int, float)) for x in v):
        return complex(v[0], v[1])
    raise SchemaError("expected a number or [re, im]", path)


def parse_init(d: dict, path: str = "init") -> OscillatorInit:
    for k, v in d.items():
        if k not in INIT_FIELDS:
            raise SchemaError(f"unknown key {k!r}", f"{path}.{k}")
        if isinstance(v, bool) or not isinstance(v, INIT_FIELDS[k]):
            raise SchemaError(f"bad type {type(v).__name__}", f"{path}.{k}")
    kind = d.get("kind", "ground")
    if kind not in INIT_KINDS:
        raise SchemaError(f"kind must be one of {INIT_KINDS}", f"{path}.kind")
    allowed = {
        "ground": {"kind"},
        "thermal": {"kind", "nbar"},
        "squeezed": {"kind", "zeta_abs", "theta", "zeta"},
        "superposition": {"kind", "xi0", "xi1"},
    }[kind]
    for k in d:
        if k not in allowed:
            raise SchemaError(f"key {k!r} does not apply to kind {kind!r}", f"{path}.{k}")
    try:
        if kind == "thermal":
            return Thermal(float(d.get("nbar", 0.0)))
        if kind == "squeezed":
            if "zeta" in d:
                if "zeta_abs" in d or "theta" in d:
                    raise SchemaError("give zeta or zeta_abs/theta, not both", f"{path}.zeta")
                return Squeezed.real(float(d["zeta"]))
            return Squeezed(float(d.get("zeta_abs", 0.0)), float(d.get("theta", 0.0)))
        if kind == "superposition":
            for k in ("xi0", "xi1"):
                if k not in d:
                    raise SchemaError("required", f"{path}.{k}")
            return CoherentSuperposition(_complex(d["xi0"], f"{path}.xi0"), _complex(d["xi1"], f"{path}.xi1"))
    except SchemaError:
        raise
    except ValueError as exc:
        raise SchemaError(str(exc), path) from exc
    return Ground()


def config_from_dict(d: dict) -> RunConfig:
    if not isinstance(d, dict):
        raise SchemaError("top level must be an object")
    for k, v in d.items():
        if k not in CONFIG_FIELDS:
            raise SchemaError(f"unknown key {k!r}", k)
        types = CONFIG_FIELDS[k][0]
        if v is not None and (isinstance(v, bool) or not isinstance(v, types)):
            raise SchemaError(f"bad type {type(v).__name__}", k)
    if ("lambda" in d) == ("lambda2" in d):
        raise SchemaError("give exactly one of lambda or lambda2", "lambda2")
    lam = math.sqrt(d["lambda2"]) if "lambda2" in d and d["lambda2"] >= 0 else d.get("lambda", -1.0)
    if lam < 0:
        raise SchemaError("coupling must be >= 0", "lambda2" if "lambda2" in d else "lambda")
    params = ModelParams(lam=float(lam), big_omega_ratio=float(d.get("omega_ratio", 0.0)),
                         phi=float(d.get("phi", 0.0)))
    for k in ("s1", "s2"):
        if k in d and d[k] not in (1, -1):
            raise SchemaError("must be +1 or -1", k)
    if d.get("engine", "closed") not in ENGINE_CHOICES:
        raise SchemaError(f"must be one of {ENGINE_CHOICES}", "engine")
    tr = d.get("tau_range", [0.0, 4 * math.pi])
    if len(tr) != 2 or not all(isinstance(x, (int, float)) for x in tr):
        raise SchemaError("expected [lo, hi]", "tau_range")
    return RunConfig(
        params=params,
        init=parse_init(d["init"]) if d.get("init") is not None else Ground(),
        t1=float(d.get("t1", 0.0)),
        t2=None if d.get("t2") is None else float(d["t2"]),
        s1=int(d.get("s1", 1)),
        s2=int(d.get("s2", -1)),
        engine=d.get("engine", "closed"),
        tau_range=(float(tr[0]), float(tr[1])),
        resolution=int(d.get("resolution", 401)),
        n_fock=d.get("n_fock"),
        workers=int(d.get("workers", 1)),
        output=d.get("output"),
    )


def load_config(path) -> RunConfig:
    """Strict JSON run configuration; unknown keys raise SchemaError naming the key."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoError(f"cannot read {path}: {exc}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def config_defaults_help() -> str:
    lines = []
    for k, (_, default, why) in CONFIG_FIELDS.items():
        shown = "-" if default is None else default
        lines.append(f"  {k:12s} default {shown}: {why}")
    return "\n".join(lines)
