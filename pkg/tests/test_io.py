import json
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import CONFIGS, FIXTURES
from gravlg import io, scan
from gravlg.errors import IoError, ParseError, SchemaError
from gravlg.model import PAIR_LABELS, SIGN_PAIRS, Ground, ModelParams, QuasiResult, Squeezed, Thermal

finite = st.floats(allow_nan=False, allow_infinity=False)


@given(finite, finite, finite, finite, finite)
def test_quasi_result_round_trip(e1, e2, c, t1, t2):
    import tempfile
    from pathlib import Path

    res = QuasiResult.from_moments(e1, e2, c, t1, t2)
    with tempfile.TemporaryDirectory() as d:
        path = Path(d) / "r.csv"
        io.write_csv(res, path)
        back = io.read_quasi_csv(path)
    for key, value in io.quasi_rows(res):
        assert back[key] == value or (math.isnan(value) and math.isnan(back[key]))


def test_quasi_result_schema(tmp_path):
    path = tmp_path / "r.csv"
    io.write_csv(QuasiResult.from_moments(0.1, -0.2, 0.3, 0.0, 1.0), path)
    raw = path.read_bytes()
    assert b"\r" not in raw
    lines = raw.decode().splitlines()
    assert len(lines) == 1 + 4 + 3
    assert lines[0] == "key,value"
    assert [ln.split(",")[0] for ln in lines[1:]] == io.QUASI_KEYS


def test_grid_round_trip(tmp_path):
    g = scan.grid_scan(resolution=17, params=ModelParams(0.07, big_omega_ratio=0.3), init=Thermal(0.4))
    path = tmp_path / "g.csv"
    io.write_csv(g, path)
    header, rows = io.read_csv(path)
    assert header == io.GRID_COLUMNS
    assert len(rows) == 17 * 18 // 2
    index = {v: k for k, v in enumerate(g.tau1_axis)}
    for t1, t2, *qs in rows:
        i, j = index[t1], index[t2]
        assert qs == [g.values[p][i, j] for p in SIGN_PAIRS]


@pytest.mark.parametrize("grid", [None, scan.ScanGrid(np.array([]), np.array([]), {})], ids=["none", "empty"])
def test_empty_grid_is_header_only(tmp_path, grid):
    path = tmp_path / "e.csv"
    io.write_csv(grid, path)
    assert path.read_text() == ",".join(io.GRID_COLUMNS) + "\n"


def test_mask_csv(tmp_path):
    g = scan.grid_scan(resolution=9, params=ModelParams(0.3))
    masks = {p: scan.region_mask(g, p) for p in SIGN_PAIRS}
    path = tmp_path / "m.csv"
    io.write_mask_csv(g, masks, path)
    header, rows = io.read_csv(path)
    assert header == io.MASK_COLUMNS
    assert len(rows) == 45
    assert all(v in (0.0, 1.0) for row in rows for v in row[2:])


def test_unwritable_path(tmp_path):
    with pytest.raises(IoError):
        io.write_csv(None, tmp_path / "missing" / "x.csv")
    with pytest.raises(IoError):
        io.read_csv(tmp_path / "nope.csv")


def test_mapping_rows(tmp_path):
    path = tmp_path / "k.csv"
    io.write_csv({"a": 0.1, "b": 2}, path)
    assert path.read_text() == "key,value\na,0.10000000000000001\nb,2\n"


# -- configuration --------------------------------------------------------------------------


def test_minimal_config_defaults(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"lambda2": 1e-3, "t1": 0.5, "t2": 2.0}))
    cfg = io.load_config(path)
    assert cfg.params.lam == pytest.approx(math.sqrt(1e-3))
    assert cfg.params.big_omega_ratio == 0.0
    assert cfg.params.phi == 0.0
    assert cfg.init == Ground()
    assert (cfg.t1, cfg.t2) == (0.5, 2.0)
    assert cfg.engine == "closed"


def test_unknown_key_named(tmp_path):
    path = tmp_path / "c.json"
    path.write_text(json.dumps({"lambda2": 1e-3, "lamda": 2}))
    with pytest.raises(SchemaError, match="lamda") as exc:
        io.load_config(path)
    assert exc.value.path == "lamda"


def test_nested_key_path():
    with pytest.raises(SchemaError) as exc:
        io.config_from_dict({"lambda": 0.1, "init": {"kind": "thermal", "zeta": 1.0}})
    assert exc.value.path == "init.zeta"


@pytest.mark.parametrize("bad", [
    {},
    {"lambda": 0.1, "lambda2": 0.01},
    {"lambda": -0.1},
    {"lambda": 0.1, "s1": 0},
    {"lambda": 0.1, "engine": "gpu"},
    {"lambda": 0.1, "resolution": "many"},
    {"lambda": 0.1, "tau_range": [0, 1, 2]},
    {"lambda": True},
])
def test_schema_violations(bad):
    with pytest.raises(SchemaError):
        io.config_from_dict(bad)


def test_bad_json(tmp_path):
    path = tmp_path / "c.json"
    path.write_text("{lambda2: 1}")
    with pytest.raises(ParseError):
        io.load_config(path)


def test_init_variants():
    assert io.parse_init({"kind": "squeezed", "zeta": -5.0}) == Squeezed.real(-5.0)
    assert io.parse_init({"kind": "squeezed", "zeta_abs": 1.0, "theta": 0.5}) == Squeezed(1.0, 0.5)
    sup = io.parse_init({"kind": "superposition", "xi0": [1.0, 2.0], "xi1": -3})
    assert (sup.xi0, sup.xi1) == (1 + 2j, -3 + 0j)
    with pytest.raises(SchemaError):
        io.parse_init({"kind": "squeezed", "zeta": 1.0, "theta": 0.1})


def test_defaults_documented():
    text = io.config_defaults_help()
    for key in io.CONFIG_FIELDS:
        assert key in text


def test_config_round_trips_through_dict():
    cfg = io.config_from_dict({"lambda": 0.1, "init": {"kind": "thermal", "nbar": 2.0}})
    d = cfg.to_dict()
    assert d["init"] == {"kind": "Thermal", "nbar": 2.0}
    json.dumps(d)


def test_ground_scan_fixture_reproduced(ground_grid):
    cfg = io.load_config(CONFIGS / "ground_scan.json")
    assert cfg.resolution == 401 and cfg.tau_range == (0.0, 4 * math.pi)
    frozen = json.loads((FIXTURES / "ground_scan_masks.json").read_text())
    for pair in SIGN_PAIRS:
        m = scan.region_mask(ground_grid, pair)
        want = frozen[PAIR_LABELS[pair]]
        assert m.n_negative == want["negative_cells"]
        got = [{"size": c.size, "bbox": list(c.bbox), "min_cell": list(c.min_cell)} for c in m.components]
        assert got == want["components"]
