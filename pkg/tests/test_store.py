import json
import math

import pytest

from fundom import store
from fundom.critpoints import gamma_crit_points, zeta_nontrivial_zeros
from fundom.funcval import FunctionId


def test_crit_roundtrip(tmp_path):
    pts = zeta_nontrivial_zeros(40.0)
    path = store.save_crit(tmp_path / "c.json", FunctionId.zeta(), pts, {"seed": 3})
    fid, back = store.load_crit(path)
    assert fid == FunctionId.zeta()
    assert back == pts
    assert json.loads(path.read_text())["meta"] == {"seed": 3}


def test_gamma_crit_roundtrip_bytes(tmp_path):
    fid = FunctionId.gamma()
    pts = gamma_crit_points(6)
    p = store.save_crit(tmp_path / "g.json", fid, pts)
    text = p.read_text()
    _, back = store.load_crit(p)
    store.save_crit(p, fid, back)
    assert p.read_text() == text


def test_dumps_rejects_nan():
    with pytest.raises(ValueError):
        store.dumps({"x": math.nan})
    with pytest.raises(ValueError):
        store.dumps({"x": math.inf})


def test_dumps_is_canonical():
    assert store.dumps({"b": 1, "a": [0.1, 2]}) == '{"a":[0.1,2],"b":1}\n'


def test_wrong_format_rejected(tmp_path):
    p = store.save_crit(tmp_path / "c.json", FunctionId.zeta(), [])
    with pytest.raises(ValueError):
        store.load_curves(p)
    with pytest.raises(ValueError):
        store.load_atlas(p)
    q = store.save_curves(tmp_path / "k.json", FunctionId.gamma(), [])
    with pytest.raises(ValueError):
        store.load_crit(q)


def test_empty_curves_without_window(tmp_path):
    p = store.save_curves(tmp_path / "e.json", FunctionId.gamma(), [])
    fid, comps, window = store.load_curves(p)
    assert fid == FunctionId.gamma() and comps == [] and window is None
