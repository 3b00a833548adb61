"""JSON stores for curves, critical points and atlases.

Floats are written with Python's shortest round-trip representation, so
load(save(x)) reproduces every coordinate bit for bit. Complex numbers are
[re, im] pairs. Atlas documents refer to curve components by their stable id.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .critpoints import CritPoint
from .domains.model import Atlas, FundamentalDomain, Strip
from .funcval import FunctionId
from .geometry import Window
from .tracer.curves import CurveComponent, CurveKind, Endpoint

FORMAT_VERSION = 1


def _pair(z) -> list:
    z = complex(z)
    return [z.real, z.imag]


def _flat(points) -> list:
    p = np.asarray(points, dtype=complex)
    return np.column_stack([p.real, p.imag]).ravel().tolist()


def _unflat(values) -> np.ndarray:
    a = np.asarray(values, dtype=float).reshape(-1, 2)
    return a[:, 0] + 1j * a[:, 1]


# ---------------------------------------------------------------- components

def component_to_dict(c: CurveComponent, cid: str = None) -> dict:
    return {"record": "CurveComponent", "id": cid or c.id, "kind": c.kind.to_dict(), "color": c.color,
            "image_interval": c.image_interval, "start": c.start.to_dict(), "end": c.end.to_dict(),
            "crossings": [_pair(z) for z in c.crossings], "nodes": [_pair(z) for z in c.nodes],
            "seed": _pair(c.seed), "points": _flat(c.points)}


def component_from_dict(d: dict) -> CurveComponent:
    return CurveComponent(kind=CurveKind.from_dict(d["kind"]), points=_unflat(d["points"]), color=d["color"],
                          image_interval=d["image_interval"], start=Endpoint.from_dict(d["start"]),
                          end=Endpoint.from_dict(d["end"]), crossings=[complex(*z) for z in d["crossings"]],
                          nodes=[complex(*z) for z in d["nodes"]], seed=complex(*d["seed"]))


def component_ids(components) -> list:
    """Stable ids, disambiguated by a counter when two components share a seed and kind."""
    seen = {}
    out = []
    for c in components:
        base = c.id
        n = seen.get(base, 0)
        seen[base] = n + 1
        out.append(base if n == 0 else f"{base}-{n}")
    return out


def curves_document(fid: FunctionId, components, window: Window = None, meta: dict = None) -> dict:
    ids = component_ids(components)
    doc = {"format": "fundom-curves", "version": FORMAT_VERSION, "function": fid.to_dict(),
           "function_tag": fid.tag, "components": [component_to_dict(c, i) for c, i in zip(components, ids)]}
    if window is not None:
        doc["window"] = list(window.as_tuple())
    if meta:
        doc["meta"] = meta
    return doc


def crit_document(fid: FunctionId, points, meta: dict = None) -> dict:
    doc = {"format": "fundom-crit", "version": FORMAT_VERSION, "function": fid.to_dict(),
           "function_tag": fid.tag, "points": [p.to_dict() for p in points]}
    if meta:
        doc["meta"] = meta
    return doc


# ---------------------------------------------------------------- atlas

def _strip_to_dict(s: Strip, index_of) -> dict:
    return {"k": s.k, "m": s.m, "lower": index_of(s.lower_boundary), "upper": index_of(s.upper_boundary),
            "interior": [index_of(c) for c in s.interior_components],
            "zeros": [p.to_dict() for p in s.zeros], "one_points": [p.to_dict() for p in s.one_points],
            "branch_points": [p.to_dict() for p in s.branch_points],
            "region": s.region.to_dict() if s.region is not None else None}


def atlas_document(atlas: Atlas) -> dict:
    comps = list(atlas.components)
    ids = component_ids(comps)
    pos = {id(c): i for c, i in zip(comps, ids)}
    extra = []

    def index_of(c):
        if id(c) not in pos:
            cid = f"{c.id}-x{len(extra)}"
            pos[id(c)] = cid
            extra.append((c, cid))
        return pos[id(c)]

    strips = [_strip_to_dict(s, index_of) for s in atlas.strips]
    return {"format": "fundom-atlas", "version": FORMAT_VERSION, "function": atlas.fid.to_dict(),
            "function_tag": atlas.fid.tag, "window": list(atlas.window.as_tuple()), "min_step": atlas.min_step,
            "meta": atlas.meta,
            "components": [component_to_dict(c, i) for c, i in zip(comps, ids)],
            "extra_components": [component_to_dict(c, i) for c, i in extra],
            "regions": [d.to_dict() for d in atlas.regions],
            "strips": strips, "crit": [_pair(z) for z in atlas.crit]}


def atlas_from_document(doc: dict) -> Atlas:
    _check(doc, "fundom-atlas")
    comps = [component_from_dict(c) for c in doc["components"]]
    by_id = {c["id"]: comp for c, comp in zip(doc["components"], comps)}
    for c in doc.get("extra_components", []):
        by_id[c["id"]] = component_from_dict(c)
    strips = []
    for s in doc["strips"]:
        region = FundamentalDomain.from_dict(s["region"]) if s["region"] is not None else None
        strips.append(Strip(int(s["k"]), by_id[s["lower"]], by_id[s["upper"]], [by_id[i] for i in s["interior"]],
                            int(s["m"]), [CritPoint.from_dict(p) for p in s["zeros"]],
                            [CritPoint.from_dict(p) for p in s["one_points"]],
                            [CritPoint.from_dict(p) for p in s["branch_points"]], region))
    return Atlas(FunctionId.from_dict(doc["function"]), Window(*doc["window"]),
                 [FundamentalDomain.from_dict(d) for d in doc["regions"]], comps, strips,
                 [complex(*z) for z in doc["crit"]], float(doc["min_step"]), doc.get("meta", {}))


def _check(doc: dict, fmt: str):
    if doc.get("format") != fmt:
        raise ValueError(f"expected a {fmt} document, got {doc.get('format')!r}")


# ---------------------------------------------------------------- files

def dumps(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":"), allow_nan=False) + "\n"


def write_json(path, doc: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(doc))
    return path


def read_json(path) -> dict:
    return json.loads(Path(path).read_text())


def save_curves(path, fid: FunctionId, components, window: Window = None, meta: dict = None) -> Path:
    return write_json(path, curves_document(fid, components, window, meta))


def load_curves(path):
    """(fid, components, window or None) from a curve store."""
    doc = read_json(path)
    _check(doc, "fundom-curves")
    window = Window(*doc["window"]) if "window" in doc else None
    return FunctionId.from_dict(doc["function"]), [component_from_dict(c) for c in doc["components"]], window


def save_crit(path, fid: FunctionId, points, meta: dict = None) -> Path:
    return write_json(path, crit_document(fid, points, meta))


def load_crit(path):
    doc = read_json(path)
    _check(doc, "fundom-crit")
    return FunctionId.from_dict(doc["function"]), [CritPoint.from_dict(p) for p in doc["points"]]


def save_atlas(path, atlas: Atlas) -> Path:
    return write_json(path, atlas_document(atlas))


def load_atlas(path) -> Atlas:
    return atlas_from_document(read_json(path))
