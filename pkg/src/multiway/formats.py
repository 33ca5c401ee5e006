"""Design documents (JSON, CSV) and JSON helpers.

A design document is::

    {"s": 5, "construction": "d1",
     "factors": [{"name": "p0", "levels": [0, 1, 2, 3, 4]}, ...],
     "treatments": [0, 1, ...],
     "units": [{"id": [1, 0], "levels": {"p0": 1, "p1": 2}, "treatment": 0}, ...]}

Level, treatment and id integers of the built-in constructions are element
codes: 0 for zero and ``k + 1`` for ``g**k``.  The ``inf`` factor's extra
level is ``s`` and treatment ``(x, i)`` is ``i*s + code(x)``.  The
``treatments`` list fixes the treatment order; when absent the sorted
distinct unit treatments are used.  A blocked main effect plan uses the
same schema with ``"block"`` in place of ``"treatment"``.

All writers are deterministic: fixed key order, no timestamps.
"""
from __future__ import annotations

import csv
import io
import json
from pathlib import Path

import numpy as np

from .designcore import Design, Factor, MainEffectPlan, Setting
from .errors import FormatError


def _plain(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, tuple):
        return [_plain(y) for y in x]
    return x


def _hashable(x):
    return tuple(_hashable(y) for y in x) if isinstance(x, list) else x


def _table_to_json(st: Setting, labels, key: str, s, construction) -> dict:
    units = []
    for u in range(st.n):
        units.append({
            "id": _plain(st.units[u]),
            "levels": {f.name: _plain(f.levels[st.levels[u, k]]) for k, f in enumerate(st.factors)},
            key: _plain(labels[u]),
        })
    return {
        "s": s,
        "construction": construction,
        "factors": [{"name": f.name, "levels": [_plain(x) for x in f.levels]} for f in st.factors],
        "units": units,
    }


def design_to_json(d: Design) -> dict:
    doc = _table_to_json(d.setting, [d.treatments[a] for a in d.alloc], "treatment",
                         d.info.get("s"), d.construction)
    doc["treatments"] = [_plain(t) for t in d.treatments]
    return doc


def _read_table(doc: dict, key: str):
    try:
        factors = tuple(Factor(f["name"], tuple(_hashable(x) for x in f["levels"]))
                        for f in doc["factors"])
        pos = [{lab: i for i, lab in enumerate(f.levels)} for f in factors]
        ids, levels, labels = [], [], []
        for u in doc["units"]:
            ids.append(_hashable(u["id"]))
            levels.append([pos[k][_hashable(u["levels"][f.name])] for k, f in enumerate(factors)])
            labels.append(_hashable(u[key]))
    except (KeyError, TypeError) as exc:
        raise FormatError(f"malformed document: missing or bad field {exc}") from None
    arr = np.array(levels, dtype=np.int64).reshape(len(ids), len(factors))
    return Setting(tuple(ids), factors, arr), labels


def design_from_json(doc: dict) -> Design:
    st, labels = _read_table(doc, "treatment")
    treatments = tuple(_hashable(t) for t in doc["treatments"]) if "treatments" in doc \
        else tuple(sorted(set(labels)))
    pos = {t: i for i, t in enumerate(treatments)}
    try:
        alloc = np.array([pos[t] for t in labels], dtype=np.int64)
    except KeyError as exc:
        raise FormatError(f"unit treatment {exc} not in the treatment list") from None
    info = {} if doc.get("s") is None else {"s": int(doc["s"])}
    return Design(st, treatments, alloc, doc.get("construction") or "custom", info)


def plan_to_json(plan: MainEffectPlan, s=None, construction=None) -> dict:
    st = Setting(plan.run_ids, plan.factors, plan.runs)
    doc = _table_to_json(st, [plan.blocks[b] for b in plan.block_of], "block", s, construction)
    doc["blocks"] = [_plain(b) for b in plan.blocks]
    return doc


def plan_from_json(doc: dict) -> MainEffectPlan:
    st, labels = _read_table(doc, "block")
    blocks = tuple(_hashable(b) for b in doc["blocks"]) if "blocks" in doc else tuple(sorted(set(labels)))
    pos = {b: i for i, b in enumerate(blocks)}
    try:
        block_of = np.array([pos[b] for b in labels], dtype=np.int64)
    except KeyError as exc:
        raise FormatError(f"run block {exc} not in the block list") from None
    return MainEffectPlan(st.factors, st.levels, blocks, block_of, st.units)


def design_to_csv(d: Design) -> str:
    """One row per unit: factor level labels then the treatment label (lossy: no ids)."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    st = d.setting
    w.writerow(list(st.names) + ["treatment"])
    for u in range(d.n):
        w.writerow([_plain(f.levels[st.levels[u, k]]) for k, f in enumerate(st.factors)]
                   + [_plain(d.treatments[d.alloc[u]])])
    return buf.getvalue()


def dumps(obj) -> str:
    """Canonical JSON text (sorted keys, two-space indent, trailing newline)."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def write_text(path, text: str):
    Path(path).write_text(text, encoding="utf-8")


def read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None


def load_design(path) -> Design:
    return design_from_json(read_json(path))
