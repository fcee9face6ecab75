"""JSON interchange for set functions, transforms and acts.

Subsets are written as sorted lists of 1-based criteria. Capacities, games,
bi-capacities and bipolar capacities are dense (every subset or pair exactly
once); transforms are sparse (absent entries are zero). Floats go through
``json`` which writes the shortest repr, so values round-trip exactly.
"""

import json
from typing import Any, Dict

import numpy as np

from .integrals import CptModel
from .setfn import (
    BiCapacity,
    BiGame,
    BipolarCapacity,
    Capacity,
    Game,
    MAX_N_PAIR,
    check_n,
    members,
    pair_index,
    pair_masks,
    to_mask,
)
from .transforms import CoMobiusRep, InteractionRep, MobiusRep


class FormatError(ValueError):
    """Malformed or inconsistent interchange document."""


_DENSE_SET = {"capacity": Capacity, "game": Game}
_DENSE_PAIR = {"bicapacity": BiCapacity, "bigame": BiGame}
_SPARSE = {"mobius": MobiusRep, "comobius": CoMobiusRep, "interaction": InteractionRep}


def _num(x):
    # fold -0.0 and numpy scalars so output is stable
    x = float(x)
    return 0.0 if x == 0 else x


# ---------------------------------------------------------------------------
# encoding


def to_dict(obj) -> Dict[str, Any]:
    """Encode a package object as a JSON-ready dict."""
    if isinstance(obj, BipolarCapacity):
        pos, neg = pair_masks(obj.n)
        return {
            "kind": "bipolar",
            "n": obj.n,
            "normalized": bool(obj.normalized),
            "values": [
                {"pos": members(int(pos[k])), "neg": members(int(neg[k])),
                 "vplus": _num(obj.plus[k]), "vminus": _num(obj.minus[k])}
                for k in range(3 ** obj.n)
            ],
        }
    if isinstance(obj, BiGame):
        pos, neg = pair_masks(obj.n)
        out = {"kind": "bicapacity" if isinstance(obj, BiCapacity) else "bigame", "n": obj.n}
        if isinstance(obj, BiCapacity):
            out["normalized"] = bool(obj.normalized)
        out["values"] = [
            {"pos": members(int(pos[k])), "neg": members(int(neg[k])), "v": _num(obj.values[k])}
            for k in range(3 ** obj.n)
        ]
        return out
    if isinstance(obj, Game):
        out = {"kind": "capacity" if isinstance(obj, Capacity) else "game", "n": obj.n}
        if isinstance(obj, Capacity):
            out["normalized"] = bool(obj.normalized)
        out["values"] = [{"set": members(k), "v": _num(obj.values[k])} for k in range(1 << obj.n)]
        return out
    for kind, cls in _SPARSE.items():
        if type(obj) is cls:
            entries = []
            if obj.family == "set":
                for k in np.flatnonzero(obj.values):
                    entries.append({"set": members(int(k)), "v": _num(obj.values[k])})
            else:
                pos, neg = pair_masks(obj.n)
                for k in np.flatnonzero(obj.values):
                    entries.append({"pos": members(int(pos[k])), "neg": members(int(neg[k])),
                                    "v": _num(obj.values[k])})
            return {"kind": kind, "family": obj.family, "n": obj.n, "values": entries}
    if isinstance(obj, CptModel):
        return {"kind": "cpt", "n": obj.n, "nu_plus": to_dict(obj.nu_plus), "nu_minus": to_dict(obj.nu_minus)}
    raise TypeError(f"cannot encode {type(obj).__name__}")


def act_to_dict(f) -> Dict[str, Any]:
    return {"f": [_num(x) for x in np.asarray(f, dtype=float)]}


def _format(doc, pad=""):
    # one table entry per line keeps files diffable without ballooning them
    inner = pad + "  "
    parts = []
    for key, val in doc.items():
        if isinstance(val, dict):
            text = _format(val, inner)
        elif key == "values" and val:
            rows = ",\n".join(inner + "  " + json.dumps(e) for e in val)
            text = "[\n" + rows + "\n" + inner + "]"
        else:
            text = json.dumps(val)
        parts.append(f"{inner}{json.dumps(key)}: {text}")
    return "{\n" + ",\n".join(parts) + "\n" + pad + "}"


def dumps(obj) -> str:
    doc = act_to_dict(obj) if isinstance(obj, np.ndarray) else to_dict(obj)
    return _format(doc) + "\n"


# ---------------------------------------------------------------------------
# decoding


def _criteria(entry, key, n):
    raw = entry.get(key, [])
    if not isinstance(raw, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in raw):
        raise FormatError(f"{key!r} must be a list of integers, got {raw!r}")
    if any(i < 1 or i > n for i in raw):
        raise FormatError(f"{key!r} has criteria outside 1..{n}: {raw}")
    if len(set(raw)) != len(raw):
        raise FormatError(f"{key!r} repeats a criterion: {raw}")
    return to_mask(raw)


def _value(entry, key):
    if key not in entry:
        raise FormatError(f"entry {entry!r} lacks {key!r}")
    x = entry[key]
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"{key!r} must be a number, got {x!r}")
    x = float(x)
    if not np.isfinite(x):
        raise FormatError(f"{key!r} must be finite")
    return x


def _n(doc, cap=None):
    n = doc.get("n")
    if isinstance(n, bool) or not isinstance(n, int) or n < 1:
        raise FormatError(f"'n' must be a positive integer, got {n!r}")
    try:
        return check_n(n) if cap is None else check_n(n, cap)
    except ValueError as exc:
        raise FormatError(str(exc)) from exc


def _entries(doc):
    vals = doc.get("values")
    if not isinstance(vals, list) or not all(isinstance(e, dict) for e in vals):
        raise FormatError("'values' must be a list of objects")
    return vals


def _set_table(doc, n, dense):
    table = np.zeros(1 << n)
    seen = np.zeros(1 << n, dtype=bool)
    for e in _entries(doc):
        k = _criteria(e, "set", n)
        if seen[k]:
            raise FormatError(f"subset {members(k)} listed twice")
        seen[k] = True
        table[k] = _value(e, "v")
    if dense and not seen.all():
        missing = members(int(np.flatnonzero(~seen)[0]))
        raise FormatError(f"dense table misses subset {missing}")
    return table


def _pair_tables(doc, n, keys, dense):
    tables = [np.zeros(3 ** n) for _ in keys]
    seen = np.zeros(3 ** n, dtype=bool)
    for e in _entries(doc):
        pos = _criteria(e, "pos", n)
        neg = _criteria(e, "neg", n)
        if pos & neg:
            raise FormatError(f"pos and neg overlap: {members(pos)} / {members(neg)}")
        k = pair_index(n, pos, neg)
        if seen[k]:
            raise FormatError(f"pair ({members(pos)}, {members(neg)}) listed twice")
        seen[k] = True
        for t, key in zip(tables, keys):
            t[k] = _value(e, key)
    if dense and not seen.all():
        pos, neg = pair_masks(n)
        k = int(np.flatnonzero(~seen)[0])
        raise FormatError(f"dense table misses pair ({members(int(pos[k]))}, {members(int(neg[k]))})")
    return tables


def from_dict(doc: Dict[str, Any]):
    """Decode a model document (anything with a ``kind``)."""
    if not isinstance(doc, dict):
        raise FormatError("document must be a JSON object")
    kind = doc.get("kind")
    normalized = doc.get("normalized", False)
    if not isinstance(normalized, bool):
        raise FormatError("'normalized' must be a boolean")
    if kind in _DENSE_SET:
        n = _n(doc)
        table = _set_table(doc, n, dense=True)
        if kind == "capacity":
            return Capacity(n, table, normalized=normalized)
        return Game(n, table)
    if kind in _DENSE_PAIR:
        n = _n(doc, MAX_N_PAIR)
        (table,) = _pair_tables(doc, n, ("v",), dense=True)
        if kind == "bicapacity":
            return BiCapacity(n, table, normalized=normalized)
        return BiGame(n, table)
    if kind == "bipolar":
        n = _n(doc, MAX_N_PAIR)
        plus, minus = _pair_tables(doc, n, ("vplus", "vminus"), dense=True)
        return BipolarCapacity(n, plus, minus, normalized=doc.get("normalized", True))
    if kind in _SPARSE:
        family = doc.get("family", "bi")
        if family == "set":
            n = _n(doc)
            table = _set_table(doc, n, dense=False)
        elif family == "bi":
            n = _n(doc, MAX_N_PAIR)
            (table,) = _pair_tables(doc, n, ("v",), dense=False)
        else:
            raise FormatError(f"'family' must be 'set' or 'bi', got {family!r}")
        return _SPARSE[kind](n, table, family)
    if kind == "cpt":
        plus, minus = doc.get("nu_plus"), doc.get("nu_minus")
        parts = [from_dict(p) for p in (plus, minus)]
        if not all(isinstance(p, Capacity) for p in parts):
            raise FormatError("cpt parts must be capacities")
        if parts[0].n != parts[1].n:
            raise FormatError("cpt parts differ in n")
        return CptModel(*parts)
    if kind is None and "f" in doc:
        raise FormatError("this is an act document, not a model")
    raise FormatError(f"unknown kind {kind!r}")


def act_from_dict(doc) -> np.ndarray:
    if not isinstance(doc, dict) or "f" not in doc:
        raise FormatError("act document must be an object with key 'f'")
    f = doc["f"]
    if not isinstance(f, list) or not f:
        raise FormatError("'f' must be a nonempty list")
    return np.array([_value({"f": x}, "f") for x in f])


def loads(text: str):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise FormatError(f"invalid JSON: {exc}") from exc
    if isinstance(doc, dict) and "kind" not in doc and "f" in doc:
        return act_from_dict(doc)
    return from_dict(doc)


def load(path):
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(obj, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(obj))

