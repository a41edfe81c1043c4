"""JSON (de)serialization of subshift specs with a canonical emitter.

File layout: {"alphabet": [...], "dimension": d, "sided": "two"|"one",
"kind": {...}} with kind-specific payloads; forbidden patterns carry
"offsets" (lists of d integers) and "cells" (symbol tokens); substitution
rules are nested arrays of symbols.
"""

from __future__ import annotations

import hashlib
import json

import numpy as np

from .errors import InputError
from .subshift import (
    SFT,
    Alphabet,
    FullShift,
    Pattern,
    SinglePoint,
    SubshiftSpec,
    Substitution,
)


def spec_to_dict(spec: SubshiftSpec) -> dict:
    ab = spec.alphabet
    kind = spec.kind
    if isinstance(kind, FullShift):
        payload = {"type": "full",
                   "sub_alphabet": [ab[i] for i in sorted(kind.sub_alphabet)]}
    elif isinstance(kind, SinglePoint):
        payload = {"type": "single", "symbol": ab[kind.symbol]}
    elif isinstance(kind, SFT):
        payload = {"type": "sft", "forbidden": [
            {"offsets": [list(o) for o in p.offsets],
             "cells": [ab[v] for v in p.values]}
            for p in kind.forbidden]}
    elif isinstance(kind, Substitution):
        payload = {"type": "substitution",
                   "box_dims": list(kind.box_dims),
                   "rules": {ab[a]: _rule_to_nested(kind.rules[a], ab)
                             for a in range(len(ab))}}
    else:
        raise InputError(f"cannot serialize kind {kind!r}")
    return {"alphabet": list(ab.symbols), "dimension": spec.dimension,
            "sided": spec.sided, "kind": payload}


def _rule_to_nested(rule: Pattern, ab):
    arr = rule.to_array()
    def rec(a):
        if a.ndim == 1:
            return [ab[int(v)] for v in a]
        return [rec(sub) for sub in a]
    return rec(arr)


def spec_from_dict(data: dict) -> SubshiftSpec:
    try:
        ab = Alphabet(data["alphabet"])
        d = int(data["dimension"])
        sided = data.get("sided", "two")
        payload = data["kind"]
        kind_type = payload["type"]
    except (KeyError, TypeError) as exc:
        raise InputError(f"malformed spec file: {exc}")
    if kind_type == "full":
        kind = FullShift(tuple(sorted(ab.index(s) for s in payload["sub_alphabet"])))
    elif kind_type == "single":
        kind = SinglePoint(ab.index(payload["symbol"]))
    elif kind_type == "sft":
        forbidden = []
        for item in payload["forbidden"]:
            offsets = [tuple(o) if isinstance(o, list) else (int(o),)
                       for o in item["offsets"]]
            cells = [ab.index(s) for s in item["cells"]]
            if len(offsets) != len(cells):
                raise InputError("forbidden pattern offsets/cells length mismatch")
            forbidden.append(Pattern(dict(zip(offsets, cells))))
        kind = SFT(tuple(forbidden))
    elif kind_type == "substitution":
        dims = tuple(int(m) for m in payload["box_dims"])
        rules = []
        for sym in ab.symbols:
            try:
                nested = payload["rules"][sym]
            except KeyError:
                raise InputError(f"substitution rule missing for symbol {sym!r}")
            arr = np.array(_nested_to_indices(nested, ab))
            if arr.shape != dims:
                raise InputError(f"rule for {sym!r} has shape {arr.shape}, "
                                 f"declared box is {dims}")
            rules.append(Pattern.from_array(arr))
        kind = Substitution(dims, tuple(rules))
    else:
        raise InputError(f"unknown kind type {kind_type!r}")
    return SubshiftSpec(ab, d, kind, sided=sided)


def _nested_to_indices(nested, ab):
    if isinstance(nested, list):
        return [_nested_to_indices(x, ab) for x in nested]
    return ab.index(nested)


def dumps_canonical(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


def save_spec(spec: SubshiftSpec, path) -> None:
    with open(path, "w") as f:
        f.write(dumps_canonical(spec_to_dict(spec)))


def load_spec(path) -> SubshiftSpec:
    with open(path) as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as exc:
            raise InputError(f"spec file is not valid JSON: {exc}")
    return spec_from_dict(data)


def spec_file_hash(path) -> str:
    with open(path, "rb") as f:
        return hashlib.sha256(f.read()).hexdigest()
