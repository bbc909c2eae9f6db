"""JSON formats for rings, complexes and loops, with schema validation.

All dumps use sorted keys and fixed array orderings so repeated runs are
byte-identical; global generator coordinates always refer to the canonical
generator order (sorted by (index, name)), which loaders enforce.
"""

from __future__ import annotations

import json
from importlib import resources
from typing import Any

import jsonschema
import numpy as np

from .errors import InputError, ShapeMismatch
from .f2linalg import F2Matrix
from .floercomplex import FloerComplex, Generator, MorseComplex, assemble
from .gradedalg import BasisElement, GradedRing
from .maslov import LagrangianLoop

_SCHEMAS: dict[str, Any] = {}


def _schema(name: str) -> dict:
    if name not in _SCHEMAS:
        text = resources.files("floeralg.schemas").joinpath(f"{name}.schema.json") \
            .read_text(encoding="utf-8")
        _SCHEMAS[name] = json.loads(text)
    return _SCHEMAS[name]


def validate_against_schema(data: Any, name: str) -> None:
    try:
        jsonschema.validate(data, _schema(name))
    except jsonschema.ValidationError as exc:
        path = "/".join(str(p) for p in exc.absolute_path) or "(root)"
        raise InputError(f"{name} JSON invalid at {path}: {exc.message}") from exc


def canonical_json(data: Any) -> str:
    """Deterministic serialization: sorted keys, fixed separators, newline."""
    return json.dumps(data, sort_keys=True, indent=2, separators=(",", ": ")) + "\n"


# -- rings ---------------------------------------------------------------


def ring_to_dict(ring: GradedRing) -> dict:
    return {
        "basis": [{"name": b.name, "degree": b.degree} for b in ring.basis],
        "unit": ring.unit,
        "mult": [[i, j, sorted(ks)] for (i, j), ks in sorted(ring.mult.items())],
    }


def ring_from_dict(data: dict, label: str = "ring") -> GradedRing:
    validate_against_schema(data, "ring")
    basis = [BasisElement(b["name"], b["degree"]) for b in data["basis"]]
    dim = len(basis)
    if not (0 <= data["unit"] < dim):
        raise InputError("unit index out of range")
    mult = {}
    for entry in data["mult"]:
        i, j, ks = entry
        if not (0 <= i < dim and 0 <= j < dim and all(0 <= k < dim for k in ks)):
            raise InputError(f"mult entry {entry} has out-of-range indices")
        if (i, j) in mult:
            raise InputError(f"duplicate mult entry for pair ({i}, {j})")
        if ks:
            mult[(i, j)] = tuple(sorted(ks))
    try:
        return GradedRing(basis, data["unit"], mult, label=label)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# -- complexes ---------------------------------------------------------------


def complex_to_dict(fc: FloerComplex) -> dict:
    gens = fc.morse.generators
    positions = {m: fc.morse.degree_positions(m) for m in range(fc.dimL + 1)}

    operators: dict[str, list[list[int]]] = {}
    for k in sorted(fc.ops):
        entries = []
        for m in sorted(fc.ops[k]):
            t = m + 1 - k * fc.NL
            if not (0 <= t <= fc.dimL):
                continue
            mat = fc.ops[k][m]
            for (i, j) in mat.entries():
                entries.append([positions[t][i], positions[m][j]])
        if entries or k == 0:
            operators[str(k)] = sorted(entries)

    out = {
        "dimL": fc.dimL,
        "NL": fc.NL,
        "generators": [{"name": g.name, "index": g.index} for g in gens],
        "operators": operators,
    }
    if fc.products is not None:
        products: dict[str, list[list[int]]] = {}
        for l in sorted(fc.products):
            triples = []
            for (i, j), ks in fc.products[l].items():
                triples.extend([i, j, k] for k in ks)
            products[str(l)] = sorted(triples)
        out["products"] = products
    return out


def complex_from_dict(data: dict) -> FloerComplex:
    validate_against_schema(data, "complex")
    dimL, NL = data["dimL"], data["NL"]
    gens = [Generator(g["name"], g["index"]) for g in data["generators"]]
    canonical = sorted(gens, key=lambda g: (g.index, g.name))
    if gens != canonical:
        raise InputError("generators must be listed in canonical order, "
                         "sorted by (index, name)")
    morse = MorseComplex(gens, dimL)
    positions = {m: morse.degree_positions(m) for m in range(dimL + 1)}
    local = {}
    for m, ps in positions.items():
        for loc, p in enumerate(ps):
            local[p] = (m, loc)

    op_tables: dict[int, dict[int, list[tuple[int, int]]]] = {}
    boundary_entries: dict[int, list[tuple[int, int]]] = {}
    for key, entries in data["operators"].items():
        k = int(key)
        seen = set()
        for row, col in entries:
            if row >= len(gens) or col >= len(gens):
                raise InputError(f"operator {k} entry ({row}, {col}) out of range")
            if (row, col) in seen:
                raise InputError(f"operator {k} lists entry ({row}, {col}) twice")
            seen.add((row, col))
            tm, ti = local[row]
            sm, si = local[col]
            if tm != sm + 1 - k * NL:
                raise ShapeMismatch(
                    f"op_{k} entry {gens[col].name} -> {gens[row].name} has "
                    f"degree shift {tm - sm}, expected {1 - k * NL}")
            if k == 0:
                boundary_entries.setdefault(sm, []).append((ti, si))
            else:
                op_tables.setdefault(k, {}).setdefault(sm, []).append((ti, si))

    boundary = {
        m: F2Matrix.from_entries(morse.dim_at(m + 1), morse.dim_at(m), pairs)
        for m, pairs in boundary_entries.items()
    }
    morse = MorseComplex(gens, dimL, boundary)
    ops = {
        k: {m: F2Matrix.from_entries(morse.dim_at(m + 1 - k * NL),
                                     morse.dim_at(m), pairs)
            for m, pairs in per.items()}
        for k, per in op_tables.items()
    }

    products = None
    if "products" in data:
        products = {}
        for key, triples in data["products"].items():
            table: dict[tuple[int, int], set] = {}
            seen = set()
            for i, j, k in triples:
                if max(i, j, k) >= len(gens):
                    raise InputError(f"product entry ({i}, {j}, {k}) out of range")
                if (i, j, k) in seen:
                    raise InputError(f"product table {key} lists entry "
                                     f"({i}, {j}, {k}) twice")
                seen.add((i, j, k))
                table.setdefault((i, j), set()).add(k)
            products[int(key)] = {pair: frozenset(ks) for pair, ks in table.items()}

    return assemble(morse, NL, ops, products)


# -- loops ------------------------------------------------------------------


def loop_to_dict(loop: LagrangianLoop) -> dict:
    return {
        "n": loop.n,
        "samples": [[[[float(z.real), float(z.imag)] for z in row] for row in frame]
                    for frame in loop.samples],
    }


def loop_from_dict(data: dict) -> LagrangianLoop:
    validate_against_schema(data, "loop")
    n = data["n"]
    frames = []
    for t, frame in enumerate(data["samples"]):
        if len(frame) != n or any(len(row) != n for row in frame):
            raise InputError(f"sample {t} is not an {n} x {n} frame")
        frames.append(np.array([[complex(re, im) for re, im in row]
                                for row in frame], dtype=np.complex128))
    return LagrangianLoop.from_frames(frames)


def load_json(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc
