"""T-periodic Floer-type complexes over F2.

A complex is a Morse-graded F2 space together with operators
``op_k : C^m -> C^(m+1-k*NL)`` for ``k = 0..nu``, ``nu = (dimL+1) // NL``.
The full Laurent-coefficient complex never needs to be materialized: the
coefficient ring acts invertibly, so the complex is determined by the graded
space and the operator family, and its homology is computed on the fold by
degree residue mod NL. Optional product tables ``m_l`` of degree
``-l*NL`` equip the complex with a filtered product.

Operator and product tables are always inputs, synthetic or user-supplied;
nothing here counts holomorphic objects.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from . import f2linalg
from .errors import (
    NotADifferential,
    ProductsAbsent,
    ShapeMismatch,
)
from .f2linalg import F2Matrix
from .gradedalg import Derivation, GradedRing

MAX_TOTAL_DIM = 64


@dataclass(frozen=True)
class Generator:
    name: str
    index: int


class MorseComplex:
    """Morse cochain complex: named critical points and a degree +1 boundary.

    Generators are kept in canonical order, sorted by (index, name); all
    per-degree coordinates refer to that order.
    """

    def __init__(self, generators: Sequence[Generator], dimL: int,
                 boundary: Optional[Mapping[int, F2Matrix]] = None):
        self.generators = tuple(sorted(generators, key=lambda g: (g.index, g.name)))
        self.dimL = dimL
        names = [g.name for g in self.generators]
        if len(set(names)) != len(names):
            raise ShapeMismatch("duplicate generator names")
        if any(not (0 <= g.index <= dimL) for g in self.generators):
            raise ShapeMismatch("generator index outside [0, dimL]")
        self._by_degree: dict[int, tuple[int, ...]] = {}
        for pos, g in enumerate(self.generators):
            self._by_degree.setdefault(g.index, ())
            self._by_degree[g.index] += (pos,)
        self.boundary: dict[int, F2Matrix] = {}
        boundary = dict(boundary or {})
        for m in range(dimL + 1):
            mat = boundary.pop(m, None)
            shape = (self.dim_at(m + 1), self.dim_at(m))
            if mat is None:
                mat = F2Matrix.zeros(*shape)
            if (mat.rows, mat.cols) != shape:
                raise ShapeMismatch(f"boundary at degree {m} has shape "
                                    f"{(mat.rows, mat.cols)}, expected {shape}")
            self.boundary[m] = mat
        if boundary:
            raise ShapeMismatch(f"boundary given at invalid degrees {sorted(boundary)}")
        for m in range(dimL - 1):
            comp = self.boundary[m + 1] @ self.boundary[m]
            if not comp.is_zero():
                raise NotADifferential(f"Morse boundary does not square to zero "
                                       f"at degree {m}")

    def dim_at(self, m: int) -> int:
        return len(self._by_degree.get(m, ()))

    def dims(self) -> list[int]:
        return [self.dim_at(m) for m in range(self.dimL + 1)]

    def degree_positions(self, m: int) -> tuple[int, ...]:
        return self._by_degree.get(m, ())

    def position_of(self, name: str) -> int:
        for pos, g in enumerate(self.generators):
            if g.name == name:
                return pos
        raise KeyError(name)


class FloerComplex:
    """Validated complex: Morse data, minimal Maslov number, operator family.

    Use :func:`assemble` to construct one; the constructor assumes shapes
    were already checked.
    """

    def __init__(self, morse: MorseComplex, NL: int,
                 ops: dict[int, dict[int, F2Matrix]],
                 products: Optional[dict[int, dict[tuple[int, int], frozenset]]] = None):
        self.morse = morse
        self.NL = NL
        self.nu = (morse.dimL + 1) // NL
        self.ops = ops
        self.products = products

    @property
    def dimL(self) -> int:
        return self.morse.dimL

    @property
    def products_bound(self) -> int:
        return (2 * self.dimL) // self.NL

    def operator(self, k: int, m: int) -> F2Matrix:
        """Matrix of op_k on C^m (zero matrix when absent or out of range)."""
        t = m + 1 - k * self.NL
        tgt = self.morse.dim_at(t) if 0 <= t <= self.dimL else 0
        src = self.morse.dim_at(m) if 0 <= m <= self.dimL else 0
        mat = self.ops.get(k, {}).get(m)
        return mat if mat is not None else F2Matrix.zeros(tgt, src)

    # -- chains ------------------------------------------------------------

    def chain_from_names(self, *names: str) -> frozenset:
        out: frozenset = frozenset()
        for n in names:
            out ^= frozenset({self.morse.position_of(n)})
        return out

    def chain_to_vec(self, chain: frozenset, m: int) -> int:
        pos = {g: p for p, g in enumerate(self.morse.degree_positions(m))}
        v = 0
        for g in chain:
            v |= 1 << pos[g]
        return v

    def vec_to_chain(self, vec: int, m: int) -> frozenset:
        idx = self.morse.degree_positions(m)
        return frozenset(idx[p] for p in range(len(idx)) if (vec >> p) & 1)

    def apply_operator(self, k: int, chain: frozenset) -> frozenset:
        """op_k applied degree-wise to an arbitrary chain."""
        out: frozenset = frozenset()
        by_degree: dict[int, frozenset] = {}
        for g in chain:
            m = self.morse.generators[g].index
            by_degree[m] = by_degree.get(m, frozenset()) ^ frozenset({g})
        for m, part in by_degree.items():
            t = m + 1 - k * self.NL
            if not (0 <= t <= self.dimL):
                continue
            img = self.operator(k, m).mul_vec(self.chain_to_vec(part, m))
            out ^= self.vec_to_chain(img, t)
        return out

    def apply_product(self, l: int, a: frozenset, b: frozenset) -> frozenset:
        if self.products is None:
            raise ProductsAbsent("complex has no product tables")
        table = self.products.get(l, {})
        out: frozenset = frozenset()
        for i in a:
            for j in b:
                out ^= table.get((i, j), frozenset())
        return out


def assemble(morse: MorseComplex, NL: int,
             op_tables: Mapping[int, Mapping[int, F2Matrix]],
             products: Optional[Mapping[int, Mapping[tuple[int, int], Iterable[int]]]] = None,
             ) -> FloerComplex:
    """Validate operator (and optional product) tables into a FloerComplex.

    ``op_tables`` supplies op_1..op_nu (op_0 comes from the Morse boundary);
    missing entries mean zero. Wrong degree shifts raise ShapeMismatch, and
    a family whose total differential does not square to zero raises
    NotADifferential naming the first failing convolution index and a
    witness generator.
    """
    if NL < 2:
        raise ShapeMismatch(f"NL must be >= 2, got {NL}")
    nu = (morse.dimL + 1) // NL
    ops: dict[int, dict[int, F2Matrix]] = {0: dict(morse.boundary)}
    for k, per_degree in op_tables.items():
        if k < 1 or k > nu:
            raise ShapeMismatch(f"operator index {k} outside 1..nu={nu}")
        ops[k] = {}
        for m, mat in per_degree.items():
            t = m + 1 - k * NL
            if not (0 <= m <= morse.dimL) or not (0 <= t <= morse.dimL):
                if not mat.is_zero():
                    raise ShapeMismatch(f"op_{k} at degree {m} maps outside the "
                                        f"grading range")
                continue
            shape = (morse.dim_at(t), morse.dim_at(m))
            if (mat.rows, mat.cols) != shape:
                raise ShapeMismatch(f"op_{k} at degree {m} has shape "
                                    f"{(mat.rows, mat.cols)}, expected {shape}")
            ops[k][m] = mat

    prod_tables = None
    if products is not None:
        bound = (2 * morse.dimL) // NL
        prod_tables = {}
        for l, table in products.items():
            if l < 0 or l > bound:
                raise ShapeMismatch(f"product index {l} outside 0..{bound}")
            checked: dict[tuple[int, int], frozenset] = {}
            for (i, j), ks in table.items():
                val = frozenset(ks)
                if not val:
                    continue
                want = (morse.generators[i].index + morse.generators[j].index
                        - l * NL)
                if any(morse.generators[k].index != want for k in val):
                    raise ShapeMismatch(f"m_{l}({morse.generators[i].name}, "
                                        f"{morse.generators[j].name}) has entries "
                                        f"of wrong degree")
                checked[(i, j)] = val
            prod_tables[l] = checked

    fc = FloerComplex(morse, NL, ops, prod_tables)
    report = check_d_squared(fc)
    if not report.ok:
        l, name = report.first_failure
        raise NotADifferential(f"convolution identity fails at l={l}, witness "
                               f"generator {name}")
    return fc


@dataclass(frozen=True)
class D2Entry:
    l: int
    ok: bool
    witness: Optional[str]


@dataclass(frozen=True)
class D2Report:
    entries: tuple[D2Entry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def first_failure(self) -> tuple[int, str]:
        e = next(e for e in self.entries if not e.ok)
        return e.l, e.witness


def check_d_squared(fc: FloerComplex) -> D2Report:
    """Per-l verdicts for the convolution identities sum(op_i op_j) = 0."""
    entries = []
    for l in range(2 * fc.nu + 1):
        witness = None
        for m in range(fc.dimL + 1):
            t = m + 2 - l * fc.NL
            if not (0 <= t <= fc.dimL) or fc.morse.dim_at(m) == 0:
                continue
            acc = F2Matrix.zeros(fc.morse.dim_at(t), fc.morse.dim_at(m))
            for i in range(l + 1):
                j = l - i
                mid = m + 1 - j * fc.NL
                if not (0 <= mid <= fc.dimL):
                    continue
                acc = acc + fc.operator(i, mid) @ fc.operator(j, m)
            if not acc.is_zero():
                col = next(c for c in range(acc.cols)
                           if any(acc.get(r, c) for r in range(acc.rows)))
                witness = fc.morse.generators[fc.morse.degree_positions(m)[col]].name
                break
        entries.append(D2Entry(l, witness is None, witness))
    return D2Report(tuple(entries))


@dataclass(frozen=True)
class GradingSummand:
    morse_degree: int
    t_power: int
    dim: int


def grading_decomposition(fc: FloerComplex, l: int, window: int) -> list[GradingSummand]:
    """Nonzero summands of the degree-l graded piece over T-powers in the window."""
    out = []
    for k in range(-window, window + 1):
        m = l - k * fc.NL
        if 0 <= m <= fc.dimL and fc.morse.dim_at(m) > 0:
            out.append(GradingSummand(m, k, fc.morse.dim_at(m)))
    return out


def folded_homology(fc: FloerComplex) -> dict[int, int]:
    """F2 dimensions of the homology of the fold, one per residue mod NL.

    The fold groups Morse degrees by residue; the total operator sum is a
    differential on it, and its homology at residue ``l`` equals the
    homology of the full Laurent complex in any degree congruent to ``l``.
    """
    report = check_d_squared(fc)
    if not report.ok:
        l, name = report.first_failure
        raise NotADifferential(f"convolution identity fails at l={l}, witness "
                               f"generator {name}")
    N = fc.NL
    degrees = {r: [m for m in range(fc.dimL + 1) if m % N == r] for r in range(N)}
    offsets = {}
    sizes = {}
    for r, ms in degrees.items():
        off, acc = {}, 0
        for m in ms:
            off[m] = acc
            acc += fc.morse.dim_at(m)
        offsets[r] = off
        sizes[r] = acc

    def folded_matrix(r: int) -> F2Matrix:
        r_out = (r + 1) % N
        entries = []
        for m in degrees[r]:
            for k in range(fc.nu + 1):
                t = m + 1 - k * N
                if not (0 <= t <= fc.dimL):
                    continue
                mat = fc.operator(k, m)
                for (i, j) in mat.entries():
                    entries.append((offsets[r_out][t] + i, offsets[r][m] + j))
        return F2Matrix.from_entries(sizes[r_out], sizes[r], entries)

    ranks = {r: f2linalg.rank(folded_matrix(r)) for r in range(N)}
    return {r: sizes[r] - ranks[r] - ranks[(r - 1) % N] for r in range(N)}


@dataclass(frozen=True)
class FilteredElement:
    """Finite F2 sum of (chain, T-power) terms, canonically ordered."""

    terms: tuple[tuple[frozenset, int], ...]

    @classmethod
    def make(cls, terms: Iterable[tuple[frozenset, int]]) -> "FilteredElement":
        acc: dict[int, frozenset] = {}
        for chain, p in terms:
            acc[p] = acc.get(p, frozenset()) ^ chain
        return cls(tuple((acc[p], p) for p in sorted(acc) if acc[p]))

    @property
    def filtration(self) -> Optional[int]:
        return self.terms[0][1] if self.terms else None

    def is_zero(self) -> bool:
        return not self.terms

    def homogeneous_degree(self, fc: "FloerComplex") -> Optional[int]:
        """Common total degree (Morse degree + power * NL), None if mixed."""
        degrees = {fc.morse.generators[g].index + p * fc.NL
                   for chain, p in self.terms for g in chain}
        return degrees.pop() if len(degrees) == 1 else None


def star_product(fc: FloerComplex, a: FilteredElement, b: FilteredElement
                 ) -> FilteredElement:
    """Bilinear product sum_l m_l(x, y) T^(p+p'+l); filtration levels add."""
    if fc.products is None:
        raise ProductsAbsent("complex has no product tables")
    out: list[tuple[frozenset, int]] = []
    for ca, pa in a.terms:
        for cb, pb in b.terms:
            for l in range(fc.products_bound + 1):
                val = fc.apply_product(l, ca, cb)
                if val:
                    out.append((val, pa + pb + l))
    return FilteredElement.make(out)


@dataclass(frozen=True)
class LeibnizEntry:
    l: int
    ok: bool
    witness: Optional[tuple[str, str]]


@dataclass(frozen=True)
class LeibnizReport:
    entries: tuple[LeibnizEntry, ...]

    @property
    def ok(self) -> bool:
        return all(e.ok for e in self.entries)

    @property
    def first_failure(self) -> tuple[int, tuple[str, str]]:
        e = next(e for e in self.entries if not e.ok)
        return e.l, e.witness


def check_product_leibniz(fc: FloerComplex) -> LeibnizReport:
    """Convolution Leibniz identity, per index l and per generator pair.

    For every l: sum over i+j=l of op_j(m_i(x,y)) must equal
    m_i(op_j x, y) + m_i(x, op_j y) summed the same way.
    """
    if fc.products is None:
        raise ProductsAbsent("complex has no product tables")
    gens = range(len(fc.morse.generators))
    entries = []
    for l in range(fc.products_bound + fc.nu + 1):
        witness = None
        for x in gens:
            for y in gens:
                cx, cy = frozenset({x}), frozenset({y})
                lhs: frozenset = frozenset()
                rhs: frozenset = frozenset()
                for i in range(l + 1):
                    j = l - i
                    lhs ^= fc.apply_operator(j, fc.apply_product(i, cx, cy))
                    rhs ^= fc.apply_product(i, fc.apply_operator(j, cx), cy)
                    rhs ^= fc.apply_product(i, cx, fc.apply_operator(j, cy))
                if lhs != rhs:
                    witness = (fc.morse.generators[x].name, fc.morse.generators[y].name)
                    break
            if witness:
                break
        entries.append(LeibnizEntry(l, witness is None, witness))
    return LeibnizReport(tuple(entries))


# -- synthetic complexes ------------------------------------------------------


def _random_invertible(rng: random.Random, n: int) -> F2Matrix:
    if n == 0:
        return F2Matrix.zeros(0, 0)
    while True:
        m = F2Matrix.from_row_ints([rng.getrandbits(n) for _ in range(n)], n)
        if f2linalg.rank(m) == n:
            return m


def _random_matrix(rng: random.Random, rows: int, cols: int) -> F2Matrix:
    return F2Matrix.from_row_ints([rng.getrandbits(cols) for _ in range(rows)], cols)


def random_complex_census(seed: int, dims: Sequence[int], NL: int
                          ) -> tuple[FloerComplex, dict[int, int]]:
    """Deterministic pseudo-random valid complex plus its expected homology.

    Builds a direct sum of elementary two-term complexes in mixed T-degrees
    (each pair is one op_k arrow between otherwise untouched generators),
    then conjugates by a random filtration-preserving change of basis. The
    second return value gives the folded homology dims predicted by the
    pairing bookkeeping: one class per unpaired generator.
    """
    if sum(dims) > MAX_TOTAL_DIM:
        raise ShapeMismatch(f"total dimension {sum(dims)} exceeds {MAX_TOTAL_DIM}")
    if NL < 2:
        raise ShapeMismatch("NL must be >= 2")
    rng = random.Random(seed)
    dimL = len(dims) - 1
    nu = (dimL + 1) // NL

    generators = [Generator(f"c{m}_{i:02d}", m)
                  for m in range(dimL + 1) for i in range(dims[m])]
    unused = {m: list(range(dims[m])) for m in range(dimL + 1)}
    base: dict[int, dict[int, list[tuple[int, int]]]] = {k: {} for k in range(nu + 1)}
    options = [(k, m) for k in range(nu + 1) for m in range(dimL + 1)
               if 0 <= m + 1 - k * NL <= dimL]
    rng.shuffle(options)
    for k, m in options:
        t = m + 1 - k * NL
        while unused[m] and unused[t] and rng.random() < 0.6:
            src = unused[m].pop(rng.randrange(len(unused[m])))
            tgt = unused[t].pop(rng.randrange(len(unused[t])))
            base[k].setdefault(m, []).append((tgt, src))

    expected = {r: 0 for r in range(NL)}
    for m in range(dimL + 1):
        expected[m % NL] += len(unused[m])

    base_ops = {
        k: {m: F2Matrix.from_entries(dims[m + 1 - k * NL], dims[m], pairs)
            for m, pairs in per.items()}
        for k, per in base.items()
    }

    # filtration-preserving change of basis: invertible block in T-degree 0,
    # arbitrary blocks pushing Morse degree down by k*NL
    phi: dict[int, dict[int, F2Matrix]] = {0: {}, }
    for m in range(dimL + 1):
        phi[0][m] = _random_invertible(rng, dims[m])
    for k in range(1, nu + 1):
        phi[k] = {}
        for m in range(dimL + 1):
            t = m - k * NL
            if 0 <= t <= dimL:
                phi[k][m] = _random_matrix(rng, dims[t], dims[m])

    def phi_at(k: int, m: int) -> Optional[F2Matrix]:
        return phi.get(k, {}).get(m)

    psi: dict[int, dict[int, F2Matrix]] = {0: {m: phi[0][m].inverse()
                                               for m in range(dimL + 1)}}
    for s in range(1, nu + 1):
        psi[s] = {}
        for m in range(dimL + 1):
            t = m - s * NL
            if not (0 <= t <= dimL):
                continue
            acc = F2Matrix.zeros(dims[t], dims[m])
            for k in range(1, s + 1):
                mid = m - (s - k) * NL
                pk = phi_at(k, mid)
                ps = psi.get(s - k, {}).get(m)
                if pk is not None and ps is not None:
                    acc = acc + pk @ ps
            psi[s][m] = psi[0][t] @ acc

    def base_op(j: int, m: int) -> Optional[F2Matrix]:
        t = m + 1 - j * NL
        if not (0 <= m <= dimL and 0 <= t <= dimL):
            return None
        mat = base_ops.get(j, {}).get(m)
        return mat if mat is not None else F2Matrix.zeros(dims[t], dims[m])

    new_ops: dict[int, dict[int, F2Matrix]] = {}
    for l in range(nu + 1):
        per: dict[int, F2Matrix] = {}
        for m in range(dimL + 1):
            t = m + 1 - l * NL
            if not (0 <= t <= dimL):
                continue
            acc = F2Matrix.zeros(dims[t], dims[m])
            for kk in range(l + 1):
                pk = phi_at(kk, m)
                if pk is None:
                    continue
                m1 = m - kk * NL
                for j in range(l - kk + 1):
                    dj = base_op(j, m1)
                    if dj is None:
                        continue
                    i = l - kk - j
                    m2 = m1 + 1 - j * NL
                    pi = psi.get(i, {}).get(m2)
                    if pi is None:
                        continue
                    acc = acc + pi @ (dj @ pk)
            if not acc.is_zero():
                per[m] = acc
        if l == 0:
            boundary = per
        else:
            new_ops[l] = per

    morse = MorseComplex(generators, dimL, boundary)
    fc = assemble(morse, NL, new_ops)
    return fc, expected


def random_valid_complex(seed: int, dims: Sequence[int], NL: int) -> FloerComplex:
    """Deterministic pseudo-random complex with a valid differential."""
    fc, _ = random_complex_census(seed, dims, NL)
    return fc


def complex_from_ring(ring: GradedRing, NL: int,
                      derivation: Optional[Derivation] = None,
                      boundary: Optional[Derivation] = None,
                      with_products: bool = False) -> FloerComplex:
    """Complex on a graded ring's underlying space.

    With no ``boundary`` the Morse boundary is zero (one critical point per
    cohomology class). A shift +1 derivation can be supplied as a nonzero
    Morse boundary, op_1 is the given shift 1 - NL derivation, and, when
    requested, m_0 is the ring multiplication table with all higher product
    tables zero. Derivations keep the product tables Leibniz-consistent.
    """
    dimL = ring.top_degree()
    generators = [Generator(b.name, b.degree) for b in ring.basis]
    morse = MorseComplex(generators, dimL)

    def cpos(ring_idx: int) -> int:
        return morse.position_of(ring.basis[ring_idx].name)

    local = {}
    for m in range(dimL + 1):
        local[m] = {g: p for p, g in enumerate(morse.degree_positions(m))}

    def op_matrices(d: Derivation) -> dict[int, F2Matrix]:
        table: dict[int, list[tuple[int, int]]] = {}
        for g in range(ring.dim):
            m = ring.basis[g].degree
            for h in d.apply(frozenset({g})):
                t = ring.basis[h].degree
                table.setdefault(m, []).append((local[t][cpos(h)], local[m][cpos(g)]))
        return {m: F2Matrix.from_entries(morse.dim_at(m + d.shift),
                                         morse.dim_at(m), pairs)
                for m, pairs in table.items()}

    if boundary is not None:
        if boundary.shift != 1:
            raise ShapeMismatch(f"boundary derivation shift {boundary.shift} "
                                f"is not +1")
        morse = MorseComplex(generators, dimL, op_matrices(boundary))

    op_tables: dict[int, dict[int, F2Matrix]] = {}
    if derivation is not None:
        if derivation.shift != 1 - NL:
            raise ShapeMismatch(f"derivation shift {derivation.shift} does not "
                                f"match 1 - NL = {1 - NL}")
        op_tables[1] = op_matrices(derivation)

    products = None
    if with_products:
        m0: dict[tuple[int, int], frozenset] = {}
        for (i, j), prod in ring.mult.items():
            m0[(cpos(i), cpos(j))] = frozenset(cpos(k) for k in prod)
        products = {0: m0}

    return assemble(morse, NL, op_tables, products)
