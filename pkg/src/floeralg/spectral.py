"""Page-by-page spectral sequence of the T-power filtration.

Everything is computed in the reduced T-periodic model indexed by Morse
degree m: the page-r space at m is a quotient V_r(m) = Z_r(m) / B_r(m) of
nested subspaces of C^m, and the bigraded page is V_r(m) tensored with the
T-power line. Membership of x in Z_r(m) is witnessed by a zig-zag tail
y_1..y_(r-1) (y_s in C^(m - s*NL)) solving

    sum_{k=0..s} op_k y_(s-k) = 0   for s = 1..r-1,   y_0 = x,

and the page differential is the class of the next obstruction
o_r = sum_{k=1..r} op_k y_(r-k). Spanning vectors of B_r(m) carry antecedent
chains w_0..w_(r-1) with b = sum_{i+k=r-1} op_k w_i, which is exactly what
is needed to repair a tail when extending a cycle one page deeper.

Pages collapse at nu + 1 for degree reasons: op-degree bookkeeping pushes
every later differential into negative Morse degrees. Convergence is
checked per residue against the folded homology and against a truncated
Laurent-window oracle that builds the honest bigraded complex.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Optional

from . import f2linalg
from .errors import LeibnizFailure, LiftFailure, ProductsAbsent
from .f2linalg import F2Matrix, QuotientMap, Subspace
from .floercomplex import FloerComplex, check_product_leibniz, folded_homology


@dataclass(frozen=True)
class ZGen:
    """Cycle representative with its zig-zag tail (y_1..y_(r-1))."""
    vec: int
    tail: tuple[int, ...]


@dataclass(frozen=True)
class BGen:
    """Boundary spanning vector with its antecedent chain (w_0..w_(r-1))."""
    vec: int
    chain: tuple[int, ...]


@dataclass(frozen=True)
class PageDegree:
    z_basis: tuple[ZGen, ...]
    b_span: tuple[BGen, ...]
    z_space: Subspace
    b_space: Subspace
    quotient: QuotientMap


@dataclass(frozen=True)
class SpectralPage:
    fc: FloerComplex
    r: int
    data: dict[int, PageDegree]
    delta: dict[int, F2Matrix]
    product: Optional[dict[tuple[int, int], list[list[int]]]] = None

    def dim(self, m: int) -> int:
        return self.data[m].quotient.dim if m in self.data else 0

    def dims(self) -> list[int]:
        return [self.dim(m) for m in range(self.fc.dimL + 1)]

    def reps(self, m: int) -> tuple[int, ...]:
        return self.data[m].quotient.reps.basis

    def delta_matrix(self, m: int) -> F2Matrix:
        if m in self.delta:
            return self.delta[m]
        t = m + 1 - self.r * self.fc.NL
        return F2Matrix.zeros(self.dim(t), self.dim(m))

    def class_coords(self, m: int, vec: int) -> int:
        """Coordinates of the page class of a cycle vector in degree m."""
        return self.data[m].quotient.coords(vec)

    def is_collapsed(self) -> bool:
        return all(mat.is_zero() for mat in self.delta.values())


def _column_matrix(cols: list[int], ambient: int) -> F2Matrix:
    return F2Matrix.from_row_ints(cols, ambient).transpose()


def _obstruction(fc: FloerComplex, r: int, m: int, vec: int,
                 tail: tuple[int, ...]) -> int:
    """Next zig-zag obstruction of a depth-r cycle (lands in degree m+1-r*NL)."""
    if r == 0:
        return fc.operator(0, m).mul_vec(vec)
    out = 0
    for k in range(1, r + 1):
        s = r - k
        y = vec if s == 0 else tail[s - 1]
        out ^= fc.operator(k, m - s * fc.NL).mul_vec(y)
    return out


def _tail_freedom(fc: FloerComplex, m: int, depth: int) -> tuple[int, ...]:
    """One nonzero homogeneous tail (t_1..t_depth) with zero leading term, if any.

    Solves the joint zig-zag system with y_0 = 0; used by the paranoid mode
    to produce a genuinely different second lift.
    """
    N = fc.NL
    slot_dims = [fc.morse.dim_at(m - s * N) if 0 <= m - s * N <= fc.dimL else 0
                 for s in range(1, depth + 1)]
    total = sum(slot_dims)
    if total == 0:
        return ()
    offsets = []
    acc = 0
    for d in slot_dims:
        offsets.append(acc)
        acc += d
    entries = []
    row_off = 0
    for s in range(1, depth + 1):
        t = m + 1 - s * N
        rows = fc.morse.dim_at(t) if 0 <= t <= fc.dimL else 0
        for j in range(1, s + 1):
            mat = fc.operator(s - j, m - j * N)
            for (i, c) in mat.entries():
                entries.append((row_off + i, offsets[j - 1] + c))
        row_off += rows
    system = F2Matrix.from_entries(row_off, total, entries)
    ker = f2linalg.kernel(system)
    if ker.dim == 0:
        return ()
    v = ker.basis[0]
    return tuple((v >> offsets[s]) & ((1 << slot_dims[s]) - 1) if slot_dims[s] else 0
                 for s in range(depth))


def _resolve_in_z(deg: PageDegree, m_dim: int, vec: int) -> tuple[int, ...]:
    """Tail of a vector of the Z-span, combined linearly from the basis tails."""
    zmat = _column_matrix([g.vec for g in deg.z_basis], m_dim)
    coeff = f2linalg.solve(zmat, vec)
    if coeff is None:
        raise LiftFailure("vector claimed in Z-span has no expression there")
    depth = len(deg.z_basis[0].tail) if deg.z_basis else 0
    tail = [0] * depth
    c = coeff
    while c:
        low = c & -c
        g = deg.z_basis[low.bit_length() - 1]
        for s in range(depth):
            tail[s] ^= g.tail[s]
        c ^= low
    return tuple(tail)


def page0(fc: FloerComplex) -> SpectralPage:
    """Page 0: V_0(m) = C^m with the Morse boundary as differential."""
    data = {}
    for m in range(fc.dimL + 1):
        n = fc.morse.dim_at(m)
        z = tuple(ZGen(1 << i, ()) for i in range(n))
        zsp = Subspace.full(n)
        bsp = Subspace.zero(n)
        data[m] = PageDegree(z, (), zsp, bsp, f2linalg.quotient_map(bsp, zsp))
    delta = _compute_delta(fc, 0, data)
    return SpectralPage(fc, 0, data, delta)


def _compute_delta(fc: FloerComplex, r: int, data: dict[int, PageDegree]
                   ) -> dict[int, F2Matrix]:
    delta: dict[int, F2Matrix] = {}
    for m in range(fc.dimL + 1):
        t = m + 1 - r * fc.NL
        t_in_range = 0 <= t <= fc.dimL
        tgt_dim = data[t].quotient.dim if t_in_range else 0
        cols = []
        for q in data[m].quotient.reps.basis:
            tail = _resolve_in_z(data[m], fc.morse.dim_at(m), q)
            obs = _obstruction(fc, r, m, q, tail)
            if not t_in_range:
                if obs:
                    raise LiftFailure(f"page {r} differential escapes the grading "
                                      f"range at degree {m}")
                cols.append(0)
            else:
                try:
                    cols.append(data[t].quotient.coords(obs))
                except ValueError as exc:
                    raise LiftFailure(f"page {r} obstruction at degree {m} leaves "
                                      f"the cycle space") from exc
        delta[m] = _column_matrix(cols, tgt_dim)
    _assert_delta_squares(fc, r, data, delta)
    return delta


def _assert_delta_squares(fc: FloerComplex, r: int, data: dict[int, PageDegree],
                          delta: dict[int, F2Matrix]) -> None:
    for m in range(fc.dimL + 1):
        t = m + 1 - r * fc.NL
        if not (0 <= t <= fc.dimL):
            continue
        comp = delta[t] @ delta[m]
        if not comp.is_zero():
            raise LiftFailure(f"page {r} differential does not square to zero "
                              f"at degree {m}")


def _second_lift_check(fc: FloerComplex, r: int, data: dict[int, PageDegree],
                       delta: dict[int, F2Matrix]) -> None:
    """Recompute the differential with independent lifts and compare classes.

    Representatives are perturbed by a boundary generator and tails by a
    homogeneous zig-zag solution, which covers both choices the canonical
    computation makes.
    """
    for m in range(fc.dimL + 1):
        t = m + 1 - r * fc.NL
        if not (0 <= t <= fc.dimL) or data[m].quotient.dim == 0:
            continue
        freedom = _tail_freedom(fc, m, max(r - 1, 0))
        for idx, q in enumerate(data[m].quotient.reps.basis):
            q2 = q ^ (data[m].b_span[0].vec if data[m].b_span else 0)
            tail = _resolve_in_z(data[m], fc.morse.dim_at(m), q2)
            if freedom:
                tail = tuple(a ^ b for a, b in zip(tail, freedom))
            obs = _obstruction(fc, r, m, q2, tail)
            try:
                coords = data[t].quotient.coords(obs)
            except ValueError as exc:
                raise LiftFailure("second lift left the cycle space") from exc
            expected = 0
            col = delta[m]
            for row in range(col.rows):
                if col.get(row, idx):
                    expected |= 1 << row
            if coords != expected:
                raise LiftFailure(f"page {r} differential depends on the lift "
                                  f"at degree {m}")


def turn_page(page: SpectralPage, paranoid: bool = True) -> SpectralPage:
    """Compute page r+1 from page r with fresh representative lifts."""
    fc = page.fc
    r = page.r
    N = fc.NL
    new_data: dict[int, PageDegree] = {}
    for m in range(fc.dimL + 1):
        m_dim = fc.morse.dim_at(m)
        deg = page.data[m]
        t = m + 1 - r * N
        tgt = page.data[t] if 0 <= t <= fc.dimL else None

        obs_vecs = [_obstruction(fc, r, m, g.vec, g.tail) for g in deg.z_basis]
        if tgt is None:
            if any(obs_vecs):
                raise LiftFailure(f"obstruction escapes the grading range at "
                                  f"degree {m}")
            coeff_kernel = Subspace.full(len(deg.z_basis))
        else:
            cols = []
            for o in obs_vecs:
                try:
                    cols.append(tgt.quotient.coords(o))
                except ValueError as exc:
                    raise LiftFailure(f"page {r} obstruction at degree {m} "
                                      f"leaves the cycle space") from exc
            coeff_kernel = f2linalg.kernel(_column_matrix(cols, tgt.quotient.dim))

        new_z = []
        for combo in coeff_kernel.basis:
            vec = 0
            tail = [0] * max(r - 1, 0)
            obs = 0
            c = combo
            while c:
                low = c & -c
                g = deg.z_basis[low.bit_length() - 1]
                vec ^= g.vec
                for s in range(r - 1):
                    tail[s] ^= g.tail[s]
                obs ^= obs_vecs[low.bit_length() - 1]
                c ^= low
            if r >= 1:
                tail = tail + [0]  # slot for y_r
            if tgt is not None and obs:
                bmat = _column_matrix([b.vec for b in tgt.b_span],
                                      fc.morse.dim_at(t))
                coeff = f2linalg.solve(bmat, obs)
                if coeff is None:
                    raise LiftFailure(f"obstruction at degree {m} is not a "
                                      f"boundary despite vanishing class")
                cc = coeff
                while cc:
                    low = cc & -cc
                    chain = tgt.b_span[low.bit_length() - 1].chain
                    for s in range(1, r + 1):
                        tail[s - 1] ^= chain[s - 1]
                    cc ^= low
            new_z.append(ZGen(vec, tuple(tail)))

        shifted = [BGen(b.vec, (0,) + b.chain) for b in deg.b_span]
        sigma = m - 1 + r * N
        incoming = []
        if 0 <= sigma <= fc.dimL:
            sdeg = page.data[sigma]
            for g in sdeg.z_basis:
                o = _obstruction(fc, r, sigma, g.vec, g.tail)
                chain = (g.vec,) + g.tail + (0,) if r >= 1 else (g.vec,)
                incoming.append(BGen(o, chain))

        kept: list[BGen] = []
        span = Subspace.zero(m_dim)
        for cand in shifted + incoming:
            grown = span.sum(Subspace.from_vectors(m_dim, [cand.vec]))
            if grown.dim > span.dim:
                kept.append(cand)
                span = grown

        z_space = Subspace.from_vectors(m_dim, [g.vec for g in new_z])
        if z_space.dim != len(new_z):
            raise LiftFailure(f"dependent cycle basis at degree {m}")
        try:
            quot = f2linalg.quotient_map(span, z_space)
        except f2linalg.NotASubspace as exc:
            raise LiftFailure(f"boundaries escape the cycle space at degree "
                              f"{m}") from exc

        # independent dimension bookkeeping: quotient vs rank arithmetic
        ker_dim = page.dim(m) - f2linalg.rank(page.delta_matrix(m))
        im_dim = f2linalg.rank(page.delta_matrix(sigma)) \
            if 0 <= sigma <= fc.dimL else 0
        if quot.dim != ker_dim - im_dim:
            raise LiftFailure(f"page {r + 1} dimension mismatch at degree {m}: "
                              f"quotient {quot.dim} vs ranks {ker_dim - im_dim}")
        if quot.dim > page.dim(m):
            raise LiftFailure(f"page dimensions increased at degree {m}")

        new_data[m] = PageDegree(tuple(new_z), tuple(kept), z_space, span, quot)

    delta = _compute_delta(fc, r + 1, new_data)
    if paranoid:
        _second_lift_check(fc, r + 1, new_data, delta)
    return SpectralPage(fc, r + 1, new_data, delta)


@dataclass(frozen=True)
class CollapseResult:
    pages: tuple[SpectralPage, ...]
    einf_dims: dict[int, int]

    @property
    def collapse_index(self) -> int:
        return self.pages[-1].r

    def einf_residue_dims(self) -> dict[int, int]:
        fc = self.pages[-1].fc
        out = {r: 0 for r in range(fc.NL)}
        for m, d in self.einf_dims.items():
            out[m % fc.NL] += d
        return out


def run_to_collapse(fc: FloerComplex, paranoid: bool = True) -> CollapseResult:
    """Pages E_0 .. E_(nu+1); the last differential must vanish identically.

    For r >= nu + 1 the differential drops Morse degree by r*NL - 1 > dimL,
    so it is zero for grading reasons; this is asserted, not assumed.
    """
    pages = [page0(fc)]
    for _ in range(fc.nu + 1):
        pages.append(turn_page(pages[-1], paranoid=paranoid))
    last = pages[-1]
    if not last.is_collapsed():
        raise LiftFailure("differential of the collapse page is nonzero")
    for m in range(fc.dimL + 1):
        if last.dim(m) and 0 <= m + 1 - last.r * fc.NL <= fc.dimL:
            raise LiftFailure("collapse page has an in-range differential target")
    einf = {m: last.dim(m) for m in range(fc.dimL + 1)}
    return CollapseResult(tuple(pages), einf)


def window_homology_dims(fc: FloerComplex, window: Optional[int] = None
                         ) -> dict[int, int]:
    """Truncated-window oracle: honest bigraded homology in middle degrees.

    Builds the Laurent complex over T-powers in [-W, W] and computes the
    homology of total degrees 0..NL-1, which are far enough from the window
    boundary that no chain, boundary or image is truncated.
    """
    W = window if window is not None else 2 * fc.nu + 2
    N = fc.NL

    def blocks(l: int) -> list[tuple[int, int]]:
        out = []
        for p in range(-W, W + 1):
            m = l - p * N
            if 0 <= m <= fc.dimL and fc.morse.dim_at(m) > 0:
                out.append((p, m))
        return out

    def offsets(bl: list[tuple[int, int]]) -> tuple[dict, int]:
        off, acc = {}, 0
        for p, m in bl:
            off[(p, m)] = acc
            acc += fc.morse.dim_at(m)
        return off, acc

    def dmatrix(l: int) -> F2Matrix:
        src, ssize = offsets(blocks(l))
        tgt, tsize = offsets(blocks(l + 1))
        entries = []
        for (p, m), o in src.items():
            for k in range(fc.nu + 1):
                key = (p + k, m + 1 - k * N)
                if key not in tgt:
                    continue
                for (i, j) in fc.operator(k, m).entries():
                    entries.append((tgt[key] + i, o + j))
        return F2Matrix.from_entries(tsize, ssize, entries)

    out = {}
    for l in range(N):
        _, size = offsets(blocks(l))
        out[l] = size - f2linalg.rank(dmatrix(l)) - f2linalg.rank(dmatrix(l - 1))
    return out


@dataclass(frozen=True)
class ResidueVerdict:
    residue: int
    einf: int
    folded: int
    window: int

    @property
    def ok(self) -> bool:
        return self.einf == self.folded == self.window


@dataclass(frozen=True)
class ConvergenceReport:
    residues: tuple[ResidueVerdict, ...]

    @property
    def ok(self) -> bool:
        return all(v.ok for v in self.residues)


def check_convergence(fc: FloerComplex, paranoid: bool = True) -> ConvergenceReport:
    """Compare E_infinity, folded homology and the window oracle per residue."""
    collapse = run_to_collapse(fc, paranoid=paranoid)
    einf = collapse.einf_residue_dims()
    folded = folded_homology(fc)
    window = window_homology_dims(fc)
    return ConvergenceReport(tuple(
        ResidueVerdict(r, einf[r], folded[r], window[r]) for r in range(fc.NL)
    ))


def e1_oracle(fc: FloerComplex) -> tuple[dict[int, int], dict[int, F2Matrix]]:
    """Independent E_1 data from raw kernels and images of op_0 and op_1.

    Returns the cohomology dimension of (C, op_0) per degree and the matrix
    of the map induced by op_1 in the canonical echelon coset bases. Built
    from f2linalg primitives only, bypassing the page engine.
    """
    quots: dict[int, QuotientMap] = {}
    for m in range(fc.dimL + 1):
        cycles = f2linalg.kernel(fc.operator(0, m))
        below = fc.operator(0, m - 1)
        bounds = f2linalg.image(below) if m > 0 else Subspace.zero(fc.morse.dim_at(m))
        quots[m] = f2linalg.quotient_map(bounds, cycles)
    dims = {m: quots[m].dim for m in quots}
    deltas: dict[int, F2Matrix] = {}
    for m in range(fc.dimL + 1):
        t = m + 1 - fc.NL
        tdim = dims.get(t, 0)
        cols = []
        for q in quots[m].reps.basis:
            img = fc.operator(1, m).mul_vec(q)
            cols.append(quots[t].coords(img) if tdim else 0)
        deltas[m] = _column_matrix(cols, tdim)
    return dims, deltas


def induced_page_product(pages, fc: FloerComplex, paranoid: bool = True):
    """Attach the induced product to every page.

    The product of two page classes multiplies canonical representatives
    through the degree-preserving table m_0 and projects to the page
    quotient; higher product tables only raise the filtration level, so
    they never reach the leading coefficient. Checks: representative
    independence (under paranoid mode) and the page Leibniz rule for the
    differential, on every basis pair.
    """
    if fc.products is None:
        raise ProductsAbsent("complex has no product tables")
    rep = check_product_leibniz(fc)
    if not rep.ok:
        l, wit = rep.first_failure
        raise LeibnizFailure(f"product tables break the Leibniz identity at "
                             f"l={l}, witnesses {wit}")

    def product_chain(m1: int, v1: int, m2: int, v2: int) -> frozenset:
        return fc.apply_product(0, fc.vec_to_chain(v1, m1), fc.vec_to_chain(v2, m2))

    out = []
    for page in pages:
        tables: dict[tuple[int, int], list[list[int]]] = {}
        for m1 in range(fc.dimL + 1):
            for m2 in range(fc.dimL + 1):
                if page.dim(m1) == 0 or page.dim(m2) == 0:
                    continue
                mt = m1 + m2
                table = []
                for q1 in page.reps(m1):
                    row = []
                    for q2 in page.reps(m2):
                        chain = product_chain(m1, q1, m2, q2)
                        if mt > fc.dimL:
                            if chain:
                                raise LeibnizFailure("product escapes the grading")
                            row.append(0)
                            continue
                        vec = fc.chain_to_vec(chain, mt)
                        try:
                            row.append(page.class_coords(mt, vec))
                        except ValueError as exc:
                            raise LeibnizFailure(
                                f"page {page.r} product of degrees ({m1},{m2}) "
                                f"leaves the cycle space") from exc
                    table.append(row)
                tables[(m1, m2)] = table
        if paranoid:
            _product_second_lift(page, fc, tables)
        _page_leibniz(page, fc, tables)
        out.append(dataclasses.replace(page, product=tables))
    return out


def _product_second_lift(page: SpectralPage, fc: FloerComplex, tables) -> None:
    for (m1, m2), table in tables.items():
        mt = m1 + m2
        b1 = page.data[m1].b_span[0].vec if page.data[m1].b_span else 0
        b2 = page.data[m2].b_span[0].vec if page.data[m2].b_span else 0
        if not (b1 or b2):
            continue
        for i, q1 in enumerate(page.reps(m1)):
            for j, q2 in enumerate(page.reps(m2)):
                chain = fc.apply_product(0, fc.vec_to_chain(q1 ^ b1, m1),
                                         fc.vec_to_chain(q2 ^ b2, m2))
                if mt > fc.dimL:
                    if chain:
                        raise LeibnizFailure("perturbed product escapes the grading")
                    continue
                vec = fc.chain_to_vec(chain, mt)
                try:
                    coords = page.class_coords(mt, vec)
                except ValueError as exc:
                    raise LeibnizFailure("perturbed product leaves the cycle "
                                         "space") from exc
                if coords != table[i][j]:
                    raise LeibnizFailure(
                        f"page {page.r} product depends on representatives at "
                        f"degrees ({m1},{m2})")


def _page_leibniz(page: SpectralPage, fc: FloerComplex, tables) -> None:
    """delta_r(ab) = delta_r(a) b + a delta_r(b) on all basis pairs."""
    r = page.r
    N = fc.NL

    def classes_product(m1: int, c1: int, m2: int, c2: int) -> tuple[int, int]:
        mt = m1 + m2
        acc = 0
        table = tables.get((m1, m2))
        if table is not None:
            i = c1
            while i:
                li = i & -i
                j = c2
                while j:
                    lj = j & -j
                    acc ^= table[li.bit_length() - 1][lj.bit_length() - 1]
                    j ^= lj
                i ^= li
        return mt, acc

    for (m1, m2), table in tables.items():
        mt = m1 + m2
        if mt > fc.dimL:
            continue
        for i in range(page.dim(m1)):
            for j in range(page.dim(m2)):
                _, ab = classes_product(m1, 1 << i, m2, 1 << j)
                lhs = page.delta_matrix(mt).mul_vec(ab)
                da = page.delta_matrix(m1).mul_vec(1 << i)
                db = page.delta_matrix(m2).mul_vec(1 << j)
                _, t1 = classes_product(m1 + 1 - r * N, da, m2, 1 << j)
                _, t2 = classes_product(m1, 1 << i, m2 + 1 - r * N, db)
                if lhs != t1 ^ t2:
                    raise LeibnizFailure(
                        f"page {r} differential breaks Leibniz on degrees "
                        f"({m1},{m2}) basis pair ({i},{j})")


def page_to_dict(page: SpectralPage, verbose: bool = False) -> dict:
    out = {
        "r": page.r,
        "V": {str(m): page.dim(m) for m in range(page.fc.dimL + 1)},
        "delta_rank": {str(m): f2linalg.rank(page.delta_matrix(m))
                       for m in range(page.fc.dimL + 1)},
        "collapsed": page.is_collapsed(),
    }
    if verbose:
        out["representatives"] = {
            str(m): [[int(b) for b in format(v, f"0{max(page.fc.morse.dim_at(m),1)}b")[::-1]]
                     for v in page.reps(m)]
            for m in range(page.fc.dimL + 1)
        }
        out["delta"] = {str(m): page.delta_matrix(m).entries()
                        for m in range(page.fc.dimL + 1)}
    return out
