"""Finite (sub)complexes and their de Rham, Dolbeault, Bott-Chern, Aeppli,
and Schweitzer cohomologies, with representative bases and the quotient data
(cycles, boundaries) needed for exact class-membership tests.

Three complexes are supported:

* ``full``     - the invariant exterior algebra of the model,
* ``ks_b``     - the balanced subcomplex of a split model (equal fiber
                 counts in the holomorphic and antiholomorphic blocks),
* ``bgamma``   - the character-twisted subcomplex cut out by a lattice
                 triviality rule.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

from .calculus import (EngineInvariantError, Metric, StarUnsupported, ddbar,
                       del_op, delbar_op, differential, hodge_star)
from .forms import FormError, FormExpr, TermKey, coordinates, from_coordinates
from .linalg import (ExactMatrix, Subspace, kernel_basis, vec, zero_vec)
from .model import BoundModel, ModelError, lattice_trivial

FULL_INVARIANT = "full"
KS_B = "ks_b"
BGAMMA_C = "bgamma"

_KINDS = (FULL_INVARIANT, KS_B, BGAMMA_C)


@dataclass(frozen=True)
class SpaceEnumeration:
    kind: str
    p: int
    q: int
    basis: tuple[TermKey, ...]

    @property
    def dim(self) -> int:
        return len(self.basis)


@dataclass(frozen=True)
class CohomologySpace:
    dim: int
    representatives: tuple[FormExpr, ...]
    cycles: Subspace
    boundaries: Subspace
    flags: tuple[str, ...] = ()


class ComplexCtx:
    """A bound model plus a chosen finite complex; caches enumerations,
    operator matrices, and computed cohomology spaces."""

    def __init__(self, bm: BoundModel, kind: str = FULL_INVARIANT,
                 metric: Metric | None = None):
        if kind not in _KINDS:
            raise ModelError(f"unknown complex kind {kind!r}")
        if kind == KS_B and bm.spec.split is None:
            raise ModelError("balanced subcomplex needs a 'split L K' declaration")
        if kind == BGAMMA_C:
            if bm.spec.lattice is None or len(bm.spec.ctx.char_names) != 2:
                raise ModelError("twisted subcomplex needs a lattice rule and "
                                 "one conjugate pair of character generators")
        self.bm = bm
        self.kind = kind
        self.metric = metric or Metric.unit(bm.n)
        self._basis: dict[tuple[int, int], tuple[TermKey, ...]] = {}
        self._ops: dict = {}
        self._spaces: dict = {}

    # -- enumeration ------------------------------------------------------
    @property
    def n(self) -> int:
        return self.bm.n

    def _twist_exponent(self, idx: tuple[int, ...]) -> tuple[int, ...]:
        """Character exponents of conj(alpha_I)/alpha_I for an index set."""
        ctx = self.bm.ctx
        total = [0] * len(ctx.char_names)
        for j in idx:
            for g, e in enumerate(self.bm.spec.twists[j - 1]):
                total[g] += e
        conj = ctx.conj_char(tuple(total))
        return tuple(c - t for c, t in zip(conj, total))

    def basis(self, p: int, q: int) -> tuple[TermKey, ...]:
        key = (p, q)
        got = self._basis.get(key)
        if got is not None:
            return got
        n = self.n
        if p < 0 or q < 0 or p > n or q > n:
            self._basis[key] = ()
            return ()
        ctx = self.bm.ctx
        trivial = ctx.trivial_char
        keys: set[TermKey] = set()
        holo_sets = list(combinations(range(1, n + 1), p))
        anti_sets = list(combinations(range(1, n + 1), q))
        if self.kind == FULL_INVARIANT:
            for I in holo_sets:
                for J in anti_sets:
                    keys.add((trivial, I, J))
        elif self.kind == KS_B:
            fiber = self.bm.spec.split[0]
            for I in holo_sets:
                rI = sum(1 for j in I if j <= fiber)
                for J in anti_sets:
                    if rI == sum(1 for j in J if j <= fiber):
                        keys.add((trivial, I, J))
        else:
            rule = self.bm.spec.lattice
            anti_tw = {J: self._twist_exponent(J) for J in anti_sets}
            holo_tw = {I: self._twist_exponent(I) for I in holo_sets}
            for J, tw in anti_tw.items():
                if lattice_trivial(rule, tw):
                    for I in holo_sets:
                        keys.add((tw, I, J))
            for I, tw in holo_tw.items():
                if lattice_trivial(rule, tw):
                    cj = self.bm.ctx.conj_char(tw)
                    for J in anti_sets:
                        keys.add((cj, I, J))
        out = tuple(sorted(keys))
        self._basis[key] = out
        return out

    def enumeration(self, p: int, q: int) -> SpaceEnumeration:
        return SpaceEnumeration(self.kind, p, q, self.basis(p, q))

    def dim_at(self, p: int, q: int) -> int:
        return len(self.basis(p, q))

    def form_from(self, coords, p: int, q: int) -> FormExpr:
        return from_coordinates(self.bm.ctx, self.basis(p, q), coords)

    def coords(self, a: FormExpr, p: int, q: int):
        return coordinates(a, self.basis(p, q))

    def basis_form(self, key: TermKey) -> FormExpr:
        from .scalars import ONE
        return FormExpr(self.bm.ctx, [(key, ONE)])

    # -- operators ----------------------------------------------------------
    _TARGETS = {"del": (1, 0), "delbar": (0, 1), "ddbar": (1, 1)}

    def op(self, name: str, p: int, q: int) -> ExactMatrix:
        """Matrix of the operator from the (p,q) slice into its target slice
        of the same complex (raises if the complex were not closed)."""
        ck = (name, p, q)
        got = self._ops.get(ck)
        if got is not None:
            return got
        fn = {"del": del_op, "delbar": delbar_op, "ddbar": ddbar}[name]
        dp, dq = self._TARGETS[name]
        src = self.basis(p, q)
        tgt = self.basis(p + dp, q + dq)
        cols = []
        for bkey in src:
            img = fn(self.basis_form(bkey), self.bm)
            try:
                cols.append(self.coords(img, p + dp, q + dq))
            except FormError as exc:
                raise EngineInvariantError(
                    f"{name} leaves the {self.kind} complex at ({p},{q})") from exc
        rows = tuple(tuple(col[r] for col in cols) for r in range(len(tgt)))
        m = ExactMatrix(rows, len(src))
        self._ops[ck] = m
        return m

    def d_matrix(self, p: int, q: int) -> ExactMatrix:
        """d as a map into the concatenated (p+1,q) and (p,q+1) slices; also
        certifies that d has no other components on this slice."""
        ck = ("d", p, q)
        got = self._ops.get(ck)
        if got is not None:
            return got
        src = self.basis(p, q)
        for bkey in src:
            f = self.basis_form(bkey)
            w = differential(f, self.bm)
            if (w - del_op(f, self.bm) - delbar_op(f, self.bm)):
                raise EngineInvariantError(
                    f"d has components outside ({p+1},{q}) and ({p},{q+1}); "
                    "the complex structure is not integrable")
        m = self.op("del", p, q).stack(self.op("delbar", p, q))
        self._ops[ck] = m
        return m

    def image_of(self, name: str, p: int, q: int) -> Subspace:
        """Image subspace of an operator, in its target coordinates."""
        dp, dq = self._TARGETS[name]
        tlen = self.dim_at(p + dp, q + dq)
        if self.dim_at(p, q) == 0 or tlen == 0:
            return Subspace.zero(tlen)
        m = self.op(name, p, q)
        vecs = [tuple(m.rows[r][c] for r in range(m.nrows)) for c in range(m.cols)]
        return Subspace.from_vectors(vecs, tlen)

    def star_matrix(self, p: int, q: int) -> ExactMatrix:
        src = self.basis(p, q)
        tp, tq = self.n - p, self.n - q
        tgt = self.basis(tp, tq)
        cols = [self.coords(hodge_star(self.basis_form(k), self.metric, self.bm.ctx), tp, tq)
                for k in src]
        rows = tuple(tuple(col[r] for col in cols) for r in range(len(tgt)))
        return ExactMatrix(rows, len(src))

    # -- harmonic subspaces ---------------------------------------------------
    def harmonic_subspace(self, theory: str, p: int, q: int) -> Subspace:
        """Exact kernel characterization of the harmonic forms of a theory."""
        amb = self.dim_at(p, q)
        if amb == 0:
            return Subspace.zero(0)
        star = self.star_matrix(p, q)
        tp, tq = self.n - p, self.n - q
        if theory == "bc":
            cond = self.d_matrix(p, q).stack(_matmul(self.op("ddbar", tp, tq), star))
        elif theory == "aeppli":
            cond = self.op("ddbar", p, q)
            cond = cond.stack(_matmul(self.op("del", tp, tq), star))
            cond = cond.stack(_matmul(self.op("delbar", tp, tq), star))
        elif theory == "dolbeault":
            cond = self.op("delbar", p, q)
            cond = cond.stack(_matmul(self.op("del", tp, tq), star))
        else:
            raise ValueError(f"no harmonic characterization for {theory!r}")
        return kernel_basis(cond)

    # -- cohomology spaces -----------------------------------------------------
    def bott_chern(self, p: int, q: int) -> CohomologySpace:
        return self._space("bc", p, q)

    def aeppli(self, p: int, q: int) -> CohomologySpace:
        return self._space("aeppli", p, q)

    def dolbeault(self, p: int, q: int) -> CohomologySpace:
        return self._space("dolbeault", p, q)

    def _space(self, theory: str, p: int, q: int) -> CohomologySpace:
        ck = (theory, p, q)
        got = self._spaces.get(ck)
        if got is not None:
            return got
        amb = self.dim_at(p, q)
        if amb == 0:
            sp = CohomologySpace(0, (), Subspace.zero(0), Subspace.zero(0))
            self._spaces[ck] = sp
            return sp
        if theory == "bc":
            cycles = kernel_basis(self.d_matrix(p, q))
            bnd = self.image_of("ddbar", p - 1, q - 1)
        elif theory == "aeppli":
            cycles = kernel_basis(self.op("ddbar", p, q))
            bnd = self.image_of("del", p - 1, q).add(self.image_of("delbar", p, q - 1))
        else:
            cycles = kernel_basis(self.op("delbar", p, q))
            bnd = self.image_of("delbar", p, q - 1)
        flags: tuple[str, ...] = ()
        if self.kind == BGAMMA_C and theory == "aeppli":
            dual = self.bott_chern(self.n - p, self.n - q).dim
            direct = cycles.dim - bnd.dim
            if dual != direct:
                flags = (f"aeppli dimension {direct} disagrees with the dual "
                         f"bott-chern dimension {dual}",)
        sp = self._finish(theory, p, q, cycles, bnd, flags)
        self._spaces[ck] = sp
        return sp

    def _finish(self, theory: str, p: int, q: int, cycles: Subspace,
                bnd: Subspace, flags=()) -> CohomologySpace:
        if not cycles.contains_space(bnd):
            raise EngineInvariantError(
                f"boundaries are not cycles in {theory} at ({p},{q})")
        dim = cycles.dim - bnd.dim
        rep_vecs = None
        try:
            h = self.harmonic_subspace(theory, p, q)
        except (StarUnsupported, ValueError):
            h = None
        if (h is not None and h.dim == dim and cycles.contains_space(h)
                and h.intersect(bnd).dim == 0):
            rep_vecs = h.basis
        if rep_vecs is None:
            rep_vecs = _completion(cycles, bnd)
        reps = tuple(self.form_from(v, p, q) for v in rep_vecs)
        acc = bnd
        for v in rep_vecs:
            if acc.contains(v):
                raise EngineInvariantError("dependent representatives chosen")
            acc = acc.add(Subspace.from_vectors([v], cycles.ambient_dim))
        return CohomologySpace(dim, reps, cycles, bnd, tuple(flags))

    # -- de Rham on total-degree slices -----------------------------------------
    def derham_slices(self, s: int) -> tuple[tuple[int, int], ...]:
        return tuple((p, s - p) for p in range(max(0, s - self.n), min(self.n, s) + 1))

    def _derham_coords(self, a: FormExpr, s: int):
        out = []
        for p, q in self.derham_slices(s):
            out.extend(self.coords(a.component(p, q), p, q))
        rest = a
        for p, q in self.derham_slices(s):
            rest = rest - a.component(p, q)
        if rest:
            raise FormError("form has components outside the degree slice")
        return tuple(out)

    def de_rham(self, s: int) -> CohomologySpace:
        ck = ("derham", s)
        got = self._spaces.get(ck)
        if got is not None:
            return got
        slices = self.derham_slices(s)
        keys = [k for (p, q) in slices for k in self.basis(p, q)]
        amb = len(keys)
        if amb == 0:
            sp = CohomologySpace(0, (), Subspace.zero(0), Subspace.zero(0))
            self._spaces[ck] = sp
            return sp
        tlen = sum(self.dim_at(p, q) for p, q in self.derham_slices(s + 1))
        cols = [self._derham_coords(differential(self.basis_form(k), self.bm), s + 1)
                for k in keys]
        m = ExactMatrix(tuple(tuple(c[r] for c in cols) for r in range(tlen)), amb)
        cycles = kernel_basis(m)
        prev = [k for (p, q) in self.derham_slices(s - 1) for k in self.basis(p, q)]
        bvecs = [self._derham_coords(differential(self.basis_form(k), self.bm), s)
                 for k in prev]
        bnd = Subspace.from_vectors(bvecs, amb)
        if not cycles.contains_space(bnd):
            raise EngineInvariantError(f"d-boundaries are not d-cycles in degree {s}")
        rep_vecs = _completion(cycles, bnd)
        def to_form(v):
            out = FormExpr.zero(self.bm.ctx)
            ofs = 0
            for p, q in slices:
                d = self.dim_at(p, q)
                out = out + self.form_from(v[ofs:ofs + d], p, q)
                ofs += d
            return out
        sp = CohomologySpace(cycles.dim - bnd.dim, tuple(to_form(v) for v in rep_vecs),
                             cycles, bnd)
        self._spaces[ck] = sp
        return sp

    # -- Schweitzer levels -------------------------------------------------------
    def schweitzer(self, p: int, q: int, level: int) -> CohomologySpace:
        """level 1 is Bott-Chern at (p,q); level 0 is Aeppli at (p-1,q-1);
        level -1 is ker(pr∘d)/im(pr∘d) on A^{p-2,q-1} ⊕ A^{p-1,q-2}."""
        if level == 1:
            return self.bott_chern(p, q)
        if level == 0:
            return self.aeppli(p - 1, q - 1)
        if level != -1:
            raise ValueError("level must be -1, 0, or 1")
        ck = ("schweitzer-1", p, q)
        got = self._spaces.get(ck)
        if got is not None:
            return got
        s1 = self.dim_at(p - 2, q - 1)
        s2 = self.dim_at(p - 1, q - 2)
        amb = s1 + s2
        if amb == 0:
            sp = CohomologySpace(0, (), Subspace.zero(0), Subspace.zero(0))
            self._spaces[ck] = sp
            return sp
        tlen = self.dim_at(p - 1, q - 1)
        m1 = self.op("del", p - 2, q - 1)
        m2 = self.op("delbar", p - 1, q - 2)
        rows = tuple(m1.rows[r] + m2.rows[r] for r in range(tlen))
        cycles = kernel_basis(ExactMatrix(rows, amb))
        bvecs = []
        for k in self.basis(p - 3, q - 1):
            v = self.coords(del_op(self.basis_form(k), self.bm), p - 2, q - 1)
            bvecs.append(v + zero_vec(s2))
        for k in self.basis(p - 2, q - 2):
            f = self.basis_form(k)
            bvecs.append(self.coords(delbar_op(f, self.bm), p - 2, q - 1)
                         + self.coords(del_op(f, self.bm), p - 1, q - 2))
        for k in self.basis(p - 1, q - 3):
            v = self.coords(delbar_op(self.basis_form(k), self.bm), p - 1, q - 2)
            bvecs.append(zero_vec(s1) + v)
        bnd = Subspace.from_vectors(bvecs, amb)
        if not cycles.contains_space(bnd):
            raise EngineInvariantError(
                f"pr∘d does not square to zero at ({p},{q})")
        rep_vecs = _completion(cycles, bnd)
        reps = tuple(self.form_from(v[:s1], p - 2, q - 1)
                     + self.form_from(v[s1:], p - 1, q - 2) for v in rep_vecs)
        sp = CohomologySpace(cycles.dim - bnd.dim, reps, cycles, bnd)
        self._spaces[ck] = sp
        return sp

    def schweitzer_coords(self, a: FormExpr, p: int, q: int):
        """Coordinates of a form (components in (p-2,q-1) and (p-1,q-2))
        in the level -1 ambient space."""
        u = a.component(p - 2, q - 1)
        v = a.component(p - 1, q - 2)
        if a - u - v:
            raise FormError("form has components outside the level -1 slice")
        return self.coords(u, p - 2, q - 1) + self.coords(v, p - 1, q - 2)


def _matmul(a: ExactMatrix, b: ExactMatrix) -> ExactMatrix:
    if a.cols != b.nrows:
        raise EngineInvariantError("operator composition shape mismatch")
    from .scalars import ZERO
    rows = []
    for r in a.rows:
        out = [ZERO] * b.cols
        for k, coeff in enumerate(r):
            if not coeff:
                continue
            brow = b.rows[k]
            for j, x in enumerate(brow):
                if x:
                    out[j] = out[j] + coeff * x
        rows.append(tuple(out))
    return ExactMatrix(tuple(rows), b.cols)


def _completion(cycles: Subspace, bnd: Subspace):
    """Echelon-canonical class representatives: cycle basis vectors that add
    new pivots beyond the boundary space, reduced modulo the boundaries."""
    acc = bnd
    out = []
    for v in cycles.basis:
        if not acc.contains(v):
            out.append(bnd.reduce(v))
            acc = acc.add(Subspace.from_vectors([v], cycles.ambient_dim))
    return out


# ---------------------------------------------------------------------------
# module-level operation surface
# ---------------------------------------------------------------------------

def enumerate_space(bm: BoundModel, kind: str, p: int, q: int) -> SpaceEnumeration:
    return ComplexCtx(bm, kind).enumeration(p, q)


def bott_chern(bm: BoundModel, kind: str, p: int, q: int,
               metric: Metric | None = None) -> CohomologySpace:
    return ComplexCtx(bm, kind, metric).bott_chern(p, q)


def aeppli(bm: BoundModel, kind: str, p: int, q: int,
           metric: Metric | None = None) -> CohomologySpace:
    return ComplexCtx(bm, kind, metric).aeppli(p, q)


def dolbeault(bm: BoundModel, kind: str, p: int, q: int,
              metric: Metric | None = None) -> CohomologySpace:
    return ComplexCtx(bm, kind, metric).dolbeault(p, q)


def de_rham(bm: BoundModel, kind: str, s: int) -> CohomologySpace:
    return ComplexCtx(bm, kind).de_rham(s)


def schweitzer_h(bm: BoundModel, kind: str, p: int, q: int, level: int) -> CohomologySpace:
    return ComplexCtx(bm, kind).schweitzer(p, q, level)


@dataclass(frozen=True)
class SpecialTypeDecomposition:
    """Bott-Chern dimension split by how the last coframe generator enters:
    monomials avoiding it (modulo the ddbar image), closed monomial spans
    containing exactly one of eta^n / eta^nbar, and closed spans containing
    both."""

    avoid_last: int
    image_in_avoid: int
    closed_one_last: int
    closed_both_last: int

    @property
    def quotient_avoid_last(self) -> int:
        return self.avoid_last - self.image_in_avoid

    @property
    def total(self) -> int:
        return self.quotient_avoid_last + self.closed_one_last + self.closed_both_last


def special_type_bc_decomposition(bm: BoundModel, p: int, q: int) -> SpecialTypeDecomposition:
    from .model import is_special_type
    if not is_special_type(bm.spec, bm):
        raise ModelError(f"{bm.spec.name} is not of special type")
    cx = ComplexCtx(bm)
    n = bm.n
    keys = cx.basis(p, q)
    amb = len(keys)
    groups: dict[str, list[int]] = {"avoid": [], "one": [], "both": []}
    for pos, (char, holo, anti) in enumerate(keys):
        has_h = n in holo
        has_a = n in anti
        if has_h and has_a:
            groups["both"].append(pos)
        elif has_h or has_a:
            groups["one"].append(pos)
        else:
            groups["avoid"].append(pos)

    def closed_dim(positions: list[int]) -> int:
        if not positions:
            return 0
        dm = cx.d_matrix(p, q)
        sub = ExactMatrix(tuple(tuple(row[c] for c in positions) for row in dm.rows),
                          len(positions))
        return kernel_basis(sub).dim

    avoid_dim = len(groups["avoid"])
    if closed_dim(groups["avoid"]) != avoid_dim:
        raise EngineInvariantError("monomials avoiding the last generator must be closed")

    avoid_span = Subspace.from_vectors(
        [tuple(1 if i == pos else 0 for i in range(amb)) for pos in groups["avoid"]], amb)
    img = cx.image_of("ddbar", p - 1, q - 1)
    if not avoid_span.contains_space(img):
        raise EngineInvariantError(
            "the ddbar image is not supported on monomials avoiding the last generator")
    return SpecialTypeDecomposition(
        avoid_last=avoid_dim,
        image_in_avoid=img.dim,
        closed_one_last=closed_dim(groups["one"]),
        closed_both_last=closed_dim(groups["both"]),
    )


@dataclass(frozen=True)
class KSHodgeCount:
    """Direct basis count of the balanced subcomplex at (p,q), reported next
    to the two printed closed forms (which are not asserted; they disagree
    with the count on small inputs)."""

    basis_count: int
    displayed_formula: int
    product_formula: int

    @property
    def displayed_matches(self) -> bool:
        return self.basis_count == self.displayed_formula

    @property
    def product_matches(self) -> bool:
        return self.basis_count == self.product_formula


def _comb(a: int, b: int) -> int:
    if b < 0 or b > a:
        return 0
    return math.comb(a, b)


def ks_hodge_numbers(l: int, k: int, p: int, q: int) -> KSHodgeCount:
    direct = sum(_comb(l, r) ** 2 * _comb(k, p - r) * _comb(k, q - r)
                 for r in range(0, min(l, p, q) + 1)) if min(p, q) >= 0 else 0
    lo = max(0, p - k, q - k)
    hi = min(p, q)
    displayed = sum(_comb(l, r) * (_comb(k, p - r) + _comb(k, q - r))
                    for r in range(lo, hi + 1))
    product = (sum(_comb(l, r) * _comb(k, p - r) for r in range(lo, hi + 1))
               * sum(_comb(l, r) * _comb(k, q - r) for r in range(lo, hi + 1)))
    return KSHodgeCount(direct, displayed, product)
