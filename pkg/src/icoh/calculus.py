"""Differential operators, diagonal Hermitian metrics, the conjugate-linear
Hodge star, and the harmonicity / SKT / geometric-formality tests built from
their exact kernel characterizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .forms import FormContext, FormError, FormExpr, MIXED, TermKey, mono_wedge
from .model import BoundModel
from .scalars import GaussScalar, HALF_I, ZERO, two_re


class StarUnsupported(FormError):
    """The Hodge star is defined only on invariant (character-free) forms."""


class EngineInvariantError(RuntimeError):
    """An internal exactness invariant failed; results cannot be trusted."""


# ---------------------------------------------------------------------------
# exterior differential
# ---------------------------------------------------------------------------

def _d_term(key: TermKey, coeff: GaussScalar, bm: BoundModel,
            out: dict[TermKey, GaussScalar]) -> None:
    char, holo, anti = key
    ctx = bm.ctx

    def emit(k: TermKey, c: GaussScalar):
        s = out.get(k, ZERO) + c
        if s:
            out[k] = s
        elif k in out:
            del out[k]

    def splice(prefix: TermKey, two_form: FormExpr, suffix: TermKey, c: GaussScalar):
        for dkey, dc in two_form.terms:
            m1 = mono_wedge(prefix, dkey)
            if m1 is None:
                continue
            m2 = mono_wedge(m1[0], suffix)
            if m2 is None:
                continue
            cc = c * dc
            if m1[1] * m2[1] < 0:
                cc = -cc
            emit(m2[0], cc)

    # character factor: d(chi * w) = chi * (dlog(chi) ∧ w + dw)
    if any(char):
        for g, e in enumerate(char):
            if not e:
                continue
            theta = bm.char_theta[g]
            for tkey, tc in theta.terms:
                m = mono_wedge((char,) + tkey[1:], (ctx.trivial_char, holo, anti))
                if m is None:
                    continue
                cc = coeff * tc * e
                if m[1] < 0:
                    cc = -cc
                emit(m[0], cc)

    trivial = ctx.trivial_char
    p = len(holo)
    for pos, i in enumerate(holo):
        c = coeff if pos % 2 == 0 else -coeff
        prefix = (char, holo[:pos], ())
        suffix = (trivial, holo[pos + 1:], anti)
        splice(prefix, bm.d_gen[i - 1], suffix, c)
    for pos, j in enumerate(anti):
        c = coeff if (p + pos) % 2 == 0 else -coeff
        prefix = (char, holo, anti[:pos])
        suffix = (trivial, (), anti[pos + 1:])
        splice(prefix, bm.d_gen_conj[j - 1], suffix, c)


def differential(a: FormExpr, bm: BoundModel) -> FormExpr:
    """Exterior differential, Leibniz over the structure equations and the
    declared character differentials."""
    out: dict[TermKey, GaussScalar] = {}
    for key, coeff in a.terms:
        _d_term(key, coeff, bm, out)
    return FormExpr(bm.ctx, out.items())


def _projected(a: FormExpr, bm: BoundModel, dp: int, dq: int) -> FormExpr:
    out = FormExpr.zero(bm.ctx)
    for key, coeff in a.terms:
        acc: dict[TermKey, GaussScalar] = {}
        _d_term(key, coeff, bm, acc)
        p, q = len(key[1]), len(key[2])
        part = FormExpr(bm.ctx, acc.items()).component(p + dp, q + dq)
        out = out + part
    return out


def del_op(a: FormExpr, bm: BoundModel) -> FormExpr:
    """(1,0)-component of d, termwise."""
    return _projected(a, bm, 1, 0)


def delbar_op(a: FormExpr, bm: BoundModel) -> FormExpr:
    """(0,1)-component of d, termwise."""
    return _projected(a, bm, 0, 1)


def ddbar(a: FormExpr, bm: BoundModel) -> FormExpr:
    return del_op(delbar_op(a, bm), bm)


# ---------------------------------------------------------------------------
# metrics and the Hodge star
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Metric:
    """Diagonal Hermitian metric: squared norms of the coframe entries."""

    diag: tuple[Fraction, ...]

    def __post_init__(self):
        for g in self.diag:
            if g <= 0:
                raise ValueError("metric entries must be positive")

    @staticmethod
    def unit(n: int) -> "Metric":
        return Metric((Fraction(1),) * n)


def _perm_sign(seq: Sequence[int]) -> int:
    inv = 0
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                inv += 1
    return -1 if inv % 2 else 1


def hodge_star(a: FormExpr, metric: Metric, ctx: FormContext | None = None) -> FormExpr:
    """Conjugate-linear star on invariant forms.

    eta^{I Jbar} goes to (weight) * eps(I,J) * eta^{I^c (J^c)bar}, where the
    complements are taken in 1..n, eps is the parity of sorting (I, I^c) and
    (J, J^c), and the positive weight is the product of the metric entries
    over I and J.  Normalization constants are dropped: they are global per
    bidegree, and every test built on the star compares kernels."""
    ctx = ctx if ctx is not None else a.ctx
    n = ctx.n
    if len(metric.diag) != n:
        raise ValueError("metric size does not match the coframe")
    if a.bidegree() is MIXED:
        raise FormError("hodge star needs a pure-bidegree form")
    if not a.is_char_trivial():
        raise StarUnsupported("hodge star is undefined on character-twisted forms")
    full = range(1, n + 1)
    out = []
    for (char, holo, anti), c in a.terms:
        hc = tuple(j for j in full if j not in holo)
        ac = tuple(j for j in full if j not in anti)
        sign = _perm_sign(holo + hc) * _perm_sign(anti + ac)
        w = Fraction(1)
        for j in holo:
            w *= metric.diag[j - 1]
        for j in anti:
            w *= metric.diag[j - 1]
        cc = c.conj() * w
        if sign < 0:
            cc = -cc
        out.append(((char, hc, ac), cc))
    return FormExpr(ctx, out)


# ---------------------------------------------------------------------------
# SKT and harmonicity tests
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DefectReport:
    passed: bool
    witness: FormExpr


def fundamental_form(bm: BoundModel, metric: Metric) -> FormExpr:
    """omega = (i/2) * sum_j g_j eta^{j jbar}."""
    out = FormExpr.zero(bm.ctx)
    for j in range(1, bm.n + 1):
        out = out + FormExpr.monomial(bm.ctx, (j,), (j,), HALF_I * metric.diag[j - 1])
    return out


def skt_check(bm: BoundModel, metric: Metric | None = None) -> DefectReport:
    """A metric is SKT iff del(delbar(omega)) vanishes."""
    metric = metric or Metric.unit(bm.n)
    w = ddbar(fundamental_form(bm, metric), bm)
    return DefectReport(w.is_zero(), w)


def skt_family_condition(a: GaussScalar, b: GaussScalar, c: GaussScalar,
                         d: GaussScalar, e: GaussScalar) -> bool:
    """The scalar identity |a|^2 + |c|^2 + |d|^2 = 2 Re(conj(b) d), evaluated
    exactly.  (e does not enter; the normal form carries five slots.)"""
    return a.norm_sq() + c.norm_sq() + d.norm_sq() == two_re(b.conj() * d)


def bc_harmonic(a: FormExpr, bm: BoundModel, metric: Metric | None = None) -> bool:
    """d a = 0 and del(delbar(star a)) = 0."""
    metric = metric or Metric.unit(bm.n)
    if not differential(a, bm).is_zero():
        return False
    return ddbar(hodge_star(a, metric, bm.ctx), bm).is_zero()


def aeppli_harmonic(a: FormExpr, bm: BoundModel, metric: Metric | None = None) -> bool:
    """del(delbar a) = 0, del(star a) = 0, delbar(star a) = 0."""
    metric = metric or Metric.unit(bm.n)
    if not ddbar(a, bm).is_zero():
        return False
    s = hodge_star(a, metric, bm.ctx)
    return del_op(s, bm).is_zero() and delbar_op(s, bm).is_zero()


@dataclass(frozen=True)
class FormalityResult:
    formal: bool
    left: FormExpr | None = None
    right: FormExpr | None = None
    product: FormExpr | None = None


def geom_bc_formality(bm: BoundModel, metric: Metric | None = None,
                      kind: str = "full") -> FormalityResult:
    """Is the space of Bott-Chern harmonic forms closed under wedge?

    Computes a harmonic basis in every bidegree of the chosen finite complex
    and wedges every pair; the first non-harmonic (nonzero) product is the
    counterexample.  Bilinearity makes basis pairs sufficient."""
    from .cohomology import ComplexCtx
    from .forms import wedge

    metric = metric or Metric.unit(bm.n)
    cx = ComplexCtx(bm, kind, metric)
    n = bm.n
    harm: dict[tuple[int, int], list[FormExpr]] = {}
    for p in range(n + 1):
        for q in range(n + 1):
            space = cx.harmonic_subspace("bc", p, q)
            harm[p, q] = [cx.form_from(v, p, q) for v in space.basis]
    slots = [(p, q) for p in range(n + 1) for q in range(n + 1) if harm[p, q]]
    for p1, q1 in slots:
        for p2, q2 in slots:
            if p1 + p2 > n or q1 + q2 > n:
                continue
            for x in harm[p1, q1]:
                for y in harm[p2, q2]:
                    w = wedge(x, y)
                    if w.is_zero():
                        continue
                    if not bc_harmonic(w, bm, metric):
                        return FormalityResult(False, x, y, w)
    return FormalityResult(True)
