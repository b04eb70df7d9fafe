"""Character-twisted complex exterior forms on a fixed coframe.

A form is a finite sum of terms ``coeff * char * eta^H ∧ eta^Abar`` where
``char`` is a Laurent monomial in the model's character generators, and the
holomorphic/antiholomorphic index tuples H, A are strictly increasing.  A
monomial is canonical when the holomorphic indices come first, each block
ascending; products fold the Koszul sign of the sorting permutation into the
coefficient.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .scalars import GaussScalar, ONE, ZERO, render_scalar


class FormError(ValueError):
    pass


class ContextMismatch(FormError):
    pass


class _Mixed:
    def __repr__(self):
        return "MIXED"


MIXED = _Mixed()

CharExp = tuple[int, ...]
Indices = tuple[int, ...]
TermKey = tuple[CharExp, Indices, Indices]


@dataclass(frozen=True)
class FormContext:
    """Coframe size plus the declared character generators and their
    conjugation pairing (an involution on generator positions)."""

    n: int
    char_names: tuple[str, ...] = ()
    conj_perm: tuple[int, ...] = ()

    def __post_init__(self):
        if len(self.conj_perm) != len(self.char_names):
            raise FormError("conjugation pairing must cover every generator")
        for a, b in enumerate(self.conj_perm):
            if self.conj_perm[b] != a:
                raise FormError("conjugation pairing must be an involution")

    @property
    def trivial_char(self) -> CharExp:
        return (0,) * len(self.char_names)

    def conj_char(self, exps: CharExp) -> CharExp:
        out = [0] * len(exps)
        for pos, e in enumerate(exps):
            out[self.conj_perm[pos]] = e
        return tuple(out)


def _check_indices(ctx: FormContext, idx: Sequence[int]) -> Indices:
    t = tuple(idx)
    for a, b in zip(t, t[1:]):
        if a >= b:
            raise FormError(f"indices must strictly ascend, got {t}")
    for j in t:
        if not 1 <= j <= ctx.n:
            raise FormError(f"coframe index {j} out of range 1..{ctx.n}")
    return t


def merge_ascending(a: Indices, b: Indices) -> tuple[Indices, int] | None:
    """Merge two strictly increasing tuples; None if they overlap.

    Returns the merged tuple and the parity sign of the interleaving."""
    out: list[int] = []
    i = j = 0
    sign = 1
    while i < len(a) and j < len(b):
        if a[i] == b[j]:
            return None
        if a[i] < b[j]:
            out.append(a[i])
            i += 1
        else:
            # b[j] jumps over the remaining entries of a
            if (len(a) - i) % 2:
                sign = -sign
            out.append(b[j])
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), sign


def mono_wedge(k1: TermKey, k2: TermKey) -> tuple[TermKey, int] | None:
    """Wedge of two canonical monomials: key and Koszul sign, or None if 0."""
    c1, h1, a1 = k1
    c2, h2, a2 = k2
    mh = merge_ascending(h1, h2)
    if mh is None:
        return None
    ma = merge_ascending(a1, a2)
    if ma is None:
        return None
    sign = mh[1] * ma[1]
    if (len(a1) * len(h2)) % 2:
        sign = -sign
    char = tuple(x + y for x, y in zip(c1, c2))
    return (char, mh[0], ma[0]), sign


class FormExpr:
    """Canonical linear combination of twisted exterior monomials."""

    __slots__ = ("ctx", "terms")

    ctx: FormContext
    terms: tuple[tuple[TermKey, GaussScalar], ...]

    def __init__(self, ctx: FormContext, terms: Iterable[tuple[TermKey, GaussScalar]] = ()):
        acc: dict[TermKey, GaussScalar] = {}
        for key, coeff in terms:
            if not coeff:
                continue
            prev = acc.get(key)
            s = coeff if prev is None else prev + coeff
            if s:
                acc[key] = s
            elif prev is not None:
                del acc[key]
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "terms", tuple(sorted(acc.items(), key=lambda t: t[0])))

    def __setattr__(self, name, value):  # pragma: no cover - guard
        raise AttributeError("FormExpr is immutable")

    # -- constructors ---------------------------------------------------
    @staticmethod
    def zero(ctx: FormContext) -> "FormExpr":
        return FormExpr(ctx)

    @staticmethod
    def monomial(ctx: FormContext, holo: Sequence[int], anti: Sequence[int],
                 coeff: GaussScalar | int = 1, char: CharExp | None = None) -> "FormExpr":
        key = (ctx.trivial_char if char is None else tuple(char),
               _check_indices(ctx, holo), _check_indices(ctx, anti))
        if len(key[0]) != len(ctx.char_names):
            raise FormError("character exponent vector has the wrong length")
        return FormExpr(ctx, [(key, GaussScalar.coerce(coeff))])

    @staticmethod
    def const(ctx: FormContext, c: GaussScalar | int) -> "FormExpr":
        return FormExpr.monomial(ctx, (), (), c)

    # -- basic algebra ----------------------------------------------------
    def _same_ctx(self, other: "FormExpr") -> None:
        if self.ctx != other.ctx:
            raise ContextMismatch("forms live on different models")

    def __add__(self, other: "FormExpr") -> "FormExpr":
        self._same_ctx(other)
        return FormExpr(self.ctx, self.terms + other.terms)

    def __sub__(self, other: "FormExpr") -> "FormExpr":
        self._same_ctx(other)
        return FormExpr(self.ctx, self.terms + tuple((k, -c) for k, c in other.terms))

    def __neg__(self) -> "FormExpr":
        return FormExpr(self.ctx, tuple((k, -c) for k, c in self.terms))

    def scale(self, c) -> "FormExpr":
        c = GaussScalar.coerce(c)
        return FormExpr(self.ctx, tuple((k, c * v) for k, v in self.terms))

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, FormExpr):
            return NotImplemented
        return self.ctx == other.ctx and self.terms == other.terms

    def __hash__(self) -> int:
        return hash((self.ctx, self.terms))

    # -- structure ---------------------------------------------------------
    def bidegree(self):
        """Common (p, q), None for the zero form, MIXED otherwise."""
        if not self.terms:
            return None
        degs = {(len(k[1]), len(k[2])) for k, _ in self.terms}
        if len(degs) == 1:
            return degs.pop()
        return MIXED

    def total_degree(self):
        bd = self.bidegree()
        if bd is None or bd is MIXED:
            return bd
        return bd[0] + bd[1]

    def is_char_trivial(self) -> bool:
        triv = self.ctx.trivial_char
        return all(k[0] == triv for k, _ in self.terms)

    def component(self, p: int, q: int) -> "FormExpr":
        return FormExpr(self.ctx, [(k, c) for k, c in self.terms
                                   if len(k[1]) == p and len(k[2]) == q])

    def bidegrees(self) -> set[tuple[int, int]]:
        return {(len(k[1]), len(k[2])) for k, _ in self.terms}

    # -- rendering -----------------------------------------------------------
    def __str__(self) -> str:
        return render_form(self)

    def __repr__(self) -> str:
        return f"FormExpr({render_form(self)!r})"


def wedge(a: FormExpr, b: FormExpr) -> FormExpr:
    """Graded-commutative exterior product; character exponents add."""
    if a.ctx != b.ctx:
        raise ContextMismatch("wedge of forms on different models")
    acc: dict[TermKey, GaussScalar] = {}
    for k1, c1 in a.terms:
        for k2, c2 in b.terms:
            m = mono_wedge(k1, k2)
            if m is None:
                continue
            key, sign = m
            c = c1 * c2
            if sign < 0:
                c = -c
            prev = acc.get(key)
            s = c if prev is None else prev + c
            if s:
                acc[key] = s
            elif prev is not None:
                del acc[key]
    return FormExpr(a.ctx, acc.items())


def wedge_all(*forms: FormExpr) -> FormExpr:
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def conjugate(a: FormExpr) -> FormExpr:
    """Complex conjugation: coefficients conjugated, index blocks swapped
    (with the reordering sign), characters swapped per the pairing."""
    out = []
    for (char, holo, anti), c in a.terms:
        sign = -1 if (len(holo) * len(anti)) % 2 else 1
        cc = c.conj()
        if sign < 0:
            cc = -cc
        out.append(((a.ctx.conj_char(char), anti, holo), cc))
    return FormExpr(a.ctx, out)


def bidegree(a: FormExpr):
    return a.bidegree()


def coordinates(a: FormExpr, basis: Sequence[TermKey]) -> tuple[GaussScalar, ...]:
    """Exact coordinates of a in the enumerated monomial basis.

    Raises if a has a term outside the enumerated space."""
    index = {key: pos for pos, key in enumerate(basis)}
    out = [ZERO] * len(basis)
    for key, c in a.terms:
        pos = index.get(key)
        if pos is None:
            raise FormError(f"term {key} lies outside the enumerated space")
        out[pos] = c
    return tuple(out)


def from_coordinates(ctx: FormContext, basis: Sequence[TermKey],
                     coords: Sequence) -> FormExpr:
    return FormExpr(ctx, [(key, GaussScalar.coerce(c))
                          for key, c in zip(basis, coords, strict=True)])


# ---------------------------------------------------------------------------
# canonical text rendering;  the parser in icoh.model round-trips this
# ---------------------------------------------------------------------------

def _render_char(ctx: FormContext, char: CharExp) -> str:
    return "*".join(f"{name}^{e}" for name, e in zip(ctx.char_names, char) if e)


def _render_idx(holo: Indices, anti: Indices) -> str:
    return f"e[{' '.join(map(str, holo))}|{' '.join(map(str, anti))}]"


def render_term(ctx: FormContext, key: TermKey, coeff: GaussScalar) -> str:
    char, holo, anti = key
    factors = []
    ch = _render_char(ctx, char)
    if ch:
        factors.append(ch)
    if holo or anti:
        factors.append(_render_idx(holo, anti))
    cs = render_scalar(coeff)
    if not factors:
        return cs if ("+" not in cs[1:] and "-" not in cs[1:]) else f"({cs})"
    if coeff == ONE:
        return "*".join(factors)
    if coeff == -ONE:
        return "-" + "*".join(factors)
    if "+" in cs[1:] or "-" in cs[1:]:
        cs = f"({cs})"
    return "*".join([cs] + factors)


def render_form(a: FormExpr) -> str:
    if not a.terms:
        return "0"
    parts = []
    for key, coeff in a.terms:
        t = render_term(a.ctx, key, coeff)
        if not parts:
            parts.append(t)
        elif t.startswith("-"):
            parts.append(" - " + t[1:])
        else:
            parts.append(" + " + t)
    return "".join(parts)
