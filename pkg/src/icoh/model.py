"""Model definitions: coframe, structure equations, parameters, characters,
lattice rules, and the line-oriented text format they are written in.

A model file looks like::

    model nil6_I dim 3
    param l1 l2 l3 l4 l5 l6
    constraint l1*l6 = 0
    d e1 = 0
    d e2 = l1*e[1|1]
    d e3 = l2*e[1 2|] + l3*e[1|1] + l4*e[1|2] + l5*e[2|1] + l6*e[2|2]

``e[H|A]`` is the monomial eta^H ∧ eta^Abar.  Character generators are
declared with ``char c1 conj c2`` plus their log-differentials
(``d c1 = e[1|]`` meaning d(c1) = c1 * eta^1), coframe twists with
``twist e2 = c1^-1``, lattices with ``lattice mu = 1/2 pi``, and the
fiber/base split used by balanced subcomplexes with ``split L K``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .forms import (CharExp, FormContext, FormError, FormExpr, TermKey,
                    mono_wedge, render_term)
from .scalars import GaussScalar, ONE, ZERO, render_scalar


class ModelError(ValueError):
    pass


class ModelSyntaxError(ModelError):
    def __init__(self, msg: str, line: int, col: int | None = None):
        at = f"line {line}" + (f", col {col}" if col is not None else "")
        super().__init__(f"{at}: {msg}")
        self.line = line
        self.col = col


class ConstraintError(ModelError):
    pass


# ---------------------------------------------------------------------------
# polynomials in the parameters and their conjugates
# ---------------------------------------------------------------------------

PolyKey = tuple[tuple[str, bool], ...]  # ((param, conjugated?), ...) sorted


@dataclass(frozen=True)
class PolyExpr:
    """Polynomial over Q[i] in parameter symbols and their conjugates."""

    terms: tuple[tuple[PolyKey, GaussScalar], ...]

    @staticmethod
    def build(items: Iterable[tuple[PolyKey, GaussScalar]]) -> "PolyExpr":
        acc: dict[PolyKey, GaussScalar] = {}
        for key, c in items:
            if not c:
                continue
            s = acc.get(key, ZERO) + c
            if s:
                acc[key] = s
            elif key in acc:
                del acc[key]
        return PolyExpr(tuple(sorted(acc.items(), key=lambda t: t[0])))

    @staticmethod
    def const(c) -> "PolyExpr":
        return PolyExpr.build([((), GaussScalar.coerce(c))])

    @staticmethod
    def var(name: str, conjugated: bool = False) -> "PolyExpr":
        return PolyExpr.build([(((name, conjugated),), ONE)])

    def __add__(self, other: "PolyExpr") -> "PolyExpr":
        return PolyExpr.build(self.terms + other.terms)

    def __sub__(self, other: "PolyExpr") -> "PolyExpr":
        return PolyExpr.build(self.terms + tuple((k, -c) for k, c in other.terms))

    def __neg__(self) -> "PolyExpr":
        return PolyExpr(tuple((k, -c) for k, c in self.terms))

    def __mul__(self, other: "PolyExpr") -> "PolyExpr":
        out = []
        for k1, c1 in self.terms:
            for k2, c2 in other.terms:
                out.append((tuple(sorted(k1 + k2)), c1 * c2))
        return PolyExpr.build(out)

    def is_zero(self) -> bool:
        return not self.terms

    def as_const(self) -> GaussScalar | None:
        if not self.terms:
            return ZERO
        if len(self.terms) == 1 and self.terms[0][0] == ():
            return self.terms[0][1]
        return None

    def evaluate(self, values: Mapping[str, GaussScalar]) -> GaussScalar:
        total = ZERO
        for key, c in self.terms:
            v = c
            for name, conjugated in key:
                x = values[name]
                v = v * (x.conj() if conjugated else x)
            total = total + v
        return total

    def render(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for key, c in self.terms:
            names = "*".join(("~" if cj else "") + nm for nm, cj in key)
            cs = render_scalar(c)
            if "+" in cs[1:] or "-" in cs[1:]:
                cs = f"({cs})"
            if not names:
                t = cs
            elif c == ONE:
                t = names
            elif c == -ONE:
                t = "-" + names
            else:
                t = f"{cs}*{names}"
            if not parts:
                parts.append(t)
            elif t.startswith("-"):
                parts.append(" - " + t[1:])
            else:
                parts.append(" + " + t)
        return "".join(parts)


# d-table entries: monomial key -> parameter polynomial
FormPoly = tuple[tuple[TermKey, PolyExpr], ...]


def _formpoly_build(items: Iterable[tuple[TermKey, PolyExpr]]) -> FormPoly:
    acc: dict[TermKey, PolyExpr] = {}
    for key, p in items:
        acc[key] = acc.get(key, PolyExpr(())) + p
    return tuple(sorted(((k, p) for k, p in acc.items() if not p.is_zero()),
                        key=lambda t: t[0]))


def _formpoly_eval(fp: FormPoly, ctx: FormContext,
                   values: Mapping[str, GaussScalar]) -> FormExpr:
    return FormExpr(ctx, [(k, p.evaluate(values)) for k, p in fp])


# ---------------------------------------------------------------------------
# expression tokenizer / parser (shared by model files, constraints, CLI)
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>\d+(?:/\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[~^*+\-()])
""", re.VERBOSE)


@dataclass(frozen=True)
class _Tok:
    kind: str
    text: str
    col: int


def _tokenize(text: str, line: int) -> list[_Tok]:
    toks: list[_Tok] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ModelSyntaxError(f"unexpected character {text[pos]!r}", line, pos + 1)
        if m.lastgroup == "ws":
            pos = m.end()
            continue
        kind = m.lastgroup
        tok_text = m.group()
        if kind == "name" and tok_text == "e" and m.end() < len(text) and text[m.end()] == "[":
            close = text.find("]", m.end())
            if close < 0:
                raise ModelSyntaxError("unterminated 'e[' monomial", line, pos + 1)
            toks.append(_Tok("eidx", text[m.end() + 1:close], pos + 1))
            pos = close + 1
            continue
        toks.append(_Tok(kind, tok_text, pos + 1))
        pos = m.end()
    return toks


def _parse_indices(body: str, ctx: FormContext, line: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
    if body.count("|") != 1:
        raise ModelSyntaxError("monomial must be e[H|A] with a single '|'", line)
    holo_s, anti_s = body.split("|")
    def block(s: str) -> tuple[int, ...]:
        items = [x for x in re.split(r"[,\s]+", s.strip()) if x]
        idx = tuple(int(x) for x in items)
        for a, b in zip(idx, idx[1:]):
            if a >= b:
                raise ModelSyntaxError(f"indices must strictly ascend, got {idx}", line)
        for j in idx:
            if not 1 <= j <= ctx.n:
                raise ModelSyntaxError(f"coframe index {j} out of range 1..{ctx.n}", line)
        return idx
    return block(holo_s), block(anti_s)


class _ExprParser:
    """Recursive-descent parser producing a FormPoly."""

    def __init__(self, toks: list[_Tok], ctx: FormContext, params: Sequence[str], line: int):
        self.toks = toks
        self.i = 0
        self.ctx = ctx
        self.params = set(params)
        self.line = line
        self.empty_key: TermKey = (ctx.trivial_char, (), ())

    def _peek(self) -> _Tok | None:
        return self.toks[self.i] if self.i < len(self.toks) else None

    def _next(self) -> _Tok:
        t = self._peek()
        if t is None:
            raise ModelSyntaxError("unexpected end of expression", self.line)
        self.i += 1
        return t

    def _fail(self, msg: str, tok: _Tok | None = None):
        raise ModelSyntaxError(msg, self.line, tok.col if tok else None)

    def parse(self) -> dict[TermKey, PolyExpr]:
        out = self._expr()
        t = self._peek()
        if t is not None:
            self._fail(f"unexpected token {t.text!r}", t)
        return out

    def _expr(self) -> dict[TermKey, PolyExpr]:
        acc: dict[TermKey, PolyExpr] = {}
        sign = 1
        t = self._peek()
        if t and t.kind == "op" and t.text in "+-":
            self._next()
            sign = -1 if t.text == "-" else 1
        self._accumulate(acc, self._term(), sign)
        while True:
            t = self._peek()
            if t is None or t.kind != "op" or t.text not in "+-":
                break
            self._next()
            self._accumulate(acc, self._term(), -1 if t.text == "-" else 1)
        return acc

    @staticmethod
    def _accumulate(acc: dict[TermKey, PolyExpr], add: dict[TermKey, PolyExpr], sign: int):
        for k, p in add.items():
            q = p if sign > 0 else -p
            acc[k] = acc.get(k, PolyExpr(())) + q

    def _term(self) -> dict[TermKey, PolyExpr]:
        out = self._factor()
        while True:
            t = self._peek()
            if t is None or t.kind != "op" or t.text != "*":
                break
            self._next()
            out = self._mul(out, self._factor())
        return out

    def _mul(self, a: dict[TermKey, PolyExpr], b: dict[TermKey, PolyExpr]) -> dict[TermKey, PolyExpr]:
        acc: dict[TermKey, PolyExpr] = {}
        for k1, p1 in a.items():
            for k2, p2 in b.items():
                m = mono_wedge(k1, k2)
                if m is None:
                    continue
                key, sign = m
                p = p1 * p2
                if sign < 0:
                    p = -p
                acc[key] = acc.get(key, PolyExpr(())) + p
        return acc

    def _const(self, c: GaussScalar) -> dict[TermKey, PolyExpr]:
        return {self.empty_key: PolyExpr.const(c)}

    def _factor(self) -> dict[TermKey, PolyExpr]:
        t = self._next()
        if t.kind == "op" and t.text == "(":
            inner = self._expr()
            close = self._next()
            if close.kind != "op" or close.text != ")":
                self._fail("expected ')'", close)
            return inner
        if t.kind == "op" and t.text == "-":
            inner = self._factor()
            return {k: -p for k, p in inner.items()}
        if t.kind == "number":
            text = t.text
            imag = text.endswith("i")
            if imag:
                text = text[:-1] or "1"
            r = Fraction(text)
            return self._const(GaussScalar(0, r) if imag else GaussScalar(r))
        if t.kind == "eidx":
            holo, anti = _parse_indices(t.text, self.ctx, self.line)
            return {(self.ctx.trivial_char, holo, anti): PolyExpr.const(1)}
        if t.kind == "op" and t.text == "~":
            nm = self._next()
            if nm.kind != "name" or nm.text not in self.params:
                self._fail("~ expects a parameter name", nm)
            return {self.empty_key: PolyExpr.var(nm.text, conjugated=True)}
        if t.kind == "name":
            if t.text == "i":
                return self._const(GaussScalar(0, 1))
            if t.text in self.ctx.char_names:
                g = self.ctx.char_names.index(t.text)
                exp = 1
                nxt = self._peek()
                if nxt and nxt.kind == "op" and nxt.text == "^":
                    self._next()
                    exp = self._int()
                char = [0] * len(self.ctx.char_names)
                char[g] = exp
                return {(tuple(char), (), ()): PolyExpr.const(1)}
            if t.text in self.params:
                poly = PolyExpr.var(t.text)
                nxt = self._peek()
                if nxt and nxt.kind == "op" and nxt.text == "^":
                    self._next()
                    e = self._int()
                    if e < 0:
                        self._fail("negative parameter power", nxt)
                    out = PolyExpr.const(1)
                    for _ in range(e):
                        out = out * poly
                    poly = out
                return {self.empty_key: poly}
            self._fail(f"unknown symbol {t.text!r}", t)
        self._fail(f"unexpected token {t.text!r}", t)

    def _int(self) -> int:
        t = self._next()
        neg = False
        if t.kind == "op" and t.text == "-":
            neg = True
            t = self._next()
        if t.kind != "number" or "/" in t.text or t.text.endswith("i"):
            self._fail("expected an integer exponent", t)
        v = int(t.text)
        return -v if neg else v


def parse_expression(text: str, ctx: FormContext, params: Sequence[str] = (),
                     line: int = 1) -> dict[TermKey, PolyExpr]:
    return _ExprParser(_tokenize(text, line), ctx, params, line).parse()


def parse_form(text: str, ctx: FormContext,
               binding: "ParamBinding | None" = None) -> FormExpr:
    """Parse a concrete form (canonical text syntax) into a FormExpr."""
    params = binding.names if binding is not None else ()
    fp = parse_expression(text, ctx, params)
    values = binding.as_dict() if binding is not None else {}
    return FormExpr(ctx, [(k, p.evaluate(values)) for k, p in fp.items()])


def parse_scalar(text: str) -> GaussScalar:
    ctx = FormContext(1)
    fp = parse_expression(text, ctx)
    for key in fp:
        if key != (ctx.trivial_char, (), ()):
            raise ModelError(f"not a scalar: {text!r}")
    c = fp.get((ctx.trivial_char, (), ()), PolyExpr(())).as_const()
    if c is None:
        raise ModelError(f"not a scalar: {text!r}")
    return c


# ---------------------------------------------------------------------------
# model data types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CharacterGen:
    """A formal character generator c with d(c) = c * differential."""

    name: str
    differential: FormExpr
    conjugate_partner: str


@dataclass(frozen=True)
class LatticeRule:
    """Lattice parameter mu as a rational multiple of pi."""

    mu_over_pi: Fraction

    def __post_init__(self):
        if self.mu_over_pi <= 0:
            raise ModelError("lattice parameter must be positive")


def lattice_trivial(rule: LatticeRule, exps: Sequence[int]) -> bool:
    """Does the character monomial with exponents (p, q) on the conjugate
    generator pair restrict to 1 on the lattice?

    The restriction is exp((p+q)*lambda*a) * exp(i*(p-q)*mu*b) over integers
    a, b, so triviality means p + q = 0 and (p-q)*mu/(2*pi) integral."""
    if len(exps) != 2:
        raise ModelError("lattice rule applies to a single conjugate generator pair")
    p, q = exps
    if p + q != 0:
        return False
    return ((p - q) * rule.mu_over_pi / 2).denominator == 1


@dataclass(frozen=True)
class ModelSpec:
    name: str
    n: int
    params: tuple[str, ...]
    d_table: tuple[FormPoly, ...]                  # per coframe generator
    constraints: tuple[PolyExpr, ...] = ()         # each means poly == 0
    char_gens: tuple[CharacterGen, ...] = ()
    twists: tuple[CharExp, ...] = ()               # per coframe generator
    lattice: LatticeRule | None = None
    split: tuple[int, int] | None = None           # (fiber block, base block)
    ctx: FormContext = field(default=FormContext(0), compare=True)

    @property
    def coframe(self) -> tuple[str, ...]:
        return tuple(f"e{j}" for j in range(1, self.n + 1))

    def char_index(self, name: str) -> int:
        return self.ctx.char_names.index(name)


@dataclass(frozen=True)
class ParamBinding:
    values: tuple[tuple[str, GaussScalar], ...]

    @property
    def names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.values)

    def as_dict(self) -> dict[str, GaussScalar]:
        return dict(self.values)

    def get(self, name: str) -> GaussScalar:
        return self.as_dict()[name]


def bind_params(spec: ModelSpec, values: Mapping[str, object] | Sequence[object]) -> ParamBinding:
    """Build a binding for spec; every parameter must be given and every
    declared constraint must hold exactly."""
    if not isinstance(values, Mapping):
        seq = list(values)
        if len(seq) != len(spec.params):
            raise ConstraintError(
                f"{spec.name} takes {len(spec.params)} parameters, got {len(seq)}")
        values = dict(zip(spec.params, seq))
    vals: dict[str, GaussScalar] = {}
    for p in spec.params:
        if p not in values:
            raise ConstraintError(f"missing value for parameter {p}")
        v = values[p]
        vals[p] = v if isinstance(v, GaussScalar) else (
            parse_scalar(v) if isinstance(v, str) else GaussScalar.coerce(v))
    extra = set(values) - set(spec.params)
    if extra:
        raise ConstraintError(f"unknown parameters: {sorted(extra)}")
    for c in spec.constraints:
        got = c.evaluate(vals)
        if got:
            raise ConstraintError(
                f"constraint {c.render()} = 0 violated (got {render_scalar(got)})")
    return ParamBinding(tuple((p, vals[p]) for p in spec.params))


@dataclass(frozen=True)
class BoundModel:
    """A model with parameter values substituted; the object every
    differential-operator routine consumes."""

    spec: ModelSpec
    binding: ParamBinding
    d_gen: tuple[FormExpr, ...]        # d(eta^j), j = 1..n
    d_gen_conj: tuple[FormExpr, ...]   # d(eta^jbar)
    char_theta: tuple[FormExpr, ...]   # d(c_g) = c_g * theta_g

    @property
    def ctx(self) -> FormContext:
        return self.spec.ctx

    @property
    def n(self) -> int:
        return self.spec.n


def bind(spec: ModelSpec, values: Mapping[str, object] | Sequence[object] | ParamBinding) -> BoundModel:
    from .forms import conjugate
    binding = values if isinstance(values, ParamBinding) else bind_params(spec, values)
    if not isinstance(values, ParamBinding):
        pass
    else:
        # re-check constraints for externally built bindings
        vals = binding.as_dict()
        for c in spec.constraints:
            if c.evaluate(vals):
                raise ConstraintError(f"constraint {c.render()} = 0 violated")
    vals = binding.as_dict()
    d_gen = tuple(_formpoly_eval(fp, spec.ctx, vals) for fp in spec.d_table)
    d_conj = tuple(conjugate(f) for f in d_gen)
    theta = tuple(g.differential for g in spec.char_gens)
    return BoundModel(spec, binding, d_gen, d_conj, theta)


# ---------------------------------------------------------------------------
# model file parser
# ---------------------------------------------------------------------------

def parse_model(text: str) -> ModelSpec:
    name = None
    n = None
    params: list[str] = []
    constraints: list[PolyExpr] = []
    char_pairs: list[tuple[str, str]] = []
    char_diff_src: dict[str, tuple[str, int]] = {}
    d_src: dict[int, tuple[str, int]] = {}
    twist_src: dict[int, tuple[str, int]] = {}
    lattice: LatticeRule | None = None
    split: tuple[int, int] | None = None
    constraint_src: list[tuple[str, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        words = line.split()
        head = words[0]
        if head == "model":
            if len(words) != 4 or words[2] != "dim":
                raise ModelSyntaxError("expected 'model NAME dim N'", lineno)
            name = words[1]
            try:
                n = int(words[3])
            except ValueError:
                raise ModelSyntaxError("model dimension must be an integer", lineno)
            if n < 1:
                raise ModelSyntaxError("model dimension must be positive", lineno)
        elif head == "param":
            for p in words[1:]:
                if p in params:
                    raise ModelSyntaxError(f"duplicate parameter {p}", lineno)
                if p == "i" or not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", p):
                    raise ModelSyntaxError(f"bad parameter name {p!r}", lineno)
                params.append(p)
        elif head == "constraint":
            constraint_src.append((line[len("constraint"):].strip(), lineno))
        elif head == "char":
            if len(words) != 4 or words[2] != "conj":
                raise ModelSyntaxError("expected 'char NAME conj NAME'", lineno)
            char_pairs.append((words[1], words[3]))
        elif head == "d":
            if len(words) < 3 or words[2] != "=":
                raise ModelSyntaxError("expected 'd NAME = FORM'", lineno)
            target = words[1]
            rhs = line.split("=", 1)[1].strip()
            if re.fullmatch(r"e\d+", target):
                d_src[int(target[1:])] = (rhs, lineno)
            else:
                if target in char_diff_src:
                    raise ModelSyntaxError(f"duplicate differential for {target}", lineno)
                char_diff_src[target] = (rhs, lineno)
        elif head == "twist":
            if len(words) < 3 or words[2] != "=":
                raise ModelSyntaxError("expected 'twist eK = CHARMONOMIAL'", lineno)
            if not re.fullmatch(r"e\d+", words[1]):
                raise ModelSyntaxError("twist applies to coframe generators", lineno)
            twist_src[int(words[1][1:])] = (line.split("=", 1)[1].strip(), lineno)
        elif head == "lattice":
            m = re.fullmatch(r"lattice\s+mu\s*=\s*(\d+(?:/\d+)?)\s*\*?\s*pi", line)
            if m is None:
                raise ModelSyntaxError("expected 'lattice mu = RATIONAL pi'", lineno)
            lattice = LatticeRule(Fraction(m.group(1)))
        elif head == "split":
            if len(words) != 3:
                raise ModelSyntaxError("expected 'split L K'", lineno)
            split = (int(words[1]), int(words[2]))
        else:
            raise ModelSyntaxError(f"unknown statement {head!r}", lineno)

    if name is None or n is None:
        raise ModelSyntaxError("missing 'model NAME dim N' header", 1)
    if split is not None and split[0] + split[1] != n:
        raise ModelError(f"split {split} does not add up to dim {n}")

    char_names: list[str] = []
    for a, b in char_pairs:
        for nm in (a, b) if a != b else (a,):
            if nm in char_names:
                raise ModelError(f"duplicate character generator {nm}")
            char_names.append(nm)
    conj_perm = list(range(len(char_names)))
    for a, b in char_pairs:
        conj_perm[char_names.index(a)] = char_names.index(b)
        conj_perm[char_names.index(b)] = char_names.index(a)
    ctx = FormContext(n, tuple(char_names), tuple(conj_perm))

    trivial = ctx.trivial_char

    # structure equations
    d_table: list[FormPoly] = []
    for j in range(1, n + 1):
        src = d_src.get(j)
        if src is None:
            d_table.append(())
            continue
        rhs, lineno = src
        fp = parse_expression(rhs, ctx, params, lineno)
        entries = _formpoly_build(fp.items())
        for (char, holo, anti), _ in entries:
            if char != trivial:
                raise ModelSyntaxError(
                    "structure equations must be invariant (no character factors)", lineno)
            if len(holo) + len(anti) != 2:
                raise ModelSyntaxError(
                    "structure equation must have total degree 2", lineno)
        d_table.append(entries)

    # character differentials
    char_gens: list[CharacterGen] = []
    conj_of = dict(char_pairs) | {b: a for a, b in char_pairs}
    for nm in char_names:
        src = char_diff_src.pop(nm, None)
        if src is None:
            raise ModelError(f"character {nm} has no differential")
        rhs, lineno = src
        fp = parse_expression(rhs, ctx, params, lineno)
        terms = []
        for key, p in fp.items():
            c = p.as_const()
            if c is None:
                raise ModelSyntaxError("character differentials must be constant", lineno)
            char, holo, anti = key
            if char != trivial or len(holo) + len(anti) != 1:
                raise ModelSyntaxError(
                    "character differential must be an invariant 1-form", lineno)
            terms.append((key, c))
        char_gens.append(CharacterGen(nm, FormExpr(ctx, terms), conj_of[nm]))
    if char_diff_src:
        raise ModelError(f"differential for undeclared character {sorted(char_diff_src)}")

    # twists
    twists: list[CharExp] = [trivial] * n
    for j, (rhs, lineno) in twist_src.items():
        if not 1 <= j <= n:
            raise ModelSyntaxError(f"twist index {j} out of range", lineno)
        fp = parse_expression(rhs, ctx, params, lineno)
        items = [(k, p) for k, p in fp.items() if not p.is_zero()]
        if len(items) != 1:
            raise ModelSyntaxError("twist must be a single character monomial", lineno)
        (char, holo, anti), p = items[0]
        if holo or anti or p.as_const() != ONE:
            raise ModelSyntaxError("twist must be a bare character monomial", lineno)
        twists[j - 1] = char

    # constraints
    for src, lineno in constraint_src:
        if src.count("=") != 1:
            raise ModelSyntaxError("constraint must be 'EXPR = EXPR'", lineno)
        lhs_s, rhs_s = src.split("=")
        def scalar_poly(s: str) -> PolyExpr:
            fp = parse_expression(s, ctx, params, lineno)
            poly = PolyExpr(())
            for key, p in fp.items():
                if key != (trivial, (), ()):
                    raise ModelSyntaxError("constraints must be scalar equations", lineno)
                poly = poly + p
            return poly
        constraints.append(scalar_poly(lhs_s) - scalar_poly(rhs_s))

    return ModelSpec(
        name=name, n=n, params=tuple(params), d_table=tuple(d_table),
        constraints=tuple(constraints), char_gens=tuple(char_gens),
        twists=tuple(twists), lattice=lattice, split=split, ctx=ctx,
    )


def render_model(spec: ModelSpec) -> str:
    """Canonical text for a ModelSpec; parse(render(spec)) == spec."""
    lines = [f"model {spec.name} dim {spec.n}"]
    if spec.params:
        lines.append("param " + " ".join(spec.params))
    for c in spec.constraints:
        lines.append(f"constraint {c.render()} = 0")
    seen = set()
    for g in spec.char_gens:
        if g.name in seen:
            continue
        seen.update({g.name, g.conjugate_partner})
        lines.append(f"char {g.name} conj {g.conjugate_partner}")
    for g in spec.char_gens:
        lines.append(f"d {g.name} = {g.differential}")
    for j, tw in enumerate(spec.twists, start=1):
        if any(tw):
            mono = "*".join(f"{nm}^{e}" for nm, e in zip(spec.ctx.char_names, tw) if e)
            lines.append(f"twist e{j} = {mono}")
    if spec.lattice is not None:
        lines.append(f"lattice mu = {spec.lattice.mu_over_pi} pi")
    if spec.split is not None:
        lines.append(f"split {spec.split[0]} {spec.split[1]}")
    for j, fp in enumerate(spec.d_table, start=1):
        if not fp:
            lines.append(f"d e{j} = 0")
            continue
        parts = []
        for key, p in fp:
            c = p.as_const()
            if c is not None:
                t = render_term(spec.ctx, key, c)
            else:
                body = render_term(spec.ctx, key, ONE)
                pr = p.render()
                if len(p.terms) > 1:
                    pr = f"({pr})"
                t = f"{pr}*{body}" if not pr.startswith("-") or len(p.terms) > 1 else f"-{pr[1:]}*{body}"
            if not parts:
                parts.append(t)
            elif t.startswith("-"):
                parts.append(" - " + t[1:])
            else:
                parts.append(" + " + t)
        lines.append(f"d e{j} = " + "".join(parts))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# structural checks
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CheckEntry:
    generator: str
    ok: bool
    witness: FormExpr


@dataclass(frozen=True)
class CheckReport:
    entries: tuple[CheckEntry, ...]

    @property
    def passed(self) -> bool:
        return all(e.ok for e in self.entries)

    def failures(self) -> tuple[CheckEntry, ...]:
        return tuple(e for e in self.entries if not e.ok)


def validate(spec: ModelSpec, values) -> CheckReport:
    """Check d(d eta^j) = 0 for every coframe generator (and that every
    character differential is closed).  Constraint violations are rejected
    when the binding is built."""
    from .calculus import differential
    bm = bind(spec, values)
    entries = []
    for j in range(1, spec.n + 1):
        w = differential(bm.d_gen[j - 1], bm)
        entries.append(CheckEntry(f"e{j}", w.is_zero(), w))
    for g, theta in zip(spec.char_gens, bm.char_theta):
        w = differential(theta, bm)
        entries.append(CheckEntry(g.name, w.is_zero(), w))
    return CheckReport(tuple(entries))


def integrability_check(spec: ModelSpec, values) -> CheckReport:
    """The complex structure is integrable iff no structure equation has a
    (0,2)-component."""
    bm = bind(spec, values)
    entries = []
    for j in range(1, spec.n + 1):
        w = bm.d_gen[j - 1].component(0, 2)
        entries.append(CheckEntry(f"e{j}", w.is_zero(), w))
    return CheckReport(tuple(entries))


def is_special_type(spec: ModelSpec, bm: BoundModel) -> bool:
    """All generators but the last closed, and the last structure equation
    supported on eta^{ij}, eta^{i jbar} with i, j < n."""
    n = spec.n
    for j in range(n - 1):
        if not bm.d_gen[j].is_zero():
            return False
    for (char, holo, anti), _ in bm.d_gen[n - 1].terms:
        if any(i == n for i in holo + anti):
            return False
        if len(holo) + len(anti) != 2 or len(anti) > 1:
            return False
    return True
