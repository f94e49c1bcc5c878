"""Multivariate polynomials over F_q: parsing, printing, evaluation, division.

Grammar (whitespace insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor ('*' factor)*
    factor := '-' factor | power
    power  := atom ('^' INT)?
    atom   := INT | 'x' INT | 'a' | '(' expr ')'

``a`` is the generator of F_q over F_p and is only accepted when n > 1.
Integer literals are reduced into the prime subfield.
"""
from __future__ import annotations

import re
import numpy as np

from .errors import PolynomialParseError
from .field import FieldSpec
from .grid import _all_coords, check_grid

DEFAULT_DEGREE_CAP = 8
MAX_EXPONENT_LITERAL = 4096

Monomial = tuple[int, ...]


class PolynomialExpr:
    """Sparse polynomial in x1..xd with coefficients stored as field indices."""

    def __init__(self, field: FieldSpec, d: int, terms=None, degree_cap: int = DEFAULT_DEGREE_CAP):
        self.field = field
        self.d = d
        self.degree_cap = degree_cap
        clean: dict[Monomial, int] = {}
        for exps, c in dict(terms or {}).items():
            exps = tuple(int(e) for e in exps)
            if len(exps) != d or any(e < 0 for e in exps):
                raise ValueError(f"bad exponent vector {exps} for d={d}")
            c = int(c)
            if c:
                clean[exps] = c
        if clean and max(sum(e) for e in clean) > degree_cap:
            raise ValueError(f"total degree exceeds cap {degree_cap}")
        self.terms = clean

    # -- construction helpers ----------------------------------------------

    @classmethod
    def constant(cls, field, d, c: int, degree_cap=DEFAULT_DEGREE_CAP):
        return cls(field, d, {(0,) * d: c}, degree_cap)

    @classmethod
    def variable(cls, field, d, i: int, degree_cap=DEFAULT_DEGREE_CAP):
        """The coordinate x_{i+1} (``i`` is 0-based)."""
        e = [0] * d
        e[i] = 1
        return cls(field, d, {tuple(e): 1}, degree_cap)

    def _like(self, terms):
        return PolynomialExpr(self.field, self.d, terms, self.degree_cap)

    # -- ring operations ----------------------------------------------------

    def __add__(self, other: PolynomialExpr) -> PolynomialExpr:
        add = self.field.add_table
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = int(add[out.get(e, 0), c])
        return self._like(out)

    def __neg__(self) -> PolynomialExpr:
        neg = self.field.neg_table
        return self._like({e: int(neg[c]) for e, c in self.terms.items()})

    def __sub__(self, other: PolynomialExpr) -> PolynomialExpr:
        return self + (-other)

    def __mul__(self, other: PolynomialExpr) -> PolynomialExpr:
        add, mul = self.field.add_table, self.field.mul_table
        out: dict[Monomial, int] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = int(add[out.get(e, 0), mul[c1, c2]])
        return self._like(out)

    def __pow__(self, k: int) -> PolynomialExpr:
        result = PolynomialExpr.constant(self.field, self.d, 1, self.degree_cap)
        for _ in range(k):
            result = result * self
        return result

    def scale(self, c: int) -> PolynomialExpr:
        mul = self.field.mul_table
        return self._like({e: int(mul[v, c]) for e, v in self.terms.items()})

    # -- inspection -----------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, PolynomialExpr) and self.field == other.field
                and self.d == other.d and self.terms == other.terms)

    def __hash__(self):
        return hash((self.field, self.d, frozenset(self.terms.items())))

    def __len__(self):
        return len(self.terms)

    def __repr__(self):
        return f"PolynomialExpr({format_polynomial(self)!r}, q={self.field.q}, d={self.d})"

    def __str__(self):
        return format_polynomial(self)

    def is_zero(self) -> bool:
        return not self.terms

    @property
    def degree(self) -> int:
        return max((sum(e) for e in self.terms), default=-1)

    def sorted_terms(self) -> list[tuple[int, Monomial]]:
        """Terms ordered by descending total degree, then lexicographically."""
        return [(self.terms[e], e) for e in sorted(self.terms, key=lambda e: (-sum(e), tuple(-x for x in e)))]

    # -- evaluation -----------------------------------------------------------

    def evaluate_points(self, coords: np.ndarray) -> np.ndarray:
        """Values at points given as an (N, d) array of coordinate indices."""
        field = self.field
        coords = np.asarray(coords, dtype=np.int64)
        max_e = max((max(e) for e in self.terms), default=0)
        powers = [np.ones(field.q, dtype=np.int64)]
        base = np.arange(field.q)
        for _ in range(max_e):
            powers.append(field.mul_table[powers[-1], base])
        acc = np.zeros(len(coords), dtype=np.int64)
        for e, c in self.terms.items():
            val = np.full(len(coords), c, dtype=np.int64)
            for i, k in enumerate(e):
                if k:
                    val = field.mul_table[val, powers[k][coords[:, i]]]
            acc = field.add_table[acc, val]
        return acc

    def evaluate_all(self) -> np.ndarray:
        """Values at every point of F_q^d, in grid order."""
        check_grid(self.field, self.d)
        return self.evaluate_points(_all_coords(self.field, self.d))

    def __call__(self, *point) -> int:
        return int(self.evaluate_points(np.array([point]))[0])


# -- printing -------------------------------------------------------------------

def _format_coeff(field: FieldSpec, c: int) -> tuple[str, bool]:
    """(text, is_atomic) for a coefficient."""
    text = field.format_element(c)
    return text, "+" not in text


def format_polynomial(P: PolynomialExpr) -> str:
    if P.is_zero():
        return "0"
    parts = []
    for c, e in P.sorted_terms():
        mono = "*".join(
            (f"x{i + 1}" if k == 1 else f"x{i + 1}^{k}") for i, k in enumerate(e) if k
        )
        ctext, atomic = _format_coeff(P.field, c)
        if not atomic:
            ctext = f"({ctext})"
        if not mono:
            parts.append(ctext)
        elif c == 1:
            parts.append(mono)
        else:
            parts.append(f"{ctext}*{mono}")
    return " + ".join(parts)


# -- parsing --------------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\d+)|(x\d+)|(a)|([-+*^()]))")


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolynomialParseError(f"unexpected character {text[start]!r}", start, text)
        start = m.start(m.lastindex)
        tokens.append((m.group(m.lastindex), start))
        pos = m.end()
    tokens.append(("<end>", len(text)))
    return tokens


class _Parser:
    def __init__(self, text, field, d, degree_cap):
        self.text = text
        self.field = field
        self.d = d
        self.cap = degree_cap
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def error(self, msg, pos=None):
        if pos is None:
            pos = self.peek()[1]
        return PolynomialParseError(msg, pos, self.text)

    def const(self, c):
        return PolynomialExpr.constant(self.field, self.d, c, self.cap)

    def parse(self):
        if self.peek()[0] == "<end>":
            raise self.error("empty expression")
        node = self.expr()
        if self.peek()[0] != "<end>":
            raise self.error(f"unexpected token {self.peek()[0]!r}")
        return node

    def expr(self):
        node = self.term()
        while self.peek()[0] in ("+", "-"):
            op, _ = self.take()
            rhs = self.term()
            node = node + rhs if op == "+" else node - rhs
        return node

    def term(self):
        node = self.factor()
        while self.peek()[0] == "*":
            self.take()
            node = node * self.factor()
        return node

    def factor(self):
        if self.peek()[0] == "-":
            self.take()
            return -self.factor()
        return self.power()

    def power(self):
        node = self.atom()
        if self.peek()[0] == "^":
            self.take()
            tok, pos = self.take()
            if not tok.isdigit():
                raise self.error("exponent must be a nonnegative integer", pos)
            k = int(tok)
            if k > MAX_EXPONENT_LITERAL:
                raise self.error(f"exponent overflow ({k} > {MAX_EXPONENT_LITERAL})", pos)
            if node.degree <= 0:
                c = next(iter(node.terms.values()), 0)
                node = self.const(self.field.pow(c, k))
            else:
                if node.degree * k > self.cap:
                    raise self.error(f"exponent overflow: degree {node.degree * k} exceeds cap {self.cap}", pos)
                node = node**k
        return node

    def atom(self):
        tok, pos = self.take()
        if tok.isdigit():
            return self.const(self.field.from_int(int(tok)))
        if tok.startswith("x"):
            i = int(tok[1:])
            if not 1 <= i <= self.d:
                raise self.error(f"unknown variable {tok!r} (d={self.d})", pos)
            return PolynomialExpr.variable(self.field, self.d, i - 1, self.cap)
        if tok == "a":
            if self.field.n == 1:
                raise self.error("generator literal 'a' is only valid in extension fields", pos)
            return self.const(self.field.p)  # coefficient vector (0, 1, 0, ...)
        if tok == "(":
            node = self.expr()
            if self.peek()[0] != ")":
                raise self.error("expected ')'")
            self.take()
            return node
        if tok == "<end>":
            raise self.error("unexpected end of input", pos)
        raise self.error(f"unexpected token {tok!r}", pos)


def parse_polynomial(text: str, field: FieldSpec, d: int, degree_cap: int = DEFAULT_DEGREE_CAP) -> PolynomialExpr:
    """Parse ``text`` into a canonical expanded polynomial over ``field``.

    Raises :class:`PolynomialParseError` carrying the offending position.
    """
    parser = _Parser(text, field, d, degree_cap)
    try:
        return parser.parse()
    except ValueError as exc:
        if isinstance(exc, PolynomialParseError):
            raise
        raise PolynomialParseError(str(exc), parser.peek()[1], text) from None


# -- division by linear forms (d = 2) ---------------------------------------------

def divide_by_linear(Q: PolynomialExpr, L: PolynomialExpr) -> tuple[PolynomialExpr, PolynomialExpr]:
    """Divide ``Q`` by a monic linear ``L`` in two variables.

    ``L`` is either ``x1 + b*x2 + c`` (leading variable x1) or ``x2 + c``.
    Returns ``(quotient, remainder)`` with ``Q == quotient*L + remainder`` and
    the remainder free of the leading variable.
    """
    if Q.d != 2 or L.d != 2:
        raise ValueError("linear division is implemented for d = 2")
    if L.terms.get((1, 0)) == 1:
        lead = 0
    elif (1, 0) not in L.terms and L.terms.get((0, 1)) == 1:
        lead = 1
    else:
        raise ValueError("divisor must be monic linear")
    if L.degree != 1:
        raise ValueError("divisor must be monic linear")
    field = Q.field
    add, mul, neg = field.add_table, field.mul_table, field.neg_table
    rest = {e: c for e, c in L.terms.items() if e[lead] == 0}  # L = x_lead + rest
    rem = dict(Q.terms)
    quo: dict[Monomial, int] = {}
    while True:
        pending = [e for e in rem if e[lead] > 0]
        if not pending:
            break
        e = max(pending, key=lambda e: (e[lead], e))
        c = rem.pop(e)
        shifted = list(e)
        shifted[lead] -= 1
        shifted = tuple(shifted)
        quo[shifted] = int(add[quo.get(shifted, 0), c])
        # rem -= c * x^shifted * rest
        for re_, rc in rest.items():
            t = tuple(a + b for a, b in zip(shifted, re_))
            v = int(add[rem.get(t, 0), neg[mul[c, rc]]])
            if v:
                rem[t] = v
            else:
                rem.pop(t, None)
    cap = max(Q.degree_cap, 1)
    return PolynomialExpr(field, 2, quo, cap), PolynomialExpr(field, 2, rem, cap)


def monic_linear_forms(field: FieldSpec):
    """All q^2 + q monic linear polynomials in x1, x2."""
    for b in range(field.q):
        for c in range(field.q):
            yield PolynomialExpr(field, 2, {(1, 0): 1, (0, 1): b, (0, 0): c})
    for c in range(field.q):
        yield PolynomialExpr(field, 2, {(0, 1): 1, (0, 0): c})


def linear_factor_test(Q: PolynomialExpr) -> list[PolynomialExpr]:
    """Every monic linear polynomial dividing ``Q`` exactly (d = 2 only)."""
    if Q.d != 2:
        raise ValueError("linear factor test requires d = 2")
    if Q.is_zero():
        raise ValueError("zero polynomial has every linear factor")
    return [L for L in monic_linear_forms(Q.field) if divide_by_linear(Q, L)[1].is_zero()]
