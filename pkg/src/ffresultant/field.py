"""Arithmetic in F_q for odd prime powers q = p^n.

Elements are encoded as integer indices: the coefficient vector
(c_0, ..., c_{n-1}) of c_0 + c_1*a + ... + c_{n-1}*a^{n-1}, where ``a`` is a
root of the field modulus, maps to ``sum(c_i * p**i)``.  Index 0 is the
additive identity and index 1 the multiplicative identity.

Every table (addition, multiplication, inverses, trace, characters) is built
once when the field is constructed; afterwards a :class:`FieldSpec` is
immutable and all operations are table lookups.
"""
from __future__ import annotations

import itertools
from functools import cached_property

import numpy as np

from .errors import FieldError

DEFAULT_MAX_ORDER = 1024


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def prime_power(q: int) -> tuple[int, int]:
    """Split ``q`` into ``(p, n)`` with ``q == p**n``; raise if not a prime power."""
    if q < 2:
        raise FieldError(f"{q} is not a prime power")
    for p in range(2, q + 1):
        if q % p == 0:
            n, r = 0, q
            while r % p == 0:
                r //= p
                n += 1
            if r != 1 or not is_prime(p):
                raise FieldError(f"{q} is not a prime power")
            return p, n
    raise FieldError(f"{q} is not a prime power")  # pragma: no cover


# -- polynomials over F_p (coefficient lists, constant term first) ------------

def _poly_trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_mod(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo the monic polynomial ``m``."""
    a = _poly_trim([c % p for c in a])
    dm = len(m) - 1
    while len(a) - 1 >= dm:
        lead = a[-1]
        shift = len(a) - 1 - dm
        for i, c in enumerate(m):
            a[shift + i] = (a[shift + i] - lead * c) % p
        _poly_trim(a)
    return a


def _poly_mulmod(a: list[int], b: list[int], m: list[int], p: int) -> list[int]:
    prod = [0] * (len(a) + len(b))
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                prod[i + j] += x * y
    return _poly_mod(prod, m, p)


def _monic_polys(degree: int, p: int):
    """Monic polynomials of a given degree, lexicographic in (c_0, ..., c_{n-1})."""
    for low in itertools.product(range(p), repeat=degree):
        yield list(low) + [1]


def is_irreducible(poly: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    n = len(poly) - 1
    if n < 1:
        return False
    for deg in range(1, n // 2 + 1):
        for divisor in _monic_polys(deg, p):
            if not _poly_mod(list(poly), divisor, p):
                return False
    return True


def smallest_irreducible(p: int, n: int) -> list[int]:
    for poly in _monic_polys(n, p):
        if is_irreducible(poly, p):
            return poly
    raise FieldError(f"no irreducible polynomial of degree {n} over F_{p}")  # pragma: no cover


# -- the field ----------------------------------------------------------------

class FieldSpec:
    """A concrete finite field F_q with precomputed operation tables.

    Build instances with :func:`build_field`.
    """

    def __init__(self, p: int, n: int, modulus: list[int]):
        self.p = p
        self.n = n
        self.q = p**n
        self.modulus = tuple(modulus)
        q = self.q

        digits = np.zeros((q, n), dtype=np.int64)
        idx = np.arange(q)
        for i in range(n):
            digits[:, i] = (idx // p**i) % p
        weights = p ** np.arange(n, dtype=np.int64)
        self.digits = digits
        self.weights = weights
        if len(np.unique(digits @ weights)) != q:
            raise FieldError("element enumeration is not a bijection")  # pragma: no cover

        self.add_table = (((digits[:, None, :] + digits[None, :, :]) % p) @ weights).astype(np.int64)
        self.neg_table = ((-digits) % p) @ weights
        self.sub_table = self.add_table[:, self.neg_table]

        self.generator, self.exp_table, self.log_table = self._find_generator()
        logs = self.log_table
        mul = np.zeros((q, q), dtype=np.int64)
        nz = np.arange(1, q)
        mul[1:, 1:] = self.exp_table[(logs[nz][:, None] + logs[nz][None, :]) % (q - 1)]
        self.mul_table = mul
        inv = np.full(q, -1, dtype=np.int64)
        inv[1:] = self.exp_table[(-logs[1:]) % (q - 1)]
        self.inv_table = inv
        self.square_table = mul[idx, idx]

        # x -> x^p, then Tr(x) = x + x^p + ... + x^{p^{n-1}}
        frob = np.zeros(q, dtype=np.int64)
        frob[1:] = self.exp_table[(logs[1:] * p) % (q - 1)]
        tr = idx.copy()
        cur = idx.copy()
        for _ in range(n - 1):
            cur = frob[cur]
            tr = self.add_table[tr, cur]
        if np.any(tr >= p):
            raise FieldError("trace left the prime subfield")  # pragma: no cover
        self.trace_table = tr
        self.chi_table = np.exp(2j * np.pi * tr / p)

        half = (q - 1) // 2
        eta = np.zeros(q, dtype=np.int64)
        powers = self.exp_table[(logs[1:] * half) % (q - 1)]
        minus_one = self.neg_table[1]
        eta[1:] = np.where(powers == 1, 1, np.where(powers == minus_one, -1, 0))
        squares = set(self.square_table[1:].tolist())
        expected = np.array([0] + [1 if x in squares else -1 for x in range(1, q)])
        if np.any(eta != expected) or np.any(eta[1:] == 0):
            raise FieldError("Euler criterion disagrees with the square table")  # pragma: no cover
        self.eta_table = eta

        for name in ("digits", "add_table", "neg_table", "sub_table", "exp_table", "log_table",
                     "mul_table", "inv_table", "square_table", "trace_table", "chi_table", "eta_table"):
            getattr(self, name).setflags(write=False)

    def _find_generator(self):
        p, q, m = self.p, self.q, list(self.modulus)
        weights = [p**i for i in range(self.n)]
        for g in range(1, q):
            g_poly = [int(c) for c in self.digits[g]]
            powers = [1]
            cur = [1]
            while True:
                cur = _poly_mulmod(cur, g_poly, m, p)
                val = sum(c * w for c, w in zip(cur, weights))
                if val == 1:
                    break
                powers.append(val)
            if len(powers) == q - 1:
                exp = np.array(powers, dtype=np.int64)
                log = np.zeros(q, dtype=np.int64)
                log[exp] = np.arange(q - 1)
                return g, exp, log
        raise FieldError("multiplicative group has no generator")  # pragma: no cover

    # equality is structural so fields built twice compare equal
    def __eq__(self, other):
        return isinstance(other, FieldSpec) and (self.p, self.n, self.modulus) == (other.p, other.n, other.modulus)

    def __hash__(self):
        return hash((self.p, self.n, self.modulus))

    def __repr__(self):
        return f"FieldSpec(p={self.p}, n={self.n}, modulus={list(self.modulus)})"

    # -- element helpers --------------------------------------------------

    def __call__(self, value) -> FieldElement:
        return self.element(value)

    def element(self, index) -> FieldElement:
        if isinstance(index, FieldElement):
            if index.field != self:
                raise FieldError("element belongs to a different field")
            return index
        index = int(index)
        if not 0 <= index < self.q:
            raise FieldError(f"index {index} outside [0, {self.q})")
        return FieldElement(self, index)

    def from_int(self, value: int) -> int:
        """Index of the image of the integer ``value`` in the prime subfield."""
        return int(value) % self.p

    def elements(self) -> list[FieldElement]:
        return [FieldElement(self, i) for i in range(self.q)]

    @property
    def zero(self) -> FieldElement:
        return FieldElement(self, 0)

    @property
    def one(self) -> FieldElement:
        return FieldElement(self, 1)

    @property
    def minus_one(self) -> int:
        return int(self.neg_table[1])

    def pow(self, x: int, e: int) -> int:
        """Square-and-multiply on indices."""
        if e < 0:
            if x == 0:
                raise ZeroDivisionError("0 has no inverse")
            x, e = int(self.inv_table[x]), -e
        result, base = 1, int(x)
        while e:
            if e & 1:
                result = int(self.mul_table[result, base])
            base = int(self.mul_table[base, base])
            e >>= 1
        return result

    def sqrt_minus_one(self) -> int | None:
        """Smallest index i with i*i == -1, or None when -1 is not a square."""
        hits = np.flatnonzero(self.square_table == self.minus_one)
        return int(hits[0]) if len(hits) else None

    def format_element(self, index: int) -> str:
        """Human-readable polynomial in the generator literal ``a``."""
        coeffs = [int(c) for c in self.digits[index]]
        parts = []
        for i in reversed(range(self.n)):
            c = coeffs[i]
            if c == 0:
                continue
            mono = "" if i == 0 else ("a" if i == 1 else f"a^{i}")
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts) if parts else "0"

    @cached_property
    def character_matrix(self) -> np.ndarray:
        """``M[m, x] = chi(m * x)``, a q x q complex matrix."""
        mat = self.chi_table[self.mul_table]
        mat.setflags(write=False)
        return mat

    def info(self) -> dict:
        return {
            "p": self.p,
            "n": self.n,
            "q": self.q,
            "modulus": list(self.modulus),
            "eta_minus_one": int(self.eta_table[self.minus_one]),
            "generator": self.generator,
            "generator_poly": self.format_element(self.generator),
        }


class FieldElement:
    """A single element of a :class:`FieldSpec`, with operator overloads."""

    __slots__ = ("field", "index")

    def __init__(self, field: FieldSpec, index: int):
        self.field = field
        self.index = int(index)

    def _coerce(self, other) -> int:
        if isinstance(other, FieldElement):
            if other.field != self.field:
                raise FieldError("operands belong to different fields")
            return other.index
        if isinstance(other, (int, np.integer)):
            return self.field.from_int(int(other))
        return NotImplemented

    def __add__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.add_table[self.index, b])

    __radd__ = __add__

    def __sub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub_table[self.index, b])

    def __rsub__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.sub_table[b, self.index])

    def __mul__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, self.field.mul_table[self.index, b])

    __rmul__ = __mul__

    def __neg__(self):
        return FieldElement(self.field, self.field.neg_table[self.index])

    def inverse(self) -> FieldElement:
        if self.index == 0:
            raise ZeroDivisionError("division by zero in F_%d" % self.field.q)
        return FieldElement(self.field, self.field.inv_table[self.index])

    def __truediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return self * FieldElement(self.field, b).inverse()

    def __rtruediv__(self, other):
        b = self._coerce(other)
        if b is NotImplemented:
            return b
        return FieldElement(self.field, b) * self.inverse()

    def __pow__(self, e: int):
        return FieldElement(self.field, self.field.pow(self.index, int(e)))

    def __eq__(self, other):
        if isinstance(other, FieldElement):
            return self.field == other.field and self.index == other.index
        if isinstance(other, (int, np.integer)):
            return self.index == self.field.from_int(int(other))
        return NotImplemented

    def __hash__(self):
        return hash((self.field, self.index))

    def __int__(self):
        return self.index

    def __repr__(self):
        return f"F{self.field.q}({self.field.format_element(self.index)})"

    def trace(self) -> int:
        return trace(self)

    def chi(self) -> complex:
        return additive_character(self)

    def eta(self) -> int:
        return quadratic_character(self)


def build_field(p: int, n: int = 1, max_order: int = DEFAULT_MAX_ORDER) -> FieldSpec:
    """Construct F_{p^n} with the lexicographically smallest monic irreducible modulus.

    Raises :class:`FieldError` for even or non-prime ``p``, ``n < 1`` or
    ``p**n > max_order``.
    """
    if not is_prime(p):
        raise FieldError(f"p={p} is not prime")
    if p == 2:
        raise FieldError("characteristic 2 is not supported (q must be odd)")
    if n < 1:
        raise FieldError(f"extension degree must be >= 1, got {n}")
    if p**n > max_order:
        raise FieldError(f"q={p}**{n}={p**n} exceeds the order limit {max_order}")
    return _build_cached(p, n)


_FIELD_CACHE: dict[tuple[int, int], FieldSpec] = {}


def _build_cached(p: int, n: int) -> FieldSpec:
    key = (p, n)
    if key not in _FIELD_CACHE:
        _FIELD_CACHE[key] = FieldSpec(p, n, smallest_irreducible(p, n))
    return _FIELD_CACHE[key]


def field_of_order(q: int, max_order: int = DEFAULT_MAX_ORDER) -> FieldSpec:
    p, n = prime_power(q)
    return build_field(p, n, max_order=max_order)


_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
    "neg": lambda a, b: -a,
    "inv": lambda a, b: a.inverse(),
    "pow": lambda a, b: a ** int(b),
}


def arith(a: FieldElement, b, op: str) -> FieldElement:
    """Apply ``op`` (add, sub, mul, div, neg, inv, pow) to field elements.

    For ``pow`` the second operand is an integer exponent; ``neg`` and ``inv``
    ignore it.
    """
    try:
        fn = _OPS[op]
    except KeyError:
        raise ValueError(f"unknown operation {op!r}") from None
    if op != "pow" and isinstance(b, FieldElement) and b.field != a.field:
        raise FieldError("operands belong to different fields")
    return fn(a, b)


def trace(x: FieldElement) -> int:
    """Absolute trace to the prime field, as an integer in [0, p)."""
    return int(x.field.trace_table[x.index])


def additive_character(x: FieldElement) -> complex:
    """chi(x) = exp(2*pi*i*Tr(x)/p)."""
    return complex(x.field.chi_table[x.index])


def quadratic_character(x: FieldElement) -> int:
    return int(x.field.eta_table[x.index])
