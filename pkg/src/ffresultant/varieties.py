"""Varieties in F_q^d: spheres, paraboloids, zero sets, regularity reports
and the explicit small-distance-set constructions."""
from __future__ import annotations

from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np

from .errors import FieldError
from .field import FieldSpec
from .fourier import transform_set
from .grid import PointSet, check_grid, coordinates, norm_table, point_index
from .polynomial import PolynomialExpr, linear_factor_test, parse_polynomial

DEFAULT_SIZE_LO = 0.5
DEFAULT_SIZE_HI = 2.0
DEFAULT_DECAY_CAP = 2.0
# relative slack on threshold comparisons; the sphere attains decay constant 2 exactly
THRESHOLD_RTOL = 1e-9


def zero_set(Q: PolynomialExpr) -> PointSet:
    """Exhaustive enumeration of {x : Q(x) = 0}."""
    values = Q.evaluate_all()
    return PointSet(Q.field, Q.d, np.flatnonzero(values == 0))


def norm_polynomial(field: FieldSpec, d: int, j: int = 0) -> PolynomialExpr:
    """x1^2 + ... + xd^2 - j."""
    terms = {}
    for i in range(d):
        e = [0] * d
        e[i] = 2
        terms[tuple(e)] = 1
    if j:
        terms[(0,) * d] = int(field.neg_table[j])
    return PolynomialExpr(field, d, terms)


def paraboloid_polynomial(field: FieldSpec, d: int) -> PolynomialExpr:
    """x1^2 + ... + x_{d-1}^2 - x_d."""
    if d < 2:
        raise ValueError("paraboloid needs d >= 2")
    terms = {e + (0,): c for e, c in norm_polynomial(field, d - 1).terms.items()}
    terms[(0,) * (d - 1) + (1,)] = field.minus_one
    return PolynomialExpr(field, d, terms)


def sphere(field: FieldSpec, d: int, j: int) -> PointSet:
    """S_j = {x : ||x|| = j}."""
    if not 0 <= int(j) < field.q:
        raise FieldError(f"radius index {j} outside F_{field.q}")
    return PointSet(field, d, np.flatnonzero(norm_table(field, d) == int(j)))


def sphere_cardinality_formula(field: FieldSpec, d: int, t: int) -> int:
    """Closed-form |S_t| for d >= 2 and odd q."""
    if d < 2:
        raise ValueError("sphere cardinality formula needs d >= 2")
    q, eta = field.q, field.eta_table
    t = int(t)
    if d % 2 == 0:
        v = q - 1 if t == 0 else -1
        sign = field.pow(field.minus_one, d // 2)
        return q ** (d - 1) + v * q ** ((d - 2) // 2) * int(eta[sign])
    sign = field.pow(field.minus_one, (d - 1) // 2)
    return q ** (d - 1) + q ** ((d - 1) // 2) * int(eta[field.mul_table[sign, t]])


def paraboloid(field: FieldSpec, d: int) -> PointSet:
    if d < 2:
        raise ValueError("paraboloid needs d >= 2")
    check_grid(field, d)
    base = coordinates(field, d - 1, np.arange(field.q ** (d - 1)))
    last = norm_table(field, d - 1)
    pts = np.concatenate([base, last[:, None]], axis=1)
    return PointSet(field, d, point_index(field, pts))


@dataclass(frozen=True)
class RegularityReport:
    """Measured size and Fourier-decay constants of a point set V.

    ``c_size = |V| / q^(d-1)`` and ``c_decay = max_{m != 0} |V^(m)| q^((d+1)/2)``.
    The thresholds used for the verdict are stored alongside the raw values.
    """

    q: int
    d: int
    size: int
    c_size: float
    c_decay: float
    argmax_m: tuple
    is_regular: bool
    size_lo: float
    size_hi: float
    decay_cap: float

    def to_dict(self) -> dict:
        out = asdict(self)
        out["argmax_m"] = list(self.argmax_m)
        return out


def regularity_report(V: PointSet, size_lo: float = DEFAULT_SIZE_LO, size_hi: float = DEFAULT_SIZE_HI,
                      decay_cap: float = DEFAULT_DECAY_CAP) -> RegularityReport:
    if len(V) == 0:
        raise ValueError("regularity of an empty set is undefined")
    q, d = V.q, V.d
    spec = np.abs(transform_set(V).values)
    spec[0] = -1.0
    m = int(np.argmax(spec))
    c_decay = float(spec[m]) * q ** ((d + 1) / 2) if len(spec) > 1 else 0.0
    c_size = len(V) / q ** (d - 1)
    return RegularityReport(
        q=q, d=d, size=len(V), c_size=c_size, c_decay=c_decay,
        argmax_m=tuple(int(c) for c in coordinates(V.field, d, m)),
        is_regular=bool(size_lo <= c_size <= size_hi and c_decay <= decay_cap * (1 + THRESHOLD_RTOL)),
        size_lo=size_lo, size_hi=size_hi, decay_cap=decay_cap,
    )


def check_variety(field: FieldSpec, d: int, text: str, **thresholds) -> dict:
    """Regularity report plus, in the plane, the linear factor list."""
    Q = parse_polynomial(text, field, d)
    V = zero_set(Q)
    out = {"polynomial": str(Q), "q": field.q, "d": d, "size": len(V)}
    out["regularity"] = regularity_report(V, **thresholds).to_dict() if len(V) else None
    if d == 2 and not Q.is_zero():
        factors = linear_factor_test(Q)
        out["linear_factors"] = [str(L) for L in factors]
        out["nondegenerate_curve"] = bool(out["regularity"] and out["regularity"]["is_regular"] and not factors)
    return out


# -- constructions --------------------------------------------------------------

def _require_sqrt_minus_one(field: FieldSpec) -> int:
    i = field.sqrt_minus_one()
    if i is None:
        raise FieldError(f"-1 not a square in F_{field.q} (q = {field.q} = 3 mod 4)")
    return i


def construct_sharp_example(field: FieldSpec, d: int) -> PointSet:
    """{(t1, i t1, ..., tn, i tn, s)} for odd d = 2n + 1; its resultant sets are the squares."""
    if d < 3 or d % 2 == 0:
        raise ValueError("sharp example needs odd d >= 3")
    i = _require_sqrt_minus_one(field)
    check_grid(field, d)
    n = (d - 1) // 2
    free = coordinates(field, n + 1, np.arange(field.q ** (n + 1)))
    cols = []
    for j in range(n):
        cols += [free[:, j], field.mul_table[i, free[:, j]]]
    cols.append(free[:, n])
    return PointSet(field, d, point_index(field, np.stack(cols, axis=1)))


def construct_isotropic_example(field: FieldSpec, d: int) -> PointSet:
    """{(t1, i t1, ..., tm, i tm)}, all norms of differences vanish.

    For odd ``d`` a zero last coordinate is appended, giving q^((d-1)/2) points.
    """
    if d < 2:
        raise ValueError("isotropic example needs d >= 2")
    i = _require_sqrt_minus_one(field)
    check_grid(field, d)
    m = d // 2
    free = coordinates(field, m, np.arange(field.q**m))
    cols = []
    for j in range(m):
        cols += [free[:, j], field.mul_table[i, free[:, j]]]
    if d % 2:
        cols.append(np.zeros(len(free), dtype=np.int64))
    return PointSet(field, d, point_index(field, np.stack(cols, axis=1)))


def construct_subfield_example(field: FieldSpec, d: int) -> PointSet:
    """F_p^d sitting inside F_{p^2}^d."""
    if field.n != 2:
        raise FieldError("subfield example needs a field F_{p^2}")
    if d < 2:
        raise ValueError("subfield example needs d >= 2")
    check_grid(field, d)
    sub = coordinates(field, d, np.arange(field.q**d))
    keep = np.all(sub < field.p, axis=1)
    return PointSet(field, d, np.flatnonzero(keep))


@lru_cache(maxsize=8)
def sphere_spectra(field: FieldSpec, d: int) -> np.ndarray:
    """Row t holds the Fourier transform of S_t, shape (q, q^d)."""
    check_grid(field, d)
    rows = np.stack([transform_set(sphere(field, d, t)).values for t in range(field.q)])
    rows.setflags(write=False)
    return rows


def named_variety(field: FieldSpec, d: int, spec: str) -> tuple[PointSet, PolynomialExpr, str]:
    """Resolve ``sphere:J``, ``paraboloid`` or ``poly:EXPR`` to (V, Q, label)."""
    if spec == "paraboloid":
        return paraboloid(field, d), paraboloid_polynomial(field, d), "paraboloid"
    if spec.startswith("sphere:"):
        radius = parse_polynomial(spec.split(":", 1)[1], field, d)
        if radius.degree > 0:
            raise ValueError("sphere radius must be a constant")
        j = next(iter(radius.terms.values()), 0)
        return sphere(field, d, j), norm_polynomial(field, d, j), f"sphere:{field.format_element(j)}"
    if spec.startswith("poly:"):
        Q = parse_polynomial(spec.split(":", 1)[1], field, d)
        return zero_set(Q), Q, f"poly:{Q}"
    raise ValueError(f"unknown variety spec {spec!r} (use sphere:J, paraboloid or poly:EXPR)")
