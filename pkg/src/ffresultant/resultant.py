"""k-resultant sets, the counting function nu_k, k-energies and the bound ledger.

Conventions:

* The sign pattern is ``(+, -, ..., -)``: Delta_k(E) collects
  ``||x^1 - x^2 - ... - x^k||``.  Other patterns may be passed explicitly.
* Integers recovered from floating spectra are rounded to nearest and the
  residual must stay below :data:`ROUNDING_TOLERANCE`; otherwise a
  :class:`NumericalPrecisionError` is raised instead of returning a guess.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field as dc_field

import numpy as np

from .errors import BudgetExceededError, InvariantViolation, NumericalPrecisionError
from .fourier import transform_set
from .grid import PointSet, _all_coords, check_grid, coordinates, dot, norm_table, point_index
from .polynomial import PolynomialExpr, linear_factor_test
from .varieties import regularity_report, sphere_spectra

ROUNDING_TOLERANCE = 1e-3
BRUTE_TUPLE_LIMIT = 10**7
BRUTE_WORK_LIMIT = 2 * 10**8
DEFAULT_PREDICTION_MARGIN = 4.0
_CHUNK = 1 << 18


def default_signs(k: int) -> tuple[int, ...]:
    if k < 1:
        raise ValueError(f"k must be positive, got {k}")
    return (1,) + (-1,) * (k - 1)


def _check_signs(signs, k):
    signs = default_signs(k) if signs is None else tuple(int(s) for s in signs)
    if len(signs) != k or any(s not in (1, -1) for s in signs):
        raise ValueError(f"sign pattern must be k={k} entries of +1/-1")
    return signs


def coverage_target(d: int) -> str:
    """'star' (all nonzero values) in even dimension, 'full' in odd dimension."""
    return "star" if d % 2 == 0 else "full"


# -- resultant sets -------------------------------------------------------------------

@dataclass(frozen=True)
class DeltaSet:
    q: int
    k: int
    values: tuple[int, ...]
    signs: tuple[int, ...]

    @property
    def covers_star(self) -> bool:
        return len(set(self.values) - {0}) == self.q - 1

    @property
    def covers_full(self) -> bool:
        return len(self.values) == self.q

    def __len__(self):
        return len(self.values)

    def __contains__(self, t):
        return int(t) in self.values

    def missing(self, target: str = "full") -> int:
        if target == "full":
            return self.q - len(self.values)
        if target == "star":
            return self.q - 1 - len(set(self.values) - {0})
        raise ValueError(f"unknown coverage target {target!r}")

    def covers(self, target: str) -> bool:
        return self.missing(target) == 0

    def to_dict(self) -> dict:
        return {"q": self.q, "k": self.k, "values": list(self.values), "size": len(self.values),
                "signs": list(self.signs), "covers_star": self.covers_star, "covers_full": self.covers_full}


def _require_nonempty(E: PointSet):
    if len(E) == 0:
        raise ValueError("E must be nonempty")


def signed_sumset(E: PointSet, signs) -> np.ndarray:
    """Boolean mask of {s_1 x^1 + ... + s_k x^k : x^i in E} by iterated set arithmetic."""
    field, d = E.field, E.d
    size = check_grid(field, d)
    allc = _all_coords(field, d)
    ecoords = E.coords()
    weights = field.q ** np.arange(d, dtype=np.int64)

    def shifted(support, s):
        out = np.zeros(size, dtype=bool)
        table = field.add_table if s == 1 else field.sub_table
        sc = allc[support]
        for x in ecoords:
            out[table[sc, x] @ weights] = True
        return out

    start = np.zeros(size, dtype=bool)
    start[E.members if signs[0] == 1 else point_index(field, field.neg_table[ecoords])] = True
    mask = start
    for s in signs[1:]:
        mask = shifted(np.flatnonzero(mask), s)
    return mask


def delta_k(E: PointSet, k: int, signs=None, cross_check: bool = True) -> DeltaSet:
    """Delta_k(E) from set arithmetic, cross-checked against the support of nu_k."""
    if k < 2:
        raise ValueError("k must be >= 2")
    _require_nonempty(E)
    signs = _check_signs(signs, k)
    mask = signed_sumset(E, signs)
    values = tuple(np.unique(norm_table(E.field, E.d)[mask]).tolist())
    if cross_check:
        profile = nu_profile(E, k, signs=signs, brute_check=False)
        support = tuple(np.flatnonzero(profile.counts > 0).tolist())
        if support != values:
            raise InvariantViolation(f"set-arithmetic Delta_k {values} != nu_k support {support}")
    return DeltaSet(E.q, k, values, signs)


def dot_product_resultant(E: PointSet, k: int) -> tuple[int, ...]:
    """Pi_k(E) = {sum_{i<j} zeta_ij x^i . x^j}, zeta_1j = 1 and -1 otherwise, for E on S_1.

    Tracks the reachable states (x^1 - x^2 - ... - x^j, partial sum) stage by
    stage; appending x^{j+1} adds the pairs (i, j+1), whose signed sum is
    (x^1 - ... - x^j) . x^{j+1}.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    _require_nonempty(E)
    field, d, q = E.field, E.d, E.q
    if not np.all(norm_table(field, d)[E.members] == 1):
        raise ValueError("dot-product resultant requires E inside the unit sphere S_1")
    size = q**d
    states = np.zeros((size, q), dtype=bool)
    states[E.members, 0] = True
    for _ in range(k - 1):
        w_idx, vals = np.nonzero(states)
        nxt = np.zeros_like(states)
        for x in E.members:
            xs = np.full(len(w_idx), x)
            new_w = point_index(field, field.sub_table[coordinates(field, d, w_idx), coordinates(field, d, xs)])
            new_v = field.add_table[vals, dot(field, d, w_idx, xs)]
            nxt[new_w, new_v] = True
        states = nxt
    return tuple(np.flatnonzero(states.any(axis=0)).tolist())


# -- counting function ----------------------------------------------------------------

@dataclass
class NuProfile:
    """nu_k(t) for every t, with the main-term / remainder split.

    ``remainder_bound`` is 2 q^{dk-(d+1)/2} sum_{m != 0} |E^(m)|^k; the
    variant without the factor 2 and with m = 0 included is kept in
    ``remainder_bound_alt``.  ``admissible[t]`` marks the t for which the
    sphere decay estimate, and hence the remainder bound, applies.
    """

    k: int
    q: int
    d: int
    size: int
    counts: np.ndarray
    main: np.ndarray
    remainder: np.ndarray
    remainder_bound: float
    remainder_bound_alt: float
    admissible: np.ndarray
    residual: float
    brute_checked: bool = False
    signs: tuple = ()

    def bound_violations(self) -> list[int]:
        bad = (np.abs(self.remainder) > self.remainder_bound * (1 + 1e-9) + 1e-6) & self.admissible
        return np.flatnonzero(bad).tolist()

    def to_dict(self) -> dict:
        return {
            "k": self.k, "q": self.q, "d": self.d, "size": self.size,
            "counts": self.counts.tolist(), "main": self.main.tolist(), "remainder": self.remainder.tolist(),
            "remainder_bound": self.remainder_bound, "remainder_bound_alt": self.remainder_bound_alt,
            "admissible": self.admissible.tolist(), "residual": self.residual,
            "brute_checked": self.brute_checked, "signs": list(self.signs),
        }


def _round_exact(raw: np.ndarray, what: str) -> tuple[np.ndarray, float]:
    ints = np.rint(raw.real)
    residual = float(np.max(np.abs(raw - ints))) if raw.size else 0.0
    if residual >= ROUNDING_TOLERANCE:
        raise NumericalPrecisionError(f"{what}: rounding residual {residual:.3g} >= {ROUNDING_TOLERANCE}")
    return ints.astype(np.int64), residual


def _tuple_sum_chunks(E: PointSet, signs):
    """Yield the points s_1 x^1 + ... + s_k x^k over all k-tuples, in chunks."""
    field, d = E.field, E.d
    ec = E.coords()
    signed = [ec if s == 1 else field.neg_table[ec] for s in signs]

    def rec(prefix, level):
        if level == len(signed):
            yield point_index(field, prefix)
            return
        nxt = signed[level]
        step = max(1, _CHUNK // len(nxt))
        for lo in range(0, len(prefix), step):
            block = prefix[lo:lo + step]
            combined = field.add_table[block[:, None, :], nxt[None, :, :]].reshape(-1, d)
            yield from rec(combined, level + 1)

    yield from rec(signed[0], 1)


def nu_brute(E: PointSet, k: int, signs=None) -> np.ndarray:
    """nu_k(t) by enumerating every k-tuple (limited to |E|^k <= 10^7)."""
    _require_nonempty(E)
    signs = _check_signs(signs, k)
    if len(E) ** k > BRUTE_TUPLE_LIMIT:
        raise BudgetExceededError(f"|E|^k = {len(E) ** k} exceeds {BRUTE_TUPLE_LIMIT}")
    norms = norm_table(E.field, E.d)
    counts = np.zeros(E.q, dtype=np.int64)
    for chunk in _tuple_sum_chunks(E, signs):
        counts += np.bincount(norms[chunk], minlength=E.q)
    return counts


def nu_profile(E: PointSet, k: int, signs=None, brute_check="auto") -> NuProfile:
    """nu_k(t) = q^{dk} sum_m S_t^(m) conj(E^(m))^{#plus} E^(m)^{#minus}."""
    if k < 2:
        raise ValueError("k must be >= 2")
    _require_nonempty(E)
    signs = _check_signs(signs, k)
    field, d, q = E.field, E.d, E.q
    check_grid(field, d)
    ehat = transform_set(E).values
    plus = sum(1 for s in signs if s == 1)
    g = np.conj(ehat) ** plus * ehat ** (k - plus)
    spectra = sphere_spectra(field, d)
    scale = float(q) ** (d * k)
    raw = scale * (spectra @ g)
    counts, residual = _round_exact(raw, "nu_k")

    n = len(E)
    if int(counts.sum()) != n**k:
        raise InvariantViolation(f"sum of nu_k is {int(counts.sum())}, expected |E|^k = {n ** k}")
    sizes = np.bincount(norm_table(field, d), minlength=q).astype(float)
    main = sizes * float(n) ** k / float(q) ** d
    remainder = counts - main
    moment_nz = float(np.sum(np.abs(ehat[1:]) ** k))
    moment_all = moment_nz + float(abs(ehat[0]) ** k)
    bound = 2.0 * float(q) ** (d * k - (d + 1) / 2) * moment_nz
    bound_alt = float(q) ** (d * k - (d + 1) / 2) * moment_all
    admissible = np.ones(q, dtype=bool)
    if d % 2 == 0:
        admissible[0] = False

    checked = False
    if brute_check is True or (brute_check == "auto" and n**k <= BRUTE_TUPLE_LIMIT):
        brute = nu_brute(E, k, signs)
        if not np.array_equal(brute, counts):
            raise InvariantViolation(f"spectral nu_k {counts.tolist()} != brute force {brute.tolist()}")
        checked = True
    return NuProfile(k=k, q=q, d=d, size=n, counts=counts, main=main, remainder=remainder,
                     remainder_bound=bound, remainder_bound_alt=bound_alt, admissible=admissible,
                     residual=residual, brute_checked=checked, signs=signs)


# -- energies --------------------------------------------------------------------------

@dataclass(frozen=True)
class EnergyValue:
    k: int
    value: int
    method: str


def spectral_moment(E: PointSet, k: int) -> float:
    """sum_m |E^(m)|^k."""
    _require_nonempty(E)
    return float(np.sum(np.abs(transform_set(E).values) ** k))


def _check_even(k):
    if k < 2 or k % 2:
        raise ValueError(f"energy is defined for even k >= 2, got {k}")


def energy_spectral(E: PointSet, k: int) -> int:
    _check_even(k)
    _require_nonempty(E)
    q, d = E.q, E.d
    raw = float(q) ** (d * k - d) * spectral_moment(E, k)
    value, _ = _round_exact(np.array([raw]), f"Lambda_{k}")
    return int(value[0])


def sum_histogram(E: PointSet, m: int) -> np.ndarray:
    """h[y] = #{(x^1..x^m) in E^m : x^1 + ... + x^m = y}, exact integers."""
    field, d = E.field, E.d
    size = check_grid(field, d)
    h = np.zeros(size, dtype=np.int64)
    h[E.members] = 1
    if m > 1:
        allc = _all_coords(field, d)
        weights = field.q ** np.arange(d, dtype=np.int64)
        # translation tables: y -> y - x for every x in E
        back = [field.sub_table[allc, x] @ weights for x in E.coords()]
        for _ in range(m - 1):
            nxt = np.zeros(size, dtype=np.int64)
            for perm in back:
                nxt += h[perm]
            h = nxt
    return h


def energy_brute(E: PointSet, k: int) -> int:
    """Count solutions of x^1 + ... + x^m = x^{m+1} + ... + x^k, k = 2m, by
    squaring the histogram of m-fold sums."""
    _check_even(k)
    _require_nonempty(E)
    m = k // 2
    work = len(E) * E.q**E.d * max(m - 1, 1)
    if work > BRUTE_WORK_LIMIT:
        raise BudgetExceededError(f"histogram work {work} exceeds {BRUTE_WORK_LIMIT}")
    h = sum_histogram(E, m)
    if len(E) ** (k - 1) < 2**62:
        return int(np.dot(h, h))
    return sum(int(v) * int(v) for v in h[h > 0])


def energy(E: PointSet, k: int, method: str = "spectral") -> EnergyValue:
    """Lambda_k(E) for even k; ``method='both'`` runs both routes and requires agreement."""
    if method == "spectral":
        return EnergyValue(k, energy_spectral(E, k), "spectral")
    if method == "brute":
        return EnergyValue(k, energy_brute(E, k), "brute")
    if method == "both":
        a, b = energy_spectral(E, k), energy_brute(E, k)
        if a != b:
            raise InvariantViolation(f"Lambda_{k}: spectral {a} != brute {b}")
        return EnergyValue(k, b, "both")
    raise ValueError(f"unknown energy method {method!r}")


def _energy_best(E: PointSet, k: int) -> int:
    try:
        return energy(E, k, "both").value
    except BudgetExceededError:
        return energy_spectral(E, k)


# -- bound ledger ----------------------------------------------------------------------

@dataclass
class BoundRecord:
    name: str
    left: float | None
    right: float | None
    applicable: bool = True
    passed: bool | None = None
    note: str = ""

    @property
    def constant(self) -> float | None:
        if not self.applicable or self.left is None or not self.right:
            return None
        return self.left / self.right

    def to_dict(self) -> dict:
        out = asdict(self)
        out["constant"] = self.constant
        return out


@dataclass
class BoundLedger:
    q: int
    d: int
    k: int
    size: int
    energies: dict
    records: list[BoundRecord] = dc_field(default_factory=list)
    regularity: dict | None = None
    coverage: dict | None = None

    def add(self, *args, **kwargs) -> BoundRecord:
        rec = BoundRecord(*args, **kwargs)
        self.records.append(rec)
        return rec

    def __getitem__(self, name) -> BoundRecord:
        for rec in self.records:
            if rec.name == name:
                return rec
        raise KeyError(name)

    def failures(self) -> list[BoundRecord]:
        return [r for r in self.records if r.passed is False]

    def to_dict(self) -> dict:
        return {"q": self.q, "d": self.d, "k": self.k, "size": self.size,
                "energies": {str(k): v for k, v in self.energies.items()},
                "regularity": self.regularity, "coverage": self.coverage,
                "records": [r.to_dict() for r in self.records]}


def _leq(left, right, rel=1e-9):
    return left <= right * (1 + rel) + 1e-300


def bound_ledger(E: PointSet, V: PointSet, k: int, variety_poly: PolynomialExpr | None = None,
                 margin: float = DEFAULT_PREDICTION_MARGIN) -> BoundLedger:
    """Evaluate the energy and coverage inequalities for E inside V.

    Rows with an explicit constant 1 (Cauchy-Schwarz interpolation, the
    trivial moment bound, the energy identity and trivial energy bounds)
    carry a pass flag.  Rows whose constant is only implicit record the
    measured ratio left/right with ``passed=None``.
    """
    if k < 2:
        raise ValueError("k must be >= 2")
    _require_nonempty(E)
    if not E.issubset(V):
        raise ValueError("E is not contained in V")
    q, d, n = E.q, E.d, len(E)
    qf, nf = float(q), float(n)
    top = max(4, k if k % 2 == 0 else k + 1)
    evens = list(range(2, top + 1, 2))
    lam = {e: _energy_best(E, e) for e in evens}
    ledger = BoundLedger(q=q, d=d, k=k, size=n, energies=lam)
    ledger.regularity = regularity_report(V).to_dict()
    regular_note = "" if ledger.regularity["is_regular"] else "V not certified regular; implicit constants may grow"

    # exact statements
    for e, value in lam.items():
        moment = spectral_moment(E, e)
        ident = qf ** (d * e - d) * moment
        ledger.add(f"energy_identity_k{e}", ident, float(value), passed=abs(ident - value) < ROUNDING_TOLERANCE,
                   note="q^{dk-d} sum |E^|^k equals Lambda_k")
        ledger.add(f"energy_lower_k{e}", nf ** (e / 2), float(value), passed=n ** (e // 2) <= value,
                   note="diagonal solutions: |E|^{k/2} <= Lambda_k")
        ledger.add(f"energy_upper_k{e}", float(value), nf ** (e - 1), passed=value <= n ** (e - 1),
                   note="Lambda_k <= |E|^{k-1}")
    moment_k = spectral_moment(E, k)
    trivial = nf ** (k - 1) / qf ** (d * k - d)
    ledger.add("trivial_moment", moment_k, trivial, passed=_leq(moment_k, trivial),
               note="sum |E^|^k <= |E|^{k-1} / q^{dk-d}")
    if k % 2:
        interp = qf ** (-d * k + d) * math.sqrt(lam[k - 1] * lam[k + 1])
        ledger.add("moment_interpolation", moment_k, interp, passed=_leq(moment_k, interp),
                   note="odd k: sum |E^|^k <= q^{-dk+d} (Lambda_{k-1} Lambda_{k+1})^{1/2}")
    else:
        ledger.add("moment_interpolation", None, None, applicable=False, note="k even")

    # implicit-constant recursion and its corollaries
    for e in evens:
        if e < 4:
            continue
        ledger.add(f"energy_recursion_k{e}", float(lam[e]),
                   qf ** (d - 1) * lam[e - 2] + nf ** (e - 1) / qf, note=regular_note)
        tail = sum(qf ** ((d - 1) * j) * nf ** (-2 * j) for j in range((e - 4) // 2 + 1))
        ledger.add(f"induction_from_2_k{e}", float(lam[e]),
                   qf ** ((d - 1) * (e - 2) / 2) * lam[2] + nf ** (e - 1) / qf * tail, note=regular_note)
        if e >= 6:
            tail = sum(qf ** ((d - 1) * j) * nf ** (-2 * j) for j in range((e - 6) // 2 + 1))
            ledger.add(f"induction_from_4_k{e}", float(lam[e]),
                       qf ** ((d - 1) * (e - 4) / 2) * lam[4] + nf ** (e - 1) / qf * tail, note=regular_note)

    large = n > qf ** ((d - 1) / 2)
    gate = "" if large else "requires |E| > q^{(d-1)/2}"
    if k % 2 == 0:
        ledger.add("corollary_1", float(lam[k]),
                   qf ** ((d - 1) * (k - 2) / 2) * nf + nf ** (k - 1) / qf, applicable=large, note=gate)
        if k >= 6:
            ledger.add("corollary_2", float(lam[k]),
                       qf ** ((d - 1) * (k - 4) / 2) * lam[4] + nf ** (k - 1) / qf, applicable=large, note=gate)
        else:
            ledger.add("corollary_2", None, None, applicable=False, note="needs even k >= 6")
        ledger.add("corollary_1_star", None, None, applicable=False, note="needs odd k")
        ledger.add("corollary_2_star", None, None, applicable=False, note="needs odd k >= 7")
    else:
        prod = float(lam[k - 1]) * lam[k + 1]
        ledger.add("corollary_1", None, None, applicable=False, note="needs even k")
        ledger.add("corollary_2", None, None, applicable=False, note="needs even k >= 6")
        ledger.add("corollary_1_star", prod,
                   qf ** ((d - 1) * (k - 2)) * nf**2 + qf ** (((d - 1) * (k - 3) - 2) / 2) * nf ** (k + 1)
                   + nf ** (2 * k - 2) / qf**2, applicable=large, note=gate)
        if k >= 7:
            ledger.add("corollary_2_star", prod,
                       qf ** ((d - 1) * (k - 4)) * lam[4] ** 2
                       + qf ** (((d - 1) * (k - 5) - 2) / 2) * lam[4] * nf**k + nf ** (2 * k - 2) / qf**2,
                       applicable=large, note=gate)
        else:
            ledger.add("corollary_2_star", None, None, applicable=False, note="needs odd k >= 7")
    for rec in ledger.records:
        if rec.name.startswith("corollary") and rec.applicable and regular_note:
            rec.note = regular_note

    # fourth energy on a nondegenerate curve
    curve_ok = False
    if d == 2 and variety_poly is not None and not variety_poly.is_zero():
        curve_ok = ledger.regularity["is_regular"] and not linear_factor_test(variety_poly)
    if curve_ok:
        ledger.add("curve_energy_4", float(lam[4]), nf**2, note="Lambda_4 <= C |E|^2 on a nondegenerate curve")
    else:
        ledger.add("curve_energy_4", None, None, applicable=False,
                   note="needs d = 2 and a certified nondegenerate regular curve")

    # sufficient condition for coverage, checked against the actual resultant set
    if k % 2 == 0:
        denom = qf ** ((d + 1) / 2) * lam[k]
    else:
        denom = qf ** ((d + 1) / 2) * math.sqrt(lam[k - 1] * lam[k + 1])
    ratio = nf**k / denom
    predicted = ratio > margin
    target = coverage_target(d)
    actual = delta_k(E, k).covers(target)
    ledger.coverage = {"target": target, "ratio": ratio, "margin": margin,
                       "predicted": predicted, "observed": actual}
    ledger.add("coverage_sufficient", nf**k, denom, applicable=d >= 2,
               passed=(actual or not predicted) if d >= 2 else None,
               note=f"prediction={'true' if predicted else 'false'} (ratio {ratio:.4g} vs margin {margin}), "
                    f"observed {target} coverage={'true' if actual else 'false'}")
    return ledger
