"""Seeded experiment driver: theorem sweeps, sharpness suite, threshold search.

Random subsets only provide evidence for statements quantified over all
E contained in V; the explicit constructions supply the deterministic side.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import warnings
from dataclasses import asdict, dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .errors import BudgetExceededError
from .field import FieldSpec, build_field, field_of_order
from .grid import PointSet
from .polynomial import linear_factor_test
from .resultant import coverage_target, delta_k
from .varieties import (construct_isotropic_example, construct_sharp_example, construct_subfield_example,
                        named_variety, regularity_report)

CSV_COLUMNS = ("q", "d", "k", "variety", "size", "trial", "covers_star", "covers_full", "missing", "seed")
EXHAUSTIVE_MAX_VARIETY = 20
EXHAUSTIVE_MAX_SUBSETS = 200_000


class HypothesisViolation(ValueError):
    """The variety or parameters do not meet a theorem's hypotheses."""


def theorem_exponent(theorem: str, d: int, k: int) -> float:
    if theorem == "t1":
        return (d - 1) / 2 + 1 / (k - 1)
    if theorem == "t2":
        return 0.5 + 1 / (2 * k - 4)
    raise ValueError(f"unknown theorem {theorem!r}")


def threshold_size(C: float, q: int, exponent: float) -> int:
    # tolerance guards exact integers such as 4 * 25**1.5
    return math.ceil(C * q**exponent - 1e-9)


def trial_seed(master: int, counter: int) -> int:
    return master ^ counter


def sample_subset(V: PointSet, size: int, seed: int) -> PointSet:
    """Uniform sample of ``size`` points of V without replacement.

    A seeded permutation of V's sorted members is truncated, so for a fixed
    seed smaller samples are prefixes of larger ones.
    """
    if size < 1:
        raise ValueError("sample size must be >= 1")
    if size > len(V):
        raise ValueError(f"sample size {size} exceeds |V| = {len(V)}")
    perm = np.random.default_rng(seed).permutation(len(V))
    return PointSet(V.field, V.d, V.members[perm[:size]])


@dataclass
class ExperimentConfig:
    p: int
    d: int
    k: int
    sizes: list[int]
    n: int = 1
    variety: str = "sphere:1"
    trials: int = 20
    seed: int = 0
    C: float = 4.0
    theorem: str = "t1"
    clamp_to_variety: bool = False
    controls: bool = True
    exhaustive: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.sizes:
            raise ValueError("size schedule is empty")
        if self.theorem not in ("t1", "t2"):
            raise ValueError(f"unknown theorem {self.theorem!r}")

    @property
    def field(self) -> FieldSpec:
        return build_field(self.p, self.n)


@dataclass(frozen=True)
class TrialResult:
    q: int
    d: int
    k: int
    variety: str
    size: int
    trial: int
    covers_star: bool
    covers_full: bool
    missing: int
    seed: int

    def as_row(self) -> list:
        return [getattr(self, c) for c in CSV_COLUMNS]


@dataclass
class SweepResult:
    config: ExperimentConfig
    rows: list[TrialResult]
    controls: list[TrialResult]
    summary: dict = dc_field(default_factory=dict)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for row in self.rows + self.controls:
            writer.writerow(row.as_row())
        return buf.getvalue()

    def write_csv(self, path) -> None:
        Path(path).write_text(self.to_csv())

    def write_json(self, path) -> None:
        Path(path).write_text(json.dumps(self.summary, indent=2, sort_keys=True) + "\n")


def _trial_row(E: PointSet, k: int, label: str, trial: int, seed: int, target: str) -> TrialResult:
    D = delta_k(E, k)
    return TrialResult(q=E.q, d=E.d, k=k, variety=label, size=len(E), trial=trial,
                       covers_star=D.covers_star, covers_full=D.covers_full,
                       missing=D.missing(target), seed=seed)


def control_sets(field: FieldSpec, d: int) -> list[tuple[str, PointSet]]:
    """Known small-resultant sets used as negative controls."""
    out = []
    if field.sqrt_minus_one() is not None and d >= 2:
        out.append(("control:isotropic", construct_isotropic_example(field, d)))
    if field.n == 2 and d >= 2:
        out.append(("control:subfield", construct_subfield_example(field, d)))
    return out


def exhaustive_coverage(V: PointSet, k: int, size: int, target: str) -> dict:
    """Check every subset of V of the given size (only for |V| <= 20)."""
    if len(V) > EXHAUSTIVE_MAX_VARIETY:
        raise BudgetExceededError(f"exhaustive check needs |V| <= {EXHAUSTIVE_MAX_VARIETY}, got {len(V)}")
    total = math.comb(len(V), size)
    if total > EXHAUSTIVE_MAX_SUBSETS:
        raise BudgetExceededError(f"{total} subsets exceeds {EXHAUSTIVE_MAX_SUBSETS}")
    covering = 0
    for combo in itertools.combinations(V.members.tolist(), size):
        if delta_k(PointSet(V.field, V.d, combo), k, cross_check=False).covers(target):
            covering += 1
    return {"size": size, "subsets": total, "covering": covering}


def run_sweep(config: ExperimentConfig) -> SweepResult:
    field, d, k = config.field, config.d, config.k
    q = field.q
    V, Q, label = named_variety(field, d, config.variety)
    if len(V) == 0:
        raise HypothesisViolation(f"variety {config.variety!r} is empty")
    report = regularity_report(V)
    certified = report.is_regular
    notes = []
    if not certified:
        msg = f"{label} fails regularity thresholds (c_size={report.c_size:.3g}, c_decay={report.c_decay:.3g})"
        warnings.warn(msg)
        notes.append(msg)

    if config.theorem == "t1":
        if k < 3:
            raise HypothesisViolation("theorem sweep t1 requires k >= 3")
        target = coverage_target(d)
    else:
        if k < 4:
            raise HypothesisViolation("theorem sweep t2 requires k >= 4")
        if d != 2:
            raise HypothesisViolation("theorem sweep t2 requires d = 2")
        factors = linear_factor_test(Q)
        if factors:
            raise HypothesisViolation(f"curve {Q} has linear factors {[str(f) for f in factors]}")
        target = "star"

    exponent = theorem_exponent(config.theorem, d, k)
    threshold = threshold_size(config.C, q, exponent)
    clamped = False
    sizes = sorted(set(int(s) for s in config.sizes))
    if config.clamp_to_variety:
        clamped = any(s > len(V) for s in sizes) or threshold > len(V)
        sizes = sorted({min(s, len(V)) for s in sizes})
        schedule = [s for s in sizes if s >= min(threshold, len(V))]
    else:
        too_big = [s for s in sizes if s > len(V)]
        if too_big:
            raise ValueError(f"sizes {too_big} exceed |V| = {len(V)} (use clamp_to_variety)")
        schedule = [s for s in sizes if s >= threshold]
    if clamped:
        notes.append(f"threshold {threshold} or schedule exceeds |V| = {len(V)}; sizes clamped to |V|")
    if not schedule:
        notes.append(f"no scheduled size reaches the threshold {threshold}")

    rows = []
    counter = 0
    for size in schedule:
        for trial in range(config.trials):
            seed = trial_seed(config.seed, counter)
            counter += 1
            E = sample_subset(V, size, seed)
            rows.append(_trial_row(E, k, label, trial, seed, target))
    rows.sort(key=lambda r: (r.size, r.trial))

    controls = []
    if config.controls:
        for name, E in control_sets(field, d):
            controls.append(_trial_row(E, k, name, 0, -1, target))

    per_size = []
    for size in schedule:
        sel = [r for r in rows if r.size == size]
        hits = sum(1 for r in sel if (r.covers_star if target == "star" else r.covers_full))
        per_size.append({"size": size, "trials": len(sel), "covered": hits, "rate": hits / len(sel)})

    summary = {
        "theorem": config.theorem, "q": q, "d": d, "k": k, "variety": label, "variety_size": len(V),
        "C": config.C, "exponent": exponent, "threshold_size": threshold, "target": target,
        "certified_regular": certified, "regularity": report.to_dict(), "clamped": clamped,
        "seed": config.seed, "trials": config.trials, "per_size": per_size,
        "controls": [asdict(c) for c in controls],
        "evidence": "randomized evidence: sampled subsets cannot certify the statement for every E",
        "notes": notes,
    }
    if config.exhaustive:
        summary["exhaustive"] = [exhaustive_coverage(V, k, s, target) for s in schedule]
    return SweepResult(config, rows, controls, summary)


def run_theorem1_sweep(config: ExperimentConfig) -> SweepResult:
    if config.theorem != "t1":
        config = ExperimentConfig(**{**asdict(config), "theorem": "t1"})
    return run_sweep(config)


def run_theorem2_sweep(config: ExperimentConfig) -> SweepResult:
    if config.theorem != "t2":
        config = ExperimentConfig(**{**asdict(config), "theorem": "t2"})
    return run_sweep(config)


# -- sharpness -----------------------------------------------------------------------

@dataclass
class SharpnessCase:
    construction: str
    q: int
    d: int
    k: int | None
    size: int | None = None
    expected_size: int | None = None
    delta: list[int] | None = None
    expected: str = ""
    passed: bool | None = None
    skipped: str = ""


def run_sharpness_suite(fields, d: int = 3, ks=(2, 3)) -> list[SharpnessCase]:
    """Build the three small-resultant constructions and check their exact resultant sets.

    ``fields`` holds field orders q (prime powers).  Inapplicable
    combinations are returned with a ``skipped`` reason instead of failing.
    """
    cases = []
    for q in fields:
        field = field_of_order(int(q))
        squares = sorted(set(field.square_table.tolist()))
        has_i = field.sqrt_minus_one() is not None

        if d % 2 == 1 and d >= 3 and has_i:
            E = construct_sharp_example(field, d)
            for k in ks:
                D = delta_k(E, k)
                cases.append(SharpnessCase(
                    "sharp", q, d, k, len(E), q ** ((d + 1) // 2), list(D.values),
                    f"Delta_k = squares ({(q + 1) // 2} values)",
                    passed=len(E) == q ** ((d + 1) // 2) and list(D.values) == squares,
                ))
        else:
            reason = "needs odd d >= 3" if not (d % 2 == 1 and d >= 3) else "-1 is not a square"
            cases.append(SharpnessCase("sharp", q, d, None, skipped=reason))

        if has_i and d >= 2:
            E = construct_isotropic_example(field, d)
            for k in ks:
                D = delta_k(E, k)
                cases.append(SharpnessCase(
                    "isotropic", q, d, k, len(E), q ** (d // 2), list(D.values), "Delta_k = {0}",
                    passed=len(E) == q ** (d // 2) and list(D.values) == [0],
                ))
        else:
            cases.append(SharpnessCase("isotropic", q, d, None, skipped="-1 is not a square"))

        if field.n == 2 and d >= 2:
            E = construct_subfield_example(field, d)
            for k in ks:
                D = delta_k(E, k)
                in_subfield = all(v < field.p for v in D.values)
                ok = len(E) == field.p**d and in_subfield and (k != 2 or len(D) <= field.p)
                cases.append(SharpnessCase(
                    "subfield", q, d, k, len(E), field.p**d, list(D.values),
                    f"Delta_k inside F_{field.p}, |Delta_2| <= {field.p}", passed=ok,
                ))
        else:
            cases.append(SharpnessCase("subfield", q, d, None, skipped="needs q = p^2"))
    return cases


# -- threshold search ------------------------------------------------------------------

@dataclass
class ThresholdResult:
    q: int
    d: int
    k: int
    variety_size: int
    target: str
    transition: bool
    size: int | None = None
    log_q_size: float | None = None
    exponent_t1: float | None = None
    exponent_t2: float | None = None
    covers_at_size: bool | None = None
    half_size: int | None = None
    covers_at_half: bool | None = None
    evaluations: int = 0


def threshold_search(V: PointSet, k: int, trials: int, seed: int, target: str | None = None) -> ThresholdResult:
    """Smallest |E| at which every seeded sample of V covers the target.

    Samples for a given trial seed are nested across sizes, so coverage is
    monotone in size and bisection is exact for this family; the result is
    nevertheless re-verified at the returned size and at half of it.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    target = target or coverage_target(V.d)
    q, d = V.q, V.d
    res = ThresholdResult(q=q, d=d, k=k, variety_size=len(V), target=target, transition=False,
                          exponent_t1=theorem_exponent("t1", d, k) if k >= 2 else None,
                          exponent_t2=theorem_exponent("t2", d, k) if (d == 2 and k >= 4) else None)
    cache: dict[int, bool] = {}

    def covers(size):
        if size not in cache:
            res.evaluations += 1
            cache[size] = all(
                delta_k(sample_subset(V, size, trial_seed(seed, t)), k, cross_check=False).covers(target)
                for t in range(trials)
            )
        return cache[size]

    if not covers(len(V)):
        return res
    lo, hi = 1, len(V)
    while lo < hi:
        mid = (lo + hi) // 2
        if covers(mid):
            hi = mid
        else:
            lo = mid + 1
    res.transition = True
    res.size = lo
    res.log_q_size = math.log(lo) / math.log(q)
    res.covers_at_size = covers(lo)
    res.half_size = lo // 2
    res.covers_at_half = covers(lo // 2) if lo // 2 >= 1 else None
    return res
