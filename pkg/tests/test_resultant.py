import math

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from ffresultant.errors import BudgetExceededError, InvariantViolation, NumericalPrecisionError
from ffresultant.field import build_field
from ffresultant.grid import PointSet
from ffresultant.polynomial import parse_polynomial
from ffresultant.resultant import (DeltaSet, _round_exact, bound_ledger, coverage_target, default_signs, delta_k,
                                   dot_product_resultant, energy, energy_brute, energy_spectral, nu_brute,
                                   nu_profile, signed_sumset, spectral_moment, sum_histogram)
from ffresultant.varieties import construct_isotropic_example, construct_sharp_example, sphere, zero_set
from conftest import random_set
from oracles import RefField, ref_delta, ref_energy, ref_nu, ref_pi


def _tuples(E):
    return [tuple(int(c) for c in r) for r in E.coords()]


# -- Delta_k ------------------------------------------------------------------------

def test_singleton_delta():
    F = build_field(5)
    assert delta_k(PointSet(F, 2, [7]), 2).values == (0,)


def test_isotropic_delta_is_zero_for_all_k():
    E = construct_isotropic_example(build_field(5), 2)
    for k in (2, 3, 4, 5):
        assert delta_k(E, k).values == (0,)


@pytest.mark.parametrize("k", [2, 3])
def test_sharp_example_delta_is_squares(k):
    D = delta_k(construct_sharp_example(build_field(5), 3), k)
    assert D.values == (0, 1, 4)
    assert len(D) == 3 and not D.covers_full


@pytest.mark.parametrize("p,n,d,size,k", [(5, 1, 2, 4, 2), (5, 1, 2, 5, 3), (3, 2, 2, 4, 3), (3, 1, 3, 5, 3),
                                          (7, 1, 2, 3, 4)])
def test_delta_matches_reference(p, n, d, size, k, rng):
    F = build_field(p, n)
    for _ in range(3):
        E = random_set(F, d, size, rng)
        assert list(delta_k(E, k).values) == ref_delta(RefField(p, n), _tuples(E), k)


def test_delta_set_accounting():
    D = DeltaSet(5, 3, (0, 1, 4), (1, -1, -1))
    assert D.missing("full") == 2 and D.missing("star") == 2
    assert DeltaSet(5, 3, (1, 2, 3, 4), (1, -1, -1)).covers_star
    assert not DeltaSet(5, 3, (1, 2, 3, 4), (1, -1, -1)).covers_full
    assert coverage_target(2) == "star" and coverage_target(3) == "full"


def test_signs_validation():
    F = build_field(5)
    E = PointSet(F, 2, [1, 2])
    assert default_signs(3) == (1, -1, -1)
    with pytest.raises(ValueError):
        delta_k(E, 3, signs=(1, 1))
    with pytest.raises(ValueError):
        delta_k(E, 1)
    with pytest.raises(ValueError):
        delta_k(PointSet(F, 2, []), 2)


@pytest.mark.parametrize("signs", [(1, 1, 1), (1, 1, -1), (-1, 1, -1, 1)])
def test_other_sign_patterns_match_reference(signs, rng):
    F, R = build_field(5), RefField(5)
    E = random_set(F, 2, 4, rng)
    counts = ref_nu(R, _tuples(E), len(signs), signs)
    assert nu_profile(E, len(signs), signs=signs).counts.tolist() == counts
    assert list(delta_k(E, len(signs), signs=signs).values) == [t for t, c in enumerate(counts) if c]


def test_signed_sumset_singleton():
    F = build_field(5)
    E = PointSet(F, 2, [6])  # (1, 1)
    mask = signed_sumset(E, (1, 1))
    assert np.flatnonzero(mask).tolist() == [12]  # (2, 2)


# -- Pi_k -----------------------------------------------------------------------------

def test_pi_examples(rng):
    F, R = build_field(7), RefField(7)
    S = sphere(F, 3, 1)
    single = PointSet(F, 3, S.members[:1])
    assert dot_product_resultant(single, 2) == (1,)
    sub = PointSet(F, 3, rng.choice(S.members, 10, replace=False))
    assert len(dot_product_resultant(sub, 2)) == len(delta_k(sub, 2))
    assert list(dot_product_resultant(sub, 2)) == ref_pi(R, _tuples(sub), 2)
    full = sphere(build_field(5), 2, 1)
    assert len(dot_product_resultant(full, 3)) == len(delta_k(full, 3))
    assert list(dot_product_resultant(full, 3)) == ref_pi(RefField(5), _tuples(full), 3)


def test_pi_requires_unit_sphere():
    with pytest.raises(ValueError):
        dot_product_resultant(PointSet(build_field(5), 2, [0]), 2)


# -- nu_k ------------------------------------------------------------------------------

def test_nu_singleton():
    prof = nu_profile(PointSet(build_field(5), 2, [3]), 2)
    assert prof.counts.tolist() == [1, 0, 0, 0, 0]


@pytest.mark.parametrize("size,k", [(6, 2), (5, 3)])
def test_nu_matches_reference(size, k, rng):
    F, R = build_field(5), RefField(5)
    E = random_set(F, 2, size, rng)
    prof = nu_profile(E, k)
    assert prof.counts.tolist() == ref_nu(R, _tuples(E), k)
    assert prof.counts.sum() == size**k and prof.brute_checked


def test_nu_split_and_bounds(rng):
    F = build_field(7)
    E = random_set(F, 3, 30, rng)
    prof = nu_profile(E, 3)
    assert np.allclose(prof.main + prof.remainder, prof.counts)
    assert prof.bound_violations() == []
    assert prof.admissible.all()
    even = nu_profile(random_set(F, 2, 10, rng), 3)
    assert not even.admissible[0] and even.admissible[1:].all()


def test_nu_brute_budget(rng):
    E = random_set(build_field(13), 2, 40, rng)
    with pytest.raises(BudgetExceededError):
        nu_brute(E, 5)
    assert not nu_profile(E, 5).brute_checked


def test_rounding_gate():
    with pytest.raises(NumericalPrecisionError):
        _round_exact(np.array([1.0, 2.4]), "test")
    ints, res = _round_exact(np.array([1.0002, 2.0]), "test")
    assert ints.tolist() == [1, 2] and res < 1e-3


# -- energies ----------------------------------------------------------------------------

def test_energy_examples():
    F = build_field(3)
    line = zero_set(parse_polynomial("x2", F, 2))
    assert energy(line, 4, "both").value == 27
    assert energy(PointSet(F, 2, [4]), 4, "both").value == 1
    with pytest.raises(ValueError):
        energy(line, 3)
    with pytest.raises(ValueError):
        energy(line, 4, "magic")


@pytest.mark.parametrize("p,n,d,size,k", [(5, 1, 2, 6, 4), (3, 2, 2, 5, 4), (3, 1, 3, 4, 6), (7, 1, 2, 8, 4)])
def test_energy_matches_reference(p, n, d, size, k, rng):
    F = build_field(p, n)
    E = random_set(F, d, size, rng)
    expected = ref_energy(RefField(p, n), _tuples(E), k)
    assert energy_spectral(E, k) == expected
    assert energy_brute(E, k) == expected


def test_sum_histogram_total(rng):
    E = random_set(build_field(5), 2, 7, rng)
    h = sum_histogram(E, 3)
    assert h.sum() == 7**3 and h.min() >= 0


def test_energy_brute_budget(monkeypatch, rng):
    import ffresultant.resultant as res
    monkeypatch.setattr(res, "BRUTE_WORK_LIMIT", 10)
    with pytest.raises(BudgetExceededError):
        energy_brute(random_set(build_field(5), 2, 4, rng), 4)


def test_spectral_moment_examples(rng):
    F = build_field(5)
    E = random_set(F, 2, 8, rng)
    assert abs(spectral_moment(E, 2) - 8 / 25) < 1e-12
    full = PointSet(F, 2, np.arange(25))
    assert abs(spectral_moment(full, 5) - 1) < 1e-12
    lam2, lam4 = energy_brute(E, 2), energy_brute(E, 4)
    m3 = spectral_moment(E, 3)
    assert m3 <= 25 ** (-2) * math.sqrt(lam2 * lam4) * (1 + 1e-9)
    assert m3 <= 8**2 / 25**2 * (1 + 1e-9)


# -- ledger ------------------------------------------------------------------------------

def test_ledger_on_full_circle():
    F = build_field(5)
    Q = parse_polynomial("x1^2 + x2^2 - 1", F, 2)
    V = zero_set(Q)
    led = bound_ledger(V, V, 4, variety_poly=Q)
    rec = led["curve_energy_4"]
    assert rec.applicable and rec.constant == led.energies[4] / len(V) ** 2
    assert led.failures() == []


def test_ledger_gates_small_sets():
    F = build_field(5)
    V = sphere(F, 3, 1)
    E = PointSet(F, 3, V.members[:4])  # 4 <= q^{(d-1)/2} = 5
    led = bound_ledger(E, V, 3)
    assert not led["corollary_1_star"].applicable
    assert led["moment_interpolation"].passed


def test_ledger_sharp_example_predicts_nothing():
    F = build_field(5)
    E = construct_sharp_example(F, 3)
    V = PointSet(F, 3, np.arange(125))
    led = bound_ledger(E, V, 2)
    assert led.coverage["predicted"] is False and led.coverage["observed"] is False
    assert led["coverage_sufficient"].passed


def test_ledger_requires_subset():
    F = build_field(5)
    with pytest.raises(ValueError):
        bound_ledger(PointSet(F, 2, [0]), sphere(F, 2, 1), 3)


@settings(max_examples=40, deadline=None, suppress_health_check=[HealthCheck.function_scoped_fixture])
@given(st.sampled_from([(3, 2), (5, 2), (3, 3), (5, 3)]), st.integers(1, 30), st.integers(0, 2**32 - 1),
       st.sampled_from([3, 5]))
def test_constant_one_rows_never_fail(qd, size, seed, k):
    q, d = qd
    F = build_field(q)
    size = min(size, q**d)
    E = random_set(F, d, size, np.random.default_rng(seed))
    V = PointSet(F, d, np.arange(q**d))
    led = bound_ledger(E, V, k)
    assert led.failures() == []


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 12), st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_delta_is_nu_support_and_pi_has_same_size(size, seed, k):
    F = build_field(7)
    S = sphere(F, 3, 1)
    E = PointSet(F, 3, np.random.default_rng(seed).choice(S.members, size, replace=False))
    D = delta_k(E, k)  # cross-check against nu support happens inside
    assert len(dot_product_resultant(E, k)) == len(D)


def test_cross_check_raises_on_corruption(monkeypatch, rng):
    import ffresultant.resultant as res
    E = random_set(build_field(5), 2, 4, rng)
    monkeypatch.setattr(res, "signed_sumset", lambda E, s: np.zeros(25, dtype=bool) | (np.arange(25) == 0))
    with pytest.raises(InvariantViolation):
        delta_k(E, 3)
