import itertools

import numpy as np
import pytest

from ffresultant.errors import FieldError
from ffresultant.field import build_field
from ffresultant.grid import PointSet
from ffresultant.polynomial import parse_polynomial
from ffresultant.varieties import (check_variety, construct_isotropic_example, construct_sharp_example,
                                   construct_subfield_example, named_variety, paraboloid, paraboloid_polynomial,
                                   regularity_report, sphere, sphere_cardinality_formula, sphere_spectra, zero_set)
from oracles import RefField

SMALL = [(3, 1), (5, 1), (7, 1), (3, 2)]


def _ref_points(E):
    return {tuple(int(c) for c in row) for row in E.coords()}


def test_zero_set_examples():
    F = build_field(3)
    assert _ref_points(zero_set(parse_polynomial("x1", F, 2))) == {(0, 0), (0, 1), (0, 2)}
    assert _ref_points(zero_set(parse_polynomial("x1^2 + x2^2 - 1", F, 2))) == {(0, 1), (0, 2), (1, 0), (2, 0)}
    assert len(zero_set(parse_polynomial("1", F, 2))) == 0


@pytest.mark.parametrize("q,d,j,size", [(3, 2, 1, 4), (5, 2, 0, 9), (3, 3, 0, 9)])
def test_sphere_examples(q, d, j, size):
    assert len(sphere(build_field(q), d, j)) == size


def test_sphere_formula_examples():
    assert sphere_cardinality_formula(build_field(3), 2, 1) == 4
    assert sphere_cardinality_formula(build_field(5), 2, 0) == 9
    assert sphere_cardinality_formula(build_field(3), 3, 0) == 9


@pytest.mark.parametrize("p,n", SMALL)
@pytest.mark.parametrize("d", [2, 3])
def test_sphere_matches_reference_enumeration(p, n, d):
    F, R = build_field(p, n), RefField(p, n)
    for t in range(F.q):
        expected = {x for x in R.points(d) if R.norm(x) == t}
        S = sphere(F, d, t)
        assert _ref_points(S) == expected
        assert len(S) == sphere_cardinality_formula(F, d, t)


def test_sphere_equals_zero_set_of_norm_polynomial():
    F = build_field(3, 2)
    V, Q, label = named_variety(F, 2, "sphere:a")
    assert V == zero_set(Q)
    assert label == "sphere:a"


def test_paraboloid_examples():
    F3 = build_field(3)
    P = paraboloid(F3, 2)
    assert _ref_points(P) == {(x, x * x % 3) for x in range(3)}
    assert len(paraboloid(build_field(5), 3)) == 25
    assert (1, 1, 2) in paraboloid(F3, 3)
    assert paraboloid(F3, 3) == zero_set(paraboloid_polynomial(F3, 3))


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11, 13])
@pytest.mark.parametrize("d", [2, 3])
def test_paraboloid_is_regular(q, d):
    p = {9: 3}.get(q, q)
    n = 2 if q == 9 else 1
    rep = regularity_report(paraboloid(build_field(p, n), d))
    assert rep.c_size == 1
    assert rep.c_decay <= 2 + 1e-9
    assert rep.is_regular


def test_sphere_decay_and_hyperplane_irregularity():
    F = build_field(5)
    rep = regularity_report(sphere(F, 3, 1))
    assert rep.c_decay <= 2 + 1e-9 and rep.is_regular
    hyper = regularity_report(zero_set(parse_polynomial("x1", F, 2)))
    assert abs(hyper.c_decay - 5**0.5) < 1e-9
    assert not hyper.is_regular


def test_regularity_thresholds_are_recorded():
    rep = regularity_report(sphere(build_field(5), 2, 1), decay_cap=0.5)
    assert not rep.is_regular and rep.decay_cap == 0.5
    with pytest.raises(ValueError):
        regularity_report(PointSet(build_field(5), 2, []))


@pytest.mark.parametrize("q,d", [(5, 2), (7, 3), (3, 4)])
def test_sphere_spectra_rows(q, d):
    F = build_field(q)
    rows = sphere_spectra(F, d)
    sizes = [len(sphere(F, d, t)) for t in range(q)]
    assert np.allclose(rows[:, 0].real, np.array(sizes) / q**d)


def test_check_variety_plane_report():
    out = check_variety(build_field(5), 2, "x1^2 + x2^2")
    assert out["linear_factors"] == ["x1 + 2*x2", "x1 + 3*x2"]
    assert out["nondegenerate_curve"] is False
    circle = check_variety(build_field(7), 2, "x1^2 + x2^2 - 1")
    assert circle["nondegenerate_curve"] is True


@pytest.mark.parametrize("q,i", [(5, 2), (13, 5)])
def test_sharp_example(q, i):
    F = build_field(q)
    E = construct_sharp_example(F, 3)
    assert len(E) == q**2
    assert F.sqrt_minus_one() == i
    R = RefField(q)
    squares = R.squares()
    if q == 5:
        pts = [tuple(int(c) for c in r) for r in E.coords()]
        for x, y in itertools.product(pts, repeat=2):
            assert R.norm(R.vsub(x, y)) in squares


def test_sharp_example_rejections():
    with pytest.raises(FieldError):
        construct_sharp_example(build_field(7), 3)
    with pytest.raises(ValueError):
        construct_sharp_example(build_field(5), 2)


@pytest.mark.parametrize("q,d,size", [(5, 2, 5), (13, 2, 13), (5, 4, 25), (5, 3, 5)])
def test_isotropic_example(q, d, size):
    F = build_field(q)
    E = construct_isotropic_example(F, d)
    assert len(E) == size
    R = RefField(q)
    pts = [tuple(int(c) for c in r) for r in E.coords()]
    assert all(R.norm(R.vsub(x, y)) == 0 for x in pts for y in pts)
    if (q, d) == (5, 2):
        assert _ref_points(E) == {(t, 2 * t % 5) for t in range(5)}


def test_subfield_example():
    F = build_field(3, 2)
    E = construct_subfield_example(F, 2)
    assert len(E) == 9
    assert E.coords().max() < 3
    with pytest.raises(FieldError):
        construct_subfield_example(build_field(5), 2)
    with pytest.raises(ValueError):
        construct_subfield_example(build_field(5, 2), 1)


def test_named_variety_errors():
    F = build_field(5)
    with pytest.raises(ValueError):
        named_variety(F, 2, "torus")
    with pytest.raises(ValueError):
        named_variety(F, 2, "sphere:x1")
    V, _, label = named_variety(F, 2, "poly:x1*x2")
    assert len(V) == 9 and label == "poly:x1*x2"
