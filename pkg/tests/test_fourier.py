import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ffresultant.errors import BudgetExceededError
from ffresultant.field import build_field
from ffresultant.fourier import (GridFunction, Spectrum, forward_transform, inverse_transform, naive_transform,
                                 negate_frequency, plancherel_residual, transform_set)
from ffresultant.grid import PointSet, point_index
from conftest import random_set
from oracles import RefField, ref_transform

GRIDS = [(3, 1, 1), (3, 1, 2), (5, 1, 2), (3, 2, 2), (7, 1, 2), (3, 1, 3), (5, 1, 3), (3, 2, 1)]


def _random_function(field, d, rng):
    n = field.q**d
    return GridFunction(field, d, rng.normal(size=n) + 1j * rng.normal(size=n))


@pytest.mark.parametrize("p,n,d", [(3, 1, 2), (5, 1, 2), (3, 2, 2), (3, 1, 3)])
def test_transform_matches_reference_double_sum(p, n, d, rng):
    F = build_field(p, n)
    f = _random_function(F, d, rng)
    expected = ref_transform(RefField(p, n), d, f.values.tolist())
    assert np.max(np.abs(forward_transform(f).values - np.array(expected))) < 1e-10


@pytest.mark.parametrize("p,n,d", GRIDS)
def test_split_transform_matches_naive(p, n, d, rng):
    F = build_field(p, n)
    f = _random_function(F, d, rng)
    assert np.max(np.abs(forward_transform(f).values - naive_transform(f).values)) < 1e-10


def test_delta_at_origin_has_flat_spectrum():
    F = build_field(5)
    E = PointSet(F, 2, [0])
    assert np.allclose(transform_set(E).values, 1 / 25, atol=1e-15)


def test_constant_function_transforms_to_delta():
    F = build_field(3, 2)
    spec = forward_transform(GridFunction(F, 2, np.ones(81))).values
    assert abs(spec[0] - 1) < 1e-12
    assert np.max(np.abs(spec[1:])) < 1e-12


def test_zero_frequency_is_density(rng):
    F = build_field(3)
    E = random_set(F, 2, 5, rng)
    assert abs(transform_set(E).values[0] - 5 / 9) < 1e-12


def test_inverse_of_zero_and_single_frequency():
    F = build_field(5)
    assert np.all(inverse_transform(Spectrum.zeros(F, 2)).values == 0)
    R = RefField(5)
    m0 = (2, 3)
    vals = np.zeros(25, dtype=complex)
    vals[point_index(F, np.array([m0]))[0]] = 1
    f = inverse_transform(Spectrum(F, 2, vals)).values
    expected = [R.chi(R.dot(m0, x)) for x in R.points(2)]
    assert np.max(np.abs(f - np.array(expected))) < 1e-12


@pytest.mark.parametrize("p,n,d", GRIDS + [(5, 1, 4)])
def test_round_trip(p, n, d, rng):
    F = build_field(p, n)
    f = _random_function(F, d, rng)
    back = inverse_transform(forward_transform(f)).values
    assert np.max(np.abs(back - f.values)) < 1e-9


def test_plancherel_examples(rng):
    F = build_field(5)
    E = random_set(F, 2, 7, rng)
    assert abs(np.sum(np.abs(transform_set(E).values) ** 2) - 7 / 25) < 1e-12
    assert plancherel_residual(GridFunction.zeros(F, 2)) == 0
    G = build_field(3)
    f = _random_function(G, 3, rng)
    assert plancherel_residual(f) / (np.sum(np.abs(f.values) ** 2) / 27) < 1e-9


def test_indicator_spectrum_is_hermitian(rng):
    F = build_field(7)
    E = random_set(F, 2, 11, rng)
    spec = transform_set(E).values
    neg = negate_frequency(F, 2)
    assert np.allclose(spec[neg], np.conj(spec), atol=1e-13)


def test_shape_validation_and_budget(monkeypatch):
    F = build_field(3)
    with pytest.raises(ValueError):
        GridFunction(F, 2, np.zeros(8))
    monkeypatch.setenv("FFR_MAX_GRID", "100")
    with pytest.raises(BudgetExceededError):
        forward_transform(GridFunction.zeros(build_field(5), 3))


def test_cube_indexing_puts_x1_fastest():
    F = build_field(3)
    vals = np.arange(9)
    cube = GridFunction(F, 2, vals).cube()
    assert cube[1, 0].real == 1 and cube[0, 1].real == 3


@settings(max_examples=30, deadline=None)
@given(st.sampled_from([(3, 1, 2), (5, 1, 2), (3, 2, 2)]),
       arrays(np.float64, 81, elements=st.floats(-5, 5)),
       arrays(np.float64, 81, elements=st.floats(-5, 5)),
       st.floats(-3, 3))
def test_linearity(grid, a, b, c):
    p, n, d = grid
    F = build_field(p, n)
    size = F.q**d
    f, g = GridFunction(F, d, a[:size]), GridFunction(F, d, b[:size])
    lhs = forward_transform(GridFunction(F, d, f.values + c * g.values)).values
    rhs = forward_transform(f).values + c * forward_transform(g).values
    assert np.max(np.abs(lhs - rhs)) < 1e-9
