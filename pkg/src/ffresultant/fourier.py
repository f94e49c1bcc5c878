"""Normalized Fourier transform on the additive group F_q^d.

Forward:  F(m) = q^{-d} * sum_x chi(-m.x) f(x)
Inverse:  f(x) = sum_m chi(m.x) F(m)

The forward transform is computed by applying the q x q character matrix
along each of the d axes in turn, O(d * q^{d+1}) work.  :func:`naive_transform`
keeps the direct double sum as an independent check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .field import FieldSpec
from .grid import PointSet, _all_coords, check_grid


@dataclass(frozen=True, eq=False)
class GridFunction:
    """A complex-valued function on F_q^d, flat-indexed with x_1 fastest."""

    field: FieldSpec
    d: int
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=complex)
        if vals.shape != (self.field.q**self.d,):
            raise ValueError(f"expected {self.field.q**self.d} values, got shape {vals.shape}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def indicator(cls, E: PointSet) -> "GridFunction":
        vals = np.zeros(E.field.q**E.d, dtype=complex)
        vals[E.members] = 1.0
        return cls(E.field, E.d, vals)

    @classmethod
    def zeros(cls, field: FieldSpec, d: int) -> "GridFunction":
        return cls(field, d, np.zeros(field.q**d, dtype=complex))

    def cube(self) -> np.ndarray:
        """View as a d-dimensional array indexed ``[x_1, ..., x_d]``."""
        return self.values.reshape((self.field.q,) * self.d, order="F")


class Spectrum(GridFunction):
    """Fourier coefficients; entry m holds the transform at frequency m."""


def _apply_along_axes(cube: np.ndarray, mat: np.ndarray) -> np.ndarray:
    out = cube
    for axis in range(cube.ndim):
        # contract mat[m, x] with axis x, then put the new axis back in place
        out = np.moveaxis(np.tensordot(mat, out, axes=([1], [axis])), 0, axis)
    return out


def _flatten(cube: np.ndarray) -> np.ndarray:
    return np.ascontiguousarray(cube.reshape(-1, order="F"))


def forward_transform(f: GridFunction) -> Spectrum:
    field, d = f.field, f.d
    check_grid(field, d)
    mat = np.conj(field.character_matrix)  # chi(-m x) = conj chi(m x)
    out = _apply_along_axes(f.cube(), mat) / field.q**d
    return Spectrum(field, d, _flatten(out))


def inverse_transform(F: Spectrum) -> GridFunction:
    field, d = F.field, F.d
    check_grid(field, d)
    out = _apply_along_axes(F.cube(), field.character_matrix)
    return GridFunction(field, d, _flatten(out))


def transform_set(E: PointSet) -> Spectrum:
    return forward_transform(GridFunction.indicator(E))


def plancherel_residual(f: GridFunction) -> float:
    """|sum_m |F(m)|^2 - q^{-d} sum_x |f(x)|^2|."""
    spec = forward_transform(f)
    lhs = float(np.sum(np.abs(spec.values) ** 2))
    rhs = float(np.sum(np.abs(f.values) ** 2)) / f.field.q**f.d
    return abs(lhs - rhs)


def character_sum_matrix(field: FieldSpec, d: int) -> np.ndarray:
    """Full q^d x q^d matrix ``chi(m.x)`` built from explicit dot products."""
    check_grid(field, d)
    coords = _all_coords(field, d)
    prods = field.mul_table[coords[:, None, :], coords[None, :, :]]
    acc = prods[..., 0]
    for i in range(1, d):
        acc = field.add_table[acc, prods[..., i]]
    return field.chi_table[acc]


def naive_transform(f: GridFunction) -> Spectrum:
    """Direct O(q^{2d}) double sum; a test oracle for :func:`forward_transform`."""
    mat = np.conj(character_sum_matrix(f.field, f.d))
    return Spectrum(f.field, f.d, mat @ f.values / f.field.q**f.d)


def negate_frequency(field: FieldSpec, d: int) -> np.ndarray:
    """Permutation sending the index of m to the index of -m."""
    coords = _all_coords(field, d)
    return field.neg_table[coords] @ (field.q ** np.arange(d, dtype=np.int64))
