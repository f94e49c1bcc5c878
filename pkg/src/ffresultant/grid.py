"""Points of F_q^d, finite point sets and their JSON file format.

A point ``x = (x_1, ..., x_d)`` is stored as the mixed-radix index
``sum(index(x_i) * q**(i-1))``, so ``x_1`` varies fastest.  Every module uses
this convention.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import BudgetExceededError
from .field import FieldSpec, build_field

DEFAULT_MAX_GRID = 10**6


def max_grid() -> int:
    """Cap on q^d, overridable through the ``FFR_MAX_GRID`` environment variable."""
    return int(os.environ.get("FFR_MAX_GRID", DEFAULT_MAX_GRID))


def check_grid(field: FieldSpec, d: int) -> int:
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    size = field.q**d
    if size > max_grid():
        raise BudgetExceededError(f"q^d = {field.q}^{d} = {size} exceeds FFR_MAX_GRID={max_grid()}")
    return size


def coordinates(field: FieldSpec, d: int, indices) -> np.ndarray:
    """(N, d) array of coordinate element indices for the given point indices."""
    indices = np.asarray(indices, dtype=np.int64)
    q = field.q
    return np.stack([(indices // q**i) % q for i in range(d)], axis=-1)


def point_index(field: FieldSpec, coords) -> np.ndarray:
    coords = np.asarray(coords, dtype=np.int64)
    d = coords.shape[-1]
    return coords @ (field.q ** np.arange(d, dtype=np.int64))


@lru_cache(maxsize=32)
def _all_coords(field: FieldSpec, d: int) -> np.ndarray:
    out = coordinates(field, d, np.arange(field.q**d))
    out.setflags(write=False)
    return out


def _coordwise(field: FieldSpec, d: int, table: np.ndarray, a, b) -> np.ndarray:
    ca = coordinates(field, d, a)
    cb = coordinates(field, d, b)
    return point_index(field, table[ca, cb])


def point_add(field: FieldSpec, d: int, a, b) -> np.ndarray:
    return _coordwise(field, d, field.add_table, a, b)


def point_sub(field: FieldSpec, d: int, a, b) -> np.ndarray:
    return _coordwise(field, d, field.sub_table, a, b)


def point_neg(field: FieldSpec, d: int, a) -> np.ndarray:
    return point_index(field, field.neg_table[coordinates(field, d, a)])


def dot(field: FieldSpec, d: int, a, b) -> np.ndarray:
    """Bilinear form sum_i a_i b_i, elementwise over broadcast index arrays."""
    prods = field.mul_table[coordinates(field, d, a), coordinates(field, d, b)]
    acc = prods[..., 0]
    for i in range(1, d):
        acc = field.add_table[acc, prods[..., i]]
    return acc


@lru_cache(maxsize=32)
def norm_table(field: FieldSpec, d: int) -> np.ndarray:
    """``||x|| = x_1^2 + ... + x_d^2`` for every point of F_q^d."""
    check_grid(field, d)
    sq = field.square_table[_all_coords(field, d)]
    acc = sq[:, 0]
    for i in range(1, d):
        acc = field.add_table[acc, sq[:, i]]
    acc = np.ascontiguousarray(acc)
    acc.setflags(write=False)
    return acc


@dataclass(frozen=True, eq=False)
class PointSet:
    """A finite subset of F_q^d, stored as sorted unique point indices."""

    field: FieldSpec
    d: int
    members: np.ndarray

    def __post_init__(self):
        m = np.unique(np.asarray(self.members, dtype=np.int64))
        if len(m) and (m[0] < 0 or m[-1] >= self.field.q**self.d):
            raise ValueError("point index out of range for F_q^d")
        m.setflags(write=False)
        object.__setattr__(self, "members", m)

    @classmethod
    def from_coords(cls, field: FieldSpec, coords) -> PointSet:
        coords = np.atleast_2d(np.asarray(coords, dtype=np.int64))
        if np.any(coords < 0) or np.any(coords >= field.q):
            raise ValueError("coordinate outside [0, q)")
        return cls(field, coords.shape[1], point_index(field, coords))

    @property
    def q(self) -> int:
        return self.field.q

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members.tolist())

    def __contains__(self, point) -> bool:
        if not isinstance(point, (int, np.integer)):
            point = int(point_index(self.field, point))
        i = np.searchsorted(self.members, point)
        return bool(i < len(self.members) and self.members[i] == point)

    def __eq__(self, other):
        return (isinstance(other, PointSet) and self.field == other.field and self.d == other.d
                and np.array_equal(self.members, other.members))

    def __repr__(self):
        return f"PointSet(q={self.q}, d={self.d}, size={len(self)})"

    def coords(self) -> np.ndarray:
        return coordinates(self.field, self.d, self.members)

    def mask(self) -> np.ndarray:
        m = np.zeros(self.field.q**self.d, dtype=bool)
        m[self.members] = True
        return m

    def issubset(self, other: PointSet) -> bool:
        return (self.field == other.field and self.d == other.d
                and bool(np.all(np.isin(self.members, other.members))))

    def to_json(self) -> dict:
        return {"p": self.field.p, "n": self.field.n, "d": self.d,
                "points": self.coords().tolist()}


def read_pointset(path) -> PointSet:
    """Load a point set written by :func:`write_pointset`.

    Coordinates must be canonical element indices in [0, q); duplicate points
    are rejected rather than merged.
    """
    data = json.loads(Path(path).read_text())
    return pointset_from_json(data)


def pointset_from_json(data: dict) -> PointSet:
    for key in ("p", "n", "d", "points"):
        if key not in data:
            raise ValueError(f"point set file is missing {key!r}")
    field = build_field(int(data["p"]), int(data["n"]))
    d = int(data["d"])
    check_grid(field, d)
    pts = data["points"]
    coords = np.asarray(pts, dtype=np.int64).reshape(len(pts), d) if pts else np.zeros((0, d), np.int64)
    if coords.size and (coords.min() < 0 or coords.max() >= field.q):
        raise ValueError(f"coordinate outside [0, {field.q})")
    idx = point_index(field, coords) if len(coords) else np.zeros(0, np.int64)
    if len(np.unique(idx)) != len(idx):
        raise ValueError("point set file contains duplicate points")
    return PointSet(field, d, idx)


def write_pointset(E: PointSet, path) -> None:
    Path(path).write_text(json.dumps(E.to_json()) + "\n")
