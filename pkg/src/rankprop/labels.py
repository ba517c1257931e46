"""User labels: rank groups and 2D placements, and their conversion to the
solver's internal representation.

A ranking is an ordered list of tie groups, first group lowest. Group g of
G receives the value -1 + 2g/(G-1), so labels always span [-1, 1] with
uniform spacing and ties sharing one slot. A single group carries no order
information and maps to 0. 2D placements map each unit-square coordinate c
affinely to 2c - 1, one label assignment per axis.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError
from .validation import check_indices, check_unit_interval


@dataclass
class Ranking:
    """Ordered tie groups of item indices; groups[0] is ranked lowest."""
    groups: list

    def __post_init__(self):
        if not self.groups:
            raise ValidationError("ranking needs at least one group")
        self.groups = [[int(i) for i in g] for g in self.groups]
        if any(len(g) == 0 for g in self.groups):
            raise ValidationError("empty rank group")

    def indices(self):
        out = []
        for g in self.groups:
            out.extend(g)
        return out


@dataclass
class Placement2D:
    """Items pinned inside the unit square: list of (index, x, y)."""
    points: list

    def __post_init__(self):
        for idx, x, y in self.points:
            check_unit_interval(x, f"x of item {idx}")
            check_unit_interval(y, f"y of item {idx}")


@dataclass
class LabelAssignment:
    """Dense label vector y with a boolean indicator marking labeled rows.

    y is zero wherever the indicator is false; labeled values lie in
    [-1, 1].
    """
    y: np.ndarray
    indicator: np.ndarray

    def __post_init__(self):
        self.y = np.asarray(self.y, dtype=np.float64)
        self.indicator = np.asarray(self.indicator, dtype=bool)
        if self.y.shape != self.indicator.shape:
            raise ValidationError("y and indicator shapes differ")
        if np.any(self.y[~self.indicator] != 0.0):
            raise ValidationError("unlabeled entries must have y = 0")
        lab = self.y[self.indicator]
        if lab.size and (np.abs(lab).max() > 1.0 + 1e-12 or not np.all(np.isfinite(lab))):
            raise ValidationError("labels must lie in [-1, 1]")

    @property
    def labeled_count(self):
        return int(self.indicator.sum())

    @property
    def labeled_indices(self):
        return np.flatnonzero(self.indicator)


def group_values(n_groups):
    """Label value for each of n_groups ordered tie groups."""
    if n_groups == 1:
        return np.zeros(1)
    return -1.0 + 2.0 * np.arange(n_groups) / (n_groups - 1)


def ranking_to_labels(ranking, u):
    """Convert rank groups into a LabelAssignment over u items."""
    check_indices(ranking.indices(), u, what="ranked index")
    y = np.zeros(u)
    ind = np.zeros(u, dtype=bool)
    vals = group_values(len(ranking.groups))
    for v, grp in zip(vals, ranking.groups):
        for i in grp:
            y[i] = v
            ind[i] = True
    return LabelAssignment(y, ind)


def placement_to_labels(placement, u):
    """Convert 2D placements into one LabelAssignment per axis."""
    idx = check_indices([p[0] for p in placement.points], u,
                        what="placed index")
    out = []
    for axis in (1, 2):
        y = np.zeros(u)
        ind = np.zeros(u, dtype=bool)
        for p in placement.points:
            y[int(p[0])] = 2.0 * float(p[axis]) - 1.0
            ind[int(p[0])] = True
        out.append(LabelAssignment(y, ind))
    return out[0], out[1]
