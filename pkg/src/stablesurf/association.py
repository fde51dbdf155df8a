"""Mutual-best-match association and homography-based scoring."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np
from scipy.spatial.distance import cdist

from .errors import InvalidInputError


class Match(NamedTuple):
    index_a: int
    index_b: int
    distance: float


def _matrix(descs) -> np.ndarray:
    rows = [getattr(d, "values", d) for d in descs]
    if not rows:
        return np.zeros((0, 64))
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2:
        raise InvalidInputError("descriptors must be equal-length vectors")
    return arr


def associate(descs_a, descs_b, signs_a=None, signs_b=None) -> list:
    """Pairs (i, j) where each is the other's nearest neighbour.

    Ties go to the lowest index.  With both sign lists given, pairs whose
    Laplacian signs differ are never candidates.
    """
    A, B = _matrix(descs_a), _matrix(descs_b)
    if len(A) == 0 or len(B) == 0:
        return []
    if A.shape[1] != B.shape[1]:
        raise InvalidInputError("descriptor lengths differ")
    D = cdist(A, B)
    if signs_a is not None and signs_b is not None:
        sa = np.asarray(signs_a)[:, None]
        sb = np.asarray(signs_b)[None, :]
        D = np.where(sa == sb, D, np.inf)
    best_b = np.argmin(D, axis=1)
    best_a = np.argmin(D, axis=0)
    out = []
    for i, j in enumerate(best_b):
        if best_a[j] == i and np.isfinite(D[i, j]):
            out.append(Match(i, int(j), float(D[i, j])))
    return out


def project(h, x: float, y: float):
    h = np.asarray(h, dtype=np.float64)
    w = h[2, 0] * x + h[2, 1] * y + h[2, 2]
    return (h[0, 0] * x + h[0, 1] * y + h[0, 2]) / w, (h[1, 0] * x + h[1, 1] * y + h[1, 2]) / w


def score_associations(matches, points_a, points_b, homography, tol_px: float = 3.0) -> float:
    """Fraction of matches whose A point lands within tol_px of its B point."""
    if not matches:
        return 0.0
    correct = 0
    for m in matches:
        pa, pb = points_a[m.index_a], points_b[m.index_b]
        x, y = project(homography, pa.x, pa.y)
        if np.hypot(x - pb.x, y - pb.y) < tol_px:
            correct += 1
    return correct / len(matches)
