"""Independent checks for small affine instances: Radon and Tverberg partitions."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import linprog


class DegenerateInputError(ValueError):
    pass


@dataclass(frozen=True)
class RadonPartition:
    positive: tuple[int, ...]
    negative: tuple[int, ...]
    witness: np.ndarray
    coefficients: np.ndarray

    @property
    def parts(self) -> frozenset[frozenset[int]]:
        return frozenset({frozenset(self.positive), frozenset(self.negative)})


def radon_oracle(points: Sequence[Sequence[float]], atol: float = 1e-12) -> RadonPartition:
    """Radon partition of d + 2 points in R^d from their affine dependence.

    Indices with a vanishing coefficient go with the negative part.
    """
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[0] != P.shape[1] + 2:
        raise ValueError(f"need d + 2 points in R^d, got shape {P.shape}")
    A = np.vstack([P.T, np.ones(len(P))])
    kernel = null_space(A, rcond=1e-10)
    if kernel.shape[1] != 1:
        raise DegenerateInputError(
            f"affine dependences form a {kernel.shape[1]}-dimensional space; points are degenerate")
    alpha = kernel[:, 0]
    alpha = alpha / np.max(np.abs(alpha))
    if alpha[np.argmax(np.abs(alpha))] < 0:
        alpha = -alpha
    pos = tuple(int(i) for i in np.nonzero(alpha > atol)[0])
    neg = tuple(int(i) for i in range(len(P)) if i not in pos)
    total = alpha[list(pos)].sum()
    witness = (alpha[list(pos)] / total) @ P[list(pos)]
    return RadonPartition(pos, neg, witness, alpha)


def hull_intersection(points: np.ndarray, groups: Sequence[Sequence[int]]) -> np.ndarray | None:
    """A common point of the convex hulls of ``points[group]``, or None (LP feasibility)."""
    P = np.asarray(points, dtype=float)
    d = P.shape[1]
    sizes = [len(g) for g in groups]
    nvar = sum(sizes)
    offsets = np.cumsum([0] + sizes)
    rows, rhs = [], []
    for j, g in enumerate(groups):
        row = np.zeros(nvar)
        row[offsets[j]:offsets[j + 1]] = 1.0
        rows.append(row)
        rhs.append(1.0)
    for j in range(1, len(groups)):
        block = np.zeros((d, nvar))
        block[:, offsets[0]:offsets[1]] = P[list(groups[0])].T
        block[:, offsets[j]:offsets[j + 1]] = -P[list(groups[j])].T
        rows.extend(block)
        rhs.extend([0.0] * d)
    res = linprog(np.zeros(nvar), A_eq=np.array(rows), b_eq=np.array(rhs),
                  bounds=[(0, None)] * nvar, method="highs")
    if res.status != 0:
        return None
    lam = res.x[offsets[0]:offsets[1]]
    return lam @ P[list(groups[0])]


def _set_partitions(items: list[int], q: int):
    """Partitions of ``items`` into exactly q nonempty unlabelled blocks."""
    if q == 1:
        yield [items]
        return
    if len(items) < q:
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest, q - 1):
        yield [[first]] + part
    for part in _set_partitions(rest, q):
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


@dataclass(frozen=True)
class TverbergPartition:
    groups: tuple[tuple[int, ...], ...]
    witness: np.ndarray


def tverberg_oracle_affine(points: Sequence[Sequence[float]], q: int,
                           max_points: int = 12, max_q: int = 3) -> TverbergPartition | None:
    """Exhaustively search partitions into q parts with intersecting hulls."""
    P = np.asarray(points, dtype=float)
    n_pts, d = P.shape
    if q < 2 or q > max_q or n_pts > max_points:
        raise ValueError(f"oracle limited to 2 <= q <= {max_q} and at most {max_points} points")
    if n_pts < (q - 1) * (d + 1) + 1:
        raise ValueError(f"need at least {(q - 1) * (d + 1) + 1} points for q = {q} in R^{d}")
    for part in _set_partitions(list(range(n_pts)), q):
        w = hull_intersection(P, part)
        if w is not None:
            groups = tuple(sorted(tuple(sorted(g)) for g in part))
            return TverbergPartition(groups, w)
    return None


def count_partitions(n_pts: int, q: int) -> int:
    return sum(1 for _ in _set_partitions(list(range(n_pts)), q))


__all__ = [
    "DegenerateInputError", "RadonPartition", "TverbergPartition",
    "radon_oracle", "hull_intersection", "tverberg_oracle_affine", "count_partitions",
]
