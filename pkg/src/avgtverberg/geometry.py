"""Maps on the boundary of a simplex and configurations on disjoint faces."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .groups import GroupSpec

SUPPORT_THRESHOLD = 1e-9


class InvalidConfigurationError(ValueError):
    pass


PostMap = Callable[[np.ndarray], np.ndarray]


def make_post_map(spec: dict | None) -> PostMap | None:
    """Build a componentwise post-map from its JSON description.

    Supported kinds: ``{"kind": "tanh", "scale": s}`` for tanh(s v) and
    ``{"kind": "cubic", "alpha": c}`` for v + c v^3.
    """
    if spec is None:
        return None
    kind = spec.get("kind")
    if kind == "tanh":
        s = float(spec.get("scale", 1.0))
        return lambda v: np.tanh(s * v)
    if kind == "cubic":
        c = float(spec.get("alpha", 1.0))
        return lambda v: v + c * v ** 3
    raise ValueError(f"unknown post-map kind {kind!r}")


@dataclass(frozen=True)
class SimplexMap:
    """f = post_map(affine extension of the vertex images)."""

    vertices: np.ndarray  # (n + 1, d)
    post_map: PostMap | None = field(default=None, compare=False)
    post_map_spec: dict | None = None

    def __post_init__(self):
        V = np.array(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] < 2:
            raise ValueError("need an (n + 1, d) array of vertex images with n >= 1")
        object.__setattr__(self, "vertices", V)
        if self.post_map is None and self.post_map_spec is not None:
            object.__setattr__(self, "post_map", make_post_map(self.post_map_spec))

    @property
    def n(self) -> int:
        return self.vertices.shape[0] - 1

    @property
    def d(self) -> int:
        return self.vertices.shape[1]

    @property
    def is_affine(self) -> bool:
        return self.post_map is None

    def __call__(self, support: Sequence[int], weights: Sequence[float]) -> np.ndarray:
        v = np.asarray(weights, dtype=float) @ self.vertices[list(support)]
        return v if self.post_map is None else self.post_map(v)


def random_affine_map(n: int, d: int, seed: int | None = 0) -> SimplexMap:
    rng = np.random.default_rng(seed)
    return SimplexMap(rng.uniform(-1.0, 1.0, size=(n + 1, d)))


@dataclass(frozen=True)
class Configuration:
    """One point x_g on a face sigma_g per group element, faces pairwise disjoint."""

    orders: tuple[int, ...]
    supports: tuple[tuple[int, ...], ...]
    weights: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "orders", tuple(self.orders))
        object.__setattr__(self, "supports", tuple(tuple(int(v) for v in s) for s in self.supports))
        object.__setattr__(self, "weights", tuple(np.asarray(w, dtype=float) for w in self.weights))

    @property
    def spec(self) -> GroupSpec:
        return GroupSpec(self.orders)

    @classmethod
    def from_assignment(cls, orders, assignment: Sequence[int], weights=None) -> "Configuration":
        """``assignment[v]`` is the group index owning vertex v, or -1 if unused.

        Weights default to the barycenters of the faces.
        """
        q = GroupSpec(orders).order
        supports = [tuple(v for v, g in enumerate(assignment) if g == i) for i in range(q)]
        if weights is None:
            weights = [np.full(len(s), 1.0 / len(s)) if s else np.zeros(0) for s in supports]
        return cls(orders, tuple(supports), tuple(weights))

    def assignment(self, n: int) -> tuple[int, ...]:
        out = [-1] * (n + 1)
        for g, s in enumerate(self.supports):
            for v in s:
                out[v] = g
        return tuple(out)

    def validate(self, n: int | None = None) -> None:
        q = self.spec.order
        if len(self.supports) != q or len(self.weights) != q:
            raise InvalidConfigurationError(f"expected {q} faces, got {len(self.supports)}")
        seen: set[int] = set()
        for g, (s, w) in enumerate(zip(self.supports, self.weights)):
            if not s:
                raise InvalidConfigurationError(f"face {g} is empty")
            if len(set(s)) != len(s):
                raise InvalidConfigurationError(f"face {g} repeats a vertex")
            if seen & set(s):
                raise InvalidConfigurationError(f"face {g} overlaps an earlier face")
            seen |= set(s)
            if w.shape != (len(s),):
                raise InvalidConfigurationError(f"face {g}: {len(s)} vertices but {w.shape} weights")
            if np.any(w < 0) or not np.all(np.isfinite(w)):
                raise InvalidConfigurationError(f"face {g} has negative or non-finite weights")
            if abs(w.sum() - 1.0) > 1e-12:
                raise InvalidConfigurationError(f"face {g} weights sum to {w.sum()!r}")
        if n is not None and any(v < 0 or v > n for v in seen):
            raise InvalidConfigurationError(f"vertex index outside 0..{n}")

    def points(self, f: SimplexMap) -> np.ndarray:
        """Images f(x_g), one row per group element."""
        return np.array([f(s, w) for s, w in zip(self.supports, self.weights)])

    def effective_supports(self, threshold: float = SUPPORT_THRESHOLD) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(v for v, x in zip(s, w) if x > threshold)
                     for s, w in zip(self.supports, self.weights))

    def support_profile(self, threshold: float = SUPPORT_THRESHOLD) -> tuple[int, ...]:
        return tuple(sorted((len(s) for s in self.effective_supports(threshold)), reverse=True))


def project_to_simplex(c: np.ndarray) -> np.ndarray:
    """Euclidean projection onto {x >= 0, sum x = 1} (sort-based)."""
    u = np.sort(c)[::-1]
    css = np.cumsum(u) - 1.0
    ks = np.arange(1, len(c) + 1)
    rho = np.nonzero(u - css / ks > 0)[0][-1]
    return np.maximum(c - css[rho] / (rho + 1), 0.0)
