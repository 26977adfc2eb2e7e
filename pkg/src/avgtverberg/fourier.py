"""Fourier analysis of functions G -> C^d on a finite abelian group.

A function is stored as a ``(q, d)`` array whose rows follow the canonical
element order of :class:`GroupSpec`; a spectrum is a ``(q, d)`` array whose
rows follow the same order read as characters.  Transforms are naive
``O(q^2)`` sums against the character table.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .groups import Character, GroupSpec, is_real_character


@dataclass(frozen=True)
class ValueTable:
    spec: GroupSpec
    values: np.ndarray  # (q, d), row g holds F(g) = (F_1(g), ..., F_d(g))

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.ndim == 1:
            values = values[:, None]
        if values.shape[0] != self.spec.order:
            raise ValueError(f"expected {self.spec.order} rows, got {values.shape[0]}")
        object.__setattr__(self, "values", values)

    @property
    def d(self) -> int:
        return self.values.shape[1]

    def __getitem__(self, g: Sequence[int]) -> np.ndarray:
        return self.values[self.spec.index(g)]

    def is_real(self, atol: float = 1e-12) -> bool:
        return bool(np.all(np.abs(np.imag(self.values)) < atol))


@dataclass(frozen=True)
class SpectrumTable:
    spec: GroupSpec
    coeffs: np.ndarray  # (q, d), row e holds c_{., eps_e}

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=complex)
        if coeffs.ndim == 1:
            coeffs = coeffs[:, None]
        if coeffs.shape[0] != self.spec.order:
            raise ValueError(f"expected {self.spec.order} rows, got {coeffs.shape[0]}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def d(self) -> int:
        return self.coeffs.shape[1]

    def __getitem__(self, eps: Sequence[int]) -> np.ndarray:
        return self.coeffs[self.spec.index(eps)]

    def conjugate_symmetry_error(self) -> float:
        """max |conj(c_eps) - c_{-eps}|; zero exactly for real functions."""
        neg = [self.spec.index(self.spec.neg(e)) for e in self.spec.elements]
        return float(np.max(np.abs(np.conj(self.coeffs) - self.coeffs[neg])))

    def is_conjugate_symmetric(self, atol: float = 1e-12) -> bool:
        return self.conjugate_symmetry_error() < atol


def forward_transform(vals: ValueTable) -> SpectrumTable:
    """c_{i,eps} = (1/q) sum_u F_i(u) conj(chi_eps(u))."""
    X = vals.spec.character_table
    return SpectrumTable(vals.spec, np.conj(X) @ vals.values / vals.spec.order)


def inverse_transform(spectrum: SpectrumTable) -> ValueTable:
    """F_i(g) = sum_eps c_{i,eps} chi_eps(g)."""
    X = spectrum.spec.character_table
    return ValueTable(spectrum.spec, X.T @ spectrum.coeffs)


def negation_closed(spec: GroupSpec, chars: Iterable[Character]) -> bool:
    chars = set(chars)
    return all(spec.neg(e) in chars for e in chars)


def random_real_spectrum(
    spec: GroupSpec,
    d: int,
    rng: np.random.Generator,
    annihilated: Iterable[Character] = (),
) -> SpectrumTable:
    """Random conjugate-symmetric spectrum vanishing on ``annihilated``.

    Real and imaginary parts are uniform on [-1, 1]; characters of order at
    most two get real coefficients.
    """
    killed = {spec.index(e) for e in annihilated}
    coeffs = np.zeros((spec.order, d), dtype=complex)
    for idx, eps in enumerate(spec.elements):
        neg = spec.index(spec.neg(eps))
        if idx in killed or neg < idx:
            continue
        if is_real_character(spec, eps):
            coeffs[idx] = rng.uniform(-1, 1, d)
        else:
            c = rng.uniform(-1, 1, d) + 1j * rng.uniform(-1, 1, d)
            coeffs[idx] = c
            coeffs[neg] = np.conj(c)
    return SpectrumTable(spec, coeffs)


def synthesize_constrained(
    spec: GroupSpec,
    annihilated: Iterable[Character],
    d: int = 1,
    seed: int | None = 0,
) -> ValueTable:
    """A random real function G -> R^d whose transforms vanish on ``annihilated``."""
    annihilated = [tuple(e) for e in annihilated]
    for e in annihilated:
        spec.check(e)
    if not negation_closed(spec, annihilated):
        raise ValueError("annihilated set must be closed under negation")
    rng = np.random.default_rng(seed)
    spectrum = random_real_spectrum(spec, d, rng, annihilated)
    return ValueTable(spec, inverse_transform(spectrum).values.real)
