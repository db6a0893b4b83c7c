"""Fourier spectra of bounded functions on F2^n and on its cosets.

The coefficient of f at a character eta over an affine subspace A is the
mean of f(x) * (-1)^<x, eta> over x in A.  Characters that vanish on the
direction subspace H are trivial on every coset (their coefficient is a
signed coset mean); the nontrivial spectrum of a coset is indexed by the
classes of F2^n modulo H-perp, and each class is represented canonically
by its member with all H-perp pivot coordinates zero.

A restriction to a coset of dimension d is parameterized by the basis of
H, which turns the restricted spectrum into a single size-2^d transform;
scanning all cosets of a subspace at once is one batched transform over
a (index x 2^d) pullback matrix.  A coset restriction is regular at
level eps when every nontrivial class coefficient has absolute value at
most eps; a subspace is regular when at least a (1 - eps) fraction of
its cosets are.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np

from .gf2 import (
    DEFAULT_DENSE_LIMIT,
    AffineSubspace,
    DimensionMismatchError,
    F2Vector,
    Subspace,
    check_dense,
    parity64,
)


def as_fraction(value: "float | int | str | Fraction") -> Fraction:
    """Exact rational view of a threshold.

    Strings like "1/48" parse exactly; floats convert to their exact
    binary value, which keeps comparisons deterministic.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Dense table of a bounded function f: F2^n -> [0, 1].

    values[k] is f at the point with integer encoding k.  When the
    function is a ratio of small integers, `counts` holds the exact
    numerators (values == counts / denominator), which downstream
    certificate checks use for exact arithmetic.
    """

    n: int
    values: np.ndarray
    counts: np.ndarray | None = None
    denominator: int | None = None

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError(f"n must be positive, got {self.n}")
        values = np.ascontiguousarray(self.values, dtype=np.float64)
        if values.shape != (1 << self.n,):
            raise ValueError(f"table must have 2^{self.n} entries, got {values.shape}")
        if not np.all((values >= 0.0) & (values <= 1.0)):
            raise ValueError("table values must lie in [0, 1]")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if (self.counts is None) != (self.denominator is None):
            raise ValueError("counts and denominator must be given together")
        if self.counts is not None:
            counts = np.ascontiguousarray(self.counts)
            if counts.shape != values.shape:
                raise ValueError("counts must match table length")
            counts.setflags(write=False)
            object.__setattr__(self, "counts", counts)

    @classmethod
    def from_counts(cls, n: int, counts: np.ndarray, denominator: int) -> "FunctionTable":
        values = counts.astype(np.float64) / float(denominator)
        return cls(n, values, counts=counts, denominator=denominator)

    @classmethod
    def constant(cls, n: int, value: float) -> "FunctionTable":
        return cls(n, np.full(1 << n, float(value)))

    @property
    def size(self) -> int:
        return 1 << self.n

    def mean(self) -> float:
        return float(self.values.mean())

    def is_binary(self) -> bool:
        return bool(np.all((self.values == 0.0) | (self.values == 1.0)))


@dataclass(frozen=True, eq=False)
class CosetSpectrum:
    """All class coefficients of a function restricted to one coset.

    class_reps are the canonical representatives of F2^n modulo H-perp
    in ascending encoding order (class_reps[0] == 0 is the trivial
    class, whose coefficient is the coset mean).
    """

    coset: AffineSubspace
    class_reps: np.ndarray
    coefficients: np.ndarray

    @property
    def mean(self) -> float:
        return float(self.coefficients[0])

    @property
    def class_coefficients(self) -> dict[int, float]:
        return {int(r): float(c) for r, c in zip(self.class_reps, self.coefficients)}

    def power_sum(self) -> float:
        """Sum of squared class coefficients (equals the coset mean of f^2)."""
        return float(np.square(self.coefficients).sum())


@dataclass(frozen=True, eq=False)
class RegularityReport:
    """Per-coset regularity scan of a subspace at level eps.

    Witness arrays hold, for each irregular coset, its canonical
    representative, the worst nontrivial class representative, and the
    signed coefficient there; regular_cosets + len = total_cosets.
    """

    subspace: Subspace
    epsilon: Fraction
    total_cosets: int
    regular_cosets: int
    witness_reps: np.ndarray
    witness_etas: np.ndarray
    witness_values: np.ndarray

    @property
    def irregular_cosets(self) -> int:
        return self.total_cosets - self.regular_cosets

    @property
    def is_regular(self) -> bool:
        """Exact verdict: regular cosets >= (1 - eps) * total."""
        return self.irregular_cosets <= self.epsilon * self.total_cosets

    @property
    def regular_fraction(self) -> Fraction:
        return Fraction(self.regular_cosets, self.total_cosets)

    @property
    def witnesses(self) -> list[tuple[F2Vector, F2Vector, float]]:
        n = self.subspace.n
        return [
            (F2Vector(n, int(r)), F2Vector(n, int(e)), float(v))
            for r, e, v in zip(self.witness_reps, self.witness_etas, self.witness_values)
        ]


def _fwht(a: np.ndarray) -> np.ndarray:
    """Unnormalized in-place Walsh-Hadamard butterfly along the last axis."""
    if not a.flags.c_contiguous:
        raise ValueError("in-place transform requires a C-contiguous array")
    size = a.shape[-1]
    h = 1
    while h < size:
        b = a.reshape(a.shape[:-1] + (-1, 2, h))
        top = b[..., 0, :].copy()
        b[..., 0, :] = top + b[..., 1, :]
        b[..., 1, :] = top - b[..., 1, :]
        h *= 2
    return a


def wht_full(f: FunctionTable, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
    """Full spectrum: entry at index(eta) is E_x[f(x) * (-1)^<x, eta>].

    Runs in O(n 2^n) with the in-place butterfly.
    """
    check_dense(f.n, dense_limit, "spectrum entries")
    out = f.values.copy()
    _fwht(out)
    out /= float(f.size)
    return out


def _check_table_coset(f: FunctionTable, a: AffineSubspace) -> None:
    if f.n != a.n:
        raise DimensionMismatchError(f"table n={f.n} vs coset n={a.n}")


def restricted_coefficient(f: FunctionTable, a: AffineSubspace, eta: F2Vector) -> float:
    """Coefficient of f at eta over the coset a, by the defining mean."""
    _check_table_coset(f, a)
    if eta.n != f.n:
        raise DimensionMismatchError(f"character n={eta.n} vs table n={f.n}")
    points = a.element_array()
    signs = 1.0 - 2.0 * parity64(points & np.int64(eta.bits))
    return float((f.values[points] * signs).mean())


def _class_maps(h: Subspace) -> tuple[np.ndarray, np.ndarray]:
    """Canonical class representatives of F2^n mod H-perp, and the map
    from each representative to its transform bucket.

    Bucket z of eta has bit i equal to <basis_i, eta>; the pairing is a
    bijection between classes and buckets.
    """
    if h.dim <= 12:
        return _cached_class_maps(h)
    return _build_class_maps(h)


def _build_class_maps(h: Subspace) -> tuple[np.ndarray, np.ndarray]:
    etas = h.orthogonal_complement().coset_representative_array(dense_limit=h.n)
    z = np.zeros(etas.shape, dtype=np.int64)
    for i, row in enumerate(h.basis):
        z |= parity64(etas & np.int64(row)) << np.int64(i)
    return etas, z


@lru_cache(maxsize=512)
def _cached_class_maps(h: Subspace) -> tuple[np.ndarray, np.ndarray]:
    etas, z = _build_class_maps(h)
    etas.setflags(write=False)
    z.setflags(write=False)
    return etas, z


def restricted_spectrum(
    f: FunctionTable, a: AffineSubspace, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> CosetSpectrum:
    """All class coefficients of f over the coset a at once.

    Pulls f back through the basis parameterization of the coset and
    runs one size-2^dim transform.
    """
    _check_table_coset(f, a)
    h = a.subspace
    check_dense(h.dim, dense_limit, "spectrum entries")
    rep = np.int64(a.representative.bits)
    table = f.values[h.span_array(dense_limit) ^ rep]
    _fwht(table)
    table /= float(a.size)
    etas, z = _class_maps(h)
    signs = 1.0 - 2.0 * parity64(etas & rep)
    return CosetSpectrum(coset=a, class_reps=etas, coefficients=signs * table[z])


def check_coset_regularity(
    f: FunctionTable,
    a: AffineSubspace,
    epsilon: "float | str | Fraction",
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> tuple[bool, tuple[F2Vector, float] | None]:
    """Is every nontrivial class coefficient of f over a at most eps?

    Returns the verdict and the worst nontrivial class (ties broken by
    the smallest canonical representative encoding); None when the coset
    has no nontrivial classes (single-point subspace direction).
    """
    spectrum = restricted_spectrum(f, a, dense_limit)
    if spectrum.class_reps.shape[0] == 1:
        return True, None
    magnitudes = np.abs(spectrum.coefficients[1:])
    k = int(np.argmax(magnitudes)) + 1
    worst = (
        F2Vector(f.n, int(spectrum.class_reps[k])),
        float(spectrum.coefficients[k]),
    )
    return bool(magnitudes[k - 1] <= float(as_fraction(epsilon))), worst


def coset_spectra_matrix(
    f: FunctionTable, h: Subspace, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Class coefficients of f over every coset of h in one batch.

    Returns (reps, etas, V): V[r, k] is the coefficient of f over the
    coset of reps[r] at the canonical class representative etas[k]; both
    index arrays ascend.  Memory is one 2^n float matrix.
    """
    if f.n != h.n:
        raise DimensionMismatchError(f"table n={f.n} vs subspace n={h.n}")
    check_dense(f.n, dense_limit, "pullback entries")
    reps = h.coset_representative_array(dense_limit)
    span = h.span_array(dense_limit)
    pulled = f.values[reps[:, None] ^ span[None, :]]
    _fwht(pulled)
    pulled /= float(span.shape[0])
    etas, z = _class_maps(h)
    values = pulled[:, z]
    signs = 1.0 - 2.0 * parity64(reps[:, None] & etas[None, :])
    values *= signs
    return reps, etas, values


def check_subspace_regularity(
    f: FunctionTable,
    h: Subspace,
    epsilon: "float | str | Fraction",
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> RegularityReport:
    """Scan every coset of h and report the regularity verdict at eps."""
    eps = as_fraction(epsilon)
    reps, etas, values = coset_spectra_matrix(f, h, dense_limit)
    total = reps.shape[0]
    if etas.shape[0] == 1:
        return RegularityReport(
            subspace=h,
            epsilon=eps,
            total_cosets=total,
            regular_cosets=total,
            witness_reps=np.empty(0, dtype=np.int64),
            witness_etas=np.empty(0, dtype=np.int64),
            witness_values=np.empty(0, dtype=np.float64),
        )
    magnitudes = np.abs(values[:, 1:])
    worst_k = np.argmax(magnitudes, axis=1) + 1
    rows = np.arange(total)
    worst_abs = magnitudes[rows, worst_k - 1]
    irregular = worst_abs > float(eps)
    return RegularityReport(
        subspace=h,
        epsilon=eps,
        total_cosets=total,
        regular_cosets=int(total - irregular.sum()),
        witness_reps=reps[irregular],
        witness_etas=etas[worst_k[irregular]],
        witness_values=values[rows[irregular], worst_k[irregular]],
    )


def average_tables(tables: Sequence[FunctionTable]) -> FunctionTable:
    """Pointwise average of tables over a common domain."""
    ns = {t.n for t in tables}
    if len(ns) != 1:
        raise DimensionMismatchError(f"mixed table dimensions: {sorted(ns)}")
    stacked = np.stack([t.values for t in tables])
    return FunctionTable(ns.pop(), stacked.mean(axis=0))
