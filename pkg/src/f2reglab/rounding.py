"""Randomized rounding of bounded tables to binary tables.

Rounding sets S(x) = 1 with probability f(x), independently per point,
from a counter-based stream keyed by (seed, x): the draw at x is a pure
hash, so the rounded table is reproducible, replayable pointwise, and
independent of evaluation order.  Hoeffding's inequality makes restricted
coefficients of S track those of f within tau on every coset of size at
least 4 n^2 / tau^2 except with probability 2 exp(-tau^2 |A| / 2) per
(coset, character) pair, which at the sizes scanned here is negligible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fourier import FunctionTable, coset_spectra_matrix
from .gf2 import (
    DEFAULT_DENSE_LIMIT,
    AffineSubspace,
    F2Vector,
    Subspace,
    parity64,
)
from .rng import Stream, keyed_uniforms

_ROUNDING_TAG = "rounding"


def round_to_binary(f: FunctionTable, seed: int) -> FunctionTable:
    """Round each point to {0, 1} with expectation f(x), keyed by (seed, x)."""
    draws = keyed_uniforms(seed, _ROUNDING_TAG, np.arange(f.size, dtype=np.uint64))
    bits = (draws < f.values).astype(np.uint8)
    return FunctionTable.from_counts(f.n, bits, 1)


def round_point(f: FunctionTable, seed: int, x: int) -> int:
    """Replay the rounding decision at a single point."""
    draw = keyed_uniforms(seed, _ROUNDING_TAG, np.array([x], dtype=np.uint64))[0]
    return int(draw < f.values[x])


@dataclass(frozen=True)
class PairRecord:
    """One scanned (coset, character) pair and its coefficient deviation."""

    basis: tuple[int, ...]
    representative: int
    eta: int
    size: int
    f_value: float
    s_value: float

    @property
    def deviation(self) -> float:
        return abs(self.s_value - self.f_value)


@dataclass(frozen=True, eq=False)
class RoundingReport:
    """Deviation scan of a rounded table against its source.

    Pairs below the size threshold 4 n^2 / tau^2 are skipped (counted in
    skipped_small); exceedances are indices of records whose deviation
    is above tau.  Exceedances are report content, not errors: the
    guarantee is probabilistic.
    """

    n: int
    tau: float
    seed: int | None
    threshold_size: float
    records: tuple[PairRecord, ...]
    skipped_small: int

    @property
    def max_deviation(self) -> float:
        return max((r.deviation for r in self.records), default=0.0)

    @property
    def exceedances(self) -> tuple[int, ...]:
        return tuple(k for k, r in enumerate(self.records) if r.deviation > self.tau)

    @property
    def union_bound_pairs_log2(self) -> int:
        """log2 of the crude count of (coset, character) pairs, n^2 + n."""
        return self.n * self.n + self.n

    @property
    def ok(self) -> bool:
        return not self.exceedances


def size_threshold(n: int, tau: float) -> float:
    return 4.0 * n * n / (tau * tau)


def deviation_report(
    f: FunctionTable,
    s: FunctionTable,
    tau: float,
    pairs: "list[tuple[AffineSubspace, F2Vector | int]]",
    seed: int | None = None,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> RoundingReport:
    """Compare restricted coefficients of f and s over explicit pairs."""
    if f.n != s.n:
        raise ValueError(f"table dimensions differ: {f.n} vs {s.n}")
    threshold = size_threshold(f.n, tau)
    records: list[PairRecord] = []
    skipped = 0
    for coset, eta in pairs:
        if coset.size < threshold:
            skipped += 1
            continue
        eta_bits = eta.bits if isinstance(eta, F2Vector) else int(eta)
        points = coset.element_array(dense_limit)
        signs = 1.0 - 2.0 * parity64(points & np.int64(eta_bits))
        records.append(
            PairRecord(
                basis=coset.subspace.basis,
                representative=coset.representative.bits,
                eta=eta_bits,
                size=coset.size,
                f_value=float((f.values[points] * signs).mean()),
                s_value=float((s.values[points] * signs).mean()),
            )
        )
    return RoundingReport(
        n=f.n,
        tau=float(tau),
        seed=seed,
        threshold_size=threshold,
        records=tuple(records),
        skipped_small=skipped,
    )


def sample_pairs(
    n: int,
    count: int,
    seed: int,
    max_codim: int,
) -> list[tuple[AffineSubspace, F2Vector]]:
    """Seeded random (coset, character) pairs with codimension <= max_codim."""
    stream = Stream(seed, "rounding/pairs")
    pairs: list[tuple[AffineSubspace, F2Vector]] = []
    while len(pairs) < count:
        codim = stream.below(max_codim + 1)
        rows = [stream.bits(n) for _ in range(codim)]
        dual = Subspace.from_vectors(n, rows)
        if dual.dim != codim:
            continue
        h = dual.orthogonal_complement()
        rep = F2Vector(n, stream.bits(n))
        eta = F2Vector(n, stream.bits(n))
        pairs.append((AffineSubspace(h, rep), eta))
    return pairs


def spectrum_deviations(
    f: FunctionTable,
    s: FunctionTable,
    h: Subspace,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Coefficient deviations |s_hat - f_hat| over every coset of h and
    every class at once; returns (reps, etas, deviations)."""
    reps, etas, vf = coset_spectra_matrix(f, h, dense_limit)
    _, _, vs = coset_spectra_matrix(s, h, dense_limit)
    return reps, etas, np.abs(vs - vf)
