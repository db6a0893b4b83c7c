"""Irregularity certificates for lower-bound instances.

For a nonzero subspace H, let i be the first block where some basis
vector of H is nonzero.  Every coset of H then has a constant prefix
(blocks 1..i-1), so the character gamma carrying xi_i(prefix) in block i
and zero elsewhere is well defined per coset.  A certificate for H
collects, per coset, the coefficient of the instance function at gamma
and shows that cosets with a nontrivial gamma (gamma outside H-perp)
and coefficient strictly above eps make up more than an eps fraction,
which rules out eps-regularity of H.

Instance tables carry exact integer numerators, so every comparison in
a certificate is exact rational arithmetic: a coefficient over a coset
of dimension d is (sum of signed counts) / (s * 2^d), and thresholds
arrive as fractions.  Floating point appears only in the cross-check
against the transform-based regularity report.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import numpy as np

from .fourier import (
    FunctionTable,
    RegularityReport,
    as_fraction,
    check_subspace_regularity,
    restricted_coefficient,
)
from .gf2 import (
    DEFAULT_DENSE_LIMIT,
    AffineSubspace,
    BlockStructure,
    F2Vector,
    Subspace,
    check_dense,
    enumerate_all_subspaces,
    parity64,
    reduce_array,
    subspaces_of_dim,
)
from .instance import Instance, XiFamily
from .rng import Stream


class ClaimViolationError(RuntimeError):
    """A verified inequality from the lower-bound argument failed."""


def minimal_active_block(h: Subspace, blocks: BlockStructure) -> tuple[int, F2Vector]:
    """First block i where H has a vector with nonzero block i.

    Returns (i, v) with v a basis element realizing it; by minimality
    every element of H vanishes on blocks before i.
    """
    if h.dim == 0:
        raise ValueError("the zero subspace has no active block")
    offsets = blocks.offsets
    for i in range(1, blocks.s + 1):
        mask = ((1 << blocks.dims[i - 1]) - 1) << offsets[i - 1]
        for row in h.basis:
            if row & mask:
                return i, F2Vector(h.n, row)
    raise AssertionError("nonzero subspace with all blocks zero")


def gamma_character(g: "F2Vector | int", i: int, xi: XiFamily) -> F2Vector:
    """Witness character of the coset of g for block i.

    Carries xi_i evaluated at the prefix of g in block i and is zero
    elsewhere; it depends only on blocks 1..i-1 of g and is never zero.
    """
    blocks = xi.blocks
    entry = xi.entry_for(i, g)
    return F2Vector(blocks.n, entry << blocks.offsets[i - 1])


def w_subspace(blocks: BlockStructure, i: int) -> Subspace:
    """Span of the standard basis vectors in blocks i+1..s."""
    lo = blocks.offsets[i]
    return Subspace(blocks.n, tuple(1 << j for j in range(lo, blocks.n)))


def bad_fraction(
    h: Subspace,
    i: int,
    xi: XiFamily,
    bound: "float | str | Fraction" = Fraction(3, 4),
) -> Fraction:
    """Fraction of points whose witness character is trivial for H.

    The bad set is a union of prefix classes, so the scan runs over the
    2^(D_{i-1}) prefixes.  Raises when the fraction exceeds the bound,
    which for sampled spanning families signals a defective xi family.
    """
    bound = as_fraction(bound)
    blocks = xi.blocks
    dual = h.orthogonal_complement()
    lo = blocks.offsets[i - 1]
    total = len(xi.families[i - 1])
    bad = sum(1 for p in range(total) if dual.contains(xi.entry(i, p) << lo))
    fraction = Fraction(bad, total)
    if fraction > bound:
        raise ClaimViolationError(
            f"bad fraction {fraction} exceeds {bound} for block {i} "
            f"(worst hyperplane incidence of the xi family is too high)"
        )
    return fraction


def _gamma_table(f: FunctionTable, xi: XiFamily, i: int, prefix: int) -> np.ndarray:
    """Signed count table k(x) * (-1)^<x, gamma> for one gamma, int16."""
    gamma_bits = xi.entry(i, prefix) << xi.blocks.offsets[i - 1]
    points = np.arange(f.size, dtype=np.int64)
    signs = 1 - 2 * parity64(points & np.int64(gamma_bits))
    return (f.counts.astype(np.int16)) * signs.astype(np.int16)


def _coset_numerators(
    f: FunctionTable,
    h: Subspace,
    i: int,
    xi: XiFamily,
    reps: np.ndarray,
    gamma_cache: dict | None,
) -> np.ndarray:
    """Exact numerators sum_{x in coset} k(x) * (-1)^<x, gamma_coset>."""
    blocks = xi.blocks
    span = h.span_array()
    index = reps[:, None] ^ span[None, :]
    prefixes = reps & np.int64((1 << blocks.offsets[i - 1]) - 1)
    numerators = np.zeros(reps.shape[0], dtype=np.int64)
    for p in np.unique(prefixes):
        key = (i, int(p))
        if gamma_cache is not None and key in gamma_cache:
            table = gamma_cache[key]
        else:
            table = _gamma_table(f, xi, i, int(p))
            if gamma_cache is not None:
                gamma_cache[key] = table
        rows = prefixes == p
        numerators[rows] = table[index[rows]].sum(axis=1, dtype=np.int64)
    return numerators


@dataclass(frozen=True, eq=False)
class WitnessCertificate:
    """Per-coset witness record certifying that H is not eps-regular.

    Coefficients are exact: coefficient of coset r is
    numerators[r] / denominator.  certified marks cosets whose gamma is
    nontrivial and whose coefficient strictly exceeds eps.
    """

    subspace: Subspace
    epsilon: Fraction
    block_index: int
    vector: F2Vector
    bad_fraction: Fraction
    reps: np.ndarray
    gammas: np.ndarray
    numerators: np.ndarray
    denominator: int
    certified: np.ndarray
    cross_checked: bool
    regularity_report: RegularityReport | None = None

    @property
    def total_cosets(self) -> int:
        return self.reps.shape[0]

    @property
    def certified_cosets(self) -> int:
        return int(self.certified.sum())

    @property
    def irregular_fraction(self) -> Fraction:
        return Fraction(self.certified_cosets, self.total_cosets)

    @property
    def ok(self) -> bool:
        return self.irregular_fraction > self.epsilon

    def coefficient(self, r: int) -> Fraction:
        return Fraction(int(self.numerators[r]), self.denominator)

    def records(self) -> list[tuple[F2Vector, F2Vector, Fraction]]:
        n = self.subspace.n
        return [
            (F2Vector(n, int(rep)), F2Vector(n, int(g)), self.coefficient(r))
            for r, (rep, g) in enumerate(zip(self.reps, self.gammas))
        ]


def witness_scan(
    f: FunctionTable,
    h: Subspace,
    epsilon: "float | str | Fraction",
    xi: XiFamily,
    cross_check: bool = True,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
    _gamma_cache: dict | None = None,
) -> WitnessCertificate:
    """Build and validate the irregularity certificate of a nonzero H.

    Raises ClaimViolationError when the certified fraction fails to
    exceed eps (which would contradict the lower-bound construction for
    eps up to 1/(16 s)).  The cross-check recomputes sampled certified
    coefficients through the transform path and requires every certified
    coset to be irregular in the regularity report.
    """
    if f.counts is None:
        raise ValueError("witness scans need exact count tables (instance functions)")
    eps = as_fraction(epsilon)
    blocks = xi.blocks
    i, v = minimal_active_block(h, blocks)
    prefix_mask = (1 << blocks.offsets[i - 1]) - 1
    assert all(row & prefix_mask == 0 for row in h.basis), "prefix not constant on cosets"
    check_dense(h.n - h.dim, dense_limit, "cosets")
    reps = h.coset_representative_array(dense_limit)

    lo = blocks.offsets[i - 1]
    prefixes = reps & np.int64(prefix_mask)
    family = np.asarray(xi.families[i - 1], dtype=np.int64)
    gammas = family[prefixes] << np.int64(lo)

    dual = h.orthogonal_complement()
    nontrivial_by_prefix = {
        int(p): not dual.contains(int(family[p]) << lo) for p in np.unique(prefixes)
    }
    nontrivial = np.array([nontrivial_by_prefix[int(p)] for p in prefixes], dtype=bool)

    numerators = _coset_numerators(f, h, i, xi, reps, _gamma_cache)
    denominator = f.denominator * (1 << h.dim)
    # coefficient > eps  <=>  numerator * eps.den > eps.num * denominator
    above = numerators * eps.denominator > eps.numerator * denominator
    certified = nontrivial & above

    bad = Fraction(int((~nontrivial).sum()), reps.shape[0])

    report = check_subspace_regularity(f, h, eps, dense_limit) if cross_check else None
    cert = WitnessCertificate(
        subspace=h,
        epsilon=eps,
        block_index=i,
        vector=v,
        bad_fraction=bad,
        reps=reps,
        gammas=gammas,
        numerators=numerators,
        denominator=denominator,
        certified=certified,
        cross_checked=cross_check,
        regularity_report=report,
    )
    if cross_check:
        _cross_check(f, h, cert)
    if not cert.ok:
        raise ClaimViolationError(
            f"witness fraction {cert.irregular_fraction} is not above {eps} "
            f"for subspace with basis {h.basis}"
        )
    return cert


def _cross_check(f: FunctionTable, h: Subspace, cert: WitnessCertificate) -> None:
    """Validate the exact certificate against the transform path."""
    report = cert.regularity_report
    certified_reps = cert.reps[cert.certified]
    if certified_reps.size:
        missing = ~np.isin(certified_reps, report.witness_reps)
        if missing.any():
            raise ClaimViolationError(
                "certified coset not irregular in the regularity report"
            )
    if report.is_regular and cert.ok:
        raise ClaimViolationError("certificate contradicts the regularity report")
    # spot-check the exact coefficients against the defining mean
    picks = certified_reps[:: max(1, certified_reps.size // 4)][:4]
    for rep in picks:
        row = int(np.searchsorted(cert.reps, rep))
        coset = AffineSubspace(h, F2Vector(h.n, int(rep)))
        value = restricted_coefficient(f, coset, F2Vector(h.n, int(cert.gammas[row])))
        if abs(value - float(cert.coefficient(row))) > 1e-9:
            raise ClaimViolationError("transform and exact coefficients disagree")


def _w_class_fractions(
    f: FunctionTable,
    h: Subspace,
    g: "F2Vector | int",
    i: int,
    xi: XiFamily,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> tuple[list[Fraction], Fraction]:
    """Exact gamma-coefficients over the cosets H+g+w, w in the tail
    span, plus the average (each distinct coset counted once)."""
    if f.counts is None:
        raise ValueError("exact coefficient scans need count tables")
    blocks = xi.blocks
    gamma = gamma_character(g, i, xi)
    if h.orthogonal_complement().contains(gamma):
        raise ValueError("witness character is trivial on H (gamma in H-perp)")
    tail = w_subspace(blocks, i)
    g_bits = g.bits if isinstance(g, F2Vector) else int(g)
    check_dense(tail.dim, dense_limit, "tail translates")
    reps = np.unique(reduce_array(tail.span_array(dense_limit) ^ np.int64(g_bits), h))
    span = h.span_array(dense_limit)
    index = reps[:, None] ^ span[None, :]
    points = np.arange(f.size, dtype=np.int64)
    signs = 1 - 2 * parity64(points & np.int64(gamma.bits))
    table = f.counts.astype(np.int16) * signs.astype(np.int16)
    numerators = table[index].sum(axis=1, dtype=np.int64)
    denominator = f.denominator * (1 << h.dim)
    values = [Fraction(int(m), denominator) for m in numerators]
    average = Fraction(sum(values), len(values))
    return values, average


def w_average_coefficient(
    f: FunctionTable,
    h: Subspace,
    g: "F2Vector | int",
    i: int,
    xi: XiFamily,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> Fraction:
    """Average gamma-coefficient over the tail translates of H+g.

    For instance tables this is an exact rational; the construction
    makes it exactly 1/(2s) whenever gamma is nontrivial for H.
    """
    _, average = _w_class_fractions(f, h, g, i, xi, dense_limit)
    return average


def corollary_fraction(
    f: FunctionTable,
    h: Subspace,
    g: "F2Vector | int",
    i: int,
    xi: XiFamily,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> Fraction:
    """Fraction of tail translates whose gamma-coefficient exceeds 1/(4s).

    Asserts the averaging consequence: the fraction itself must exceed
    1/(4s).
    """
    values, _ = _w_class_fractions(f, h, g, i, xi, dense_limit)
    threshold = Fraction(1, 4 * f.denominator)
    fraction = Fraction(sum(1 for v in values if v > threshold), len(values))
    if not fraction > threshold:
        raise ClaimViolationError(
            f"fraction {fraction} of translates above {threshold} is not itself "
            f"above {threshold}"
        )
    return fraction


@dataclass(frozen=True, eq=False)
class LowerBoundReport:
    """Outcome of scanning a family of subspaces against an instance."""

    mode: str
    epsilon: Fraction
    s: int
    n: int
    seed: int | None
    checked: int
    certified: int
    zero_subspace_regular: bool
    failures: tuple
    regular_nonzero: tuple
    per_dim_checked: tuple

    @property
    def ok(self) -> bool:
        return (
            self.zero_subspace_regular
            and not self.failures
            and not self.regular_nonzero
            and self.certified == self.checked
        )

    def __bool__(self) -> bool:
        return self.ok


def _random_subspace(n: int, dim: int, stream: Stream) -> Subspace:
    """Uniform-ish subspace of exact dimension: random rows, echelonized,
    rejecting dimension misses."""
    while True:
        sub = Subspace.from_vectors(n, [stream.bits(n) for _ in range(dim)])
        if sub.dim == dim:
            return sub


def exhaustive_lowerbound_check(
    inst: Instance,
    epsilon: "float | str | Fraction",
    mode: str = "auto",
    random_per_dim: int = 10**4,
    seed: int = 0,
    strict: bool = True,
    max_enumerated_codim: int = 1,
    dense_limit: int = DEFAULT_DENSE_LIMIT,
) -> LowerBoundReport:
    """Verify that only the zero subspace is eps-regular for an instance.

    Exhaustive mode walks every subspace (n <= 4); structured mode walks
    the full space, every hyperplane (and optionally deeper enumerated
    codimensions), plus seeded random subspaces of every dimension;
    sampled mode uses only the random part.  Each nonzero subspace must
    fail the regularity check and carry a valid witness certificate.
    With strict=True any failure raises; otherwise failures and regular
    subspaces are collected in the report (informational large-eps runs).
    """
    if inst.table is None:
        raise ValueError("lower-bound scans need a dense instance table")
    eps = as_fraction(epsilon)
    f = inst.table
    n = inst.n
    if mode == "auto":
        mode = "exhaustive" if n <= 4 else "structured"

    subspaces: Iterable[Subspace]
    used_seed: int | None = seed
    if mode == "exhaustive":
        subspaces = enumerate_all_subspaces(n)
        used_seed = None
    elif mode in ("structured", "sampled"):
        def generate() -> Iterable[Subspace]:
            if mode == "structured":
                yield Subspace.full(n)
                for codim in range(1, max_enumerated_codim + 1):
                    for dual in subspaces_of_dim(n, codim):
                        yield dual.orthogonal_complement()
            for dim in range(1, n):
                stream = Stream(seed, f"lowerbound/dim{dim}")
                for _ in range(random_per_dim):
                    yield _random_subspace(n, dim, stream)

        subspaces = generate()
    else:
        raise ValueError(f"unknown mode {mode!r}")

    gamma_cache: dict = {}
    checked = 0
    certified = 0
    zero_regular = True
    failures: list[dict] = []
    regular_nonzero: list[tuple[int, ...]] = []
    per_dim = [0] * (n + 1)
    zero_seen = False

    for h in subspaces:
        per_dim[h.dim] += 1
        if h.dim == 0:
            zero_seen = True
            report = check_subspace_regularity(f, h, eps, dense_limit)
            zero_regular = report.is_regular
            if strict and not zero_regular:
                raise ClaimViolationError("the zero subspace failed its regularity check")
            continue
        checked += 1
        try:
            cert = witness_scan(
                f, h, eps, xi=inst.xi, cross_check=True,
                dense_limit=dense_limit, _gamma_cache=gamma_cache,
            )
            if cert.regularity_report.is_regular:
                raise ClaimViolationError(
                    f"subspace with basis {h.basis} is eps-regular"
                )
            certified += 1
            del cert
        except ClaimViolationError as exc:
            if strict:
                raise
            report = check_subspace_regularity(f, h, eps, dense_limit)
            if report.is_regular:
                regular_nonzero.append(tuple(h.basis))
            else:
                failures.append(
                    {"basis": list(h.basis), "dim": h.dim, "reason": str(exc)}
                )

    if mode == "exhaustive" and not zero_seen:
        raise AssertionError("exhaustive enumeration must include the zero subspace")
    if mode in ("structured", "sampled") and not zero_seen:
        report = check_subspace_regularity(f, Subspace.zero(n), eps, dense_limit)
        zero_regular = report.is_regular

    return LowerBoundReport(
        mode=mode,
        epsilon=eps,
        s=inst.s,
        n=n,
        seed=used_seed,
        checked=checked,
        certified=certified,
        zero_subspace_regular=zero_regular,
        failures=tuple(failures),
        regular_nonzero=tuple(regular_nonzero),
        per_dim_checked=tuple(per_dim),
    )
