"""Exact linear algebra over F2 with int-bitset vectors.

Vectors of F2^n are Python ints used as bitsets: coordinate j (1-based)
is bit j-1, so coordinate 1 is the least significant bit and the bitset
itself is the canonical integer encoding of the vector.  Subspaces are
kept in reduced row echelon form with pivots at the lowest set bit of
each row, strictly increasing, and pivot columns cleared from all other
rows; this makes every Subspace representation canonical, so equality
of spans is equality of basis tuples.

Dense operations (materializing all 2^k cosets or points) refuse to run
above a configurable limit instead of attempting huge allocations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from typing import Iterable, Iterator, Sequence

import numpy as np


DEFAULT_DENSE_LIMIT = 26


class DimensionMismatchError(ValueError):
    """Operands live in different ambient dimensions."""


class DenseLimitError(RuntimeError):
    """A dense enumeration would exceed the configured memory guard."""


def check_dense(k: int, dense_limit: int = DEFAULT_DENSE_LIMIT, what: str = "objects") -> None:
    """Refuse to materialize 2**k objects when k exceeds the guard."""
    if k > dense_limit:
        raise DenseLimitError(
            f"materializing 2^{k} {what} exceeds the dense limit 2^{dense_limit}"
        )


def parity(x: int) -> int:
    """Parity of the popcount of x (inner product helper)."""
    return x.bit_count() & 1


def parity64(a: np.ndarray) -> np.ndarray:
    """Elementwise popcount parity of a non-negative int64/uint64 array."""
    return (np.bitwise_count(a) & 1).astype(np.int64)


@dataclass(frozen=True)
class F2Vector:
    """An element of F2^n (also used for characters of F2^n)."""

    n: int
    bits: int

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError(f"ambient dimension must be positive, got {self.n}")
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"encoding {self.bits} out of range for n={self.n}")

    @classmethod
    def from_string(cls, coords: str) -> "F2Vector":
        """Build from a coordinate string x1 x2 ... xn (left to right)."""
        bits = 0
        for j, c in enumerate(coords):
            if c not in "01":
                raise ValueError(f"coordinate string must be over 0/1, got {coords!r}")
            bits |= (c == "1") << j
        return cls(len(coords), bits)

    def to_string(self) -> str:
        return "".join("1" if (self.bits >> j) & 1 else "0" for j in range(self.n))

    def bit(self, j: int) -> int:
        """Coordinate j in 0-based bit indexing."""
        return (self.bits >> j) & 1

    def is_zero(self) -> bool:
        return self.bits == 0

    def __xor__(self, other: "F2Vector") -> "F2Vector":
        if self.n != other.n:
            raise DimensionMismatchError(f"n mismatch: {self.n} vs {other.n}")
        return F2Vector(self.n, self.bits ^ other.bits)

    def dot(self, other: "F2Vector") -> int:
        """Standard inner product over F2."""
        if self.n != other.n:
            raise DimensionMismatchError(f"n mismatch: {self.n} vs {other.n}")
        return parity(self.bits & other.bits)

    def __repr__(self) -> str:
        return f"F2Vector({self.n}, 0b{self.bits:0{self.n}b})"


def _as_bits(v: "F2Vector | int") -> int:
    return v.bits if isinstance(v, F2Vector) else int(v)


def _echelon_rows(rows: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis (pivot = lowest set bit) of the span."""
    pivot_rows: dict[int, int] = {}
    for row in rows:
        v = row
        for p, r in pivot_rows.items():
            if (v >> p) & 1:
                v ^= r
        if v == 0:
            continue
        p = (v & -v).bit_length() - 1
        for q, r in pivot_rows.items():
            if (r >> p) & 1:
                pivot_rows[q] = r ^ v
        pivot_rows[p] = v
    return tuple(pivot_rows[p] for p in sorted(pivot_rows))


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of F2^n in canonical reduced row echelon form."""

    n: int
    basis: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n <= 0:
            raise ValueError(f"ambient dimension must be positive, got {self.n}")
        canonical = _echelon_rows(self.basis)
        if canonical != self.basis:
            raise ValueError("basis is not in canonical echelon form; use from_vectors")
        if self.basis and self.basis[-1] >= (1 << self.n):
            raise ValueError("basis row out of range for ambient dimension")

    @classmethod
    def from_vectors(cls, n: int, vectors: Iterable["F2Vector | int"]) -> "Subspace":
        rows = []
        for v in vectors:
            if isinstance(v, F2Vector) and v.n != n:
                raise DimensionMismatchError(f"vector n={v.n} in ambient n={n}")
            rows.append(_as_bits(v))
        return cls(n, _echelon_rows(rows))

    @classmethod
    def zero(cls, n: int) -> "Subspace":
        return cls(n, ())

    @classmethod
    def full(cls, n: int) -> "Subspace":
        return cls(n, tuple(1 << j for j in range(n)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def index(self) -> int:
        """Number of cosets, 2^(n - dim)."""
        return 1 << (self.n - self.dim)

    @property
    def pivots(self) -> tuple[int, ...]:
        return tuple((r & -r).bit_length() - 1 for r in self.basis)

    @property
    def free_positions(self) -> tuple[int, ...]:
        piv = set(self.pivots)
        return tuple(j for j in range(self.n) if j not in piv)

    def _check_ambient(self, other: "Subspace | F2Vector") -> None:
        if self.n != other.n:
            raise DimensionMismatchError(f"n mismatch: {self.n} vs {other.n}")

    def reduce(self, v: "F2Vector | int") -> int:
        """Canonical coset representative of v: all pivot coordinates zeroed."""
        if isinstance(v, F2Vector):
            self._check_ambient(v)
        x = _as_bits(v)
        for p, r in zip(self.pivots, self.basis):
            if (x >> p) & 1:
                x ^= r
        return x

    def contains(self, v: "F2Vector | int") -> bool:
        return self.reduce(v) == 0

    def contains_subspace(self, other: "Subspace") -> bool:
        self._check_ambient(other)
        return all(self.contains(r) for r in other.basis)

    def orthogonal_complement(self) -> "Subspace":
        """All characters vanishing on this subspace."""
        piv = self.pivots
        rows = []
        for f in self.free_positions:
            w = 1 << f
            for p, r in zip(piv, self.basis):
                if (r >> f) & 1:
                    w |= 1 << p
            rows.append(w)
        return Subspace(self.n, _echelon_rows(rows))

    def intersect(self, other: "Subspace") -> "Subspace":
        """Exact intersection via duals: (H1^perp + H2^perp)^perp."""
        self._check_ambient(other)
        joined = self.orthogonal_complement().basis + other.orthogonal_complement().basis
        return Subspace(self.n, _echelon_rows(joined)).orthogonal_complement()

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_ambient(other)
        return Subspace(self.n, _echelon_rows(self.basis + other.basis))

    def coset_representatives(
        self, dense_limit: int = DEFAULT_DENSE_LIMIT
    ) -> list[F2Vector]:
        """Canonical representatives of all 2^(n-dim) cosets."""
        return [F2Vector(self.n, int(b)) for b in self.coset_representative_array(dense_limit)]

    def coset_representative_array(
        self, dense_limit: int = DEFAULT_DENSE_LIMIT
    ) -> np.ndarray:
        """Canonical coset representatives as an ascending int64 array.

        The returned array is read-only (it may be shared by a cache).
        """
        k = self.n - self.dim
        check_dense(k, dense_limit, "coset representatives")
        if self.n > 62:
            raise DenseLimitError("dense arrays require ambient dimension <= 62")
        if k <= 12:
            return _cached_scatter(self.free_positions)
        return scatter_array(self.free_positions)

    def span_array(self, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
        """All 2^dim elements, ordered by basis-coefficient counting.

        The returned array is read-only (it may be shared by a cache).
        """
        check_dense(self.dim, dense_limit, "subspace elements")
        if self.n > 62:
            raise DenseLimitError("dense arrays require ambient dimension <= 62")
        if self.dim <= 12:
            return _cached_span(self.basis)
        return _span_of_rows(self.basis)

    def basis_vectors(self) -> list[F2Vector]:
        return [F2Vector(self.n, r) for r in self.basis]

    def __repr__(self) -> str:
        return f"Subspace(n={self.n}, dim={self.dim}, basis={[bin(r) for r in self.basis]})"


@dataclass(frozen=True)
class AffineSubspace:
    """A coset H + g, with the representative canonicalized modulo H."""

    subspace: Subspace
    representative: F2Vector = field(default=None)  # type: ignore[assignment]

    def __post_init__(self) -> None:
        rep = self.representative
        if rep is None:
            rep = F2Vector(self.subspace.n, 0)
        elif rep.n != self.subspace.n:
            raise DimensionMismatchError(f"n mismatch: {rep.n} vs {self.subspace.n}")
        canonical = F2Vector(self.subspace.n, self.subspace.reduce(rep))
        object.__setattr__(self, "representative", canonical)

    @property
    def n(self) -> int:
        return self.subspace.n

    @property
    def size(self) -> int:
        return 1 << self.subspace.dim

    def contains(self, v: "F2Vector | int") -> bool:
        return self.subspace.reduce(_as_bits(v) ^ self.representative.bits) == 0

    def element_array(self, dense_limit: int = DEFAULT_DENSE_LIMIT) -> np.ndarray:
        """All elements of the coset as int64 encodings."""
        return self.subspace.span_array(dense_limit) ^ np.int64(self.representative.bits)

    def elements(self) -> Iterator[F2Vector]:
        for x in self.element_array():
            yield F2Vector(self.n, int(x))


@dataclass(frozen=True)
class BlockStructure:
    """A partition of the n coordinates into consecutive blocks."""

    dims: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.dims or any(d <= 0 for d in self.dims):
            raise ValueError(f"block dims must be positive, got {self.dims}")

    @property
    def s(self) -> int:
        return len(self.dims)

    @property
    def n(self) -> int:
        return sum(self.dims)

    @property
    def offsets(self) -> tuple[int, ...]:
        """Prefix sums D_0 = 0, D_i = d_1 + ... + d_i."""
        out = [0]
        for d in self.dims:
            out.append(out[-1] + d)
        return tuple(out)

    def block(self, x: "F2Vector | int", i: int) -> int:
        """Bits of block i (1-based) of x, as a d_i-bit integer."""
        lo = self.offsets[i - 1]
        return (_as_bits(x) >> lo) & ((1 << self.dims[i - 1]) - 1)

    def embed(self, value: int, i: int) -> int:
        """Place a d_i-bit value into block i of an otherwise-zero vector."""
        if not 0 <= value < (1 << self.dims[i - 1]):
            raise ValueError(f"value {value} out of range for block {i}")
        return value << self.offsets[i - 1]

    def prefix(self, x: "F2Vector | int", i: int) -> int:
        """Bits of blocks 1..i-1 of x (the D_{i-1}-bit prefix)."""
        return _as_bits(x) & ((1 << self.offsets[i - 1]) - 1)


def echelonize(vectors: Sequence[F2Vector], n: int | None = None) -> Subspace:
    """Canonical basis of the span of the given vectors.

    The ambient dimension is taken from the vectors and must be uniform;
    pass n explicitly to allow an empty list.
    """
    if vectors:
        ns = {v.n for v in vectors}
        if len(ns) > 1:
            raise DimensionMismatchError(f"mixed ambient dimensions: {sorted(ns)}")
        ambient = ns.pop()
        if n is not None and n != ambient:
            raise DimensionMismatchError(f"n mismatch: {n} vs {ambient}")
        n = ambient
    if n is None:
        raise ValueError("empty vector list needs an explicit ambient dimension")
    return Subspace.from_vectors(n, vectors)


def contains(subspace: Subspace, v: F2Vector) -> bool:
    return subspace.contains(v)


def orthogonal_complement(subspace: Subspace) -> Subspace:
    return subspace.orthogonal_complement()


def intersect(h1: Subspace, h2: Subspace) -> Subspace:
    return h1.intersect(h2)


def coset_representatives(
    subspace: Subspace, dense_limit: int = DEFAULT_DENSE_LIMIT
) -> list[F2Vector]:
    return subspace.coset_representatives(dense_limit)


def subspaces_of_dim(n: int, d: int) -> Iterator[Subspace]:
    """Every d-dimensional subspace of F2^n exactly once.

    Enumerates echelon normal forms: a pivot set and arbitrary entries
    in the free cells to the right of each pivot.  Counts grow like
    2^(d(n-d)), so the caller is responsible for choosing feasible
    (n, d).
    """
    if not 0 <= d <= n:
        raise ValueError(f"dimension {d} out of range for n={n}")
    for pivots in combinations(range(n), d):
        free_cells = [
            (i, j)
            for i, p in enumerate(pivots)
            for j in range(p + 1, n)
            if j not in pivots
        ]
        for mask in range(1 << len(free_cells)):
            rows = [1 << p for p in pivots]
            for c, (i, j) in enumerate(free_cells):
                if (mask >> c) & 1:
                    rows[i] |= 1 << j
            yield Subspace(n, tuple(rows))


def enumerate_all_subspaces(n: int) -> Iterator[Subspace]:
    """Every subspace of F2^n exactly once, via echelon normal forms.

    The count grows like 2^(n^2/4), so this refuses n > 4.
    """
    if n > 4:
        raise DenseLimitError(f"subspace enumeration is limited to n <= 4, got {n}")
    if n <= 0:
        raise ValueError(f"ambient dimension must be positive, got {n}")
    for d in range(n + 1):
        yield from subspaces_of_dim(n, d)


def scatter_array(positions: Sequence[int]) -> np.ndarray:
    """All subset-sums of the given bit positions, ascending int64.

    positions must be strictly increasing; entry k is the integer whose
    set bits are the positions selected by the bits of k.
    """
    out = np.zeros(1, dtype=np.int64)
    for p in positions:
        out = np.concatenate([out, out | np.int64(1 << p)])
    return out


def _span_of_rows(rows: Sequence[int]) -> np.ndarray:
    span = np.zeros(1, dtype=np.int64)
    for r in rows:
        span = np.concatenate([span, span ^ np.int64(r)])
    return span


@lru_cache(maxsize=512)
def _cached_span(rows: tuple[int, ...]) -> np.ndarray:
    span = _span_of_rows(rows)
    span.setflags(write=False)
    return span


@lru_cache(maxsize=512)
def _cached_scatter(positions: tuple[int, ...]) -> np.ndarray:
    out = scatter_array(positions)
    out.setflags(write=False)
    return out


def reduce_array(x: np.ndarray, subspace: Subspace) -> np.ndarray:
    """Vectorized canonical-representative map over an int64 array."""
    x = x.astype(np.int64, copy=True)
    for p, r in zip(subspace.pivots, subspace.basis):
        mask = (x >> np.int64(p)) & np.int64(1)
        x ^= mask * np.int64(r)
    return x
