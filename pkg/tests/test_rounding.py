"""Randomized rounding: reproducibility, unbiasedness, deviations."""

import random
from fractions import Fraction

import numpy as np
import pytest

from f2reglab import (
    AffineSubspace,
    F2Vector,
    FunctionTable,
    Instance,
    Subspace,
    check_subspace_regularity,
    deviation_report,
    enumerate_all_subspaces,
    round_to_binary,
    sample_pairs,
    spectrum_deviations,
)
from f2reglab.rounding import round_point, size_threshold

# frozen: rounding the two-block instance table with this seed keeps
# every nonzero subspace irregular at half the instance's design level
SPOT_CHECK_SEED = 1
SPOT_CHECK_TABLE = [1, 0, 1, 0, 1, 0, 0, 0]


class TestRoundToBinary:
    def test_endpoints_forced(self):
        values = np.array([0.0, 1.0, 0.0, 1.0])
        for seed in (0, 1, 99):
            rounded = round_to_binary(FunctionTable(2, values), seed)
            assert rounded.values.tolist() == values.tolist()

    def test_binary_everywhere_and_counts(self):
        rng = random.Random(5)
        f = FunctionTable(8, np.array([rng.random() for _ in range(256)]))
        rounded = round_to_binary(f, 3)
        assert rounded.is_binary()
        assert rounded.denominator == 1
        assert np.array_equal(rounded.counts, rounded.values.astype(np.uint8))

    def test_deterministic_and_seed_sensitive(self):
        f = FunctionTable.constant(10, 0.5)
        a = round_to_binary(f, 7)
        b = round_to_binary(f, 7)
        c = round_to_binary(f, 8)
        assert np.array_equal(a.values, b.values)
        assert not np.array_equal(a.values, c.values)

    def test_half_table_mean_concentrates(self):
        f = FunctionTable.constant(16, 0.5)
        rounded = round_to_binary(f, 7)
        assert abs(rounded.mean() - 0.5) < 0.02

    def test_pointwise_replay(self):
        rng = random.Random(6)
        f = FunctionTable(6, np.array([rng.random() for _ in range(64)]))
        rounded = round_to_binary(f, 11)
        for x in range(64):
            assert round_point(f, 11, x) == int(rounded.values[x])

    def test_per_point_unbiased(self):
        rng = random.Random(7)
        f = FunctionTable(4, np.array([rng.random() for _ in range(16)]))
        hits = np.zeros(16)
        for seed in range(1000):
            hits += round_to_binary(f, seed).values
        assert np.max(np.abs(hits / 1000 - f.values)) < 0.05


class TestDeviationReport:
    def test_binary_input_identity(self):
        rng = random.Random(8)
        f = round_to_binary(
            FunctionTable(8, np.array([rng.random() for _ in range(256)])), 1
        )
        again = round_to_binary(f, 2)
        assert np.array_equal(f.values, again.values)
        pairs = [(AffineSubspace(Subspace.full(8)), F2Vector(8, eta)) for eta in range(16)]
        report = deviation_report(f, again, tau=0.5, pairs=pairs)
        assert report.max_deviation == 0.0 and report.ok

    def test_size_threshold_filters(self):
        f = FunctionTable.constant(6, 0.5)
        s = round_to_binary(f, 1)
        small = AffineSubspace(Subspace.from_vectors(6, [1]))  # size 2
        big = AffineSubspace(Subspace.full(6))  # size 64
        tau = 1.5  # threshold 4*36/2.25 = 64
        report = deviation_report(f, s, tau=tau, pairs=[(small, 1), (big, 1)])
        assert report.skipped_small == 1
        assert len(report.records) == 1 and report.records[0].size == 64
        assert size_threshold(6, tau) == 64.0

    def test_deviation_matches_direct_computation(self):
        rng = random.Random(9)
        f = FunctionTable(10, np.array([rng.random() for _ in range(1024)]))
        s = round_to_binary(f, 4)
        pairs = sample_pairs(10, 12, seed=21, max_codim=0)
        report = deviation_report(f, s, tau=1.9, pairs=pairs)
        from f2reglab import restricted_coefficient

        for rec, (coset, eta) in zip(report.records, pairs):
            expected = abs(
                restricted_coefficient(s, coset, eta)
                - restricted_coefficient(f, coset, eta)
            )
            assert rec.deviation == pytest.approx(expected, abs=1e-15)

    def test_full_space_scan_on_instance(self):
        inst = Instance.generate(3, seed=1)
        s = round_to_binary(inst.table, 5)
        # full space: size 2048 >= 4 * 121 / 0.25 = 1936
        assert 2048 >= size_threshold(11, 0.5)
        _, _, deviations = spectrum_deviations(inst.table, s, Subspace.full(11))
        assert float(deviations.max()) <= 0.5

    def test_sampled_pairs_deterministic(self):
        a = sample_pairs(12, 30, seed=2, max_codim=3)
        b = sample_pairs(12, 30, seed=2, max_codim=3)
        assert [(p[0], p[1].bits) for p in a] == [(p[0], p[1].bits) for p in b]
        assert all(p[0].size >= 1 << 9 for p in a)


class TestRegularityPreservedSpotCheck:
    """Rounding the two-block instance at tau = eps/2 bookkeeping keeps
    the lower-bound structure in a structured scan (frozen seed; at this
    tiny n the size threshold is vacuous, so this is a sanity check of
    the phenomenon, not a reproduction of the argument)."""

    def test_frozen_rounding_table(self):
        inst = Instance.generate(2, seed=1)
        rounded = round_to_binary(inst.table, SPOT_CHECK_SEED)
        assert rounded.values.astype(int).tolist() == SPOT_CHECK_TABLE

    def test_rounded_table_still_has_no_regular_subspace(self):
        inst = Instance.generate(2, seed=1)
        rounded = round_to_binary(inst.table, SPOT_CHECK_SEED)
        eps_half = Fraction(1, 64)
        for h in enumerate_all_subspaces(3):
            report = check_subspace_regularity(rounded, h, eps_half)
            assert report.is_regular == (h.dim == 0)
