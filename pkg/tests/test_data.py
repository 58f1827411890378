import numpy as np
import pytest
from hypothesis import given, settings

from ldm.data import (
    LabeledDataset,
    SparseVector,
    apply_normalizer,
    fit_normalizer,
    make_dataset,
    make_folds,
    parse_sparse_file,
    random_split,
    serialize_dataset,
)
from ldm.errors import DataError

from conftest import datasets_equal, dense_to_dataset, labeled_datasets


class TestParse:
    def test_single_instance(self):
        d = parse_sparse_file("+1 1:0.5 3:1.2\n")
        assert d.m == 1
        assert d.labels[0] == 1.0
        assert d.dimension == 3
        assert list(d.instances[0].indices) == [1, 3]
        assert list(d.instances[0].values) == [0.5, 1.2]

    def test_featureless_instance(self):
        d = parse_sparse_file("-1\n")
        assert d.m == 1
        assert d.labels[0] == -1.0
        assert d.instances[0].indices.size == 0
        assert d.dimension == 0

    def test_zero_one_labels_map_lexicographically(self):
        text = "0 1:1\n1 1:2\n0 2:3\n1 1:4\n"
        d = parse_sparse_file(text)
        assert list(d.labels) == [-1.0, 1.0, -1.0, 1.0]

    def test_bytes_input(self):
        d = parse_sparse_file(b"+1 1:1\n-1 2:1\n")
        assert d.m == 2

    def test_malformed_line_reports_line_number(self):
        with pytest.raises(DataError, match="line 2"):
            parse_sparse_file("+1 1:1\n+1 1:nope\n")

    def test_non_increasing_indices_rejected(self):
        with pytest.raises(DataError, match="line 1"):
            parse_sparse_file("+1 3:1 2:1\n")

    def test_three_distinct_labels_rejected(self):
        with pytest.raises(DataError, match="two distinct"):
            parse_sparse_file("0 1:1\n1 1:1\n2 1:1\n")

    def test_empty_file_rejected(self):
        with pytest.raises(DataError):
            parse_sparse_file("\n\n")

    @given(labeled_datasets(min_m=1, max_m=8, both_classes=False))
    @settings(max_examples=60)
    def test_serialize_parse_round_trip(self, d):
        assert datasets_equal(parse_sparse_file(serialize_dataset(d)), d)

    @given(labeled_datasets(min_m=1, max_m=8, both_classes=False))
    @settings(max_examples=60)
    def test_parse_serialize_identity_on_canonical_text(self, d):
        canonical = serialize_dataset(d)
        assert serialize_dataset(parse_sparse_file(canonical)) == canonical


class TestSparseVector:
    def test_requires_increasing_indices(self):
        with pytest.raises(DataError):
            SparseVector(np.array([2, 2]), np.array([1.0, 1.0]))

    def test_rejects_nonfinite(self):
        with pytest.raises(DataError):
            SparseVector(np.array([1]), np.array([np.inf]))

    def test_dot_ignores_disjoint_indices(self):
        a = SparseVector.from_pairs([(1, 2.0), (3, 4.0)])
        b = SparseVector.from_pairs([(2, 5.0), (4, 7.0)])
        assert a.dot(b) == 0.0

    def test_dot_matches_dense(self):
        rng = np.random.default_rng(0)
        for _ in range(25):
            xa = rng.random(6) * (rng.random(6) < 0.6)
            xb = rng.random(6) * (rng.random(6) < 0.6)
            d = dense_to_dataset(np.vstack([xa, xb]), np.array([1.0, -1.0]))
            got = d.instances[0].dot(d.instances[1])
            assert got == pytest.approx(float(xa @ xb), abs=1e-15)


class TestNormalizer:
    def test_implicit_zero_participates(self):
        d = parse_sparse_file("+1 1:2\n-1 1:4\n+1 2:1\n")
        nmap = fit_normalizer(d)
        assert nmap.lo[0] == 0.0  # feature 1 absent from instance 3
        assert nmap.hi[0] == 4.0

    def test_constant_nonzero_feature(self):
        d = parse_sparse_file("+1 1:5\n-1 1:5\n")
        nmap = fit_normalizer(d)
        assert nmap.lo[0] == 5.0 and nmap.hi[0] == 5.0

    def test_matches_dense_column_scan(self):
        rng = np.random.default_rng(42)
        x = rng.normal(size=(15, 6))
        d = dense_to_dataset(x, np.where(rng.random(15) < 0.5, 1.0, -1.0))
        nmap = fit_normalizer(d)
        assert np.allclose(nmap.lo, x.min(axis=0))
        assert np.allclose(nmap.hi, x.max(axis=0))

    def test_endpoints_map_to_unit_interval(self):
        d = parse_sparse_file("+1 1:2\n-1 1:6\n")
        dn = apply_normalizer(fit_normalizer(d), d)
        assert dn.instances[0].values[0] == 0.0
        assert dn.instances[1].values[0] == 1.0

    def test_degenerate_feature_maps_to_zero(self):
        d = parse_sparse_file("+1 1:5\n-1 1:5\n")
        dn = apply_normalizer(fit_normalizer(d), d)
        assert all(inst.values[0] == 0.0 for inst in dn.instances)

    def test_out_of_range_values_clamped(self):
        train = parse_sparse_file("+1 1:1\n-1 1:3\n")
        nmap = fit_normalizer(train)
        test = parse_sparse_file("+1 1:6\n-1 1:-4\n")
        tn = apply_normalizer(nmap, test)
        assert tn.instances[0].values[0] == 1.0
        assert tn.instances[1].values[0] == 0.0

    @given(labeled_datasets(min_m=1, max_m=8, both_classes=False))
    @settings(max_examples=60)
    def test_self_normalization_lands_in_unit_interval(self, d):
        dn = apply_normalizer(fit_normalizer(d), d)
        for inst in dn.instances:
            assert np.all(inst.values >= 0.0)
            assert np.all(inst.values <= 1.0)

    def test_sparsity_pattern_preserved(self):
        d = parse_sparse_file("+1 1:2 3:1\n-1 1:4\n")
        dn = apply_normalizer(fit_normalizer(d), d)
        for before, after in zip(d.instances, dn.instances):
            assert np.array_equal(before.indices, after.indices)


class TestFolds:
    def test_divisible_case(self):
        plan = make_folds(10, 5, seed=1)
        sizes = np.bincount(plan.assignment, minlength=5)
        assert list(sizes) == [2, 2, 2, 2, 2]

    def test_remainder_case(self):
        plan = make_folds(7, 5, seed=1)
        sizes = sorted(np.bincount(plan.assignment, minlength=5), reverse=True)
        assert sizes == [2, 2, 1, 1, 1]

    def test_deterministic(self):
        a = make_folds(23, 4, seed=9)
        b = make_folds(23, 4, seed=9)
        assert np.array_equal(a.assignment, b.assignment)

    def test_seed_changes_assignment(self):
        a = make_folds(23, 4, seed=9)
        b = make_folds(23, 4, seed=10)
        assert not np.array_equal(a.assignment, b.assignment)

    def test_partition(self):
        plan = make_folds(17, 3, seed=2)
        seen = np.concatenate([plan.test_indices(f) for f in range(3)])
        assert sorted(seen) == list(range(17))

    def test_k_larger_than_m_rejected(self):
        with pytest.raises(DataError):
            make_folds(3, 5, seed=0)


class TestRandomSplit:
    def _dataset(self, m):
        rng = np.random.default_rng(5)
        y = np.where(rng.random(m) < 0.5, 1.0, -1.0)
        y[0], y[1] = 1.0, -1.0
        return dense_to_dataset(rng.random((m, 3)), y)

    def test_half_split_sizes(self):
        train, test = random_split(self._dataset(100), 0.5, seed=0)
        assert (train.m, test.m) == (50, 50)

    def test_ceiling_rule(self):
        train, test = random_split(self._dataset(3), 0.5, seed=0)
        assert (train.m, test.m) == (2, 1)

    def test_union_is_original_multiset(self):
        d = self._dataset(31)
        train, test = random_split(d, 0.4, seed=3)
        def lines(ds):
            return sorted(serialize_dataset(ds).splitlines())
        combined = sorted(lines(train) + lines(test))
        assert combined == lines(d)

    def test_deterministic(self):
        d = self._dataset(20)
        a_train, a_test = random_split(d, 0.5, seed=11)
        b_train, b_test = random_split(d, 0.5, seed=11)
        assert datasets_equal(a_train, b_train)
        assert datasets_equal(a_test, b_test)

    def test_single_class_train_rejected(self):
        d = make_dataset(
            [SparseVector.from_pairs([(1, float(i))]) for i in range(4)],
            [1, 1, 1, -1],
        )
        # all seeds that put the lone -1 in the test half must fail
        failures = 0
        for seed in range(30):
            try:
                random_split(d, 0.5, seed=seed)
            except DataError:
                failures += 1
        assert failures > 0

    def test_fraction_bounds(self):
        with pytest.raises(DataError):
            random_split(self._dataset(4), 1.0, seed=0)
