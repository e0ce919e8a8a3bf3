"""Discriminant fitting, ranking and its oracle properties."""

from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cyberbench.discriminant import (
    AttributeSpaceMismatch,
    fisher_ratio,
    fit_discriminant,
    rank_report,
)
from cyberbench.model import FeatureMatrix
from reference import fisher_grid_optimum, reference_fisher_ratio


def matrix(rows, names=("x", "y")):
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    return FeatureMatrix(
        attribute_names=tuple(names[: rows.shape[1]]),
        entity_ids=tuple(f"e{i}" for i in range(rows.shape[0])),
        values=rows,
    )


class TestExamples:
    def test_single_attribute_scores_one(self):
        result = fit_discriminant(matrix([[0.0], [0.2]], ("a",)), matrix([[10.0], [10.2]], ("a",)))
        assert result.attribute_scores[0].attribute == "a"
        assert result.attribute_scores[0].score == 1.0
        assert result.separation > 0

    def test_identical_classes_score_zero(self):
        a = matrix([[1.0, 2.0], [3.0, 4.0]])
        result = fit_discriminant(a, a)
        assert all(s.score == 0.0 for s in result.attribute_scores)
        assert result.separation == 0.0

    def test_two_attribute_separable_blocks(self):
        # oracle 1: explicit scatter assembly and solve, done by hand here
        a_rows = np.array([[0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]])
        b_rows = np.array([[4.0, 0.0], [5.0, 1.0], [4.0, 1.0], [5.0, 0.0]])
        stacked = np.vstack([a_rows, b_rows])
        za = (a_rows - stacked.mean(0)) / stacked.std(0)
        zb = (b_rows - stacked.mean(0)) / stacked.std(0)
        scatter = np.zeros((2, 2))
        for row in za:
            dev = row - za.mean(0)
            scatter += np.outer(dev, dev)
        for row in zb:
            dev = row - zb.mean(0)
            scatter += np.outer(dev, dev)
        ridge = 1e-6 * np.trace(scatter) / 2 * np.eye(2)
        expected_w = np.linalg.solve(scatter + ridge, zb.mean(0) - za.mean(0))
        expected_scores = np.abs(expected_w) / np.abs(expected_w).max()

        result = fit_discriminant(matrix(a_rows), matrix(b_rows), 1e-6)
        by_name = {s.attribute: s.score for s in result.attribute_scores}
        assert by_name["x"] == pytest.approx(expected_scores[0], abs=1e-12)
        assert by_name["y"] == pytest.approx(expected_scores[1], abs=1e-12)
        assert by_name["x"] == 1.0
        assert by_name["y"] < 0.05

        # oracle 2: direction beats a dense grid search over unit directions
        raw_direction = (result.direction / stacked.std(0)).tolist()
        achieved = reference_fisher_ratio(a_rows.tolist(), b_rows.tolist(), raw_direction)
        optimum = fisher_grid_optimum(a_rows.tolist(), b_rows.tolist(), steps=4000)
        assert achieved >= (1 - 1e-3) * optimum

    def test_count_attribute_qualifier(self):
        result = fit_discriminant(
            matrix([[3.0]], ("BaseFileName=dlhost.exe",)),
            matrix([[0.0]], ("BaseFileName=dlhost.exe",)),
        )
        top = result.attribute_scores[0]
        assert top.qualifier == "dlhost.exe"


class TestErrors:
    def test_attribute_space_mismatch(self):
        with pytest.raises(AttributeSpaceMismatch):
            fit_discriminant(matrix([[1.0]], ("a",)), matrix([[1.0]], ("b",)))

    def test_empty_class(self):
        empty = FeatureMatrix(attribute_names=("a",), entity_ids=(), values=np.zeros((0, 1)))
        with pytest.raises(ValueError):
            fit_discriminant(empty, matrix([[1.0]], ("a",)))

    def test_bad_regularization(self):
        with pytest.raises(ValueError):
            fit_discriminant(matrix([[1.0]], ("a",)), matrix([[2.0]], ("a",)), 0.0)


class TestRankReport:
    def _result(self):
        return fit_discriminant(
            matrix([[0.0, 0.0, 5.0], [0.4, 0.1, 5.2]], ("a", "b", "c")),
            matrix([[10.0, 0.2, 5.1], [10.4, 0.3, 5.3]], ("a", "b", "c")),
        )

    def test_truncation(self):
        result = self._result()
        report = rank_report(result, 2)
        assert len(report) == 2
        assert report[0][1] >= report[1][1]

    def test_limit_zero(self):
        assert rank_report(self._result(), 0) == []

    def test_limit_beyond_width(self):
        assert len(rank_report(self._result(), 10)) == 3

    def test_tie_break_lexicographic(self):
        # identical classes give an exact all-zero tie; order falls back to names
        a = matrix([[1.0, 2.0], [3.0, 4.0]], ("b", "a"))
        report = rank_report(fit_discriminant(a, a), 2)
        assert report == [("a", 0.0), ("b", 0.0)]


def random_instance(rng, n_attrs=2, n_rows=6, spread=1.0):
    center_a = rng.normal(0, 3, size=n_attrs)
    center_b = rng.normal(0, 3, size=n_attrs)
    a = center_a + rng.normal(0, spread, size=(n_rows, n_attrs))
    b = center_b + rng.normal(0, spread, size=(n_rows, n_attrs))
    return a, b


class TestProperties:
    def test_fisher_optimality_small_sample(self):
        rng = np.random.default_rng(7)
        for _ in range(10):
            a, b = random_instance(rng)
            result = fit_discriminant(matrix(a), matrix(b), 1e-6)
            scale = np.vstack([a, b]).std(0)
            scale[scale == 0] = 1.0
            raw_direction = (result.direction / scale).tolist()
            achieved = reference_fisher_ratio(a.tolist(), b.tolist(), raw_direction)
            optimum = fisher_grid_optimum(a.tolist(), b.tolist(), steps=4000)
            assert achieved >= (1 - 1e-3) * optimum

    def test_label_swap_flips_direction(self):
        rng = np.random.default_rng(11)
        a, b = random_instance(rng, n_attrs=4)
        forward = fit_discriminant(matrix(a, "abcd"), matrix(b, "abcd"))
        backward = fit_discriminant(matrix(b, "abcd"), matrix(a, "abcd"))
        assert np.allclose(forward.direction, -backward.direction)
        assert [s.score for s in forward.attribute_scores] == pytest.approx(
            [s.score for s in backward.attribute_scores]
        )

    def test_row_permutation_bit_identical(self):
        rng = np.random.default_rng(13)
        a, b = random_instance(rng, n_attrs=3)
        base = fit_discriminant(matrix(a, "abc"), matrix(b, "abc"))
        permuted = fit_discriminant(matrix(a[::-1], "abc"), matrix(b, "abc"))
        assert np.array_equal(base.direction, permuted.direction)
        assert base.attribute_scores == permuted.attribute_scores

    @given(st.integers(min_value=0, max_value=10_000))
    @settings(max_examples=25, deadline=None)
    def test_column_scaling_preserves_other_ranks(self, seed):
        rng = np.random.default_rng(seed)
        a, b = random_instance(rng, n_attrs=5)
        names = ("a", "b", "c", "d", "e")
        base = fit_discriminant(matrix(a, names), matrix(b, names))
        scaled_col = int(rng.integers(0, 5))
        factor = float(rng.uniform(0.01, 100.0))
        a2, b2 = a.copy(), b.copy()
        a2[:, scaled_col] *= factor
        b2[:, scaled_col] *= factor
        rescaled = fit_discriminant(matrix(a2, names), matrix(b2, names))

        def other_ranks(result):
            return [
                s.attribute for s in result.attribute_scores if s.attribute != names[scaled_col]
            ]

        assert other_ranks(base) == other_ranks(rescaled)

    def test_engine_ratio_matches_reference(self):
        rng = np.random.default_rng(17)
        a, b = random_instance(rng)
        direction = rng.normal(size=2)
        assert fisher_ratio(a, b, direction) == pytest.approx(
            reference_fisher_ratio(a.tolist(), b.tolist(), direction.tolist())
        )
