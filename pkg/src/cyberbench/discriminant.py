"""Two-class linear discriminant analysis with per-attribute ranking.

Given two sets of vectors over one attribute space, find the direction
that best separates the sets while keeping each internally tight, then
score every attribute by the magnitude of its weight in that direction.

Columns are z-scored with pooled statistics before the solve (zero
variance columns pass through unscaled) so large-magnitude counts do not
dominate; the within-class scatter is regularized by a trace-relative
ridge because one-hot count data routinely makes it singular.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import FeatureMatrix, split_count_attribute

_STD_FLOOR = 1e-12


class AttributeSpaceMismatch(ValueError):
    """The two inputs do not share the same attribute space."""


@dataclass(frozen=True)
class AttributeScore:
    """One attribute's discrimination score in [0, 1].

    ``qualifier`` is the value part of ``field=value`` count attributes
    (what result views display next to the field name); empty otherwise.
    """

    attribute: str
    qualifier: str
    score: float


@dataclass(frozen=True, eq=False)
class DiscriminantResult:
    """Separating direction plus attributes ranked by |weight|.

    Attributes
    ----------
    direction : ndarray, shape (d,)
        Solution w of the regularized scatter system, in the standardized
        column space. Flips sign under label swap.
    attribute_scores : tuple of AttributeScore
        Sorted by descending score, ties broken by attribute name;
        the top score is 1.0 unless the class means coincide.
    class_means : (ndarray, ndarray)
        Per-class attribute means in the original (unstandardized) units.
    separation : float
        Projected mean gap over pooled projected standard deviation.
    """

    direction: np.ndarray
    attribute_scores: tuple[AttributeScore, ...]
    class_means: tuple[np.ndarray, np.ndarray]
    separation: float
    attribute_names: tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "attributes": [
                {"attribute": s.attribute, "qualifier": s.qualifier, "score": s.score}
                for s in self.attribute_scores
            ],
            "separation": self.separation,
            "direction": self.direction.tolist(),
            "attribute_names": list(self.attribute_names),
        }


def _pooled_standardize(stacked: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = stacked.mean(axis=0)
    std = stacked.std(axis=0)
    scale = np.where(std > _STD_FLOOR, std, 1.0)
    return mean, scale


def fit_discriminant(
    a: FeatureMatrix, b: FeatureMatrix, regularization: float = 1e-6
) -> DiscriminantResult:
    """Fit the two-class discriminant of A against B.

    Solves ``(S_W + reg * (tr(S_W)/d) * I) w = mu_B - mu_A`` on the
    pooled-standardized columns, where S_W is the summed within-class
    scatter and d the attribute count. Attribute i scores
    ``|w_i| / max_j |w_j|`` (all zeros when the means coincide).

    Raises
    ------
    AttributeSpaceMismatch
        If A and B have different attribute names.
    ValueError
        If either class is empty or the regularization is not positive.
    """
    if a.attribute_names != b.attribute_names:
        raise AttributeSpaceMismatch(
            "datasets must share an identical attribute space"
        )
    if a.n_rows < 1 or b.n_rows < 1:
        raise ValueError("both classes need at least one row")
    if not regularization > 0:
        raise ValueError("regularization must be > 0")

    d = a.n_attributes
    # canonical row order makes the result bit-identical under input row
    # permutations (float reductions are order-sensitive)
    raw_a = a.values[np.lexsort(a.values.T[::-1])] if d else a.values
    raw_b = b.values[np.lexsort(b.values.T[::-1])] if d else b.values
    mean_raw_a = raw_a.mean(axis=0) if d else np.zeros(0)
    mean_raw_b = raw_b.mean(axis=0) if d else np.zeros(0)

    stacked = np.vstack([raw_a, raw_b]) if d else np.zeros((a.n_rows + b.n_rows, 0))
    mean, scale = _pooled_standardize(stacked)
    za = (raw_a - mean) / scale
    zb = (raw_b - mean) / scale

    mu_a = za.mean(axis=0)
    mu_b = zb.mean(axis=0)
    delta = mu_b - mu_a

    dev_a = za - mu_a
    dev_b = zb - mu_b
    scatter = dev_a.T @ dev_a + dev_b.T @ dev_b

    trace = float(np.trace(scatter)) if d else 0.0
    if d == 0:
        direction = np.zeros(0)
    elif trace > 0:
        ridge = regularization * (trace / d)
        direction = np.linalg.solve(scatter + ridge * np.eye(d), delta)
    else:
        # both classes are point masses: any direction along the mean gap
        # separates them perfectly
        direction = delta.copy()

    magnitudes = np.abs(direction)
    peak = magnitudes.max() if d else 0.0
    scores = magnitudes / peak if peak > 0 else np.zeros(d)

    gap = float(abs(direction @ delta)) if d else 0.0
    denom = max(a.n_rows + b.n_rows - 2, 1)
    pooled_std = float(np.sqrt(max(direction @ scatter @ direction, 0.0) / denom)) if d else 0.0
    separation = gap / max(pooled_std, _STD_FLOOR) if gap > 0 else 0.0

    ranked = sorted(
        (
            AttributeScore(
                attribute=name,
                qualifier=(split_count_attribute(name) or ("", ""))[1],
                score=float(scores[i]),
            )
            for i, name in enumerate(a.attribute_names)
        ),
        key=lambda s: (-s.score, s.attribute),
    )

    direction = direction.copy()
    direction.flags.writeable = False
    return DiscriminantResult(
        direction=direction,
        attribute_scores=tuple(ranked),
        class_means=(mean_raw_a, mean_raw_b),
        separation=separation,
        attribute_names=a.attribute_names,
    )


def rank_report(result: DiscriminantResult, limit: int) -> list[tuple[str, float]]:
    """First ``min(limit, d)`` ranked attributes as (name, score) pairs."""
    if limit <= 0:
        return []
    return [(s.attribute, s.score) for s in result.attribute_scores[:limit]]


def fisher_ratio(
    a: np.ndarray, b: np.ndarray, direction: np.ndarray
) -> float:
    """Fisher criterion of a direction on raw class matrices:
    squared projected mean gap over summed within-class projected scatter."""
    projected_a = a @ direction
    projected_b = b @ direction
    gap = projected_b.mean() - projected_a.mean()
    scatter = ((projected_a - projected_a.mean()) ** 2).sum() + (
        (projected_b - projected_b.mean()) ** 2
    ).sum()
    if scatter <= 0:
        return float("inf") if abs(gap) > 0 else 0.0
    return float(gap * gap / scatter)
