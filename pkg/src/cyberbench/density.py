"""K-nearest-neighbor density estimation and percentile-style anomaly
scores.

A model is fit to a baseline set; each query point is then scored by how
much of the baseline is no denser than it (its p-value), and the anomaly
score is ``1 - p`` so high scores are anomalous. Densities live in log
space (``-d * log r_k`` up to a shared additive constant) because count
vectors in high dimension overflow otherwise; each baseline point carries
an equal probability mass ``1/n`` so the p-value behaves like a
percentile and is comparable across datasets.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import logsumexp

from .model import FeatureMatrix

DISTANCE_FLOOR = 1e-12
_STD_FLOOR = 1e-12


class InsufficientDataError(ValueError):
    """Baseline too small to estimate a density."""


class AttributeSpaceMismatch(ValueError):
    """Test set attribute space differs from the baseline's."""


@dataclass(frozen=True, eq=False)
class DensityModel:
    """KNN density estimate over a standardized baseline.

    Attributes
    ----------
    points : ndarray, shape (n, d)
        Standardized baseline vectors.
    k : int
        Neighbor count actually used (clamped to n - 1).
    log_density : ndarray, shape (n,)
        ``-d * log(max(r_k, epsilon))`` at each baseline point, with r_k
        the distance to the point's k-th nearest neighbor (self excluded).
    log_mass : ndarray, shape (n,)
        Log probability mass carried by each baseline point; masses sum
        to one.
    """

    attribute_names: tuple[str, ...]
    entity_ids: tuple[str, ...]
    points: np.ndarray
    mean: np.ndarray
    scale: np.ndarray
    k: int
    log_density: np.ndarray
    log_mass: np.ndarray
    epsilon: float = DISTANCE_FLOOR


def _standardize_stats(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mean = values.mean(axis=0)
    std = values.std(axis=0)
    scale = np.where(std > _STD_FLOOR, std, 1.0)
    return mean, scale


def fit_density(baseline: FeatureMatrix, k: int) -> DensityModel:
    """Fit the KNN density model to a baseline set.

    ``k`` is clamped to ``n - 1``; fewer than two baseline points is an
    error. Exact duplicates are kept finite by the epsilon distance floor.
    """
    n, d = baseline.n_rows, baseline.n_attributes
    if n < 2:
        raise InsufficientDataError("density baseline needs at least 2 points")
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, n - 1)

    mean, scale = _standardize_stats(baseline.values)
    points = (baseline.values - mean) / scale
    distances = cdist(points, points)
    np.fill_diagonal(distances, np.inf)
    r_k = np.partition(distances, k - 1, axis=1)[:, k - 1]
    log_density = -d * np.log(np.maximum(r_k, DISTANCE_FLOOR))
    log_mass = np.full(n, -np.log(n))

    points = points.copy()
    points.flags.writeable = False
    return DensityModel(
        attribute_names=baseline.attribute_names,
        entity_ids=baseline.entity_ids,
        points=points,
        mean=mean,
        scale=scale,
        k=k,
        log_density=log_density,
        log_mass=log_mass,
    )


def log_density_at(model: DensityModel, x0: np.ndarray) -> float:
    """Evaluate the baseline's KNN log-density at an arbitrary vector."""
    x0 = np.asarray(x0, dtype=np.float64)
    if x0.shape != (len(model.attribute_names),):
        raise ValueError(
            f"query vector length {x0.shape} does not match "
            f"{len(model.attribute_names)} attributes"
        )
    if not np.all(np.isfinite(x0)):
        raise ValueError("query vector must be finite")
    z = (x0 - model.mean) / model.scale
    dists = np.linalg.norm(model.points - z, axis=1)
    r_k = np.partition(dists, model.k - 1)[model.k - 1]
    d = len(model.attribute_names)
    return float(-d * np.log(max(r_k, model.epsilon)))


def _mass_below(model: DensityModel, log_f0: float) -> float:
    mask = model.log_density <= log_f0
    if not mask.any():
        return 0.0
    if mask.all():
        return 1.0
    return float(min(np.exp(logsumexp(model.log_mass[mask])), 1.0))


def p_value(model: DensityModel, x0: np.ndarray) -> float:
    """Fraction of baseline probability mass at points no denser than x0.

    Ties are included (a point as dense as the densest baseline point has
    p-value 1, like a percentile); a point far from all baseline mass has
    p-value 0.
    """
    return _mass_below(model, log_density_at(model, x0))


@dataclass(frozen=True)
class AnomalyScore:
    """Anomaly score of one entity: ``score = 1 - p_value``, both in [0, 1].

    ``density_rank`` is the 1-based insertion rank of the entity's density
    among baseline densities, 1 = densest.
    """

    entity_id: str
    score: float
    p_value: float
    density_rank: int

    def __post_init__(self) -> None:
        if not 0.0 <= self.score <= 1.0:
            raise ValueError(f"score must be in [0,1], got {self.score}")
        if self.score + self.p_value != 1.0:
            raise ValueError("score and p_value must sum to exactly 1")

    def to_dict(self) -> dict:
        return {
            "entity_id": self.entity_id,
            "score": self.score,
            "p_value": self.p_value,
            "density_rank": self.density_rank,
        }


def _score_from_log_density(model: DensityModel, entity_id: str, log_f0: float) -> AnomalyScore:
    p = _mass_below(model, log_f0)
    return AnomalyScore(
        entity_id=entity_id,
        score=1.0 - p,
        p_value=p,
        density_rank=1 + int((model.log_density > log_f0).sum()),
    )


def score_test_set(model: DensityModel, test: FeatureMatrix) -> list[AnomalyScore]:
    """Score every test row against the baseline, most anomalous first;
    ties break on entity_id."""
    if test.attribute_names != model.attribute_names:
        raise AttributeSpaceMismatch(
            "test set attribute space does not match the baseline's"
        )
    scores = [
        _score_from_log_density(model, entity_id, log_density_at(model, test.values[i]))
        for i, entity_id in enumerate(test.entity_ids)
    ]
    scores.sort(key=lambda s: (-s.score, s.entity_id))
    return scores


def score_baseline_members(
    model: DensityModel, member_indices: list[int]
) -> list[AnomalyScore]:
    """Score points that belong to the baseline itself, at their fitted
    (self-excluded) densities. Most anomalous first, ties on entity_id."""
    scores = [
        _score_from_log_density(
            model, model.entity_ids[i], float(model.log_density[i])
        )
        for i in member_indices
    ]
    scores.sort(key=lambda s: (-s.score, s.entity_id))
    return scores
