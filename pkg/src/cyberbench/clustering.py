"""Hierarchical density-based clustering with stability-based extraction.

Pipeline: core distances (k-th nearest neighbor) -> mutual reachability
graph -> exhaustive Prim MST -> single-linkage hierarchy -> condensed
tree (splits that shed fewer than ``min_cluster_size`` points are points
"falling out", not new clusters) -> excess-of-mass cluster selection.
Density levels are expressed as ``lambda = 1 / distance``.

Edges tied at one weight are merged simultaneously (an n-ary hierarchy
node), which makes the hierarchy a function of the threshold components
alone rather than of which valid MST the edge phase happened to find;
edge processing order still breaks residual ties by (min index, max
index) so repeated runs are bit-identical.

The MST phase is O(n^2) time and memory over the dense mutual
reachability matrix, acceptable at this tool's job sizes and the first
target for optimization beyond them.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Sequence

import numpy as np
from scipy.spatial.distance import cdist

from .density import AnomalyScore, fit_density, score_baseline_members
from .discriminant import fit_discriminant
from .model import FeatureMatrix

DISTANCE_FLOOR = 1e-12
_STD_FLOOR = 1e-12
ANNOTATION_LIMIT = 5
ANNOTATION_MIN_SCORE = 0.1


class EmptyInputError(ValueError):
    """Clustering requires at least one row."""


# ---------------------------------------------------------------------------
# tree types

@dataclass(frozen=True)
class CondensedNode:
    """One cluster of the condensed hierarchy.

    ``child_point_count`` is the number of points the cluster holds at
    birth; ``lambda_death`` is the level at which it splits into child
    clusters or fully dissolves into noise.
    """

    node_id: int
    parent_id: int | None
    lambda_birth: float
    lambda_death: float
    child_point_count: int


@dataclass(frozen=True, eq=False)
class ClusterTree:
    """Condensed hierarchy plus the artifacts it was built from."""

    entity_ids: tuple[str, ...]
    condensed_nodes: tuple[CondensedNode, ...]
    point_assignments: tuple[tuple[int, float], ...]
    mst_edges: tuple[tuple[int, int, float], ...]
    core_distances: np.ndarray
    min_cluster_size: int
    k: int
    attribute_names: tuple[str, ...]
    dropped_attributes: tuple[str, ...]

    def children_map(self) -> dict[int, list[int]]:
        kids: dict[int, list[int]] = {node.node_id: [] for node in self.condensed_nodes}
        for node in self.condensed_nodes:
            if node.parent_id is not None:
                kids[node.parent_id].append(node.node_id)
        return kids

    def direct_points(self) -> dict[int, list[int]]:
        """Point indices that fall out of each condensed node directly."""
        out: dict[int, list[int]] = {node.node_id: [] for node in self.condensed_nodes}
        for point, (node_id, _) in enumerate(self.point_assignments):
            out[node_id].append(point)
        return out

    def subtree_members(self) -> dict[int, list[int]]:
        """All point indices under each condensed node (sorted)."""
        kids = self.children_map()
        direct = self.direct_points()
        members: dict[int, list[int]] = {}

        def collect(node_id: int) -> list[int]:
            acc = list(direct[node_id])
            for child in kids[node_id]:
                acc.extend(collect(child))
            acc.sort()
            members[node_id] = acc
            return acc

        roots = [n.node_id for n in self.condensed_nodes if n.parent_id is None]
        for root in roots:
            collect(root)
        return members

    @property
    def root_id(self) -> int:
        for node in self.condensed_nodes:
            if node.parent_id is None:
                return node.node_id
        raise ValueError("condensed tree has no root")


@dataclass(frozen=True)
class SelectedCluster:
    cluster_id: int
    member_ids: tuple[str, ...]
    stability: float
    parent_cluster_id: int | None
    is_leaf: bool

    @property
    def size(self) -> int:
        return len(self.member_ids)


@dataclass(frozen=True, eq=False)
class Clustering:
    """Flat selected clusters, outliers and annotations over one tree."""

    clusters: tuple[SelectedCluster, ...]
    outlier_ids: tuple[str, ...]
    node_stability: Mapping[int, float]
    tree: ClusterTree
    outliers: tuple[AnomalyScore, ...] = ()
    annotations: Mapping[int, tuple[tuple[str, float], ...]] = field(default_factory=dict)


# ---------------------------------------------------------------------------
# construction

def _standardize_columns(X: FeatureMatrix) -> tuple[np.ndarray, tuple[str, ...], tuple[str, ...]]:
    values = X.values
    std = values.std(axis=0) if X.n_rows else np.zeros(X.n_attributes)
    keep = std > _STD_FLOOR
    dropped = tuple(
        name for name, kept in zip(X.attribute_names, keep) if not kept
    )
    if dropped:
        warnings.warn(
            f"dropping zero-variance attributes before clustering: {', '.join(dropped)}",
            stacklevel=3,
        )
    kept_names = tuple(
        name for name, kept in zip(X.attribute_names, keep) if kept
    )
    if not kept_names:
        return np.zeros((X.n_rows, 0)), kept_names, dropped
    sub = values[:, keep]
    z = (sub - sub.mean(axis=0)) / sub.std(axis=0)
    return z, kept_names, dropped


def _mutual_reachability(z: np.ndarray, k: int) -> tuple[np.ndarray, np.ndarray]:
    n = z.shape[0]
    if z.shape[1] == 0:
        distances = np.zeros((n, n))
    else:
        distances = cdist(z, z)
    if n == 1:
        return np.zeros(1), np.zeros((1, 1))
    masked = distances.copy()
    np.fill_diagonal(masked, np.inf)
    core = np.partition(masked, k - 1, axis=1)[:, k - 1]
    reach = np.maximum(np.maximum.outer(core, core), distances)
    np.fill_diagonal(reach, 0.0)
    return core, reach


def _prim_mst(weights: np.ndarray) -> list[tuple[int, int, float]]:
    """Exhaustive Prim over a dense symmetric weight matrix; edge list is
    returned normalized to (min index, max index, weight)."""
    n = weights.shape[0]
    if n < 2:
        return []
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    source = np.full(n, -1)
    best[0] = 0.0
    edges: list[tuple[int, int, float]] = []
    for _ in range(n):
        candidate = np.where(in_tree, np.inf, best)
        u = int(np.argmin(candidate))  # ties resolve to the smallest index
        in_tree[u] = True
        if source[u] >= 0:
            a, b = sorted((int(source[u]), u))
            edges.append((a, b, float(weights[source[u], u])))
        closer = ~in_tree & (weights[u] < best)
        best[closer] = weights[u][closer]
        source[closer] = u
    return edges


class _UnionFind:
    def __init__(self, n: int) -> None:
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a: int, b: int) -> int:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return ra
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        if self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        return ra


def _build_merge_tree(
    n_points: int, sorted_edges: Sequence[tuple[int, int, float]]
) -> tuple[list[list[int]], list[float], list[int], int]:
    """Single-linkage hierarchy with simultaneous equal-weight merges.

    Returns (children, weight, size) indexed by node id (points are ids
    0..n-1 with no children) plus the root id.
    """
    children: list[list[int]] = [[] for _ in range(n_points)]
    weight: list[float] = [0.0] * n_points
    size: list[int] = [1] * n_points
    uf = _UnionFind(n_points)
    node_of = {i: i for i in range(n_points)}

    pos = 0
    while pos < len(sorted_edges):
        level = sorted_edges[pos][2]
        end = pos
        while end < len(sorted_edges) and sorted_edges[end][2] == level:
            end += 1
        family: dict[int, set[int]] = {}
        for i, j, _ in sorted_edges[pos:end]:
            ri, rj = uf.find(i), uf.find(j)
            if ri == rj:
                continue
            members_i = family.pop(ri, None) or {node_of[ri]}
            members_j = family.pop(rj, None) or {node_of[rj]}
            family[uf.union(ri, rj)] = members_i | members_j
        for root, members in sorted(family.items(), key=lambda kv: min(kv[1])):
            node_id = len(children)
            children.append(sorted(members))
            weight.append(level)
            size.append(sum(size[m] for m in members))
            node_of[root] = node_id
        pos = end

    root_id = node_of[uf.find(0)]
    return children, weight, size, root_id


def _iter_points(node: int, children: list[list[int]], n_points: int) -> Iterable[int]:
    stack = [node]
    while stack:
        current = stack.pop()
        if current < n_points:
            yield current
        else:
            stack.extend(children[current])


def _condense(
    children: list[list[int]],
    weight: list[float],
    size: list[int],
    root_id: int,
    n_points: int,
    min_cluster_size: int,
) -> tuple[list[CondensedNode], list[tuple[int, float]]]:
    births: list[float] = [0.0]
    deaths: list[float] = [0.0]
    parents: list[int | None] = [None]
    counts: list[int] = [size[root_id]]
    assignments: list[tuple[int, float] | None] = [None] * n_points

    stack: list[tuple[int, int]] = [(root_id, 0)]
    while stack:
        node, cid = stack.pop()
        while True:
            if node < n_points:
                # singleton component: nothing below it, the point leaves
                # at its cluster's birth level (n == 1 root only)
                assignments[node] = (cid, births[cid])
                deaths[cid] = births[cid]
                break
            lam = 1.0 / max(weight[node], DISTANCE_FLOOR)
            big = [c for c in children[node] if size[c] >= min_cluster_size]
            for child in children[node]:
                if size[child] < min_cluster_size:
                    for point in _iter_points(child, children, n_points):
                        assignments[point] = (cid, lam)
            if len(big) == 1:
                node = big[0]
                continue
            deaths[cid] = lam
            if not big:
                break
            for child in big:
                child_cid = len(births)
                births.append(lam)
                deaths.append(lam)
                parents.append(cid)
                counts.append(size[child])
                stack.append((child, child_cid))
            break

    nodes = [
        CondensedNode(
            node_id=i,
            parent_id=parents[i],
            lambda_birth=births[i],
            lambda_death=deaths[i],
            child_point_count=counts[i],
        )
        for i in range(len(births))
    ]
    assert all(entry is not None for entry in assignments)
    return nodes, [entry for entry in assignments if entry is not None]


def build_tree(
    X: FeatureMatrix, min_cluster_size: int, k: int | None = None
) -> ClusterTree:
    """Build the condensed cluster hierarchy of a feature matrix.

    ``k`` (core-distance neighbor count) defaults to ``min_cluster_size``
    and is clamped to n - 1. Columns are z-scored first; zero-variance
    columns are dropped with a warning.
    """
    n = X.n_rows
    if n == 0:
        raise EmptyInputError("clustering input must contain at least one row")
    if min_cluster_size < 2:
        raise ValueError("min_cluster_size must be >= 2")
    if k is None:
        k = min_cluster_size
    if k < 1:
        raise ValueError("k must be >= 1")
    k = min(k, max(n - 1, 1))

    z, kept, dropped = _standardize_columns(X)
    core, reach = _mutual_reachability(z, k)
    edges = _prim_mst(reach)
    edges.sort(key=lambda e: (e[2], e[0], e[1]))

    if n == 1:
        nodes = [CondensedNode(0, None, 0.0, 0.0, 1)]
        assignments: list[tuple[int, float]] = [(0, 0.0)]
    else:
        children, weight, size, root_id = _build_merge_tree(n, edges)
        nodes, assignments = _condense(
            children, weight, size, root_id, n, min_cluster_size
        )

    core = np.asarray(core, dtype=np.float64).copy()
    core.flags.writeable = False
    return ClusterTree(
        entity_ids=X.entity_ids,
        condensed_nodes=tuple(nodes),
        point_assignments=tuple(assignments),
        mst_edges=tuple(edges),
        core_distances=core,
        min_cluster_size=min_cluster_size,
        k=k,
        attribute_names=kept,
        dropped_attributes=dropped,
    )


# ---------------------------------------------------------------------------
# extraction

def compute_stability(tree: ClusterTree) -> dict[int, float]:
    """Stability of every condensed node: sum over member points of
    (lambda at departure - lambda at the node's birth), child clusters
    contributing their full size at their birth level."""
    birth = {node.node_id: node.lambda_birth for node in tree.condensed_nodes}
    stability = {node.node_id: 0.0 for node in tree.condensed_nodes}
    for node_id, lam in tree.point_assignments:
        stability[node_id] += lam - birth[node_id]
    for node in tree.condensed_nodes:
        if node.parent_id is not None:
            stability[node.parent_id] += node.child_point_count * (
                node.lambda_birth - birth[node.parent_id]
            )
    return stability


def extract_clusters(tree: ClusterTree) -> Clustering:
    """Excess-of-mass selection over the condensed tree.

    A node is selected iff it holds at least ``min_cluster_size`` points
    and its stability strictly exceeds the summed stability of its
    selected descendants; points under no selected node are outliers.
    Outlier scores and annotations are left for the dedicated passes.
    """
    stability = compute_stability(tree)
    kids = tree.children_map()
    counts = {node.node_id: node.child_point_count for node in tree.condensed_nodes}

    subtree_value: dict[int, float] = {}
    subtree_selected: dict[int, list[int]] = {}

    def visit(node_id: int) -> None:
        for child in kids[node_id]:
            visit(child)
        child_value = sum(subtree_value[c] for c in kids[node_id])
        if counts[node_id] >= tree.min_cluster_size and stability[node_id] > child_value:
            subtree_value[node_id] = stability[node_id]
            subtree_selected[node_id] = [node_id]
        else:
            subtree_value[node_id] = child_value
            subtree_selected[node_id] = [
                sel for c in kids[node_id] for sel in subtree_selected[c]
            ]

    root = tree.root_id
    visit(root)
    selected = sorted(subtree_selected[root])

    members = tree.subtree_members()
    clusters = tuple(
        SelectedCluster(
            cluster_id=node.node_id,
            member_ids=tuple(
                sorted(tree.entity_ids[i] for i in members[node.node_id])
            ),
            stability=stability[node.node_id],
            parent_cluster_id=node.parent_id,
            is_leaf=not kids[node.node_id],
        )
        for node in tree.condensed_nodes
        if node.node_id in set(selected)
    )
    clustered_points = {
        i for node_id in selected for i in members[node_id]
    }
    outlier_ids = tuple(
        sorted(
            tree.entity_ids[i]
            for i in range(len(tree.entity_ids))
            if i not in clustered_points
        )
    )
    return Clustering(
        clusters=clusters,
        outlier_ids=outlier_ids,
        node_stability=stability,
        tree=tree,
    )


def expand(clustering: Clustering, cluster_id: int) -> list[SelectedCluster]:
    """Condensed-tree children of a node (empty for leaves), as cluster
    views with members, stability and size. Pure read; raises KeyError for
    unknown ids."""
    tree = clustering.tree
    kids = tree.children_map()
    if cluster_id not in kids:
        raise KeyError(cluster_id)
    members = tree.subtree_members()
    out = []
    for child in sorted(kids[cluster_id]):
        grandchildren = kids[child]
        out.append(
            SelectedCluster(
                cluster_id=child,
                member_ids=tuple(sorted(tree.entity_ids[i] for i in members[child])),
                stability=clustering.node_stability[child],
                parent_cluster_id=cluster_id,
                is_leaf=not grandchildren,
            )
        )
    return out


# ---------------------------------------------------------------------------
# outlier scoring and annotation

def score_outliers(
    X: FeatureMatrix, outlier_ids: Sequence[str], k: int
) -> list[AnomalyScore]:
    """Anomaly scores for outlier rows, with the whole clustering input as
    its own density baseline. Most anomalous first."""
    if not outlier_ids:
        return []
    index = {entity: i for i, entity in enumerate(X.entity_ids)}
    rows = [index[entity] for entity in outlier_ids]
    if X.n_rows == 1:
        # a single point is the entire distribution: nothing is rarer
        return [
            AnomalyScore(entity_id=X.entity_ids[0], score=0.0, p_value=1.0, density_rank=1)
        ]
    model = fit_density(X, min(k, X.n_rows - 1))
    return score_baseline_members(model, rows)


def annotate_clusters(
    X: FeatureMatrix, clustering: Clustering, regularization: float = 1e-6
) -> dict[int, tuple[tuple[str, float], ...]]:
    """One-vs-all discriminant annotation of each selected cluster: top
    attributes (at most 5, score >= 0.1) separating the cluster from all
    other rows. Clusters covering every row annotate empty."""
    index = {entity: i for i, entity in enumerate(X.entity_ids)}
    annotations: dict[int, tuple[tuple[str, float], ...]] = {}
    for cluster in clustering.clusters:
        member_rows = sorted(index[e] for e in cluster.member_ids)
        rest_rows = sorted(set(range(X.n_rows)) - set(member_rows))
        if not member_rows or not rest_rows:
            annotations[cluster.cluster_id] = ()
            continue
        inside = FeatureMatrix(
            attribute_names=X.attribute_names,
            entity_ids=tuple(X.entity_ids[i] for i in member_rows),
            values=X.values[member_rows],
        )
        outside = FeatureMatrix(
            attribute_names=X.attribute_names,
            entity_ids=tuple(X.entity_ids[i] for i in rest_rows),
            values=X.values[rest_rows],
        )
        result = fit_discriminant(inside, outside, regularization)
        annotations[cluster.cluster_id] = tuple(
            (entry.attribute, entry.score)
            for entry in result.attribute_scores[:ANNOTATION_LIMIT]
            if entry.score >= ANNOTATION_MIN_SCORE
        )
    return annotations


def run_clustering(
    X: FeatureMatrix,
    min_cluster_size: int,
    k: int | None = None,
    regularization: float = 1e-6,
) -> Clustering:
    """Full clustering pass: tree, selection, outlier scores, annotations."""
    tree = build_tree(X, min_cluster_size, k)
    clustering = extract_clusters(tree)
    outliers = tuple(score_outliers(X, clustering.outlier_ids, tree.k))
    annotations = annotate_clusters(X, clustering, regularization)
    return replace(clustering, outliers=outliers, annotations=annotations)


def clustering_document(clustering: Clustering) -> dict:
    """Serialized clustering result: full condensed tree plus the flat
    selected clustering, outlier scores and annotations. Drill-down views
    work from this one document."""
    tree = clustering.tree
    return {
        "params": {"min_cluster_size": tree.min_cluster_size, "k": tree.k},
        "tree": {
            "nodes": [
                {
                    "node_id": node.node_id,
                    "parent_id": node.parent_id,
                    "lambda_birth": node.lambda_birth,
                    "lambda_death": node.lambda_death,
                    "size": node.child_point_count,
                    "stability": clustering.node_stability[node.node_id],
                }
                for node in tree.condensed_nodes
            ]
        },
        "clusters": [
            {
                "cluster_id": c.cluster_id,
                "member_ids": list(c.member_ids),
                "stability": c.stability,
                "parent_cluster_id": c.parent_cluster_id,
                "is_leaf": c.is_leaf,
                "size": c.size,
            }
            for c in clustering.clusters
        ],
        "outliers": [score.to_dict() for score in clustering.outliers],
        "annotations": {
            str(cid): [{"attribute": name, "score": score} for name, score in entries]
            for cid, entries in sorted(clustering.annotations.items())
        },
        "dropped_attributes": list(tree.dropped_attributes),
    }
