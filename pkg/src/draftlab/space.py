"""Champion similarity space: standardization, PCA, cosine distances, clustering, 2-D projection."""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import CatalogError, DataError, UnknownChampionError

SPACE_FORMAT_VERSION = 1

_KMEANS_RESTARTS = 10
_KMEANS_MAX_ITER = 300


@dataclass
class ChampionCatalog:
    """Raw per-champion feature vectors."""

    champion_ids: list[str]
    features: np.ndarray  # shape (N, D)
    feature_names: list[str]

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=float)
        n = len(self.champion_ids)
        if self.features.ndim != 2 or self.features.shape[0] != n:
            raise CatalogError("feature matrix shape does not match champion count")
        if self.features.shape[1] != len(self.feature_names):
            raise CatalogError("feature matrix width does not match feature names")
        if self.features.shape[1] < 2:
            raise CatalogError("catalog needs at least 2 features")
        if len(set(self.champion_ids)) != n:
            raise CatalogError("duplicate champion ids")

    @property
    def n_champions(self) -> int:
        return len(self.champion_ids)

    @property
    def dim(self) -> int:
        return self.features.shape[1]

    @classmethod
    def from_csv(cls, path) -> "ChampionCatalog":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader, None)
            if not header or len(header) < 3:
                raise CatalogError(f"{path}: missing or too-short header row")
            ids, rows = [], []
            for line in reader:
                if not line:
                    continue
                ids.append(line[0])
                try:
                    rows.append([float(v) for v in line[1:]])
                except ValueError as exc:
                    raise CatalogError(f"{path}: non-numeric feature for {line[0]}") from exc
        if not ids:
            raise CatalogError(f"{path}: no champions")
        return cls(ids, np.array(rows, dtype=float), header[1:])

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["champion_id"] + self.feature_names)
            for cid, row in zip(self.champion_ids, self.features):
                writer.writerow([cid] + [repr(float(v)) for v in row])


@dataclass
class DistanceRatings:
    """Mean similarity-survey ratings keyed by unordered champion pair."""

    entries: dict[frozenset, float]
    scale_min: float = 1.0
    scale_max: float = 7.0

    def __post_init__(self):
        for pair, rating in self.entries.items():
            if len(pair) != 2:
                raise CatalogError(f"rating pair {set(pair)} is not a 2-set")
            if not (self.scale_min <= rating <= self.scale_max):
                raise CatalogError(f"rating {rating} outside [{self.scale_min}, {self.scale_max}]")


@dataclass
class SimilaritySpace:
    """Immutable product of build_space; safe for concurrent reads."""

    champion_ids: list[str]
    mean: np.ndarray  # (D,)
    std: np.ndarray  # (D,), dropped columns carry std 1 and zero loadings
    loadings: np.ndarray  # (D, P), orthonormal columns
    coords: np.ndarray  # (N, P)
    dist: np.ndarray  # (N, N), cosine distances
    cluster: np.ndarray  # (N,), labels in 1..K
    mds_xy: np.ndarray  # (N, 2)
    explained_variance_ratio: np.ndarray  # (P,)
    components: int
    clusters: int
    seed: int
    dropped_features: list[str] = field(default_factory=list)
    _index: dict = field(default=None, repr=False)

    def __post_init__(self):
        if self._index is None:
            self._index = {c: i for i, c in enumerate(self.champion_ids)}

    def index(self, champion_id: str) -> int:
        try:
            return self._index[champion_id]
        except KeyError:
            raise UnknownChampionError(f"unknown champion {champion_id!r}") from None

    def similarity(self, a: str, b: str) -> float:
        """Cosine similarity of the two champions' PC coordinates."""
        return _cosine(self.coords[self.index(a)], self.coords[self.index(b)])

    def distance(self, a: str, b: str) -> float:
        return 1.0 - self.similarity(a, b)

    def save(self, path) -> None:
        payload = {
            "format_version": SPACE_FORMAT_VERSION,
            "champion_ids": self.champion_ids,
            "mean": self.mean.tolist(),
            "std": self.std.tolist(),
            "loadings": self.loadings.tolist(),
            "coords": self.coords.tolist(),
            "dist": self.dist.tolist(),
            "cluster": self.cluster.tolist(),
            "mds_xy": self.mds_xy.tolist(),
            "explained_variance_ratio": self.explained_variance_ratio.tolist(),
            "components": self.components,
            "clusters": self.clusters,
            "seed": self.seed,
            "dropped_features": self.dropped_features,
        }
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path) -> "SimilaritySpace":
        payload = json.loads(Path(path).read_text())
        version = payload.get("format_version")
        if version != SPACE_FORMAT_VERSION:
            raise DataError(f"{path}: space format version {version}, expected {SPACE_FORMAT_VERSION}")
        return cls(
            champion_ids=payload["champion_ids"],
            mean=np.array(payload["mean"]),
            std=np.array(payload["std"]),
            loadings=np.array(payload["loadings"]),
            coords=np.array(payload["coords"]),
            dist=np.array(payload["dist"]),
            cluster=np.array(payload["cluster"], dtype=int),
            mds_xy=np.array(payload["mds_xy"]),
            explained_variance_ratio=np.array(payload["explained_variance_ratio"]),
            components=payload["components"],
            clusters=payload["clusters"],
            seed=payload["seed"],
            dropped_features=payload["dropped_features"],
        )


def _cosine(u: np.ndarray, v: np.ndarray) -> float:
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu == 0.0 or nv == 0.0:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def build_space(
    catalog: ChampionCatalog,
    components: int = 10,
    clusters: int = 5,
    seed: int = 0,
) -> SimilaritySpace:
    """Standardize, project with PCA, compute cosine distances, cluster, and embed in 2-D.

    Deterministic given (catalog, components, clusters, seed).
    """
    n, d = catalog.n_champions, catalog.dim
    if components < 1 or clusters < 1:
        raise CatalogError("components and clusters must be positive")
    if n < clusters:
        raise CatalogError(f"{n} champions < {clusters} clusters")

    x = catalog.features
    mean = x.mean(axis=0)
    std = x.std(axis=0, ddof=0)
    kept = std > 0.0
    if not kept.any():
        raise CatalogError("all feature columns are constant")
    dropped = [name for name, k in zip(catalog.feature_names, kept) if not k]
    if dropped:
        warnings.warn(f"dropping {len(dropped)} zero-variance feature column(s): {dropped[:5]}")
    if components > min(int(kept.sum()), n - 1):
        raise CatalogError(
            f"components={components} exceeds min(usable dims={int(kept.sum())}, n-1={n - 1})"
        )

    std_full = np.where(kept, std, 1.0)
    z = (x - mean) / std_full
    z[:, ~kept] = 0.0

    # PCA via SVD on standardized data; deterministic sign convention per component.
    u, s, vt = np.linalg.svd(z[:, kept], full_matrices=False)
    var = s**2 / (n - 1)
    ratios = var[:components] / var.sum() if var.sum() > 0 else np.zeros(components)
    pcs = vt[:components]
    signs = np.sign(pcs[np.arange(components), np.argmax(np.abs(pcs), axis=1)])
    signs[signs == 0] = 1.0
    pcs = pcs * signs[:, None]

    loadings = np.zeros((d, components))
    loadings[kept, :] = pcs.T
    coords = z @ loadings

    dist = _cosine_distance_matrix(coords)
    labels = _kmeans(coords, clusters, seed)
    mds_xy = _classical_mds(dist)

    return SimilaritySpace(
        champion_ids=list(catalog.champion_ids),
        mean=mean,
        std=std_full,
        loadings=loadings,
        coords=coords,
        dist=dist,
        cluster=labels,
        mds_xy=mds_xy,
        explained_variance_ratio=ratios,
        components=components,
        clusters=clusters,
        seed=seed,
        dropped_features=dropped,
    )


def _cosine_distance_matrix(coords: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(coords, axis=1)
    zero = norms == 0.0
    if zero.any():
        warnings.warn(f"{int(zero.sum())} champion(s) have zero-norm coordinates; similarity forced to 0")
    safe = np.where(zero, 1.0, norms)
    unit = coords / safe[:, None]
    sim = np.clip(unit @ unit.T, -1.0, 1.0)
    sim[zero, :] = 0.0
    sim[:, zero] = 0.0
    sim = (sim + sim.T) / 2.0
    dist = 1.0 - sim
    np.fill_diagonal(dist, 0.0)
    return np.clip(dist, 0.0, 2.0)


def _kmeans(points: np.ndarray, k: int, seed: int) -> np.ndarray:
    """Seeded k-means with distance-weighted initialization and fixed restarts.

    Assignment ties break toward the lowest cluster index; returns 1-based labels
    guaranteed to cover all k clusters.
    """
    rng = np.random.default_rng(seed)
    best_labels, best_inertia = None, np.inf
    for _ in range(_KMEANS_RESTARTS):
        centers = _kmeanspp_init(points, k, rng)
        labels = None
        for _ in range(_KMEANS_MAX_ITER):
            d2 = ((points[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = np.argmin(d2, axis=1)  # argmin takes the lowest index on ties
            for c in range(k):
                members = new_labels == c
                if members.any():
                    centers[c] = points[members].mean(axis=0)
                else:
                    # Re-seed an empty cluster at the point farthest from its center.
                    worst = int(np.argmax(d2[np.arange(len(points)), new_labels]))
                    centers[c] = points[worst]
                    new_labels[worst] = c
            if labels is not None and np.array_equal(labels, new_labels):
                break
            labels = new_labels
        inertia = float(((points - centers[labels]) ** 2).sum())
        if inertia < best_inertia - 1e-12:
            best_inertia, best_labels = inertia, labels
    return _canonical_labels(best_labels, k)


def _kmeanspp_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = len(points)
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(n)]
    d2 = ((points - centers[0]) ** 2).sum(axis=1)
    for c in range(1, k):
        total = d2.sum()
        if total <= 0:
            centers[c] = points[rng.integers(n)]
        else:
            centers[c] = points[rng.choice(n, p=d2 / total)]
        d2 = np.minimum(d2, ((points - centers[c]) ** 2).sum(axis=1))
    return centers


def _canonical_labels(labels: np.ndarray, k: int) -> np.ndarray:
    """Relabel clusters 1..k in order of first appearance so output is input-order stable."""
    mapping, out = {}, np.empty_like(labels)
    for i, lab in enumerate(labels):
        if lab not in mapping:
            mapping[lab] = len(mapping) + 1
        out[i] = mapping[lab]
    if len(mapping) != k:
        raise CatalogError(f"k-means produced {len(mapping)} non-empty clusters, expected {k}")
    return out


def _classical_mds(dist: np.ndarray) -> np.ndarray:
    """Torgerson double-centering of the squared distance matrix, top-2 eigenpairs."""
    n = dist.shape[0]
    d2 = dist**2
    j = np.eye(n) - np.ones((n, n)) / n
    b = -0.5 * j @ d2 @ j
    b = (b + b.T) / 2.0
    eigvals, eigvecs = np.linalg.eigh(b)
    order = np.argsort(eigvals)[::-1][:2]
    vals = np.clip(eigvals[order], 0.0, None)
    xy = eigvecs[:, order] * np.sqrt(vals)[None, :]
    # Sign convention: flip each axis so the largest-magnitude coordinate is positive.
    for axis in range(xy.shape[1]):
        col = xy[:, axis]
        if len(col) and col[np.argmax(np.abs(col))] < 0:
            xy[:, axis] = -col
    return xy


def correlate_distances(space: SimilaritySpace, ratings: DistanceRatings) -> tuple[float, int]:
    """Pearson correlation between feature distances and mean ratings.

    Returns (correlation, skipped_pair_count); pairs with champions missing from
    the space are skipped.
    """
    dists, vals, skipped = [], [], 0
    for pair, rating in ratings.entries.items():
        a, b = sorted(pair)
        if a not in space._index or b not in space._index:
            skipped += 1
            continue
        dists.append(space.dist[space.index(a), space.index(b)])
        vals.append(rating)
    if len(dists) < 3:
        raise DataError(f"only {len(dists)} usable rated pairs, need at least 3")
    dists, vals = np.array(dists), np.array(vals)
    if np.std(dists) == 0.0 or np.std(vals) == 0.0:
        raise DataError("zero variance in distances or ratings")
    corr = float(np.corrcoef(dists, vals)[0, 1])
    return corr, skipped
