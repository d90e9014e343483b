"""L2-regularized logistic win/loss classifier with seeded stratified cross-validation."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DataError, TrainingError
from .features import FEATURE_ORDER, TeamFeatureVector

MODEL_FORMAT_VERSION = 1

_MAX_ITER = 200
_GRAD_TOL = 1e-8


@dataclass
class WinModel:
    region: str
    tier: str
    feature_order: tuple[str, ...]
    feature_means: np.ndarray
    feature_stds: np.ndarray
    weights: np.ndarray
    intercept: float
    l2_lambda: float
    cv_accuracy: float
    fold_accuracies: list[float]
    constant_features: list[str] = field(default_factory=list)

    def save(self, path) -> None:
        payload = {
            "format_version": MODEL_FORMAT_VERSION,
            "region": self.region,
            "tier": self.tier,
            "feature_order": list(self.feature_order),
            "feature_means": self.feature_means.tolist(),
            "feature_stds": self.feature_stds.tolist(),
            "weights": self.weights.tolist(),
            "intercept": self.intercept,
            "l2_lambda": self.l2_lambda,
            "cv_accuracy": self.cv_accuracy,
            "fold_accuracies": self.fold_accuracies,
            "constant_features": self.constant_features,
        }
        Path(path).write_text(json.dumps(payload))

    @classmethod
    def load(cls, path) -> "WinModel":
        payload = json.loads(Path(path).read_text())
        version = payload.get("format_version")
        if version != MODEL_FORMAT_VERSION:
            raise DataError(f"{path}: model format version {version}, expected {MODEL_FORMAT_VERSION}")
        return cls(
            region=payload["region"],
            tier=payload["tier"],
            feature_order=tuple(payload["feature_order"]),
            feature_means=np.array(payload["feature_means"]),
            feature_stds=np.array(payload["feature_stds"]),
            weights=np.array(payload["weights"]),
            intercept=payload["intercept"],
            l2_lambda=payload["l2_lambda"],
            cv_accuracy=payload["cv_accuracy"],
            fold_accuracies=payload["fold_accuracies"],
            constant_features=payload["constant_features"],
        )


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z, dtype=float)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def logistic_loss(x: np.ndarray, y: np.ndarray, weights: np.ndarray, intercept: float, l2: float) -> float:
    """Mean cross-entropy plus (l2/2)*||w||^2; the intercept is unpenalized."""
    z = x @ weights + intercept
    # log(1 + exp(z)) - y*z, computed stably
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z))
    return loss + 0.5 * l2 * float(weights @ weights)


def logistic_gradient(
    x: np.ndarray, y: np.ndarray, weights: np.ndarray, intercept: float, l2: float
) -> tuple[np.ndarray, float]:
    """Gradient of logistic_loss with respect to (weights, intercept)."""
    residual = _sigmoid(x @ weights + intercept) - y
    grad_w = x.T @ residual / len(y) + l2 * weights
    grad_b = float(residual.mean())
    return grad_w, grad_b


def _fit_newton(
    x: np.ndarray, y: np.ndarray, l2: float, start: np.ndarray | None = None
) -> tuple[np.ndarray, float]:
    n, p = x.shape
    if start is None:
        w, b = np.zeros(p), 0.0
    else:
        w, b = start[:p].copy(), float(start[p])
    loss = logistic_loss(x, y, w, b, l2)
    for _ in range(_MAX_ITER):
        grad_w, grad_b = logistic_gradient(x, y, w, b, l2)
        grad = np.concatenate([grad_w, [grad_b]])
        gnorm = float(np.linalg.norm(grad))
        if gnorm <= _GRAD_TOL:
            return w, b
        prob = _sigmoid(x @ w + b)
        s = prob * (1.0 - prob)
        xa = np.hstack([x, np.ones((n, 1))])
        hess = (xa * s[:, None]).T @ xa / n
        hess[:p, :p] += l2 * np.eye(p)
        hess += 1e-12 * np.eye(p + 1)
        step = np.linalg.solve(hess, grad)
        # Backtracking line search keeps the loss nonincreasing.
        t = 1.0
        for _ in range(50):
            w_new = w - t * step[:p]
            b_new = b - t * step[p]
            new_loss = logistic_loss(x, y, w_new, b_new, l2)
            if new_loss <= loss - 1e-4 * t * float(grad @ step):
                break
            t *= 0.5
        w, b, loss = w_new, b_new, new_loss
    grad_w, grad_b = logistic_gradient(x, y, w, b, l2)
    gnorm = float(np.linalg.norm(np.concatenate([grad_w, [grad_b]])))
    if gnorm > 1e-6:
        raise TrainingError(f"Newton did not converge in {_MAX_ITER} iterations; gradient norm {gnorm:.3e}")
    return w, b


def _standardize(x: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    means = x.mean(axis=0)
    stds = x.std(axis=0, ddof=0)
    constant = stds == 0.0
    stds = np.where(constant, 1.0, stds)
    return (x - means) / stds, means, stds


def stratified_folds(y: np.ndarray, folds: int, seed: int) -> np.ndarray:
    """Seeded per-class round-robin fold assignment."""
    rng = np.random.default_rng(seed)
    fold_ids = np.empty(len(y), dtype=int)
    for cls in (0, 1):
        idx = np.flatnonzero(y == cls)
        rng.shuffle(idx)
        fold_ids[idx] = np.arange(len(idx)) % folds
    return fold_ids


def _rows_to_arrays(rows, feature_subset) -> tuple[np.ndarray, np.ndarray]:
    cols = list(feature_subset)
    x = np.array([[float(getattr(vec, c)) for c in cols] for vec, _ in rows])
    y = np.array([1.0 if outcome in ("Win", 1, True) else 0.0 for _, outcome in rows])
    return x, y


def train(
    rows,
    region: str = "SYN",
    tier: str = "Bronze",
    folds: int = 5,
    l2_lambda: float = 1e-4,
    seed: int = 0,
    feature_subset=FEATURE_ORDER,
    fold_ids: np.ndarray | None = None,
) -> WinModel:
    """Cross-validate and fit the logistic win classifier.

    Per-fold standardization uses training-fold statistics only; the reported
    model is refit on all rows. ``fold_ids`` overrides the seeded stratified
    assignment (used for paired ablation comparisons).
    """
    if len(rows) < 2 * folds:
        raise TrainingError(f"{len(rows)} rows is fewer than 2*folds={2 * folds}")
    x, y = _rows_to_arrays(rows, feature_subset)
    if len(np.unique(y)) < 2:
        raise TrainingError("both outcome classes must be present")
    if fold_ids is None:
        fold_ids = stratified_folds(y, folds, seed)

    fold_accuracies = []
    for f in range(folds):
        train_mask = fold_ids != f
        xt, means, stds = _standardize(x[train_mask])
        w, b = _fit_newton(xt, y[train_mask], l2_lambda)
        xv = (x[~train_mask] - means) / stds
        pred = _sigmoid(xv @ w + b) >= 0.5
        fold_accuracies.append(float(np.mean(pred == (y[~train_mask] == 1.0))))

    xs, means, stds = _standardize(x)
    constant = [c for c, s in zip(feature_subset, x.std(axis=0)) if s == 0.0]
    w, b = _fit_newton(xs, y, l2_lambda)
    return WinModel(
        region=region,
        tier=tier,
        feature_order=tuple(feature_subset),
        feature_means=means,
        feature_stds=stds,
        weights=w,
        intercept=b,
        l2_lambda=l2_lambda,
        cv_accuracy=float(np.mean(fold_accuracies)),
        fold_accuracies=fold_accuracies,
        constant_features=constant,
    )


def predict(model: WinModel, features: TeamFeatureVector) -> float:
    """Win probability at the model's standardization and weights."""
    try:
        raw = np.array([float(getattr(features, c)) for c in model.feature_order])
    except AttributeError as exc:
        raise DataError(f"feature vector missing model column: {exc}") from exc
    z = (raw - model.feature_means) / model.feature_stds
    return float(_sigmoid(np.array([z @ model.weights + model.intercept]))[0])


def ablate(
    rows,
    feature_subsets: dict[str, list[str]],
    region: str = "SYN",
    tier: str = "Bronze",
    folds: int = 5,
    l2_lambda: float = 1e-4,
    seed: int = 0,
) -> list[tuple[str, float]]:
    """CV accuracy per named feature subset, with identical fold assignment across subsets."""
    _, y = _rows_to_arrays(rows, FEATURE_ORDER[:1])
    fold_ids = stratified_folds(y, folds, seed)
    table = []
    for name, cols in feature_subsets.items():
        model = train(
            rows, region=region, tier=tier, folds=folds, l2_lambda=l2_lambda,
            seed=seed, feature_subset=cols, fold_ids=fold_ids,
        )
        table.append((name, model.cv_accuracy))
    return table
