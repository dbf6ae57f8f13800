"""k-means clustering, nearest-centroid classification, cluster-to-label
mapping, confusion matrices, and the end-to-end phoneme-recognition
experiment (formant features, optional noise, train/test split)."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    EmptyData,
    InvalidK,
    InvalidSpec,
    LabelOutOfRange,
    LengthMismatch,
)
from .lpc import FrameSpec, autocorrelation, formants_from_lpc, frame_signal, levinson_durbin
from .signals import Signal


@dataclass
class FeatureMatrix:
    rows: np.ndarray                 # n_points x d
    labels: np.ndarray = None        # optional ints, length n_points
    columns: tuple = None            # optional column names (plot/CSV labels)

    def __post_init__(self):
        self.rows = np.atleast_2d(np.asarray(self.rows, dtype=np.float64))
        if not np.isfinite(self.rows).all():
            raise InvalidSpec("feature rows must be finite")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if len(self.labels) != len(self.rows):
                raise LengthMismatch(
                    f"{len(self.labels)} labels for {len(self.rows)} rows"
                )
        if self.columns is not None:
            self.columns = tuple(str(c) for c in self.columns)

    @property
    def n_points(self) -> int:
        return self.rows.shape[0]

    @property
    def dim(self) -> int:
        return self.rows.shape[1]


@dataclass
class KMeansModel:
    centroids: np.ndarray
    inertia: float
    iterations: int
    assignments: np.ndarray
    inertia_history: list = field(default_factory=list)


@dataclass
class ConfusionMatrix:
    counts: np.ndarray               # rows true, columns predicted
    class_names: list
    n_samples: int

    @property
    def accuracy(self) -> float:
        return float(np.trace(self.counts)) / self.n_samples if self.n_samples else 0.0

    @property
    def empty(self) -> bool:
        return self.n_samples == 0

    def to_csv(self) -> str:
        lines = [",".join(self.class_names)]
        for row in self.counts:
            lines.append(",".join(str(int(v)) for v in row))
        lines.append(f"accuracy,{format(self.accuracy, '.17g')}")
        return "\n".join(lines)


def _as_rows(data) -> np.ndarray:
    if isinstance(data, FeatureMatrix):
        return data.rows
    return np.atleast_2d(np.asarray(data, dtype=np.float64))


def _sq_dists(points: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    diff = points[:, None, :] - centroids[None, :, :]
    return np.sum(diff * diff, axis=2)


def kmeans(data, k: int, seed: int, max_iter: int = 300, tol: float = 1e-6) -> KMeansModel:
    """Lloyd iterations with k-means++ seeding from ``seed``.

    Ties in the assignment go to the lower centroid index. An emptied cluster
    seizes the point currently farthest from its assigned centroid. The loop
    stops when the assignment stops changing, when the largest centroid
    movement drops below tol, or at max_iter; the returned assignments are
    always consistent with the returned centroids.
    """
    rows = _as_rows(data)
    n, d = rows.shape
    if n == 0 or d == 0:
        raise EmptyData("feature matrix is empty")
    if not 1 <= k <= n:
        raise InvalidK(f"need 1 <= k <= n_points={n}, got {k}")

    rng = np.random.default_rng(seed)
    centroids = _kmeans_pp_init(rows, k, rng)

    history = []
    assign = None
    prev_assign = None
    iterations = 0
    for iterations in range(1, max_iter + 1):
        d2 = _sq_dists(rows, centroids)
        assign = np.argmin(d2, axis=1)
        point_d2 = d2[np.arange(n), assign]
        for j in range(k):  # repair empties by seizing the worst-fit point
            if not (assign == j).any():
                far = int(np.argmax(point_d2))
                centroids[j] = rows[far]
                assign[far] = j
                point_d2[far] = 0.0
        history.append(float(np.sum(point_d2)))

        new_centroids = centroids.copy()
        for j in range(k):
            new_centroids[j] = rows[assign == j].mean(axis=0)
        movement = float(np.max(np.linalg.norm(new_centroids - centroids, axis=1)))
        centroids = new_centroids

        if prev_assign is not None and np.array_equal(assign, prev_assign):
            break
        prev_assign = assign
        if movement < tol:
            assign = np.argmin(_sq_dists(rows, centroids), axis=1)
            break

    final_d2 = _sq_dists(rows, centroids)[np.arange(n), assign]
    return KMeansModel(
        centroids=centroids,
        inertia=float(np.sum(final_d2)),
        iterations=iterations,
        assignments=assign,
        inertia_history=history,
    )


def _kmeans_pp_init(rows: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = rows.shape[0]
    centroids = np.empty((k, rows.shape[1]))
    centroids[0] = rows[rng.integers(n)]
    closest = np.sum((rows - centroids[0]) ** 2, axis=1)
    for j in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            idx = int(rng.integers(n))  # all mass on existing centroids
        else:
            idx = int(rng.choice(n, p=closest / total))
        centroids[j] = rows[idx]
        closest = np.minimum(closest, np.sum((rows - centroids[j]) ** 2, axis=1))
    return centroids


def nearest_centroid_classify(model: KMeansModel, points) -> np.ndarray:
    pts = _as_rows(points)
    if pts.shape[1] != model.centroids.shape[1]:
        raise DimensionMismatch(
            f"points are {pts.shape[1]}-d but centroids are {model.centroids.shape[1]}-d"
        )
    return np.argmin(_sq_dists(pts, model.centroids), axis=1)


def map_clusters_to_labels(assignments, true_labels, k: int) -> np.ndarray:
    """Majority true label per cluster; empty clusters map to class 0 and
    majority ties go to the lower class id."""
    assignments = np.asarray(assignments, dtype=np.int64)
    true_labels = np.asarray(true_labels, dtype=np.int64)
    if len(assignments) != len(true_labels):
        raise LengthMismatch(
            f"{len(assignments)} assignments vs {len(true_labels)} labels"
        )
    mapping = np.zeros(k, dtype=np.int64)
    for j in range(k):
        members = true_labels[assignments == j]
        if members.size:
            mapping[j] = int(np.argmax(np.bincount(members)))  # argmax tie -> lower id
    return mapping


def confusion_matrix(true_labels, predicted_labels, n_classes: int,
                     class_names: list = None) -> ConfusionMatrix:
    true_labels = np.asarray(true_labels, dtype=np.int64)
    predicted_labels = np.asarray(predicted_labels, dtype=np.int64)
    if len(true_labels) != len(predicted_labels):
        raise LengthMismatch(
            f"{len(true_labels)} true vs {len(predicted_labels)} predicted"
        )
    counts = np.zeros((n_classes, n_classes), dtype=np.int64)
    for t, p in zip(true_labels, predicted_labels):
        if not (0 <= t < n_classes and 0 <= p < n_classes):
            raise LabelOutOfRange(f"label pair ({t}, {p}) outside [0, {n_classes})")
        counts[t, p] += 1
    names = class_names if class_names is not None else [str(i) for i in range(n_classes)]
    return ConfusionMatrix(counts=counts, class_names=list(names),
                           n_samples=len(true_labels))


def phoneme_experiment(features: FeatureMatrix, k: int, seed: int) -> tuple[ConfusionMatrix, KMeansModel]:
    """Cluster-then-classify run on labeled feature vectors.

    Seeded 70/30 shuffle split, k-means on the training rows, clusters mapped
    to their majority training label, test rows classified by nearest
    centroid, confusion matrix over the test split.
    """
    if features.labels is None:
        raise InvalidSpec("phoneme experiment needs labeled features")
    n = features.n_points
    if n < 2:
        raise EmptyData("need at least two labeled points to split")
    rng = np.random.default_rng(seed)
    kmeans_seed = int(rng.integers(2 ** 63))
    perm = rng.permutation(n)
    n_train = max(1, int(np.floor(0.7 * n)))
    train, test = perm[:n_train], perm[n_train:]

    model = kmeans(features.rows[train], k, seed=kmeans_seed)
    mapping = map_clusters_to_labels(model.assignments, features.labels[train], k)
    predicted = mapping[nearest_centroid_classify(model, features.rows[test])]
    n_classes = int(features.labels.max()) + 1
    cm = confusion_matrix(features.labels[test], predicted, n_classes)
    return cm, model


def add_noise_at_snr(x: Signal, snr_db: float, rng: np.random.Generator) -> Signal:
    """Additive Gaussian noise scaled for the requested SNR in dB."""
    power = float(np.mean(x.samples ** 2))
    if power <= 0.0:
        raise InvalidSpec("cannot set an SNR on a zero signal")
    sigma = np.sqrt(power / 10.0 ** (snr_db / 10.0))
    return Signal(x.samples + rng.normal(0.0, sigma, size=len(x)), x.sample_rate_hz)


def formant_features(labeled_signals, order: int, frames: FrameSpec,
                     include_f3: bool = False) -> FeatureMatrix:
    """Per-frame (F1, F2[, F3]) feature rows from labeled speech signals.
    Frames without enough accepted formants are dropped."""
    need = 3 if include_f3 else 2
    rows, labels = [], []
    for label, sig in labeled_signals:
        for frame in frame_signal(sig, frames):
            r = autocorrelation(frame, order)
            if r.r[0] <= 1e-300:
                continue
            model = levinson_durbin(r, order)
            formants = formants_from_lpc(model, sig.sample_rate_hz)
            if len(formants) >= need:
                rows.append([f.frequency_hz for f in formants[:need]])
                labels.append(int(label))
    if not rows:
        raise EmptyData("no frames produced enough formants")
    cols = ("f1", "f2", "f3")[:need]
    return FeatureMatrix(np.asarray(rows), np.asarray(labels), cols)


def phoneme_recognition_run(labeled_signals, order: int, frames: FrameSpec, k: int,
                            seed: int, noise_snr_db: float = None,
                            include_f3: bool = False) -> tuple[ConfusionMatrix, KMeansModel]:
    """Full recognition pipeline: optional seeded Gaussian noise on the
    time-domain signals, formant extraction, then the cluster/classify
    experiment. The split/k-means seed is drawn before any noise so paired
    noisy/noiseless runs share the identical split and initialization."""
    rng = np.random.default_rng(seed)
    experiment_seed = int(rng.integers(2 ** 63))
    if noise_snr_db is not None:
        labeled_signals = [(lab, add_noise_at_snr(sig, noise_snr_db, rng))
                           for lab, sig in labeled_signals]
    features = formant_features(labeled_signals, order, frames, include_f3)
    return phoneme_experiment(features, k, experiment_seed)
