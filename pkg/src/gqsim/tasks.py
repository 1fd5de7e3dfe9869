"""Experiment drivers built on trained similarity models.

Fidelity classification, decision grids, graph completion, generative
descent in feature space, the image transition scan, the partial-measurement
study and the batch-size study. Every driver is a deterministic function of
its arguments and seed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from ._random import rng_stream
from .analysis import wasserstein_1d
from .datasets import (
    LEFT,
    RIGHT,
    GraphProblem,
    LabeledPoints,
    build_pairs,
    gen_clusters,
    gen_delta_images,
    gen_half_images,
    gen_moons,
)
from .embeddings import EmbeddingSpec, weight_count
from .similarity import MeasureSpec, SimilarityModel, similarity, similarity_matrix
from .training import (
    PairDataset,
    TrainConfig,
    TrainResult,
    feature_gradient,
    loss,
    stochastic_batch,
    train,
)

__all__ = [
    "RED",
    "BLUE",
    "TransitionCurve",
    "CompletionResult",
    "DecisionGrid",
    "GenerateResult",
    "ImageExperiment",
    "classify_fidelity",
    "classify_batch",
    "decision_grid",
    "graph_complete",
    "generate",
    "transition_scan",
    "setup_image_experiment",
    "train_image_experiment",
    "heldout_separation",
    "planar_split",
    "train_planar_model",
    "partial_measurement_study",
    "batch_loss_spread",
]

log = logging.getLogger(__name__)

# classes of the reference clusters in the image experiment
RED, BLUE = 0, 1
IMAGE_ASSOCIATION = {LEFT: RED, RIGHT: BLUE}
CLUSTER_CENTERS = ((0.2, 0.2), (0.8, 0.8))
CLUSTER_SPREAD = 0.07


@dataclass
class TransitionCurve:
    deltas: np.ndarray
    mean_distance: np.ndarray
    variance: np.ndarray
    n_repeats: int

    def __post_init__(self):
        self.deltas = np.asarray(self.deltas, dtype=float)
        self.mean_distance = np.asarray(self.mean_distance, dtype=float)
        self.variance = np.asarray(self.variance, dtype=float)
        if not (self.deltas.shape == self.mean_distance.shape == self.variance.shape):
            raise ValueError("curve arrays differ in length")

    def at(self, delta: float) -> float:
        k = int(np.argmin(np.abs(self.deltas - delta)))
        return float(self.mean_distance[k])

    def to_dict(self) -> dict:
        return {"deltas": self.deltas.tolist(), "mean_distance": self.mean_distance.tolist(),
                "variance": self.variance.tolist(), "n_repeats": self.n_repeats}


@dataclass
class CompletionResult:
    predicted_adjacency: np.ndarray
    accuracy_unobserved: float
    threshold: float
    scores: Optional[np.ndarray] = None
    train_result: Optional[TrainResult] = None

    def to_dict(self) -> dict:
        return {"predicted_adjacency": self.predicted_adjacency.tolist(),
                "accuracy_unobserved": self.accuracy_unobserved, "threshold": self.threshold}


@dataclass
class DecisionGrid:
    xs: np.ndarray
    ys: np.ndarray
    labels: np.ndarray  # (len(ys), len(xs))
    scores: np.ndarray  # (len(ys), len(xs), n_classes), rows sum to 1
    classes: list


@dataclass
class GenerateResult:
    x: np.ndarray
    trajectory: np.ndarray
    objective: np.ndarray
    message: str = ""


# -- classification ---------------------------------------------------------

def _exemplar_blocks(exemplars: dict):
    classes = sorted(exemplars)
    if not classes:
        raise ValueError("no exemplar classes given")
    blocks = []
    for c in classes:
        E = np.atleast_2d(np.asarray(exemplars[c], dtype=float))
        if E.size == 0:
            raise ValueError(f"class {c} has no exemplars")
        blocks.append(E)
    return classes, blocks


def classify_batch(model: SimilarityModel, measure: MeasureSpec, exemplars: dict, X):
    """Vectorized :func:`classify_fidelity`; returns ``(labels, normalized scores)``."""
    classes, blocks = _exemplar_blocks(exemplars)
    X = np.atleast_2d(np.asarray(X, dtype=float))
    S = similarity_matrix(model, measure, X, np.vstack(blocks))
    bounds = np.cumsum([0] + [len(b) for b in blocks])
    raw = np.stack([S[:, bounds[i]:bounds[i + 1]].mean(axis=1) for i in range(len(classes))],
                   axis=1)
    total = raw.sum(axis=1, keepdims=True)
    scores = np.where(total > 0, raw / np.where(total > 0, total, 1.0), 1.0 / len(classes))
    # argmax picks the first maximum, i.e. the smallest class id
    labels = np.asarray(classes)[np.argmax(raw, axis=1)]
    return labels, scores


def classify_fidelity(model: SimilarityModel, measure: MeasureSpec, exemplars: dict, x):
    """Class whose exemplars are on average most similar to ``x``.

    Returns the class and a map class -> score, scores normalized to sum 1.
    Ties go to the smallest class id.
    """
    classes, _ = _exemplar_blocks(exemplars)
    labels, scores = classify_batch(model, measure, exemplars, [np.ravel(x)])
    return labels[0].item(), {c: float(s) for c, s in zip(classes, scores[0])}


def decision_grid(model: SimilarityModel, measure: MeasureSpec, exemplars: dict, bounds,
                  resolution: int) -> DecisionGrid:
    """Classify every node of a regular grid over a 2-D feature box."""
    if resolution < 2:
        raise ValueError("resolution must be at least 2")
    (x0, x1), (y0, y1) = bounds
    if not (x1 > x0 and y1 > y0):
        raise ValueError("bounds must be increasing")
    xs = np.linspace(x0, x1, resolution)
    ys = np.linspace(y0, y1, resolution)
    gx, gy = np.meshgrid(xs, ys)
    labels, scores = classify_batch(model, measure, exemplars, np.column_stack([gx.ravel(), gy.ravel()]))
    k = scores.shape[1]
    return DecisionGrid(xs, ys, labels.reshape(resolution, resolution),
                        scores.reshape(resolution, resolution, k), sorted(exemplars))


# -- graph completion -------------------------------------------------------

def graph_complete(problem: GraphProblem, spec: EmbeddingSpec, measure: MeasureSpec,
                   config: TrainConfig, threshold: float = 0.5) -> CompletionResult:
    """Predict hidden edges from node attributes with a shared-weight model.

    Only observed entries of the adjacency matrix are read for training. A
    hidden pair is predicted as an edge when the mean of ``S(i, j)`` and
    ``S(j, i)`` reaches ``threshold``.
    """
    view = problem.observed_view()
    obs = problem.observed_pairs()
    hidden = problem.hidden_pairs()
    if len(hidden) == 0:
        pred = np.where(problem.observed_mask, view, 0)
        return CompletionResult(pred, 1.0, threshold)
    if len(obs) == 0:
        raise ValueError("no observed entries")
    y_obs = view[obs[:, 0], obs[:, 1]]
    if np.unique(y_obs).size < 2:
        raise ValueError("observed entries carry a single label; cannot learn edges")

    attrs = problem.attributes.points
    i = np.concatenate([obs[:, 0], obs[:, 1]])
    j = np.concatenate([obs[:, 1], obs[:, 0]])
    pairs = PairDataset(attrs[i], attrs[j], np.concatenate([y_obs, y_obs]))
    init = rng_stream(config.seed, "graph-init")
    model = SimilarityModel.random(spec, spec, init, shared_weights=True)
    result = train(model, measure, pairs, config)

    S = similarity_matrix(result.model, measure, attrs, attrs)
    S = 0.5 * (S + S.T)
    pred = (S >= threshold).astype(int)
    np.fill_diagonal(pred, 0)
    # keep observed entries as given
    pred = np.where(problem.observed_mask, view, pred)
    np.fill_diagonal(pred, 0)
    truth = problem.adjacency[hidden[:, 0], hidden[:, 1]]
    acc = float(np.mean(pred[hidden[:, 0], hidden[:, 1]] == truth))
    return CompletionResult(pred, acc, threshold, S, result)


# -- generative descent -----------------------------------------------------

def generate(model: SimilarityModel, measure: MeasureSpec, x_s, xt0, steps: int = 100,
             learning_rate: float = 0.5, tol: float = 1e-6, max_halvings: int = 30) -> GenerateResult:
    """Gradient descent on ``1 - S(x_s, x~)`` over ``x~``.

    Gradients come from the parameter-shift rule. A step that raises the
    objective is halved until it does not, so the objective never increases.
    """
    if steps < 0 or learning_rate <= 0:
        raise ValueError("need steps >= 0 and learning_rate > 0")
    x = np.asarray(xt0, dtype=float).reshape(-1).copy()

    def f(v):
        return 1.0 - similarity(model, measure, x_s, v)

    fx = f(x)
    path, values = [x.copy()], [fx]
    message = "step budget reached"
    for _ in range(steps):
        g = -feature_gradient(model, measure, x_s, x, wrt="xt")
        if np.linalg.norm(g) < tol:
            message = "gradient norm below tolerance"
            break
        lr = learning_rate
        for _ in range(max_halvings):
            trial = x - lr * g
            ft = f(trial)
            if ft <= fx:
                break
            lr *= 0.5
        else:
            message = "no decrease along the gradient"
            break
        x, fx = trial, ft
        path.append(x.copy())
        values.append(fx)
    return GenerateResult(x, np.array(path), np.array(values), message)


# -- image experiment -------------------------------------------------------

@dataclass
class ImageExperiment:
    images: LabeledPoints
    references: LabeledPoints
    pairs: PairDataset
    model: SimilarityModel
    measure: MeasureSpec
    seed: int
    meta: dict = field(default_factory=dict)


def setup_image_experiment(seed: int, n_images: int = 100, n_references: int = 100,
                           n_qubits: int = 4, n_layers: int = 2, measure="swap:2",
                           centers=CLUSTER_CENTERS, spread: float = CLUSTER_SPREAD) -> ImageExperiment:
    """Half-blanked images paired with two planar reference clusters.

    Left images are similar to the red cluster near the origin, right images
    to the blue cluster. Pixels and cluster coordinates become angles by a
    factor of pi.
    """
    data_rng = rng_stream(seed, "data")
    images = gen_half_images(n_images, data_rng)
    refs = gen_clusters(n_references, 2, 2, centers, spread, data_rng, scale=np.pi)
    refs.metadata["classes"] = ["red", "blue"]
    pairs = build_pairs(images, refs, IMAGE_ASSOCIATION)
    spec_x = EmbeddingSpec(n_qubits, n_layers, 4)
    spec_t = EmbeddingSpec(n_qubits, n_layers, 2)
    model = SimilarityModel(spec_x, spec_t, np.zeros(weight_count(spec_x)),
                            np.zeros(weight_count(spec_t)))
    if isinstance(measure, str):
        measure = MeasureSpec.parse(measure)
    return ImageExperiment(images, refs, pairs, model, measure, seed)


def train_image_experiment(exp: ImageExperiment, config: Optional[TrainConfig] = None) -> TrainResult:
    if config is None:
        config = TrainConfig(seed=exp.seed)
    result = train(exp.model, exp.measure, exp.pairs, config)
    exp.model = result.model
    return result


def heldout_separation(model: SimilarityModel, measure: MeasureSpec, images: LabeledPoints,
                       references: LabeledPoints) -> dict:
    """Share of left images closer to red than to blue on average, and the mirror share."""
    S = similarity_matrix(model, measure, images.points, references.points)
    red = S[:, references.labels == RED].mean(axis=1)
    blue = S[:, references.labels == BLUE].mean(axis=1)
    left = images.labels == LEFT
    right = images.labels == RIGHT
    return {"left_closer_to_red": float(np.mean(red[left] > blue[left])),
            "right_closer_to_blue": float(np.mean(blue[right] > red[right])),
            "mean_red": red.tolist(), "mean_blue": blue.tolist()}


def transition_scan(model: SimilarityModel, measure: MeasureSpec, red, blue, deltas,
                    n_repeats: int = 50, rng: Optional[np.random.Generator] = None,
                    eps: float = 0.1) -> TransitionCurve:
    """Distance between the red and blue similarity distributions along the image path.

    For each ``delta`` draw ``n_repeats`` images ``[[X, 1-X], [X, 1-X]]``
    with ``X`` near ``delta``. Per image, the similarities to the red and to
    the blue references form two samples; their 1-D Wasserstein distance is
    averaged over the images.
    """
    red = np.atleast_2d(np.asarray(red, dtype=float))
    blue = np.atleast_2d(np.asarray(blue, dtype=float))
    if red.size == 0 or blue.size == 0:
        raise ValueError("reference sets must be nonempty")
    if n_repeats < 1:
        raise ValueError("n_repeats must be positive")
    rng = rng if rng is not None else np.random.default_rng(0)
    deltas = np.asarray(deltas, dtype=float)
    refs = np.vstack([red, blue])
    means, variances = [], []
    for delta in deltas:
        imgs = gen_delta_images(float(delta), n_repeats, rng, eps=eps)
        S = similarity_matrix(model, measure, imgs, refs)
        d = np.array([wasserstein_1d(row[: len(red)], row[len(red):]) for row in S])
        means.append(d.mean())
        variances.append(d.var())
    return TransitionCurve(deltas, means, variances, n_repeats)


# -- planar data ------------------------------------------------------------

BLOB_CENTERS = ((-2.0, -2.0), (2.0, 2.0))


def planar_split(kind: str, n_points: int, seed: int, spread: float = 0.6, noise: float = 0.1,
                 train_fraction: float = 0.5):
    """Blobs or moons split into train and test points in angle units.

    Coordinates are mapped affinely so the training points span ``[0, pi]``
    on each axis; test points use the same map.
    """
    rng = rng_stream(seed, "data")
    if kind == "blobs":
        pts = gen_clusters(n_points, 2, 2, BLOB_CENTERS, spread, rng)
    elif kind == "moons":
        pts = gen_moons(n_points, noise, rng)
    else:
        raise ValueError(f"unknown planar dataset {kind!r}")
    perm = rng_stream(seed, "split").permutation(n_points)
    n_train = int(round(train_fraction * n_points))
    if not 2 <= n_train < n_points:
        raise ValueError("train_fraction leaves an empty split")
    tr, te = perm[:n_train], perm[n_train:]
    lo = pts.points[tr].min(axis=0)
    span = pts.points[tr].max(axis=0) - lo
    span = np.where(span > 0, span, 1.0)
    angles = np.pi * (pts.points - lo) / span
    meta = {"scale": 1.0, "kind": kind, "offset": lo.tolist(), "angle_per_unit": (np.pi / span).tolist()}
    return (LabeledPoints(angles[tr], pts.labels[tr], dict(meta)),
            LabeledPoints(angles[te], pts.labels[te], dict(meta)))


def train_planar_model(points: LabeledPoints, spec: EmbeddingSpec, measure: MeasureSpec,
                       config: TrainConfig):
    """Shared-weight model trained so that same-class points are similar."""
    classes = np.unique(points.labels)
    pairs = build_pairs(points, points, {int(c): int(c) for c in classes})
    model = SimilarityModel.random(spec, spec, rng_stream(config.seed, "model-init"),
                                   shared_weights=True)
    return train(model, measure, pairs, config), pairs


# -- studies ----------------------------------------------------------------

def partial_measurement_study(dims, m_choices, n_instances: int, config: TrainConfig,
                              n_qubits: int = 4, n_layers: int = 2, n_points: int = 40,
                              spread: float = 0.1) -> list:
    """Training quality of the projective measure for several prefix lengths.

    For every reference dimension ``k`` and instance, left/right images are
    paired with two clusters in ``[0, 1]^k`` (centers at 0.2 and 0.8 in every
    coordinate). All prefix lengths train on the same instance data from the
    same initial weights. Returns one row per ``(dim, m)`` with the mean and
    variance over instances of the minimum batch loss seen in training, plus
    the per-instance values.
    """
    rows = []
    for k in dims:
        if not 1 <= k <= n_qubits:
            raise ValueError(f"reference dimension {k} must lie in [1, {n_qubits}]")
        per_m = {m: [] for m in m_choices}
        final = {m: [] for m in m_choices}
        for inst in range(n_instances):
            rng = rng_stream(config.seed, "partial-study", k, inst)
            images = gen_half_images(n_points, rng)
            centers = np.array([np.full(k, 0.2), np.full(k, 0.8)])
            refs = gen_clusters(n_points, 2, k, centers, spread, rng, scale=np.pi)
            pairs = build_pairs(images, refs, IMAGE_ASSOCIATION)
            spec_x = EmbeddingSpec(n_qubits, n_layers, 4)
            spec_t = EmbeddingSpec(n_qubits, n_layers, k)
            model = SimilarityModel(spec_x, spec_t, np.zeros(weight_count(spec_x)),
                                    np.zeros(weight_count(spec_t)))
            inst_cfg = _replace_seed(config, int(rng_stream(config.seed, "instance-seed", k, inst)
                                                 .integers(2 ** 31)))
            for m in m_choices:
                if not 1 <= m <= n_qubits:
                    raise ValueError(f"prefix length {m} must lie in [1, {n_qubits}]")
                res = train(model, MeasureSpec("proj", m), pairs, inst_cfg)
                per_m[m].append(res.min_loss)
                final[m].append(res.final_full_loss)
        for m in m_choices:
            vals = np.array(per_m[m])
            rows.append({"dim": k, "m": m, "mean_min_loss": float(vals.mean()),
                         "variance": float(vals.var(ddof=1)) if len(vals) > 1 else 0.0,
                         "mean_final_loss": float(np.mean(final[m])),
                         "min_losses": vals.tolist()})
    return rows


def _replace_seed(config: TrainConfig, seed: int) -> TrainConfig:
    return replace(config, seed=seed)


def batch_loss_spread(model: SimilarityModel, measure: MeasureSpec, dataset: PairDataset,
                      batch_sizes, n_draws: int, rng: np.random.Generator) -> list:
    """Spread of the stochastic batch loss around the full-dataset loss.

    For each batch size, ``n_draws`` balanced batches are drawn at fixed
    weights. Returns rows with the full loss and the mean and standard
    deviation of the batch losses.
    """
    full = loss(model, measure, dataset)
    rows = []
    for size in batch_sizes:
        vals = np.array([loss(model, measure, stochastic_batch(dataset, int(size), rng))
                         for _ in range(n_draws)])
        rows.append({"batch_size": int(size), "full_loss": full, "mean": float(vals.mean()),
                     "std": float(vals.std(ddof=1)) if n_draws > 1 else 0.0,
                     "samples": vals.tolist()})
    return rows
