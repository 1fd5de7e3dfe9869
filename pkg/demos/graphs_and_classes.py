"""
Edges and classes from a learned similarity
===========================================

Two uses of a shared-weight similarity model on planar data: filling in the
hidden edges of a clustered graph, and classifying points by their average
similarity to class exemplars.
"""

import numpy as np

from gqsim._random import rng_stream
from gqsim.datasets import gen_graph_problem
from gqsim.embeddings import EmbeddingSpec
from gqsim.similarity import MeasureSpec
from gqsim.tasks import classify_batch, graph_complete, planar_split, train_planar_model
from gqsim.training import TrainConfig

FULL = MeasureSpec("full")
spec = EmbeddingSpec(4, 2, 2)

# %%
# Graph completion
# ----------------
# Nodes from the same Gaussian cluster are joined. Only about 10% of the node
# pairs are observed; training sees nothing else.

for seed in range(3):
    problem = gen_graph_problem(30, 2, 2, 0.1, rng_stream(seed, "graph"))
    res = graph_complete(problem, spec, FULL, TrainConfig(seed=seed))
    print(f"seed {seed}: {len(problem.observed_pairs())} observed pairs, "
          f"accuracy on hidden pairs {res.accuracy_unobserved:.3f}")

# %%
# Classification
# --------------
# Blobs need a single exemplar per class; moons use every training point.

for kind, one_shot in (("blobs", True), ("moons", False)):
    train_pts, test_pts = planar_split(kind, 200, 0)
    result, _ = train_planar_model(train_pts, spec, FULL, TrainConfig(seed=0))
    exemplars = {}
    for c in (0, 1):
        P = train_pts.of_class(c)
        if one_shot:
            P = P[[int(np.argmin(np.linalg.norm(P - P.mean(axis=0), axis=1)))]]
        exemplars[c] = P
    labels, _ = classify_batch(result.model, FULL, exemplars, test_pts.points)
    print(f"{kind}: test accuracy {np.mean(labels == test_pts.labels):.3f}")
