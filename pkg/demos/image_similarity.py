"""
Learning a similarity between images and planar points
======================================================

Two-by-two images with one blank column are paired with points from two
clusters: left images belong with the red cluster, right images with the
blue one. A four-qubit model learns this association, and the trained model
is then probed along a path of images that morph from right to left.

Training takes a few seconds. Figures land in ``demos/out``.
"""

from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt

from gqsim._random import rng_stream
from gqsim.datasets import RIGHT, gen_half_images
from gqsim.similarity import similarity_matrix
from gqsim.tasks import (
    BLUE,
    RED,
    generate,
    heldout_separation,
    setup_image_experiment,
    train_image_experiment,
    transition_scan,
)

SEED = 2
out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# %%
# Data and training
# -----------------
# 100 images times 100 cluster points make 10^4 labeled pairs. Each objective
# evaluation sees a balanced batch of 80.

exp = setup_image_experiment(SEED)
result = train_image_experiment(exp)
print(f"full loss {result.initial_full_loss:.4f} -> {result.final_full_loss:.4f} "
      f"in {result.n_evals} evaluations")

fig, ax = plt.subplots()
ax.plot([v for _, v in result.loss_history], lw=0.5, label="batch loss")
ax.plot(result.best_history, label="best so far")
ax.set(xlabel="evaluation", ylabel="loss")
ax.legend()
fig.savefig(out / "image_training.svg")

# %%
# Unseen images
# -------------
# For fresh images, compare the mean similarity to each cluster.

heldout = gen_half_images(20, rng_stream(SEED, "heldout"))
sep = heldout_separation(exp.model, exp.measure, heldout, exp.references)
print("left images closer to red:", sep["left_closer_to_red"])
print("right images closer to blue:", sep["right_closer_to_blue"])

# %%
# Morphing right into left
# ------------------------
# Images ``[[X, 1-X], [X, 1-X]]`` with ``X`` near delta interpolate between the
# two classes. The Wasserstein distance between the red and blue similarity
# samples should collapse halfway.

red, blue = exp.references.of_class(RED), exp.references.of_class(BLUE)
deltas = np.linspace(0, 1, 11)
curve = transition_scan(exp.model, exp.measure, red, blue, deltas, n_repeats=20,
                        rng=rng_stream(SEED, "transition"))
for d, m in zip(curve.deltas, curve.mean_distance):
    print(f"delta {d:.1f}: W1 {m:.3f}")

fig, ax = plt.subplots()
ax.errorbar(curve.deltas, curve.mean_distance, yerr=np.sqrt(curve.variance), marker="o")
ax.set(xlabel="delta", ylabel="W1(red, blue)")
fig.savefig(out / "image_transition.svg")

# %%
# Generating a matching point
# ---------------------------
# Starting in the middle of the plane, gradient descent on ``1 - S`` moves a
# point towards the cluster associated with a right image.

x_s = heldout.points[heldout.labels == RIGHT][0]
gen = generate(exp.model, exp.measure, x_s, [0.5, 0.5])
print("final point", np.round(gen.x, 3), "cost", round(float(gen.objective[-1]), 4))
print("blue center", np.round(blue.mean(axis=0), 3))

g = np.linspace(0, np.pi, 40)
gx, gy = np.meshgrid(g, g)
cost = 1 - similarity_matrix(exp.model, exp.measure, [x_s],
                             np.column_stack([gx.ravel(), gy.ravel()]))[0].reshape(gx.shape)
fig, ax = plt.subplots()
ax.imshow(cost, origin="lower", extent=(0, np.pi, 0, np.pi), cmap="magma")
ax.scatter(*red.T, s=6, c="tab:red")
ax.scatter(*blue.T, s=6, c="tab:blue")
ax.plot(*gen.trajectory.T, c="white")
ax.set(xlabel="x~1", ylabel="x~2")
fig.savefig(out / "image_generate.svg")
