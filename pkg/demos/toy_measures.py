"""
Projective similarity on a two-qubit toy circuit
=================================================

A two-qubit circuit embeds a pair of angles ``(x, x~)``. Measuring both
qubits in the zero state gives one similarity, measuring only the first qubit
gives another. This walk-through compares the two.

Run with ``python3 demos/toy_measures.py``; figures land in ``demos/out``.
"""

from pathlib import Path

import numpy as np
import matplotlib

matplotlib.use("svg")
import matplotlib.pyplot as plt

from gqsim import analysis
from gqsim.embeddings import toy_pair_circuit
from gqsim.similarity import MeasureSpec, pair_similarity_batch, toy_s1_closed, toy_s2_closed

out = Path(__file__).parent / "out"
out.mkdir(exist_ok=True)

# %%
# Simulated values against the closed forms
# -----------------------------------------
# The feature angles are bound into the circuit slots, so one circuit template
# serves the whole grid.

g = np.linspace(0, 2 * np.pi, 81)
gx, gt = np.meshgrid(g, g, indexing="ij")
feats = np.column_stack([gx.ravel(), gt.ravel()])
circuit = toy_pair_circuit(0.0, 0.0)
s2 = pair_similarity_batch(circuit, MeasureSpec("proj", 2), feats).reshape(gx.shape)
s1 = pair_similarity_batch(circuit, MeasureSpec("proj", 1), feats).reshape(gx.shape)
print("max |S2 - closed form|:", np.abs(s2 - toy_s2_closed(gx, gt)).max())
print("max |S1 - closed form|:", np.abs(s1 - toy_s1_closed(gx, gt)).max())

fig, axes = plt.subplots(1, 2, figsize=(9, 4))
for ax, S, name in zip(axes, (s2, s1), ("both qubits", "first qubit")):
    im = ax.imshow(S.T, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi), vmin=0, vmax=1)
    ax.set(title=name, xlabel="x", ylabel="x~")
fig.colorbar(im, ax=axes)
fig.savefig(out / "toy_similarities.svg")

# %%
# How the similarity values are spread
# ------------------------------------
# Measuring both qubits piles most pairs near zero. Measuring one qubit spreads
# them symmetrically around one half.

h2 = analysis.density_of_states(toy_s2_closed)
h1 = analysis.density_of_states(toy_s1_closed)
print("mode bin, both qubits:", h2.mode_bin, " first qubit:", h1.mode_bin)

fig, ax = plt.subplots()
ax.step(h2.centers, h2.densities, where="mid", label="both qubits")
ax.step(h1.centers, h1.densities, where="mid", label="first qubit")
ax.set(xlabel="S", ylabel="density", yscale="log")
ax.legend()
fig.savefig(out / "toy_dos.svg")

# %%
# Retrieving a point close to one reference and far from another
# ---------------------------------------------------------------
# The retrieval loss is small when ``x~`` resembles ``x_s`` and not ``x_d``.
# Each measure is scored at its own grid optimum; lambda is the difference.

x_s, x_d = 0.3, 0.5
for name, fn in (("first qubit", toy_s1_closed), ("both qubits", toy_s2_closed)):
    x_opt, l_opt = analysis.retrieval_optimum(fn, x_s, x_d)
    print(f"{name:12s}: x~* = {x_opt:.4f}, loss* = {l_opt:.5f}")
print("lambda(0.3, 0.5) =", round(analysis.lambda_improvement(x_s, x_d), 5))

axis, lam = analysis.lambda_map(50)
print(f"lambda over the torus: min {lam.min():+.4f}, max {lam.max():+.4f}, "
      f"positive share {np.mean(lam > 1e-6):.3f}")
fig, ax = plt.subplots()
im = ax.imshow(lam.T, origin="lower", extent=(0, 2 * np.pi, 0, 2 * np.pi), cmap="coolwarm")
ax.set(xlabel="x_s", ylabel="x_d", title="lambda")
fig.colorbar(im)
fig.savefig(out / "toy_lambda.svg")
