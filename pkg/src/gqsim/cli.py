"""Command-line entry point: ``gqsim <experiment> [--config F] [--seed N] ...``.

Every subcommand resolves its configuration as built-in defaults, then the
``--config`` file, then command-line flags, validates it against the schema,
runs, and writes JSON, CSV and SVG files into the output directory. Each file
carries the SHA-256 of the resolved configuration and the seed.

Exit codes: 0 success, 2 invalid configuration, 1 run failure. Errors are
reported as one JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import analysis, plotting
from ._random import rng_stream
from .config import CONFIG_SCHEMA, EXPERIMENTS, default_config, load_config, merge, validate
from .datasets import LEFT, gen_graph_problem, gen_half_images
from .embeddings import EmbeddingSpec, toy_pair_circuit
from .outputs import config_hash, to_jsonable, write_csv, write_json
from .similarity import (
    MeasureSpec,
    SimilarityModel,
    pair_similarity_batch,
    similarity_matrix,
    toy_s1_closed,
    toy_s2_closed,
    zeta,
)
from .tasks import (
    BLUE,
    RED,
    batch_loss_spread,
    classify_batch,
    decision_grid,
    generate,
    graph_complete,
    heldout_separation,
    partial_measurement_study,
    planar_split,
    setup_image_experiment,
    train_image_experiment,
    train_planar_model,
    transition_scan,
)
from .training import TrainConfig, loss

log = logging.getLogger("gqsim")


class ConfigError(ValueError):
    pass


# -- shared pieces ----------------------------------------------------------

def _train_config(cfg) -> TrainConfig:
    return TrainConfig(seed=cfg["seed"], **cfg["train"])


def _write_history(out, result, meta):
    best = result.best_history
    rows = [(i, v, b) for (i, v), b in zip(result.loss_history, best)]
    write_csv(out / "loss_history.csv", ["eval", "batch_loss", "best_so_far"], rows, meta)
    plotting.line_plot(out / "loss_history.svg", [i for i, _, _ in rows],
                       {"batch loss": [v for _, v, _ in rows], "best so far": list(best)}, meta,
                       title="training loss", xlabel="objective evaluation", ylabel="loss")


def _image_setup(cfg):
    ds = cfg["dataset"]
    emb = cfg["embedding"]
    return setup_image_experiment(cfg["seed"], ds["n_points"], ds["n_references"],
                                  emb["n_qubits"], emb["n_layers"], cfg["measure"],
                                  spread=ds["spread"])


def _heldout_images(cfg):
    return gen_half_images(cfg["dataset"]["n_heldout"], rng_stream(cfg["seed"], "heldout"))


def _load_weights(path, cfg):
    data = json.loads(Path(path).read_text())
    model = SimilarityModel.from_dict(data["model"])
    if "measure" in data and data["measure"] != cfg["measure"]:
        raise ConfigError(f"weights were trained with measure {data['measure']}, "
                          f"config asks for {cfg['measure']}")
    return model


def _image_model(cfg, out, meta, weights=None):
    """Image experiment with a trained model, trained here unless weights are given."""
    exp = _image_setup(cfg)
    summary = {}
    if weights:
        exp.model = _load_weights(weights, cfg)
    else:
        result = train_image_experiment(exp, _train_config(cfg))
        _write_history(out, result, meta)
        summary = {"initial_full_loss": result.initial_full_loss,
                   "final_full_loss": result.final_full_loss, "n_evals": result.n_evals}
    return exp, summary


def _planar_model(cfg, out, meta):
    ds = cfg["dataset"]
    train_pts, test_pts = planar_split(ds["kind"], ds["n_points"], cfg["seed"],
                                       spread=ds.get("spread", 0.6), noise=ds.get("noise", 0.1))
    emb = cfg["embedding"]
    spec = EmbeddingSpec(emb["n_qubits"], emb["n_layers"], 2)
    measure = MeasureSpec.parse(cfg["measure"])
    result, pairs = train_planar_model(train_pts, spec, measure, _train_config(cfg))
    _write_history(out, result, meta)
    return train_pts, test_pts, measure, result, pairs


# -- subcommands ------------------------------------------------------------

def run_toy_analysis(cfg, out, meta, args):
    p = cfg["params"]
    g = np.linspace(0.0, 2 * np.pi, p["heatmap_n"])
    gx, gt = np.meshgrid(g, g, indexing="ij")
    feats = np.column_stack([gx.ravel(), gt.ravel()])
    circuit = toy_pair_circuit(0.0, 0.0)
    grids = {}
    for m in (2, 1):
        S = pair_similarity_batch(circuit, MeasureSpec("proj", m), feats).reshape(gx.shape)
        grids[m] = S
        write_csv(out / f"s{m}.csv", ["x", "x_tilde", "similarity"],
                  zip(feats[:, 0], feats[:, 1], S.ravel()), meta)
        plotting.heatmap(out / f"s{m}.svg", S.T, (0, 2 * np.pi, 0, 2 * np.pi), meta,
                         title=f"prefix-{m} similarity", xlabel="x", ylabel="x~", vmin=0, vmax=1)

    h2 = analysis.density_of_states(toy_s2_closed, p["grid_n"], p["n_bins"])
    h1 = analysis.density_of_states(toy_s1_closed, p["grid_n"], p["n_bins"])
    write_csv(out / "dos.csv", ["bin_lo", "bin_hi", "density_s2", "density_s1"],
              zip(h2.bin_edges[:-1], h2.bin_edges[1:], h2.densities, h1.densities), meta)
    plotting.line_plot(out / "dos.svg", h2.centers, {"m=2": h2.densities, "m=1": h1.densities},
                       meta, title="density of states", xlabel="S", ylabel="D(S)")

    xs, xd = p["x_s"], p["x_d"]
    gr, l1 = analysis.retrieval_curve(toy_s1_closed, xs, xd, p["grid_n"])
    _, l2 = analysis.retrieval_curve(toy_s2_closed, xs, xd, p["grid_n"])
    write_csv(out / "retrieval.csv", ["x_tilde", "loss_s1", "loss_s2"], zip(gr, l1, l2), meta)
    plotting.line_plot(out / "retrieval.svg", gr, {"m=1": l1, "m=2": l2}, meta,
                       title=f"retrieval loss, x_s={xs}, x_d={xd}", xlabel="x~", ylabel="loss")

    axis, lam = analysis.lambda_map(p["lambda_grid"], p["grid_n"])
    ax_s, ax_d = np.meshgrid(axis, axis, indexing="ij")
    write_csv(out / "lambda.csv", ["x_s", "x_d", "lambda"],
              zip(ax_s.ravel(), ax_d.ravel(), lam.ravel()), meta)
    plotting.heatmap(out / "lambda.svg", lam.T, (0, 2 * np.pi, 0, 2 * np.pi), meta,
                     title="lambda = L*(m=1) - L*(m=2)", xlabel="x_s", ylabel="x_d", cmap="coolwarm")

    opt1 = analysis.retrieval_optimum(toy_s1_closed, xs, xd, p["grid_n"])
    opt2 = analysis.retrieval_optimum(toy_s2_closed, xs, xd, p["grid_n"])
    summary = {
        "s2_at_origin": float(grids[2][0, 0]),
        "retrieval": {"m1": {"x_tilde": opt1[0], "loss": opt1[1]},
                      "m2": {"x_tilde": opt2[0], "loss": opt2[1]},
                      "lambda": opt1[1] - opt2[1]},
        "lambda_map": {"max": float(lam.max()), "min": float(lam.min()),
                       "fraction_positive": float(np.mean(lam > 1e-6))},
        "dos_mode_bin": {"m2": h2.mode_bin, "m1": h1.mode_bin},
        "zeta_n4": {str(m): str(zeta(4, m)) for m in range(1, 5)},
    }
    write_json(out / "summary.json", summary, meta)
    return summary


def run_train(cfg, out, meta, args):
    kind = cfg["dataset"]["kind"]
    if kind == "images":
        exp, summary = _image_model(cfg, out, meta)
        sep = heldout_separation(exp.model, exp.measure, _heldout_images(cfg), exp.references)
        summary["heldout"] = {k: sep[k] for k in ("left_closer_to_red", "right_closer_to_blue")}
        model, measure = exp.model, exp.measure
        write_json(out / "dataset.json", {"images": exp.images.to_dict(),
                                          "references": exp.references.to_dict(),
                                          "association": {"left": "red", "right": "blue"}}, meta)
    elif kind in ("blobs", "moons"):
        train_pts, test_pts, measure, result, _ = _planar_model(cfg, out, meta)
        model = result.model
        labels, _ = classify_batch(model, measure, {c: train_pts.of_class(c) for c in (0, 1)},
                                   test_pts.points)
        summary = {"initial_full_loss": result.initial_full_loss,
                   "final_full_loss": result.final_full_loss, "n_evals": result.n_evals,
                   "test_accuracy": float(np.mean(labels == test_pts.labels))}
        write_json(out / "dataset.json", {"train": train_pts.to_dict(), "test": test_pts.to_dict()},
                   meta)
    else:
        raise ConfigError(f"train does not support dataset kind {kind!r}")
    write_json(out / "weights.json", {"model": model.to_dict(), "measure": str(measure)}, meta)
    write_json(out / "summary.json", summary, meta)
    return summary


def run_eval(cfg, out, meta, args):
    if not args.weights:
        raise ConfigError("eval needs --weights pointing to a weights.json written by train")
    if cfg["dataset"]["kind"] != "images":
        raise ConfigError("eval supports the image dataset")
    exp, _ = _image_model(cfg, out, meta, weights=args.weights)
    model, measure = exp.model, exp.measure
    full = loss(model, measure, exp.pairs)

    def s_fn(a, b):
        return similarity_matrix(model, measure, a, b)

    y = np.where(exp.images.labels == LEFT, 1, -1)
    yr = np.where(exp.references.labels == RED, 1, -1)
    report = analysis.goodness_estimate(s_fn, exp.images.points, y, cfg["params"]["gamma"],
                                        exp.references.points, yr)
    landmarks = np.vstack([exp.references.of_class(RED)[:2], exp.references.of_class(BLUE)[:2]])
    phi = analysis.landmark_map(s_fn, landmarks, exp.images.points)
    err, margin = analysis.linear_separator_check(phi, exp.images.labels)
    summary = {"full_loss": full, "goodness": report.to_dict(),
               "landmark_separator": {"n_landmarks": len(landmarks), "error": err,
                                      "margin": margin}}
    write_json(out / "eval.json", summary, meta)
    return summary


def run_classify(cfg, out, meta, args):
    train_pts, test_pts, measure, result, _ = _planar_model(cfg, out, meta)
    model = result.model
    if cfg["params"]["one_shot"]:
        exemplars = {}
        for c in (0, 1):
            P = train_pts.of_class(c)
            exemplars[c] = P[[int(np.argmin(np.linalg.norm(P - P.mean(axis=0), axis=1)))]]
    else:
        exemplars = {c: train_pts.of_class(c) for c in (0, 1)}
    labels, scores = classify_batch(model, measure, exemplars, test_pts.points)
    acc = float(np.mean(labels == test_pts.labels))
    res = cfg["params"]["resolution"]
    grid = decision_grid(model, measure, exemplars, ((0.0, np.pi), (0.0, np.pi)), res)
    gx, gy = np.meshgrid(grid.xs, grid.ys)
    write_csv(out / "decision_grid.csv", ["x", "y", "label", "score_0", "score_1"],
              zip(gx.ravel(), gy.ravel(), grid.labels.ravel(), grid.scores[..., 0].ravel(),
                  grid.scores[..., 1].ravel()), meta)
    write_csv(out / "test_predictions.csv", ["x", "y", "label", "predicted", "score_0", "score_1"],
              zip(test_pts.points[:, 0], test_pts.points[:, 1], test_pts.labels, labels,
                  scores[:, 0], scores[:, 1]), meta)
    plotting.overlay_heatmap(
        out / "decision.svg", grid.scores[..., 0], (0, np.pi, 0, np.pi), meta,
        points=[(test_pts.of_class(0), "class 0", "tab:red"),
                (test_pts.of_class(1), "class 1", "tab:blue"),
                (np.vstack([exemplars[0], exemplars[1]]) if cfg["params"]["one_shot"]
                 else np.empty((0, 2)), "exemplars", "white")],
        title="class-0 probability", xlabel="x1", ylabel="x2", cmap="coolwarm_r")
    summary = {"test_accuracy": acc, "final_full_loss": result.final_full_loss,
               "one_shot": cfg["params"]["one_shot"]}
    write_json(out / "summary.json", summary, meta)
    return summary


def run_transition(cfg, out, meta, args):
    exp, summary = _image_model(cfg, out, meta, weights=args.weights)
    p = cfg["params"]
    curve = transition_scan(exp.model, exp.measure, exp.references.of_class(RED),
                            exp.references.of_class(BLUE), p["deltas"], p["n_repeats"],
                            rng_stream(cfg["seed"], "transition"), eps=p["eps"])
    write_csv(out / "transition.csv", ["delta", "mean_distance", "variance"],
              zip(curve.deltas, curve.mean_distance, curve.variance), meta)
    plotting.line_plot(out / "transition.svg", curve.deltas, {"W1": curve.mean_distance}, meta,
                       errors={"W1": np.sqrt(curve.variance)}, title="red/blue separation",
                       xlabel="delta", ylabel="Wasserstein distance")
    summary["curve"] = curve.to_dict()
    write_json(out / "summary.json", summary, meta)
    return summary


def run_graph_complete(cfg, out, meta, args):
    ds = cfg["dataset"]
    emb = cfg["embedding"]
    problem = gen_graph_problem(ds["n_nodes"], ds["clusters"], 2, ds["observed_fraction"],
                                rng_stream(cfg["seed"], "graph"),
                                spread_range=tuple(ds["spread_range"]))
    result = graph_complete(problem, EmbeddingSpec(emb["n_qubits"], emb["n_layers"], 2),
                            MeasureSpec.parse(cfg["measure"]), _train_config(cfg),
                            threshold=cfg["params"]["threshold"])
    view = problem.observed_view()
    obs = problem.observed_pairs()
    write_csv(out / "edges_observed.csv", ["i", "j", "edge"],
              ((i, j, view[i, j]) for i, j in obs), meta)
    hidden = problem.hidden_pairs()
    scores = result.scores if result.scores is not None else np.zeros_like(view, dtype=float)
    write_csv(out / "edges_predicted.csv", ["i", "j", "score", "predicted", "truth"],
              ((i, j, scores[i, j], result.predicted_adjacency[i, j], problem.adjacency[i, j])
               for i, j in hidden), meta)
    plotting.heatmap(out / "observed.svg", np.where(view < 0, 0.5, view), None, meta,
                     title="observed adjacency (grey: hidden)", cmap="gray_r", colorbar=False)
    plotting.heatmap(out / "completed.svg", result.predicted_adjacency, None, meta,
                     title="completed adjacency", cmap="gray_r", colorbar=False)
    summary = {"accuracy_unobserved": result.accuracy_unobserved,
               "n_observed_pairs": int(len(obs)), "n_hidden_pairs": int(len(hidden)),
               "threshold": result.threshold}
    write_json(out / "graph.json", {**summary, "problem": problem.to_dict(),
                                    "predicted_adjacency": result.predicted_adjacency}, meta)
    return summary


def run_generate(cfg, out, meta, args):
    exp, summary = _image_model(cfg, out, meta, weights=args.weights)
    p = cfg["params"]
    heldout = _heldout_images(cfg)
    x_s = heldout.points[heldout.labels != LEFT][0]
    res = p["resolution"]
    g = np.linspace(0.0, np.pi, res)
    gx, gy = np.meshgrid(g, g)
    grid = np.column_stack([gx.ravel(), gy.ravel()])
    cost = 1.0 - similarity_matrix(exp.model, exp.measure, [x_s], grid)[0].reshape(res, res)
    gen = generate(exp.model, exp.measure, x_s, p["start"], p["steps"], p["learning_rate"])
    write_csv(out / "landscape.csv", ["x1", "x2", "cost"], zip(grid[:, 0], grid[:, 1], cost.ravel()),
              meta)
    write_csv(out / "trajectory.csv", ["step", "x1", "x2", "cost"],
              ((k, *gen.trajectory[k], gen.objective[k]) for k in range(len(gen.objective))), meta)
    plotting.overlay_heatmap(
        out / "generate.svg", cost, (0, np.pi, 0, np.pi), meta,
        points=[(exp.references.of_class(RED), "red", "tab:red"),
                (exp.references.of_class(BLUE), "blue", "tab:blue")],
        paths=[(gen.trajectory, "descent", "white")],
        title="1 - S(x_s, x~) for a right image", xlabel="x~1", ylabel="x~2", cmap="magma")
    centers = [exp.references.of_class(c).mean(axis=0) for c in (RED, BLUE)]
    nearest = ["red", "blue"][int(np.argmin([np.linalg.norm(gen.x - c) for c in centers]))]
    summary.update({"x_s": x_s, "final_x": gen.x, "initial_cost": gen.objective[0],
                    "final_cost": gen.objective[-1], "steps": len(gen.objective) - 1,
                    "nearest_cluster": nearest, "message": gen.message})
    write_json(out / "summary.json", summary, meta)
    return summary


def run_partial_study(cfg, out, meta, args):
    p = cfg["params"]
    emb = cfg["embedding"]
    ds = cfg["dataset"]
    rows = partial_measurement_study(p["dims"], p["m_choices"], p["n_instances"],
                                     _train_config(cfg), emb["n_qubits"], emb["n_layers"],
                                     n_points=ds["n_points"], spread=ds["spread"])
    write_csv(out / "partial_study.csv", ["dim", "m", "instance", "min_loss"],
              ((r["dim"], r["m"], k, v) for r in rows for k, v in enumerate(r["min_losses"])), meta)
    write_csv(out / "partial_summary.csv",
              ["dim", "m", "mean_min_loss", "variance", "mean_final_loss"],
              ((r["dim"], r["m"], r["mean_min_loss"], r["variance"], r["mean_final_loss"])
               for r in rows), meta)
    plotting.scatter_plot(out / "partial_study.svg",
                          [([r["m"]] * len(r["min_losses"]), r["min_losses"], f"dim {r['dim']}, m={r['m']}")
                           for r in rows], meta, title="minimum training loss",
                          xlabel="measured qubits m", ylabel="loss")
    summary = {"rows": [{k: v for k, v in r.items() if k != "min_losses"} for r in rows]}
    write_json(out / "summary.json", summary, meta)
    return summary


def run_batch_study(cfg, out, meta, args):
    train_pts, _, measure, result, pairs = _planar_model(cfg, out, meta)
    p = cfg["params"]
    rows = batch_loss_spread(result.model, measure, pairs, p["batch_sizes"], p["n_draws"],
                             rng_stream(cfg["seed"], "batch-study"))
    write_csv(out / "batch_study.csv", ["batch_size", "draw", "loss"],
              ((r["batch_size"], k, v) for r in rows for k, v in enumerate(r["samples"])), meta)
    write_csv(out / "batch_summary.csv", ["batch_size", "mean", "std", "full_loss"],
              ((r["batch_size"], r["mean"], r["std"], r["full_loss"]) for r in rows), meta)
    plotting.scatter_plot(out / "batch_study.svg",
                          [([r["batch_size"]] * len(r["samples"]), r["samples"], "batch loss")
                           for r in rows[:1]] +
                          [([r["batch_size"]] * len(r["samples"]), r["samples"], None)
                           for r in rows[1:]],
                          meta, title="batch loss at trained weights", xlabel="batch size",
                          ylabel="loss", logx=True)
    summary = {"full_loss": rows[0]["full_loss"],
               "rows": [{k: v for k, v in r.items() if k != "samples"} for r in rows]}
    write_json(out / "summary.json", summary, meta)
    return summary


_RUNNERS = {
    "toy-analysis": run_toy_analysis,
    "train": run_train,
    "eval": run_eval,
    "classify": run_classify,
    "transition": run_transition,
    "graph-complete": run_graph_complete,
    "generate": run_generate,
    "partial-study": run_partial_study,
    "batch-study": run_batch_study,
}


# -- argument handling ------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="gqsim", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="experiment", required=True)
    for name in EXPERIMENTS:
        sp = sub.add_parser(name, help=f"run the {name} experiment")
        sp.add_argument("--config", help="JSON config file")
        sp.add_argument("--seed", type=int, help="master seed")
        sp.add_argument("--output", help="output directory")
        sp.add_argument("--measure", help="full | swap:m | proj:m")
        sp.add_argument("--quiet", action="store_true", help="print nothing on success")
        if name in ("eval", "transition", "generate"):
            sp.add_argument("--weights", help="weights.json from a previous train run")
    schema = sub.add_parser("schema", help="print the config JSON schema")
    schema.add_argument("--quiet", action="store_true")
    return parser


def resolve_config(args) -> dict:
    cfg = default_config(args.experiment)
    if args.config:
        try:
            user = load_config(args.config)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(user, dict):
            raise ConfigError("config must be a JSON object")
        if user.get("experiment", args.experiment) != args.experiment:
            raise ConfigError(f"config is for {user['experiment']!r}, not {args.experiment!r}")
        cfg = merge(cfg, user)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.output is not None:
        cfg["output_dir"] = args.output
    if args.measure is not None:
        cfg["measure"] = args.measure
    return cfg


def _fail(kind: str, message: str, details=None, code: int = 1) -> int:
    payload = {"error": kind, "message": message}
    if details:
        payload["details"] = details
    print(json.dumps(payload, sort_keys=True), file=sys.stderr)
    return code


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.ERROR if args.quiet else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.experiment == "schema":
        print(json.dumps(CONFIG_SCHEMA, indent=2, sort_keys=True))
        return 0
    try:
        cfg = resolve_config(args)
    except ConfigError as exc:
        return _fail("config", str(exc), code=2)
    errors = validate(cfg)
    if not errors:
        try:
            n = cfg["embedding"]["n_qubits"]
            MeasureSpec.parse(cfg["measure"]).prefix(n)
        except ValueError as exc:
            errors.append(f"measure: {exc}")
    if errors:
        return _fail("config", "configuration does not match the schema", errors, code=2)

    out = Path(cfg["output_dir"])
    out.mkdir(parents=True, exist_ok=True)
    meta = {"config_sha256": config_hash(cfg), "seed": cfg["seed"], "experiment": args.experiment}
    write_json(out / "config.json", {"config": {k: v for k, v in cfg.items() if k != "output_dir"}},
               meta)
    try:
        summary = _RUNNERS[args.experiment](cfg, out, meta, args)
    except ConfigError as exc:
        return _fail("config", str(exc), code=2)
    except (ValueError, FloatingPointError, OSError, KeyError) as exc:
        return _fail(type(exc).__name__, str(exc))
    if not args.quiet:
        print(json.dumps({"experiment": args.experiment, "output_dir": str(out),
                          "summary": to_jsonable(summary)}, indent=2, sort_keys=True))
    return 0


if __name__ == "__main__":
    sys.exit(main())
