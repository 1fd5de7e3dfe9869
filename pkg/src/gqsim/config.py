"""Experiment configuration: JSON schema, per-experiment defaults, merging."""

from __future__ import annotations

import copy
import json
from pathlib import Path

import jsonschema

__all__ = ["EXPERIMENTS", "CONFIG_SCHEMA", "default_config", "merge", "validate", "load_config"]

EXPERIMENTS = ("toy-analysis", "train", "eval", "classify", "transition", "graph-complete",
               "generate", "partial-study", "batch-study")

_num = {"type": "number"}
_int = {"type": "integer"}
_pos_int = {"type": "integer", "minimum": 1}

CONFIG_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "gqsim experiment configuration",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "experiment": {"enum": list(EXPERIMENTS)},
        "seed": {"type": "integer", "minimum": 0, "maximum": 2 ** 63 - 1},
        "output_dir": {"type": "string", "minLength": 1},
        "measure": {"type": "string", "pattern": "^(full|(swap|proj):[1-9][0-9]*)$"},
        "embedding": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"n_qubits": {"type": "integer", "minimum": 1, "maximum": 10},
                           "n_layers": _pos_int},
        },
        "train": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "batch_size": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "max_evals": _pos_int,
                "optimizer": {"enum": ["cobyla", "nelder-mead"]},
                "rho_begin": {"type": "number", "exclusiveMinimum": 0},
                "rho_end": {"type": "number", "exclusiveMinimum": 0},
                "initial_weights": {"enum": ["uniform", "zeros"]},
                "resample": {"enum": ["auto", "none", "reduce", "fail"]},
            },
        },
        "dataset": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["images", "blobs", "moons", "graph"]},
                "n_points": _pos_int,
                "n_references": _pos_int,
                "n_heldout": {"type": "integer", "minimum": 2, "multipleOf": 2},
                "spread": {"type": "number", "minimum": 0},
                "noise": {"type": "number", "minimum": 0},
                "n_nodes": {"type": "integer", "minimum": 2},
                "clusters": _pos_int,
                "observed_fraction": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
                "spread_range": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
            },
        },
        "params": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "grid_n": {"type": "integer", "minimum": 10},
                "heatmap_n": {"type": "integer", "minimum": 2},
                "n_bins": _pos_int,
                "x_s": _num,
                "x_d": _num,
                "lambda_grid": {"type": "integer", "minimum": 2},
                "gamma": _num,
                "deltas": {"type": "array", "items": {"type": "number", "minimum": 0, "maximum": 1},
                           "minItems": 1},
                "n_repeats": _pos_int,
                "eps": {"type": "number", "minimum": 0},
                "resolution": {"type": "integer", "minimum": 2},
                "one_shot": {"type": "boolean"},
                "threshold": {"type": "number", "minimum": 0, "maximum": 1},
                "steps": {"type": "integer", "minimum": 0},
                "learning_rate": {"type": "number", "exclusiveMinimum": 0},
                "start": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                "dims": {"type": "array", "items": _pos_int, "minItems": 1},
                "m_choices": {"type": "array", "items": _pos_int, "minItems": 1},
                "n_instances": _pos_int,
                "batch_sizes": {"type": "array", "items": {"type": "integer", "minimum": 2},
                                "minItems": 1},
                "n_draws": {"type": "integer", "minimum": 2},
            },
        },
    },
    "required": ["experiment", "seed"],
}

_IMAGES = {"kind": "images", "n_points": 100, "n_references": 100, "n_heldout": 20, "spread": 0.07}
_EMBED = {"n_qubits": 4, "n_layers": 2}
_TRAIN = {"batch_size": 80, "max_evals": 1500, "optimizer": "cobyla", "rho_begin": 1.0,
          "rho_end": 1e-3, "initial_weights": "uniform", "resample": "auto"}

_DEFAULTS = {
    "toy-analysis": {"params": {"grid_n": 200, "heatmap_n": 101, "n_bins": 50, "x_s": 0.3,
                                "x_d": 0.5, "lambda_grid": 50}},
    "train": {"dataset": _IMAGES, "measure": "swap:2"},
    "eval": {"dataset": _IMAGES, "measure": "swap:2", "params": {"gamma": 0.1}},
    "classify": {"dataset": {"kind": "blobs", "n_points": 200, "spread": 0.6, "noise": 0.1},
                 "measure": "full", "params": {"resolution": 60, "one_shot": True}},
    "transition": {"dataset": _IMAGES, "measure": "swap:2",
                   "params": {"deltas": [0.0, 0.25, 0.5, 0.75, 1.0], "n_repeats": 20, "eps": 0.1}},
    "graph-complete": {"dataset": {"kind": "graph", "n_nodes": 30, "clusters": 2,
                                   "observed_fraction": 0.1, "spread_range": [0.5, 1.5]},
                       "measure": "full", "params": {"threshold": 0.5}},
    "generate": {"dataset": _IMAGES, "measure": "swap:2",
                 "params": {"steps": 100, "learning_rate": 0.5, "resolution": 40,
                            "start": [0.5, 0.5]}},
    "partial-study": {"dataset": {"kind": "images", "n_points": 40, "spread": 0.1},
                      "params": {"dims": [2], "m_choices": [1, 4], "n_instances": 10}},
    "batch-study": {"dataset": {"kind": "blobs", "n_points": 100, "spread": 0.6},
                    "measure": "full",
                    "params": {"batch_sizes": [10, 20, 40, 80, 160, 320], "n_draws": 100}},
}


def merge(base: dict, override: dict) -> dict:
    """Recursive dict merge; ``override`` wins, lists are replaced whole."""
    out = copy.deepcopy(base)
    for k, v in override.items():
        if isinstance(v, dict) and isinstance(out.get(k), dict):
            out[k] = merge(out[k], v)
        else:
            out[k] = copy.deepcopy(v)
    return out


def default_config(experiment: str) -> dict:
    if experiment not in EXPERIMENTS:
        raise ValueError(f"unknown experiment {experiment!r}")
    base = {"experiment": experiment, "seed": 0, "output_dir": f"out/{experiment}",
            "measure": "full", "embedding": dict(_EMBED), "train": dict(_TRAIN)}
    return merge(base, _DEFAULTS[experiment])


def validate(config: dict) -> list:
    """Return a list of schema violations (empty when valid)."""
    validator = jsonschema.Draft202012Validator(CONFIG_SCHEMA)
    errors = []
    for err in sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path)):
        where = "/".join(str(p) for p in err.absolute_path) or "<root>"
        errors.append(f"{where}: {err.message}")
    train = config.get("train", {})
    if not errors and train.get("rho_begin", 1) <= train.get("rho_end", 0):
        errors.append("train: rho_begin must exceed rho_end")
    return errors


def load_config(path) -> dict:
    with open(Path(path)) as fh:
        return json.load(fh)
