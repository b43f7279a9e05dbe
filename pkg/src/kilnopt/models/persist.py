"""Versioned text serialization for fitted regressors.

Layout: a JSON document with a fixed header (``format``, ``version``), the
originating spec, the feature schema, and a family-specific ``state`` block
holding flattened coefficients or tree arrays. Floats are emitted with
shortest round-trip formatting, so load(save(m)) reproduces every parameter
bit for bit.
"""

from __future__ import annotations

import json

import numpy as np

from .linear import LinearModel
from .ensemble import GradientBoostingModel, RandomForestModel
from .tree import Tree

FORMAT_NAME = "kilnopt-regressor"
FORMAT_VERSION = 1


class ModelFormatError(ValueError):
    pass


def _tree_state(tree: Tree) -> dict:
    return {
        "feature": tree.feature.tolist(),
        "threshold": tree.threshold.tolist(),
        "left": tree.left.tolist(),
        "right": tree.right.tolist(),
        "value": tree.value.tolist(),
    }


def _tree_from_state(state: dict) -> Tree:
    return Tree(
        feature=np.asarray(state["feature"], dtype=np.int64),
        threshold=np.asarray(state["threshold"], dtype=float),
        left=np.asarray(state["left"], dtype=np.int64),
        right=np.asarray(state["right"], dtype=np.int64),
        value=np.asarray(state["value"], dtype=float),
    )


def save_model(model, path, spec_fields: dict | None = None) -> None:
    if isinstance(model, LinearModel):
        kind = "linear"
        state = {"weights": model.weights.tolist(), "intercept": model.intercept}
    elif isinstance(model, GradientBoostingModel):
        kind = "gbt"
        state = {
            "base_score": model.base_score,
            "learning_rate": model.learning_rate,
            "trees": [_tree_state(t) for t in model.trees],
            "train_losses": list(model.train_losses),
        }
    elif isinstance(model, RandomForestModel):
        kind = "forest"
        state = {"trees": [_tree_state(t) for t in model.trees]}
    else:
        raise ModelFormatError(f"cannot serialize {type(model).__name__}")

    doc = {
        "format": FORMAT_NAME,
        "version": FORMAT_VERSION,
        "kind": kind,
        "spec": spec_fields or {},
        "schema": list(model.schema) if model.schema else None,
        "state": state,
    }
    with open(path, "w") as fh:
        json.dump(doc, fh)


def load_model(path):
    with open(path) as fh:
        doc = json.load(fh)
    if doc.get("format") != FORMAT_NAME:
        raise ModelFormatError(f"not a {FORMAT_NAME} file")
    if doc.get("version") != FORMAT_VERSION:
        raise ModelFormatError(f"unsupported format version {doc.get('version')!r}")
    schema = tuple(doc["schema"]) if doc.get("schema") else None
    state = doc["state"]
    kind = doc.get("kind")
    if kind == "linear":
        return LinearModel(
            np.asarray(state["weights"], dtype=float), float(state["intercept"]), schema
        )
    if kind == "gbt":
        return GradientBoostingModel(
            base_score=float(state["base_score"]),
            learning_rate=float(state["learning_rate"]),
            trees=[_tree_from_state(t) for t in state["trees"]],
            train_losses=[float(v) for v in state.get("train_losses", [])],
            schema=schema,
        )
    if kind == "forest":
        return RandomForestModel([_tree_from_state(t) for t in state["trees"]], schema)
    raise ModelFormatError(f"unknown model kind {kind!r}")
