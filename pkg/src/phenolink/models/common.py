"""Shared model utilities: input checks, the uniform scoring surface, and
versioned JSON serialization for every family."""

from __future__ import annotations

import json
from dataclasses import asdict
from pathlib import Path

import numpy as np

MODEL_FORMAT = "phenolink-model"
MODEL_FORMAT_VERSION = 1


def sigmoid(z: np.ndarray | float) -> np.ndarray | float:
    """Numerically stable logistic function."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out if out.ndim else float(out)


def check_feature_matrix(X: np.ndarray, expected_dim: int | None = None) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"feature matrix must be 2-d, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError("feature matrix contains non-finite values")
    if expected_dim is not None and X.shape[1] != expected_dim:
        raise ValueError(
            f"feature dimension mismatch: model expects {expected_dim}, got {X.shape[1]}"
        )
    return X


def check_binary_labels(y: np.ndarray, n_rows: int) -> np.ndarray:
    y = np.asarray(y)
    if len(y) != n_rows:
        raise ValueError("label count must equal row count")
    if not np.all(np.isin(y, (0, 1))):
        raise ValueError("labels must be binary 0/1")
    return y.astype(np.float64)


def predict_proba(model, X: np.ndarray) -> np.ndarray:
    """Score rows with any trained family; pure and row-order invariant."""
    from .linear import LinearModel
    from .mlp import MlpModel
    from .trees import TreeEnsemble

    if isinstance(model, LinearModel):
        return model.predict_proba(X)
    if isinstance(model, MlpModel):
        return model.predict_proba(X)
    if isinstance(model, TreeEnsemble):
        return model.predict_proba(X)
    raise TypeError(f"not a trained model: {type(model).__name__}")


def save_model(model, path: str | Path, config: dict | None = None) -> None:
    """Write a versioned JSON document; floats survive the round trip
    exactly (shortest-repr encoding)."""
    from .linear import LinearModel
    from .mlp import MlpModel
    from .trees import TreeEnsemble

    if isinstance(model, LinearModel):
        family, params = "logistic", model.to_dict()
    elif isinstance(model, MlpModel):
        family, params = "mlp", model.to_dict()
    elif isinstance(model, TreeEnsemble):
        family = "forest" if model.mode == "bagging" else f"gbdt-{model.growth}"
        params = model.to_dict()
    else:
        raise TypeError(f"not a trained model: {type(model).__name__}")
    doc = {
        "format": MODEL_FORMAT,
        "version": MODEL_FORMAT_VERSION,
        "family": family,
        "config": config or {},
        "params": params,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


def load_model(path: str | Path):
    """Inverse of :func:`save_model`; returns (model, config dict)."""
    from .linear import LinearModel
    from .mlp import MlpModel
    from .trees import TreeEnsemble

    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if doc.get("format") != MODEL_FORMAT:
        raise ValueError(f"not a {MODEL_FORMAT} file: {path}")
    if doc.get("version") != MODEL_FORMAT_VERSION:
        raise ValueError(f"unsupported model format version {doc.get('version')}")
    family = doc["family"]
    params = doc["params"]
    if family == "logistic":
        model = LinearModel.from_dict(params)
    elif family == "mlp":
        model = MlpModel.from_dict(params)
    elif family in ("forest", "gbdt-level", "gbdt-leaf"):
        model = TreeEnsemble.from_dict(params)
    else:
        raise ValueError(f"unknown model family {family!r}")
    return model, doc.get("config", {})
