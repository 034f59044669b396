# Copyright 2026 The rsbench Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
# http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Python interface to the rsbench recommender benchmarking core."""

import json

from ._core import (
    CsrMatrix,
    Dataset,
    Error,
    EvalSplit,
    FittedModel,
    InvalidArgument,
    IoError,
    NumericError,
    __version__,
    binarize,
    holdout_split,
    kcore_filter,
    load_dataset,
    load_model,
    map_at_k,
    matrix_from_triplets,
    model_names,
    ndcg_at_k,
    precision_at_k,
    read_ratings,
    recall_at_k,
    run_cli,
    subsample,
)
from . import _core


def default_config(model):
    """Published default hyperparameters for `model` as a dict."""
    return json.loads(_core.default_config_json(model))


def fit(model, train, **config):
    """Fits `model` on a CsrMatrix; keyword arguments override the defaults."""
    return _core._fit(model, train, json.dumps(config) if config else "")


def evaluate(model, split, ks=(5, 10, 20), metrics=()):
    """Returns {metric: {k: value}} averaged over evaluated users."""
    report = json.loads(_core._evaluate(model, split, list(ks), list(metrics)))
    return {m: {int(k): v for k, v in by_k.items()} for m, by_k in report["values"].items()}


def measure_training(model, train, repetitions=3, **config):
    """Fit time (median seconds) and peak resident bytes for one model."""
    return json.loads(
        _core._measure_training(model, train, json.dumps(config) if config else "", repetitions)
    )


def model_config(fitted):
    return json.loads(fitted.config_json)


__all__ = [name for name in dir() if not name.startswith("_")]
