# Copyright 2026 The localeq Authors
# SPDX-License-Identifier: Apache-2.0
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

import json
import os
from pathlib import Path

import numpy as np
import pytest

import pylocaleq as lq

SOURCE_DIR = Path(os.environ.get("LOCALEQ_SOURCE_DIR", Path(__file__).resolve().parents[2]))
TINY = SOURCE_DIR / "tests" / "cli" / "tiny.json"


def test_emd_worked_example():
    assert lq.emd([0.8, 0.2], [0.5, 0.5]) == pytest.approx(0.3, abs=1e-15)
    assert lq.emd([0.75, 0.25], [0.5, 0.5]) == 0.25
    assert lq.emd([1.0, 0.0], [0.0, 1.0]) == 1.0


def test_recall_at_precision():
    op = lq.recall_at_precision([0.9, 0.8, 0.1], [True, True, False], 0.8)
    assert op["attainable"]
    assert op["recall"] == 1.0
    assert op["threshold"] == 0.8
    op = lq.recall_at_precision([0.9, 0.8], [False, True], 0.8)
    assert not op["attainable"]
    assert op["threshold"] > 1.0


def test_grad_check():
    assert lq.grad_check(1) < 1e-4


def test_default_config_matches_shipped():
    shipped = json.loads((SOURCE_DIR / "configs" / "bench.json").read_text())
    shipped.pop("format")
    assert json.loads(lq.default_config()) == shipped


@pytest.fixture(scope="module")
def tiny_model(tmp_path_factory):
    out = tmp_path_factory.mktemp("world")
    summary = lq.synth(str(out), config=str(TINY))
    assert summary["locales"] == ["US", "DE", "UK", "JP"]
    assert summary["click_records"] > 0
    # Synthetic gold doubles as training and validation data here.
    model = lq.train("cons-aware", str(out / "gold.jsonl"), str(out / "gold.jsonl"),
                     str(out / "catalog.json"), config=str(TINY))
    return model, out


def test_train_predict_roundtrip(tiny_model, tmp_path):
    model, _ = tiny_model
    assert model.variant == "cons-aware"
    assert model.n_parameters > 0
    s = model.scores(["red mug", "red mug"], ["US", "ZZ"])
    assert s.shape == (2, len(model.product_types))
    assert np.all((s > 0) & (s < 1))

    p = model.predict("red mug", "US", 0.0)
    assert len(p["product_types"]) == len(model.product_types)
    scores = [x[1] for x in p["product_types"]]
    assert scores == sorted(scores, reverse=True)
    assert model.predict("red mug", "US", 1.0)["refused"]
    assert not model.predict("red mug", "ZZ")["locale_known"]

    path = tmp_path / "m.lqpt"
    model.save(str(path))
    loaded = lq.Model.load(str(path))
    assert loaded.version == model.version
    assert np.array_equal(loaded.scores(["red mug"], ["DE"]), model.scores(["red mug"], ["DE"]))


def test_errors(tmp_path):
    bad = tmp_path / "bad.lqpt"
    bad.write_bytes(b"garbage")
    with pytest.raises(ValueError):
        lq.Model.load(str(bad))
    with pytest.raises(ValueError):
        lq.emd([1.0], [0.5, 0.5])
