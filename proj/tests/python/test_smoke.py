# Project RetroSyn - Copyright 2026 RetroSyn Developers.
# SPDX-License-Identifier: Apache-2.0
"""Smoke tests for the Python bindings."""

import os

import pytest

import retrosyn

FIXTURES = os.environ.get(
    "RETROSYN_FIXTURE_DIR",
    os.path.join(os.path.dirname(__file__), "..", "fixtures"),
)

TINY_CONFIG = """
hidden=16
mpn_steps=2
conv_channels=16,8
conv_kernel=3
score_hidden=8
embed=8
dropout=0
lr=0.003
epochs=40
seed=5
"""


def fixture_lines(limit):
    with open(os.path.join(FIXTURES, "reactions.txt")) as handle:
        return [line.strip() for line in handle][:limit]


def test_canonical_smiles_strips_maps_and_is_stable():
    a = retrosyn.canonical_smiles("[CH3:1][C:2](=[O:3])[OH:4]")
    b = retrosyn.canonical_smiles("OC(C)=O")
    assert a == b
    assert ":" not in a


def test_isomorphism_and_counts():
    assert retrosyn.is_isomorphic("CCO", "OCC")
    assert not retrosyn.is_isomorphic("CCO", "CCN")
    assert retrosyn.num_atoms("CCO") == 3
    assert retrosyn.num_bonds("c1ccccc1") == 6
    assert retrosyn.num_edit_candidates("CCO") == 4 * 2 + 3


def test_parse_error_is_a_value_error():
    with pytest.raises(ValueError):
        retrosyn.canonical_smiles("C(((")


def test_preprocess_builds_records_and_vocab():
    data = retrosyn.preprocess(fixture_lines(12))
    assert data.stats["ok"] == 12
    assert len(data.records) == 12
    assert len(data.vocab) >= 4
    record = data.records[0]
    assert record.single_edit()
    assert "DELETE" in record.edits or "b:" in record.edits
    truth = retrosyn.ground_truth_reactants(record, data.vocab)
    assert "." in truth


def test_train_predict_evaluate_roundtrip(tmp_path):
    data = retrosyn.preprocess(fixture_lines(8))
    model = retrosyn.Model(TINY_CONFIG, data.vocab)
    stats = model.fit(data.records)
    assert stats["epoch_loss"][-1] < stats["epoch_loss"][0]
    assert stats["synthon_multi_edit_records"] == 0

    truth = retrosyn.ground_truth_reactants(data.records[0], data.vocab)
    predictions = model.predict(data.records[0].product_smiles, width=5)
    assert predictions
    assert predictions[0][0] == truth

    ckpt = tmp_path / "model.ckpt"
    model.save(str(ckpt))
    restored = retrosyn.Model.load(str(ckpt), data.vocab)
    assert restored.predict(data.records[0].product_smiles, width=5) == predictions


def test_records_file_roundtrip(tmp_path):
    data = retrosyn.preprocess(fixture_lines(6))
    path = tmp_path / "records.txt"
    retrosyn.save_records(str(path), data.records)
    loaded = retrosyn.load_records(str(path))
    assert len(loaded) == 6
    assert loaded[0].product_smiles == data.records[0].product_smiles
    assert loaded[0].lg_indices == data.records[0].lg_indices
