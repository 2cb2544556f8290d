"""Smoke tests for the Python bindings."""

import json
import os
import tempfile

import pytest

scirel = pytest.importorskip("scirel")


def test_parse_brat_roundtrip():
    text = "gold is a metal"
    ann = "T1\tMaterial 0 4\tgold\nT2\tMaterial 10 15\tmetal\nR1\tHyponym-of Arg1:T1 Arg2:T2\n"
    doc = scirel.parse_brat(text, ann, "d")
    assert [e.id for e in doc.entities] == ["T1", "T2"]
    assert doc.entities[0].surface == "gold"
    assert doc.gold[0].label == "Hyponym-of"

    reparsed = scirel.parse_brat(text, scirel.to_standoff(doc), "d")
    assert [e.surface for e in reparsed.entities] == ["gold", "metal"]


def test_parse_errors_are_value_errors():
    with pytest.raises(ValueError):
        scirel.parse_brat("ab", "T1\tTask 0 99\tab")


def test_tokenize_offsets():
    tokens = scirel.tokenize("high-purity Sn")
    assert [t.surface for t in tokens] == ["high", "-", "purity", "Sn"]
    assert tokens[3].start == 12


def test_split_sentences():
    assert len(scirel.split_sentences("A dog is an animal. It barks.")) == 2
    assert len(scirel.split_sentences("See Fig. 2 for details.")) == 1


def test_candidates_and_expansion():
    text = "aa is a kind of bb"
    ann = "T1\tMaterial 0 2\taa\nT2\tMaterial 16 18\tbb\nR1\tHyponym-of Arg1:T1 Arg2:T2\n"
    doc = scirel.parse_brat(text, ann, "d")
    candidates = scirel.generate_candidates(doc)
    assert len(candidates) == 1
    assert candidates[0].gold == "Hyponym-of"

    pairs = scirel.expand_training(candidates[0], "any_order")
    assert pairs == [("T1", "T2", "Hyponym-of"), ("T2", "T1", "Hypernym-of")]


def test_is_abbreviation():
    assert scirel.is_abbreviation(["transmission", "electron", "microscopy"], "TEM")
    assert not scirel.is_abbreviation(["gold"], "gold")


def test_score_identity():
    rels = [("d", "T1", "T2", "Synonym-of"), ("d", "T3", "T4", "Hyponym-of")]
    report = scirel.score(rels, rels)
    assert report["micro"]["f1"] == 1.0
    assert report["Synonym-of"]["tp"] == 1


def test_grad_check_small_model():
    report = scirel.grad_check(seed=1, eps=1e-5)
    assert report.max_rel_err < 1e-4
    assert any(name == "conv_filters" for name, _ in report.per_array)


def test_train_and_predict(tmp_path):
    data = tmp_path / "data"
    data.mkdir()
    for i in range(6):
        a, b = f"alpha{i}", f"beta{i}"
        if i % 3 == 0:
            text = f"{a} is a kind of {b} material."
            rel = f"R1\tHyponym-of Arg1:T1 Arg2:T2\n"
        elif i % 3 == 1:
            text = f"{a} is also called {b} here."
            rel = f"R1\tSynonym-of Arg1:T1 Arg2:T2\n"
        else:
            text = f"{a} was measured near {b} today."
            rel = ""
        ann = (
            f"T1\tMaterial 0 {len(a)}\t{a}\n"
            f"T2\tMaterial {text.index(b)} {text.index(b) + len(b)}\t{b}\n" + rel
        )
        (data / f"doc{i}.txt").write_text(text)
        (data / f"doc{i}.ann").write_text(ann)

    config = json.dumps(
        {
            "word_dim": 12,
            "feat_dim": 4,
            "n_filters": 8,
            "filter_height": 3,
            "p_drop": 0.0,
            "lr": 0.2,
            "max_epochs": 30,
            "patience": 30,
            "seed": 3,
        }
    )
    ckpt = tmp_path / "model.ckpt"
    result = scirel.train(str(data), str(data), config, str(ckpt))
    assert ckpt.exists()
    assert len(result["dev_f1"]) >= 1

    doc0_text = (data / "doc0.txt").read_text()
    doc0_ann = (data / "doc0.ann").read_text()
    entity_lines = "".join(line + "\n" for line in doc0_ann.splitlines() if line.startswith("T"))
    predictions = scirel.predict(str(ckpt), doc0_text, entity_lines, "doc0")
    assert isinstance(predictions, list)
    for arg1, arg2, label, prob in predictions:
        assert label in {"Synonym-of", "Hyponym-of"}
        assert 0.0 <= prob <= 1.0
