from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from agendaframe.corpus import FRAMES, Document
from agendaframe.evaluation import (
    EvaluationError,
    _fit_logreg,
    baseline_logreg,
    cross_validate,
    eval_all_frames_f1,
    eval_primary_accuracy,
    intruder_generate,
    intruder_score,
    kfold_split,
    read_intruder_sets,
    read_responses,
    write_intruder_scores,
    write_intruder_sets,
    write_intruder_sheet,
)
from agendaframe.lexicon import ScoredLexicon

D = date(2010, 1, 1)


def ids(n):
    return [f"d{i:02d}" for i in range(n)]


def test_singleton_folds():
    split = kfold_split(ids(10), 10)
    assert sorted(len(split.fold(i)) for i in range(10)) == [1] * 10


def test_same_seed_same_split():
    assert kfold_split(ids(30), 5, seed=9) == kfold_split(ids(30), 5, seed=9)
    assert kfold_split(ids(30), 5, seed=9) != kfold_split(ids(30), 5, seed=10)


def test_eleven_into_ten():
    split = kfold_split(ids(11), 10)
    assert sorted(len(split.fold(i)) for i in range(10)) == [1] * 9 + [2]


@given(st.integers(1, 60), st.integers(1, 12), st.integers(0, 1000))
def test_folds_partition_and_balance(n, k, seed):
    if k > n:
        with pytest.raises(EvaluationError):
            kfold_split(ids(n), k, seed)
        return
    split = kfold_split(ids(n), k, seed)
    sizes = [len(split.fold(i)) for i in range(k)]
    assert sum(sizes) == n
    assert max(sizes) - min(sizes) <= 1
    for i in range(k):
        train, test = split.train_test(i)
        assert set(train).isdisjoint(test)
        assert len(train) + len(test) == n


def test_primary_accuracy_examples():
    gold = {"a": "Economic", "b": "Economic", "c": "Political", "d": "Morality"}
    assert eval_primary_accuracy(dict(gold), gold) == 1.0
    assert eval_primary_accuracy({d: "Other" for d in gold}, {d: "Economic" for d in gold}) == 0.0
    assert eval_primary_accuracy({**gold, "d": "Economic"}, gold) == 0.75
    with pytest.raises(EvaluationError):
        eval_primary_accuracy({"a": "Economic"}, gold)


def test_frame_f1_examples():
    gold = {"a": {"Economic"}, "b": {"Political"}, "c": {"Economic", "Political"}}
    perfect = eval_all_frames_f1(gold, gold)
    assert all(v.f1 == 1.0 for v in perfect.values())
    never = eval_all_frames_f1({d: set() for d in gold}, gold, ["Economic"])
    assert never["Economic"].f1 == 0.0
    # one true positive, one false positive, one false negative
    pred = {"a": {"Economic"}, "b": {"Economic"}, "c": set()}
    r = eval_all_frames_f1(pred, gold, ["Economic"])["Economic"]
    assert (r.precision, r.recall, r.f1) == (0.5, 0.5, 0.5)


def _doc(i, tokens):
    return Document(f"d{i}", D, tokens)


def test_logreg_separable_toy():
    rng = np.random.default_rng(0)
    filler = ["rain", "sun", "wind", "snow", "cloud"]
    train, labels = [], {}
    for i in range(40):
        toks = list(rng.choice(filler, 4))
        if i % 2:
            toks.append("tax")
        train.append(_doc(i, toks))
        labels[f"d{i}"] = {"Economic"} if i % 2 else set()
    test = [_doc(100 + i, list(rng.choice(filler, 4)) + (["tax"] if i % 2 else [])) for i in range(10)]
    gold = {d.id: ({"Economic"} if "tax" in d.tokens else set()) for d in test}
    pred = baseline_logreg(train, labels, test, ["Economic"])
    assert eval_all_frames_f1(pred, gold, ["Economic"])["Economic"].f1 == 1.0


def test_logreg_without_feature_overlap_predicts_intercept_class():
    train = [_doc(i, ["tax"]) for i in range(3)] + [_doc(3, ["vote"])]
    labels = {"d0": {"Economic"}, "d1": {"Economic"}, "d2": {"Economic"}, "d3": set()}
    test = [_doc(10, ["unseen"]), _doc(11, ["other"])]
    assert baseline_logreg(train, labels, test, ["Economic"]) == {"d10": {"Economic"}, "d11": {"Economic"}}


@settings(deadline=None)
@given(st.integers(0, 500))
def test_logreg_reaches_stationary_point(seed):
    rng = np.random.default_rng(seed)
    X = (rng.random((30, 6)) < 0.4).astype(float)
    y = (rng.random(30) < 0.5).astype(float)
    if y.min() == y.max():
        return
    l2 = 1e-2
    w, b = _fit_logreg(X, y, l2, 1e-8, 20_000)
    r = 1 / (1 + np.exp(-(X @ w + b))) - y
    grad = np.concatenate([X.T @ r / len(y) + l2 * w, [r.mean()]])
    assert np.linalg.norm(grad) < 1e-6


def _lexicons(frames, size=20):
    return {f: ScoredLexicon.from_scores(f, [(f"{f[:4].lower()}_{i}", 1.0) for i in range(size)], "final")
            for f in frames}


def test_full_inventory_gives_210_sets():
    sets = intruder_generate(_lexicons(FRAMES, 80), 15, seed=0)
    assert len(sets) == 210
    assert intruder_generate(_lexicons(FRAMES, 80), 15, seed=0) == sets


def test_intruder_set_structure():
    lex = _lexicons(["Economic", "Political", "Morality"])
    for s in intruder_generate(lex, 15, seed=1):
        assert len(s.members) == 5 and len(set(s.members)) == 5
        assert set(s.members) <= lex[s.frame].word_set()
        assert s.intruder not in lex[s.frame]
        assert s.intruder in lex[s.intruder_frame]
        assert sorted(s.shuffled_order) == sorted(s.members + (s.intruder,))


def test_shared_words_never_intrude():
    lex = {
        "A": ScoredLexicon.from_scores("A", [(w, 1.0) for w in "abcdef"], "final"),
        "B": ScoredLexicon.from_scores("B", [(w, 1.0) for w in "abcdxy"], "final"),
    }
    for s in intruder_generate(lex, 10, seed=2):
        assert s.intruder in ({"x", "y"} if s.frame == "A" else {"e", "f"})


def test_intruder_needs_two_frames_and_five_words():
    with pytest.raises(EvaluationError):
        intruder_generate(_lexicons(["Economic"]), 1)
    with pytest.raises(EvaluationError):
        intruder_generate(_lexicons(["Economic", "Political"], 4), 1)


SETS = intruder_generate(_lexicons(["Economic", "Political"]), 4, seed=0)


def test_all_correct_scores_100():
    responses = {a: {s.set_id: s.intruder for s in SETS} for a in ("a1", "a2")}
    assert intruder_score(SETS, responses)["Economic"] == {"hard": 100.0, "soft": 100.0, "avg": 100.0}


def test_one_of_two_correct():
    responses = {"a1": {s.set_id: s.intruder for s in SETS},
                 "a2": {s.set_id: s.members[0] for s in SETS}}
    assert intruder_score(SETS, responses)["Political"] == {"hard": 0.0, "soft": 100.0, "avg": 50.0}


def test_unanswered_sets_are_skipped():
    econ = [s for s in SETS if s.frame == "Economic"]
    scores = intruder_score(SETS, {"a1": {econ[0].set_id: econ[0].intruder}})
    assert scores == {"Economic": {"hard": 100.0, "soft": 100.0, "avg": 100.0}}


def test_bad_responses_raise():
    with pytest.raises(EvaluationError, match="unknown set"):
        intruder_score(SETS, {"a1": {"nope": "x"}})
    with pytest.raises(EvaluationError, match="not in set"):
        intruder_score(SETS, {"a1": {SETS[0].set_id: "zzz"}})


def test_intruder_files_roundtrip(tmp_path):
    write_intruder_sets(SETS, tmp_path / "sets.jsonl")
    assert read_intruder_sets(tmp_path / "sets.jsonl") == SETS
    write_intruder_sheet(SETS, tmp_path / "sheet.tsv")
    sheet = (tmp_path / "sheet.tsv").read_text(encoding="utf-8").splitlines()
    assert len(sheet) == len(SETS) + 1
    assert all(s.intruder not in sheet[0] for s in SETS)
    (tmp_path / "r.tsv").write_text("".join(f"a1\t{s.set_id}\t{s.intruder}\n" for s in SETS), encoding="utf-8")
    responses = read_responses(tmp_path / "r.tsv")
    write_intruder_scores(intruder_score(SETS, responses), tmp_path / "scores.csv")
    assert (tmp_path / "scores.csv").read_text().splitlines() == [
        "frame,hard,soft,avg", "Economic,100.00,100.00,100.00", "Political,100.00,100.00,100.00"]


def test_cross_validate_on_shipped_corpus(annotated_docs):
    frames = ["Economic", "Political", "Security and Defense"]
    cv = cross_validate(annotated_docs, frames, k=5, seed=0, baseline=True)
    assert set(cv.primary) == {d.id for d in annotated_docs}
    gold = {d.id: d.primary_frame for d in annotated_docs}
    acc = eval_primary_accuracy(cv.primary, gold)
    assert 0.0 <= acc <= 1.0
    assert len(cv.fold_accuracy(gold)) == 5
    f1 = eval_all_frames_f1(cv.present, {d.id: d.annotated_frames for d in annotated_docs}, frames)
    assert set(f1) == set(frames)
    assert set(cv.baseline) == set(cv.primary)
    again = cross_validate(annotated_docs, frames, k=5, seed=0)
    assert again.primary == cv.primary
