"""Lexicon evaluation: cross-validation, primary-frame accuracy, per-frame F1,
a bag-of-words logistic regression baseline, and intruder-word tasks."""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document
from .embedding import EmbeddingSpace, ExpansionConfig
from .framing import assign_all
from .lexicon import DocFrequencyTable, ScoredLexicon, induce_lexicons
from .projection import expand_and_filter

log = logging.getLogger(__name__)


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class FoldSplit:
    k: int
    assignment: Mapping[str, int]

    def fold(self, i: int) -> list[str]:
        return [d for d, f in self.assignment.items() if f == i]

    def train_test(self, i: int) -> tuple[list[str], list[str]]:
        train = [d for d, f in self.assignment.items() if f != i]
        return train, self.fold(i)


def kfold_split(doc_ids: Sequence[str], k: int = 10, seed: int = 0) -> FoldSplit:
    ids = list(doc_ids)
    if len(set(ids)) != len(ids):
        raise EvaluationError("document ids must be unique")
    if k < 1 or k > len(ids):
        raise EvaluationError(f"cannot split {len(ids)} documents into {k} folds")
    order = np.random.default_rng(seed).permutation(len(ids))
    return FoldSplit(k, {ids[j]: pos % k for pos, j in enumerate(order)})


def _same_docs(a: Mapping, b: Mapping) -> None:
    if set(a) != set(b):
        raise EvaluationError(
            f"prediction and gold document sets differ ({len(set(a) ^ set(b))} ids unmatched)"
        )


def eval_primary_accuracy(predictions: Mapping[str, str], gold: Mapping[str, str]) -> float:
    _same_docs(predictions, gold)
    if not gold:
        raise EvaluationError("no documents to score")
    return sum(predictions[d] == g for d, g in gold.items()) / len(gold)


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float


def eval_all_frames_f1(
    predictions: Mapping[str, Iterable[str]],
    gold: Mapping[str, Iterable[str]],
    frames: Iterable[str] | None = None,
) -> dict[str, PRF]:
    """Per-frame binary precision, recall and F1; 0/0 is scored as 0."""
    _same_docs(predictions, gold)
    pred = {d: set(v) for d, v in predictions.items()}
    ref = {d: set(v) for d, v in gold.items()}
    if frames is None:
        frames = set().union(*pred.values(), *ref.values()) if pred else set()
    out = {}
    for f in sorted(frames):
        tp = sum(1 for d in ref if f in pred[d] and f in ref[d])
        fp = sum(1 for d in ref if f in pred[d] and f not in ref[d])
        fn = sum(1 for d in ref if f not in pred[d] and f in ref[d])
        p = tp / (tp + fp) if tp + fp else 0.0
        r = tp / (tp + fn) if tp + fn else 0.0
        out[f] = PRF(p, r, 2 * p * r / (p + r) if p + r else 0.0)
    return out


# -- logistic regression baseline ---------------------------------------------

def _bow(docs: Sequence[Document], vocab: Mapping[str, int]) -> np.ndarray:
    X = np.zeros((len(docs), len(vocab)))
    for i, d in enumerate(docs):
        cols = [vocab[t] for t in set(d.tokens) if t in vocab]
        X[i, cols] = 1.0
    return X


def _fit_logreg(X: np.ndarray, y: np.ndarray, l2: float, tol: float, max_iter: int) -> tuple[np.ndarray, float]:
    """Full-batch gradient descent with backtracking on the L2-penalized log loss."""
    n, p = X.shape
    w, b = np.zeros(p), 0.0

    def loss(w, b):
        z = X @ w + b
        return float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * (w @ w))

    step = 1.0
    cur = loss(w, b)
    for _ in range(max_iter):
        z = X @ w + b
        r = 1.0 / (1.0 + np.exp(-z)) - y
        gw = X.T @ r / n + l2 * w
        gb = float(r.mean())
        gnorm2 = float(gw @ gw) + gb * gb
        if np.sqrt(gnorm2) < tol:
            break
        step = min(step * 2.0, 1e3)
        while True:
            nw, nb = w - step * gw, b - step * gb
            new = loss(nw, nb)
            if new <= cur - 0.5 * step * gnorm2 or step < 1e-12:
                break
            step *= 0.5
        w, b, cur = nw, nb, new
    return w, b


def baseline_logreg(
    train: Sequence[Document],
    train_frames: Mapping[str, Iterable[str]],
    test: Sequence[Document],
    frames: Iterable[str] | None = None,
    l2: float = 1e-3,
    tol: float = 1e-5,
    max_iter: int = 2000,
) -> dict[str, set[str]]:
    """One-vs-rest logistic regressions over binary bag-of-words features.

    A frame is predicted when its probability reaches 0.5. Frames whose
    training labels are all one class are predicted constantly.
    """
    if not train:
        raise EvaluationError("empty training set")
    gold = {d.id: set(train_frames[d.id]) for d in train}
    if frames is None:
        frames = sorted(set().union(*gold.values()))
    vocab = {w: i for i, w in enumerate(sorted({t for d in train for t in d.tokens}))}
    X_train, X_test = _bow(train, vocab), _bow(test, vocab)
    preds: dict[str, set[str]] = {d.id: set() for d in test}
    for f in sorted(frames):
        y = np.array([1.0 if f in gold[d.id] else 0.0 for d in train])
        if y.min() == y.max():
            log.warning("frame %r has single-class training labels; predicting it constantly", f)
            hit = bool(y[0])
            if hit:
                for d in test:
                    preds[d.id].add(f)
            continue
        w, b = _fit_logreg(X_train, y, l2, tol, max_iter)
        prob = 1.0 / (1.0 + np.exp(-(X_test @ w + b)))
        for d, pr in zip(test, prob):
            if pr >= 0.5:
                preds[d.id].add(f)
    return preds


# -- cross-validated lexicon evaluation ----------------------------------------

@dataclass
class CrossValidation:
    split: FoldSplit
    primary: dict[str, str]
    present: dict[str, set[str]]
    baseline: dict[str, set[str]] | None

    def fold_accuracy(self, gold: Mapping[str, str]) -> list[float]:
        return [
            eval_primary_accuracy({d: self.primary[d] for d in ids}, {d: gold[d] for d in ids})
            for ids in (self.split.fold(i) for i in range(self.split.k))
        ]


def cross_validate(
    docs: Sequence[Document],
    frames: Sequence[str],
    k: int = 10,
    seed: int = 0,
    size: int = 250,
    threshold: int = 3,
    space: EmbeddingSpace | None = None,
    expansion: ExpansionConfig | None = None,
    baseline: bool = False,
) -> CrossValidation:
    """Induce lexicons on k-1 folds and assign frames on the held-out fold.

    With ``space`` the base lexicons are expanded and document-frequency
    filtered against the training folds before assignment.
    """
    split = kfold_split([d.id for d in docs], k, seed)
    by_id = {d.id: d for d in docs}
    primary: dict[str, str] = {}
    present: dict[str, set[str]] = {}
    base_preds: dict[str, set[str]] | None = {} if baseline else None
    for i in range(k):
        train_ids, test_ids = split.train_test(i)
        train = [by_id[d] for d in train_ids]
        test = [by_id[d] for d in test_ids]
        annotated = {s.frame for d in train for s in d.annotations}
        usable = [f for f in frames if f in annotated]
        if not usable:
            raise EvaluationError(f"fold {i}: no annotated frames in the training folds")
        df = DocFrequencyTable.from_documents(train)
        lexicons = induce_lexicons(train, usable, size, df)
        if space is not None:
            cfg = expansion or ExpansionConfig()
            lexicons = {f: expand_and_filter(lex, space, df, cfg) for f, lex in lexicons.items()}
        for doc_id, a in assign_all(test, lexicons, threshold).items():
            primary[doc_id] = a.primary
            present[doc_id] = set(a.present)
        if base_preds is not None:
            gold = {d.id: d.annotated_frames for d in train}
            base_preds.update(baseline_logreg(train, gold, test, usable))
        log.info("fold %d/%d evaluated", i + 1, k)
    return CrossValidation(split, primary, present, base_preds)


# -- intruder detection ---------------------------------------------------------

@dataclass(frozen=True)
class IntruderSet:
    set_id: str
    frame: str
    members: tuple[str, ...]
    intruder: str
    intruder_frame: str
    shuffled_order: tuple[str, ...]

    def __post_init__(self):
        if len(self.members) != 5:
            raise EvaluationError(f"{self.set_id}: need 5 members, got {len(self.members)}")
        words = set(self.members) | {self.intruder}
        if len(words) != 6 or set(self.shuffled_order) != words or len(self.shuffled_order) != 6:
            raise EvaluationError(f"{self.set_id}: words must be 6 distinct entries")

    def to_record(self) -> dict:
        return {
            "set_id": self.set_id,
            "frame": self.frame,
            "members": list(self.members),
            "intruder": self.intruder,
            "intruder_frame": self.intruder_frame,
            "shuffled_order": list(self.shuffled_order),
        }


def intruder_generate(
    lexicons: Mapping[str, ScoredLexicon] | Iterable[ScoredLexicon],
    sets_per_frame: int = 15,
    seed: int = 0,
) -> list[IntruderSet]:
    """Sample 5 in-lexicon words plus 1 word from another frame's lexicon, per set.

    Members are drawn without repetition across a frame's sets when the
    lexicon is large enough. The intruder never appears in the target lexicon.
    """
    if not isinstance(lexicons, Mapping):
        lexicons = {lex.frame: lex for lex in lexicons}
    if len(lexicons) < 2:
        raise EvaluationError("intruder sets need at least 2 frames")
    for name, lex in lexicons.items():
        if len(lex) < 5:
            raise EvaluationError(f"lexicon {name!r} has fewer than 5 words")
    rng = np.random.default_rng(seed)
    frames = sorted(lexicons)
    out = []
    for frame in frames:
        words = lexicons[frame].words
        own = set(words)
        others = [f for f in frames if f != frame]
        pools = {f: [w for w in lexicons[f].words if w not in own] for f in others}
        usable = [f for f in others if pools[f]]
        if not usable:
            raise EvaluationError(
                f"no intruder available for {frame!r}: every other lexicon "
                f"({', '.join(others)}) overlaps it completely"
            )
        need = 5 * sets_per_frame
        if len(words) >= need:
            perm = rng.permutation(len(words))[:need]
            member_sets = [[words[j] for j in perm[5 * s:5 * s + 5]] for s in range(sets_per_frame)]
        else:
            member_sets = [[words[j] for j in rng.choice(len(words), 5, replace=False)]
                           for _ in range(sets_per_frame)]
        for s, members in enumerate(member_sets):
            src = usable[int(rng.integers(len(usable)))]
            pool = pools[src]
            intruder = pool[int(rng.integers(len(pool)))]
            shown = members + [intruder]
            order = tuple(shown[j] for j in rng.permutation(6))
            out.append(IntruderSet(f"{frame}#{s + 1:02d}", frame, tuple(members), intruder, src, order))
    return out


def intruder_score(
    sets: Iterable[IntruderSet],
    responses: Mapping[str, Mapping[str, str]],
) -> dict[str, dict[str, float]]:
    """Per-frame hard / soft / average intruder accuracy, as percentages.

    ``responses`` maps annotator -> set id -> chosen word. For each set, soft
    counts it when any responding annotator found the intruder, hard when all
    did, and avg takes the fraction of annotators who did. Sets nobody
    answered are left out.
    """
    sets = list(sets)
    by_frame: dict[str, list[tuple[int, int]]] = {}
    known = {s.set_id: s for s in sets}
    for annot, chosen in responses.items():
        for sid, word in chosen.items():
            if sid not in known:
                raise EvaluationError(f"annotator {annot}: unknown set {sid!r}")
            if word not in known[sid].shuffled_order:
                raise EvaluationError(f"annotator {annot}: {word!r} is not in set {sid}")
    skipped = 0
    for s in sets:
        answers = [chosen[s.set_id] for chosen in responses.values() if s.set_id in chosen]
        if not answers:
            skipped += 1
            continue
        correct = sum(1 for a in answers if a == s.intruder)
        by_frame.setdefault(s.frame, []).append((correct, len(answers)))
    if skipped:
        log.warning("%d intruder sets have no responses and were not scored", skipped)
    out = {}
    for frame in sorted(by_frame):
        rows = by_frame[frame]
        n = len(rows)
        out[frame] = {
            "hard": 100.0 * sum(1 for c, a in rows if c == a) / n,
            "soft": 100.0 * sum(1 for c, _ in rows if c > 0) / n,
            "avg": 100.0 * sum(c / a for c, a in rows) / n,
        }
    return out


def write_intruder_sets(sets: Iterable[IntruderSet], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for s in sets:
            fh.write(json.dumps(s.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def write_intruder_sheet(sets: Iterable[IntruderSet], path: str | Path) -> None:
    """Annotator-facing sheet: set id, frame heading and the six shuffled words."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("set_id\tframe\t" + "\t".join(f"word{i}" for i in range(1, 7)) + "\n")
        for s in sets:
            fh.write("\t".join([s.set_id, s.frame, *s.shuffled_order]) + "\n")


def read_intruder_sets(path: str | Path) -> list[IntruderSet]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                r = json.loads(line)
                out.append(IntruderSet(r["set_id"], r["frame"], tuple(r["members"]), r["intruder"],
                                       r["intruder_frame"], tuple(r["shuffled_order"])))
    return out


def read_responses(path: str | Path) -> dict[str, dict[str, str]]:
    """``annotator_id<TAB>set_id<TAB>chosen_word`` rows."""
    out: dict[str, dict[str, str]] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            parts = line.split("\t")
            if len(parts) != 3:
                raise EvaluationError(f"{path}:{lineno}: expected annotator<TAB>set<TAB>word")
            annot, sid, word = parts
            out.setdefault(annot, {})[sid] = word
    return out


def write_intruder_scores(scores: Mapping[str, Mapping[str, float]], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["frame", "hard", "soft", "avg"])
        for frame in sorted(scores):
            s = scores[frame]
            w.writerow([frame, f"{s['hard']:.2f}", f"{s['soft']:.2f}", f"{s['avg']:.2f}"])
