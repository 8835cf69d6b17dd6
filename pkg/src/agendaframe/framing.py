"""Lexicon-based frame assignment and frame/entity association (nPMI)."""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Mapping, Sequence

from .corpus import OTHER, Document
from .lexicon import ScoredLexicon


class FramingError(ValueError):
    pass


@dataclass(frozen=True)
class FrameAssignment:
    doc_id: str
    counts: Mapping[str, int]
    present: frozenset[str]
    primary: str

    def to_record(self) -> dict:
        return {
            "doc_id": self.doc_id,
            "primary": self.primary,
            "present": sorted(self.present),
            "counts": {f: self.counts[f] for f in sorted(self.counts)},
        }


def _word_sets(lexicons: Iterable[ScoredLexicon] | Mapping[str, ScoredLexicon]) -> dict[str, frozenset[str]]:
    if isinstance(lexicons, Mapping):
        lexicons = lexicons.values()
    sets = {lex.frame: lex.word_set() for lex in lexicons}
    if not sets:
        raise FramingError("no lexicons given")
    return sets


def assign_frames(
    doc: Document,
    lexicons: Iterable[ScoredLexicon] | Mapping[str, ScoredLexicon],
    threshold: int = 3,
    distinct: bool = False,
) -> FrameAssignment:
    """Count lexicon tokens per frame and pick the primary frame.

    A frame is present when its count reaches ``threshold``. By default every
    token occurrence counts; ``distinct=True`` counts distinct lexicon words
    instead. The primary frame is the present frame with the highest count,
    ties going to the alphabetically first label, or "Other" if none is present.
    """
    return _assign(doc, _word_sets(lexicons), threshold, distinct)


def _assign(doc: Document, sets: Mapping[str, frozenset[str]], threshold: int, distinct: bool) -> FrameAssignment:
    tf = Counter(doc.tokens)
    counts = {}
    for frame, words in sets.items():
        if distinct:
            counts[frame] = sum(1 for w in tf if w in words)
        else:
            counts[frame] = sum(c for w, c in tf.items() if w in words)
    present = frozenset(f for f, c in counts.items() if c >= threshold)
    if present:
        primary = min(present, key=lambda f: (-counts[f], f))
    else:
        primary = OTHER
    return FrameAssignment(doc.id, counts, present, primary)


def assign_all(
    docs: Iterable[Document],
    lexicons: Iterable[ScoredLexicon] | Mapping[str, ScoredLexicon],
    threshold: int = 3,
    distinct: bool = False,
) -> dict[str, FrameAssignment]:
    sets = _word_sets(lexicons)
    return {d.id: _assign(d, sets, threshold, distinct) for d in docs}


def npmi_from_events(x: Sequence[bool], y: Sequence[bool]) -> float:
    """Normalized PMI of two binary document-level events.

    Returns -1 when the events never co-occur and 1 when both hold for every
    document.
    """
    n = len(x)
    if n == 0 or n != len(y):
        raise FramingError("event vectors must be non-empty and of equal length")
    nx = sum(1 for v in x if v)
    ny = sum(1 for v in y if v)
    nxy = sum(1 for a, b in zip(x, y) if a and b)
    if nx == 0:
        raise FramingError("focus event never occurs")
    if ny == 0:
        raise FramingError("frame event never occurs")
    if nxy == 0:
        return -1.0
    if nxy == n:
        return 1.0
    log_pxy = math.log(nxy / n)
    pmi = log_pxy - math.log(nx / n) - math.log(ny / n)
    return max(-1.0, min(1.0, pmi / -log_pxy))


def npmi(
    docs: Sequence[Document],
    focus: Callable[[Document], bool],
    frame: str,
    lexicons: Iterable[ScoredLexicon] | Mapping[str, ScoredLexicon] | None = None,
    threshold: int = 3,
    assignments: Mapping[str, FrameAssignment] | None = None,
) -> float:
    """nPMI between the focus event (e.g. entity-focused article) and ``frame`` being present."""
    if not docs:
        raise FramingError("no documents")
    if assignments is None:
        if lexicons is None:
            raise FramingError("need lexicons or precomputed assignments")
        assignments = assign_all(docs, lexicons, threshold)
    x = [bool(focus(d)) for d in docs]
    y = [frame in assignments[d.id].present for d in docs]
    try:
        return npmi_from_events(x, y)
    except FramingError as exc:
        raise FramingError(f"{frame}: {exc}") from None


def write_assignments(assignments: Iterable[FrameAssignment], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for a in assignments:
            fh.write(json.dumps(a.to_record(), ensure_ascii=False, sort_keys=True) + "\n")


def read_assignments(path: str | Path) -> dict[str, FrameAssignment]:
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            out[rec["doc_id"]] = FrameAssignment(
                rec["doc_id"], dict(rec["counts"]), frozenset(rec["present"]), rec["primary"]
            )
    return out
