"""Frame lexicon induction from span-annotated documents."""

from __future__ import annotations

import math
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .corpus import Document

PROVENANCES = ("base", "translated", "expanded", "final", "agendalex")

DF_MIN = 0.005
DF_MAX = 0.98


class LexiconError(ValueError):
    pass


@dataclass(frozen=True)
class ScoredLexicon:
    """A frame label with a word list ordered by descending score."""

    frame: str
    entries: tuple[tuple[str, float], ...]
    provenance: str = "base"

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple((w, float(s)) for w, s in self.entries))
        if self.provenance not in PROVENANCES:
            raise LexiconError(f"unknown provenance {self.provenance!r}")
        words = [w for w, _ in self.entries]
        if len(set(words)) != len(words):
            raise LexiconError(f"lexicon {self.frame!r} has duplicate words")
        scores = [s for _, s in self.entries]
        if any(a < b for a, b in zip(scores, scores[1:])):
            raise LexiconError(f"lexicon {self.frame!r} is not sorted by score")

    @classmethod
    def from_scores(cls, frame: str, scores: Iterable[tuple[str, float]], provenance: str) -> "ScoredLexicon":
        """Sort by score descending, ties by word."""
        ordered = sorted(scores, key=lambda ws: (-ws[1], ws[0]))
        return cls(frame, tuple(ordered), provenance)

    @property
    def words(self) -> list[str]:
        return [w for w, _ in self.entries]

    def word_set(self) -> frozenset[str]:
        return frozenset(w for w, _ in self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __contains__(self, word: str) -> bool:
        return word in self.word_set()


@dataclass(frozen=True)
class DocFrequencyTable:
    """Number of documents containing each word, over a reference corpus."""

    counts: dict[str, int] = field(hash=False)
    corpus_size: int

    @classmethod
    def from_documents(cls, docs: Iterable[Document]) -> "DocFrequencyTable":
        counts: Counter[str] = Counter()
        n = 0
        for doc in docs:
            counts.update(set(doc.tokens))
            n += 1
        return cls(dict(counts), n)

    def fraction(self, word: str) -> float:
        if self.corpus_size == 0:
            return 0.0
        return self.counts.get(word, 0) / self.corpus_size

    def in_band(self, word: str, lo: float = DF_MIN, hi: float = DF_MAX) -> bool:
        # compare counts rather than fractions so 10/2000 == 0.5% exactly
        c, n = self.counts.get(word, 0), self.corpus_size
        return c >= lo * n - 1e-9 and c <= hi * n + 1e-9


def frame_token_counts(docs: Iterable[Document], frame: str) -> Counter[str]:
    """Token counts inside every span labelled ``frame``; overlapping spans count separately."""
    counts: Counter[str] = Counter()
    for doc in docs:
        for span in doc.annotations:
            if span.frame == frame:
                counts.update(doc.tokens[span.start:span.end])
    return counts


def pmi_scores(
    docs: Sequence[Document],
    frame: str,
    background: Counter[str] | None = None,
) -> list[tuple[str, float]]:
    """Natural-log PMI of each word with ``frame``: log P(w|F) / P(w).

    ``background`` (token counts over all documents) may be passed in to avoid
    recounting when scoring many frames. Words never seen inside a frame span
    are omitted. Output is ordered by score, then in-frame count, then word.
    """
    in_frame = frame_token_counts(docs, frame)
    n_frame = sum(in_frame.values())
    if n_frame == 0:
        raise LexiconError(f"frame {frame!r} has no annotated tokens")
    if background is None:
        background = Counter()
        for doc in docs:
            background.update(doc.tokens)
    n_all = sum(background.values())
    log_ratio = math.log(n_all) - math.log(n_frame)
    scored = [
        (w, math.log(c) - math.log(background[w]) + log_ratio, c)
        for w, c in in_frame.items()
    ]
    scored.sort(key=lambda t: (-t[1], -t[2], t[0]))
    return [(w, s) for w, s, _ in scored]


def df_filter(
    entries: Iterable[tuple[str, float]],
    df: DocFrequencyTable,
    lo: float = DF_MIN,
    hi: float = DF_MAX,
) -> list[tuple[str, float]]:
    return [(w, s) for w, s in entries if df.in_band(w, lo, hi)]


def build_base_lexicon(
    frame: str,
    scores: Sequence[tuple[str, float]],
    df: DocFrequencyTable,
    size: int = 250,
    df_band: tuple[float, float] = (DF_MIN, DF_MAX),
) -> ScoredLexicon:
    """Drop words outside the document-frequency band, then keep the top ``size``."""
    if size < 1:
        raise LexiconError("lexicon size must be positive")
    kept = df_filter(scores, df, *df_band)
    # stable: ties keep the order pmi_scores produced
    kept.sort(key=lambda ws: -ws[1])
    if not kept:
        raise LexiconError(f"no words for frame {frame!r} survive document-frequency filtering")
    return ScoredLexicon(frame, tuple(kept[:size]), "base")


def induce_lexicons(
    docs: Sequence[Document],
    frames: Iterable[str],
    size: int = 250,
    df: DocFrequencyTable | None = None,
) -> dict[str, ScoredLexicon]:
    """Base lexicons for every frame that has annotated tokens."""
    background: Counter[str] = Counter()
    for doc in docs:
        background.update(doc.tokens)
    if df is None:
        df = DocFrequencyTable.from_documents(docs)
    out = {}
    for frame in frames:
        scores = pmi_scores(docs, frame, background)
        out[frame] = build_base_lexicon(frame, scores, df, size)
    return out


_HEADER_RE = re.compile(r"#\s*frame=(.*?)\s+provenance=(\S+)\s*")


def write_lexicon(lex: ScoredLexicon, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# frame={lex.frame} provenance={lex.provenance}\n")
        for word, score in lex.entries:
            fh.write(f"{word}\t{score:.6f}\n")


def read_lexicon(path: str | Path) -> ScoredLexicon:
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise LexiconError(f"{path}: empty lexicon file")
    m = _HEADER_RE.fullmatch(lines[0])
    if not m:
        raise LexiconError(f"{path}: bad header {lines[0]!r}")
    entries = []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        try:
            word, score = line.split("\t")
            entries.append((word, float(score)))
        except ValueError:
            raise LexiconError(f"{path}:{lineno}: expected word<TAB>score") from None
    return ScoredLexicon(m.group(1), tuple(entries), m.group(2))


def lexicon_filename(frame: str) -> str:
    slug = re.sub(r"[^0-9a-zA-Z]+", "_", frame).strip("_").lower()
    return f"{slug or 'frame'}.tsv"


def write_lexicons(lexicons: Iterable[ScoredLexicon], directory: str | Path) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for lex in lexicons:
        p = directory / lexicon_filename(lex.frame)
        write_lexicon(lex, p)
        paths.append(p)
    return paths


def read_lexicons(directory: str | Path) -> dict[str, ScoredLexicon]:
    out = {}
    for p in sorted(Path(directory).glob("*.tsv")):
        lex = read_lexicon(p)
        out[lex.frame] = lex
    if not out:
        raise LexiconError(f"no lexicon files in {directory}")
    return out
