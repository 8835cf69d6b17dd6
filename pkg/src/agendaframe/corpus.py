"""Corpus ingestion: tokenization, entity alias matching and time slicing."""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from datetime import date
from functools import total_ordering
from pathlib import Path
from typing import Callable, Iterable, Iterator, Mapping, Sequence

# The 14 lexicalizable frames of the Policy Frames Codebook. "Other" gets no lexicon.
FRAMES = (
    "Capacity and Resources",
    "Crime and Punishment",
    "Cultural Identity",
    "Economic",
    "External Regulation and Reputation",
    "Fairness and Equality",
    "Health and Safety",
    "Legality, Constitutionality, Jurisdiction",
    "Morality",
    "Policy Prescription and Evaluation",
    "Political",
    "Public Sentiment",
    "Quality of Life",
    "Security and Defense",
)
OTHER = "Other"

GRANULARITIES = ("year", "quarter", "month")

# Maximal runs of letters/digits; underscore is a separator.
_TOKEN_RE = re.compile(r"[^\W_]+")


class IngestError(ValueError):
    """A corpus record could not be admitted."""


def tokenize(text: str) -> list[str]:
    return [tok for tok, _, _ in tokenize_with_offsets(text)]


def tokenize_with_offsets(text: str) -> list[tuple[str, int, int]]:
    """Tokens with the character span ``[start, end)`` they came from."""
    out = []
    for m in _TOKEN_RE.finditer(text):
        low = m.group().lower()
        # lowercasing may introduce non-alphanumerics (e.g. combining marks); re-split
        for piece in _TOKEN_RE.findall(low):
            out.append((piece, m.start(), m.end()))
    return out


@dataclass(frozen=True)
class FrameSpan:
    frame: str
    start: int
    end: int
    annotator: str = ""

    def __post_init__(self):
        if not self.start < self.end:
            raise ValueError(f"empty frame span [{self.start}, {self.end}) for {self.frame!r}")


@dataclass(frozen=True)
class Document:
    id: str
    date: date
    tokens: tuple[str, ...]
    annotations: tuple[FrameSpan, ...] = ()
    language: str = ""
    primary_frame: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        object.__setattr__(self, "annotations", tuple(self.annotations))
        n = len(self.tokens)
        for span in self.annotations:
            if span.start < 0 or span.end > n:
                raise IngestError(
                    f"document {self.id}: span [{span.start}, {span.end}) outside {n} tokens"
                )

    def __len__(self) -> int:
        return len(self.tokens)

    @property
    def annotated_frames(self) -> frozenset[str]:
        """Frames marked by any annotator."""
        return frozenset(s.frame for s in self.annotations)


@dataclass(frozen=True)
class EntityAliasSet:
    entity: str
    aliases: frozenset[tuple[str, ...]]

    def __post_init__(self):
        if not self.aliases:
            raise ValueError(f"entity {self.entity!r} has no aliases")
        for alias in self.aliases:
            if not alias:
                raise ValueError(f"entity {self.entity!r} has an empty alias")
            if any(t != t.lower() for t in alias):
                raise ValueError(f"alias {' '.join(alias)!r} is not lowercased")

    @classmethod
    def from_strings(cls, entity: str, aliases: Iterable[str]) -> "EntityAliasSet":
        toks = {tuple(tokenize(a)) for a in aliases}
        toks.discard(())
        return cls(entity, frozenset(toks))


def entity_mention_count(doc: Document | Sequence[str], aliases: EntityAliasSet) -> int:
    """Count non-overlapping alias occurrences, scanning left to right.

    At each position the longest matching alias wins.
    """
    tokens = doc.tokens if isinstance(doc, Document) else tuple(doc)
    by_len = sorted(aliases.aliases, key=len, reverse=True)
    first = {a[0] for a in by_len}
    count = 0
    i, n = 0, len(tokens)
    while i < n:
        if tokens[i] in first:
            for alias in by_len:
                k = len(alias)
                if tuple(tokens[i:i + k]) == alias:
                    count += 1
                    i += k
                    break
            else:
                i += 1
        else:
            i += 1
    return count


def entity_focus(aliases: EntityAliasSet, min_mentions: int = 2) -> Callable[[Document], bool]:
    """Predicate: the document mentions the entity at least ``min_mentions`` times."""
    def focus(doc: Document) -> bool:
        return entity_mention_count(doc, aliases) >= min_mentions
    return focus


@total_ordering
@dataclass(frozen=True)
class Period:
    """A calendar year, quarter or month."""

    year: int
    quarter: int | None = None
    month: int | None = None

    def __post_init__(self):
        if self.quarter is not None and self.month is not None:
            raise ValueError("a period is either a quarter or a month")
        if self.quarter is not None and not 1 <= self.quarter <= 4:
            raise ValueError(f"quarter out of range: {self.quarter}")
        if self.month is not None and not 1 <= self.month <= 12:
            raise ValueError(f"month out of range: {self.month}")

    @property
    def granularity(self) -> str:
        if self.month is not None:
            return "month"
        if self.quarter is not None:
            return "quarter"
        return "year"

    def _key(self) -> tuple[int, int]:
        return (self.year, self.month or self.quarter or 0)

    def __lt__(self, other: "Period") -> bool:
        if self.granularity != other.granularity:
            raise TypeError(f"cannot order a {self.granularity} against a {other.granularity}")
        return self._key() < other._key()

    def succ(self) -> "Period":
        if self.month is not None:
            return Period(self.year + self.month // 12, month=self.month % 12 + 1)
        if self.quarter is not None:
            return Period(self.year + self.quarter // 4, quarter=self.quarter % 4 + 1)
        return Period(self.year + 1)

    def contains(self, d: date) -> bool:
        return Period.of(d, self.granularity) == self

    @classmethod
    def of(cls, d: date, granularity: str) -> "Period":
        if granularity == "month":
            return cls(d.year, month=d.month)
        if granularity == "quarter":
            return cls(d.year, quarter=(d.month - 1) // 3 + 1)
        if granularity == "year":
            return cls(d.year)
        raise ValueError(f"unknown granularity {granularity!r}; expected one of {GRANULARITIES}")

    @classmethod
    def parse(cls, label: str) -> "Period":
        """Parse ``YYYY``, ``YYYY-Qn`` or ``YYYY-MM``."""
        m = re.fullmatch(r"(\d{4})(?:-(?:Q([1-4])|(\d{2})))?", label.strip())
        if not m:
            raise ValueError(f"unparseable period {label!r}")
        year, q, mo = m.groups()
        return cls(int(year), quarter=int(q) if q else None, month=int(mo) if mo else None)

    def __str__(self) -> str:
        if self.month is not None:
            return f"{self.year:04d}-{self.month:02d}"
        if self.quarter is not None:
            return f"{self.year:04d}-Q{self.quarter}"
        return f"{self.year:04d}"


def period_range(first: Period, last: Period) -> list[Period]:
    out = [first]
    while out[-1] < last:
        out.append(out[-1].succ())
    return out


@dataclass(frozen=True)
class TimeSlice:
    period: Period
    documents: tuple[str, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.documents)


def _parse_date(raw, doc_id: str) -> date:
    if isinstance(raw, date):
        return raw
    try:
        return date.fromisoformat(str(raw))
    except (TypeError, ValueError):
        raise IngestError(f"document {doc_id}: unparseable date {raw!r}") from None


def slice_corpus(docs: Iterable[Document], granularity: str) -> list[TimeSlice]:
    """Bucket documents into gap-free, ascending time slices."""
    if granularity not in GRANULARITIES:
        raise ValueError(f"unknown granularity {granularity!r}; expected one of {GRANULARITIES}")
    buckets: dict[Period, list[str]] = {}
    for doc in docs:
        p = Period.of(_parse_date(doc.date, doc.id), granularity)
        buckets.setdefault(p, []).append(doc.id)
    if not buckets:
        return []
    return [TimeSlice(p, tuple(buckets.get(p, ()))) for p in period_range(min(buckets), max(buckets))]


def as_doc_map(docs: Mapping[str, Document] | Iterable[Document]) -> Mapping[str, Document]:
    if isinstance(docs, Mapping):
        return docs
    return {d.id: d for d in docs}


def make_document(
    doc_id: str,
    day,
    text: str,
    annotations: Sequence[Mapping] = (),
    lang: str = "",
    primary_frame: str | None = None,
    frames: Sequence[str] | None = None,
) -> Document:
    """Build a Document from raw text, mapping character spans to token spans.

    A span covers every token overlapping ``[start_char, end_char)``.
    """
    toks = tokenize_with_offsets(text)
    spans = []
    for ann in annotations:
        label = ann["frame"]
        if frames is not None and label not in frames and label != OTHER:
            raise IngestError(f"document {doc_id}: frame {label!r} not in the frame inventory")
        lo, hi = int(ann["start_char"]), int(ann["end_char"])
        covered = [i for i, (_, s, e) in enumerate(toks) if s < hi and e > lo]
        if not covered:
            continue
        spans.append(FrameSpan(label, covered[0], covered[-1] + 1, str(ann.get("annotator", ""))))
    return Document(
        id=str(doc_id),
        date=_parse_date(day, str(doc_id)),
        tokens=tuple(t for t, _, _ in toks),
        annotations=tuple(spans),
        language=lang,
        primary_frame=primary_frame,
    )


def iter_records(path: str | Path) -> Iterator[dict]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: {exc.msg}") from None


def load_corpus(
    path: str | Path,
    frames: Sequence[str] | None = None,
    keep_empty: bool = False,
) -> list[Document]:
    """Read newline-delimited JSON article records.

    Records with no tokens are skipped unless ``keep_empty``. Missing or bad
    dates and duplicate ids raise :class:`IngestError`.
    """
    docs = []
    seen = set()
    for rec in iter_records(path):
        doc_id = rec.get("id")
        if doc_id is None:
            raise IngestError(f"{path}: record without an id")
        doc_id = str(doc_id)
        if doc_id in seen:
            raise IngestError(f"duplicate document id {doc_id}")
        seen.add(doc_id)
        if "date" not in rec:
            raise IngestError(f"document {doc_id}: missing date")
        doc = make_document(
            doc_id,
            rec["date"],
            rec.get("text", ""),
            rec.get("annotations") or (),
            rec.get("lang", ""),
            rec.get("primary_frame"),
            frames,
        )
        if doc.tokens or keep_empty:
            docs.append(doc)
    return docs


def load_aliases(path: str | Path) -> dict[str, EntityAliasSet]:
    """Alias config: JSON object mapping entity label to a list of alias strings."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise IngestError(f"{path}: expected a JSON object of entity -> aliases")
    return {entity: EntityAliasSet.from_strings(entity, names) for entity, names in raw.items()}
