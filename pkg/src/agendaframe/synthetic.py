"""Seeded synthetic corpora and series with planted structure.

These stand in for the proprietary news corpus and the annotated frames
corpus. Every generator is deterministic in its seed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import date
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import Document, Period, make_document
from .lexicon import ScoredLexicon, lexicon_filename, write_lexicon
from .timeseries import TimeSeries

LATIN = ("bcdfghklmnprstvz", "aeiou")
CYRILLIC = ("бвгдзклмнпрстфх", "аеиоуя")


def pseudo_words(n: int, rng: np.random.Generator, alphabet=LATIN, taken: set[str] | None = None) -> list[str]:
    """``n`` distinct pronounceable lowercase words."""
    cons, vows = alphabet
    taken = set() if taken is None else taken
    out = []
    while len(out) < n:
        syl = int(rng.integers(2, 5))
        w = "".join(cons[rng.integers(len(cons))] + vows[rng.integers(len(vows))] for _ in range(syl))
        if w not in taken:
            taken.add(w)
            out.append(w)
    return out


def _sentence(words: Sequence[str]) -> str:
    return " ".join(words).capitalize() + "."


def _spread_dates(n: int, rng: np.random.Generator, first_year=2003, last_year=2016) -> list[date]:
    months = (last_year - first_year + 1) * 12
    out = []
    for _ in range(n):
        m = int(rng.integers(months))
        out.append(date(first_year + m // 12, m % 12 + 1, int(rng.integers(1, 29))))
    return out


@dataclass
class Language:
    stopwords: list[str]
    general: list[str]
    frame_words: dict[str, list[str]]


def _compose(
    lang: Language,
    frames: Sequence[str],
    rng: np.random.Generator,
    n_sentences: int,
    frame_share: float,
    sentence_len: int = 8,
) -> tuple[str, list[tuple[str, int, int]]]:
    """Text plus the character spans of its frame sentences."""
    parts, spans, pos = [], [], 0
    for _ in range(n_sentences):
        frame = frames[int(rng.integers(len(frames)))] if rng.random() < frame_share else None
        toks = []
        for _ in range(sentence_len):
            r = rng.random()
            if r < 0.25:
                toks.append(lang.stopwords[rng.integers(len(lang.stopwords))])
            elif frame is not None and r < 0.95:
                vocab = lang.frame_words[frame]
                toks.append(vocab[rng.integers(len(vocab))])
            else:
                toks.append(lang.general[rng.integers(len(lang.general))])
        # every stopword appears in every document (above the 98% document-frequency cap)
        if not parts:
            toks = list(lang.stopwords) + toks
        s = _sentence(toks)
        if frame is not None:
            spans.append((frame, pos, pos + len(s)))
        parts.append(s)
        pos += len(s) + 1
    return " ".join(parts), spans


# -- 50-document annotated corpus --------------------------------------------------

SMALL_FRAMES = ("Economic", "Political", "Security and Defense")


def annotated_records(n_docs: int = 50, seed: int = 7, frames: Sequence[str] = SMALL_FRAMES) -> list[dict]:
    """Span-annotated article records with two annotators of uneven diligence."""
    rng = np.random.default_rng(seed)
    taken: set[str] = set()
    lang = Language(
        pseudo_words(8, rng, taken=taken),
        pseudo_words(120, rng, taken=taken),
        {f: pseudo_words(25, rng, taken=taken) for f in frames},
    )
    recs = []
    for i, day in enumerate(_spread_dates(n_docs, rng)):
        k = int(rng.integers(1, len(frames) + 1))
        doc_frames = [frames[j] for j in sorted(rng.choice(len(frames), k, replace=False))]
        text, spans = _compose(lang, doc_frames, rng, int(rng.integers(4, 9)), 0.5)
        anns = []
        for frame, lo, hi in spans:
            anns.append({"frame": frame, "start_char": lo, "end_char": hi, "annotator": "a1"})
            if rng.random() < 0.6:
                # second annotator marks a slightly shorter overlapping stretch
                anns.append({"frame": frame, "start_char": lo + 3, "end_char": hi, "annotator": "a2"})
        counts = {f: sum(1 for s in spans if s[0] == f) for f in doc_frames}
        primary = max(sorted(counts), key=lambda f: counts[f]) if spans else "Other"
        recs.append({"id": f"doc{i:03d}", "date": day.isoformat(), "text": text,
                     "annotations": anns, "lang": "en", "primary_frame": primary})
    return recs


def annotated_corpus(n_docs: int = 50, seed: int = 7) -> list[Document]:
    return [
        make_document(r["id"], r["date"], r["text"], r["annotations"], r["lang"], r["primary_frame"])
        for r in annotated_records(n_docs, seed)
    ]


# -- bilingual projection fixture ------------------------------------------------------

@dataclass
class BilingualFixture:
    source_records: list[dict]
    target_records: list[dict]
    dictionary: dict[str, list[str]]
    planted: dict[str, frozenset[str]]
    neighbours: dict[str, frozenset[str]]
    frames: tuple[str, ...] = field(default=SMALL_FRAMES)

    def source_docs(self) -> list[Document]:
        return [make_document(r["id"], r["date"], r["text"], r["annotations"], "en")
                for r in self.source_records]

    def target_docs(self) -> list[Document]:
        return [make_document(r["id"], r["date"], r["text"], (), "ru") for r in self.target_records]


def bilingual_fixture(
    n_docs: int = 2000,
    planted_size: int = 30,
    synonyms: int = 9,
    target_only: int = 10,
    mistranslated: float = 0.15,
    untranslated: float = 0.10,
    seed: int = 11,
    frames: Sequence[str] = SMALL_FRAMES,
) -> BilingualFixture:
    """Two languages linked by a dictionary, with planted frame vocabularies.

    In the source language each planted target word has ``synonyms``
    translations-in-reverse, so a frame's source vocabulary is large enough to
    fill a full base lexicon. The target language adds ``target_only`` frame
    words per frame that have no dictionary entry and can only be reached via
    embedding neighbours. General words translate one-to-one. To mimic
    machine-translation noise, a ``mistranslated`` share of source frame words
    map to a random general target word and an ``untranslated`` share have no
    entry at all.
    """
    rng = np.random.default_rng(seed)
    frames = tuple(frames)
    src_taken: set[str] = set()
    tgt_taken: set[str] = set()
    n_general = 300

    tgt = Language(
        pseudo_words(10, rng, CYRILLIC, tgt_taken),
        pseudo_words(n_general, rng, CYRILLIC, tgt_taken),
        {},
    )
    planted = {f: pseudo_words(planted_size, rng, CYRILLIC, tgt_taken) for f in frames}
    extra = {f: pseudo_words(target_only, rng, CYRILLIC, tgt_taken) for f in frames}
    tgt.frame_words = {f: planted[f] + extra[f] for f in frames}

    src = Language(
        pseudo_words(10, rng, LATIN, src_taken),
        pseudo_words(n_general, rng, LATIN, src_taken),
        {},
    )
    dictionary: dict[str, list[str]] = {}
    for s, t in zip(src.stopwords, tgt.stopwords):
        dictionary[s] = [t]
    for s, t in zip(src.general, tgt.general):
        dictionary[s] = [t]
    for f in frames:
        words = []
        for t in planted[f]:
            for s in pseudo_words(synonyms, rng, LATIN, src_taken):
                words.append(s)
                r = rng.random()
                if r < mistranslated:
                    dictionary[s] = [tgt.general[rng.integers(n_general)]]
                elif r < mistranslated + untranslated:
                    continue
                else:
                    dictionary[s] = [t]
        src.frame_words[f] = words

    def records(lang: Language, prefix: str, annotate: bool) -> list[dict]:
        out = []
        for i, day in enumerate(_spread_dates(n_docs, rng)):
            k = 1 if rng.random() < 0.7 else 2
            doc_frames = [frames[j] for j in sorted(rng.choice(len(frames), k, replace=False))]
            text, spans = _compose(lang, doc_frames, rng, int(rng.integers(6, 12)), 0.45)
            rec = {"id": f"{prefix}{i:05d}", "date": day.isoformat(), "text": text}
            if annotate:
                rec["annotations"] = [
                    {"frame": f, "start_char": lo, "end_char": hi, "annotator": "a1"} for f, lo, hi in spans
                ]
            out.append(rec)
        return out

    return BilingualFixture(
        source_records=records(src, "en", True),
        target_records=records(tgt, "ru", False),
        dictionary=dictionary,
        planted={f: frozenset(planted[f]) for f in frames},
        neighbours={f: frozenset(extra[f]) for f in frames},
        frames=frames,
    )


# -- Granger series ---------------------------------------------------------------------

def granger_pair(
    seed: int,
    n: int = 168,
    own: float = 0.5,
    effect: float = -0.35,
    sigma: float = 0.05,
    predictor_sigma: float = 0.1,
    burn_in: int = 50,
) -> tuple[np.ndarray, np.ndarray]:
    """(target, predictor) with target_t = own*target_{t-1} + effect*predictor_{t-1} + noise.

    The predictor is white noise; ``effect=0`` gives the null model.
    """
    rng = np.random.default_rng(seed)
    total = n + burn_in
    x = rng.normal(0.0, predictor_sigma, total)
    eps = rng.normal(0.0, sigma, total)
    y = np.zeros(total)
    for t in range(1, total):
        y[t] = own * y[t - 1] + effect * x[t - 1] + eps[t]
    return y[burn_in:], x[burn_in:]


def monthly(values: Sequence[float], start: Period = Period(2003, month=1)) -> TimeSeries:
    return TimeSeries.from_values(start, values)


# -- AgendaLex fixture ----------------------------------------------------------------

@dataclass
class AgendaFixture:
    docs: list[Document]
    indicator: TimeSeries
    aliases: dict[str, list[str]]
    lexicon: dict[str, list[str]]
    planted_word: str
    control_word: str
    frame: str


def agenda_fixture(seed: int = 5, months: int = 60, docs_per_month: int = 30) -> AgendaFixture:
    """Monthly corpus in which ``missile`` surges after market falls and ebbs after rises.

    Every planted document is entity-focused and carries the frame; a
    varying number of background documents per month mention neither. Relative to its
    base rate, the planted word is 5x more frequent in months after a
    downturn decile month and 5x less frequent in months after an upturn
    decile month. The control word has the same rate in every document.
    """
    rng = np.random.default_rng(seed)
    frame = "Security and Defense"
    changes = rng.normal(0.0, 0.08, months - 1)
    level = 1000 * np.cumprod(np.concatenate([[1.0], 1.0 + changes]))
    indicator = monthly(level)
    # mirror the partition rule to know where to plant
    k = int(np.ceil(round(0.1 * len(changes), 9)))
    order_up = sorted(range(len(changes)), key=lambda i: (-changes[i], i))[:k]
    order_down = sorted(range(len(changes)), key=lambda i: (changes[i], i))[:k]
    periods = indicator.periods
    up = {periods[i + 1] for i in order_up}
    down = {periods[i + 1] for i in order_down}
    after_up = {p.succ() for p in up} - up - down
    after_down = {p.succ() for p in down} - up - down

    filler = pseudo_words(2000, rng)
    frame_words = ["army", "defense", "troops", "border", "security"]
    weights = 1.0 / np.arange(1, len(filler) + 1)
    weights /= weights.sum()
    docs = []
    # planted-word tokens in every fifth document
    rate = {"base": 5, "after_down": 25, "after_up": 1}
    for mi, p in enumerate(periods):
        missile = rate["after_down"] if p in after_down else rate["after_up"] if p in after_up else rate["base"]
        for j in range(docs_per_month):
            toks = ["usa", "usa"] + frame_words[:3] + ["sanctions"] * 4
            toks += ["missile"] * (missile if j % 5 == 0 else 0)
            toks += [filler[i] for i in rng.choice(len(filler), 200, p=weights)]
            order = rng.permutation(len(toks))
            text = " ".join(toks[i] for i in order)
            day = date(p.year, p.month, int(rng.integers(1, 29)))
            docs.append(make_document(f"m{mi:03d}d{j:02d}", day, text))
        # background articles that never mention the entity
        for j in range(int(rng.integers(0, docs_per_month // 3 + 1))):
            toks = [filler[i] for i in rng.choice(len(filler), 200, p=weights)]
            day = date(p.year, p.month, int(rng.integers(1, 29)))
            docs.append(make_document(f"m{mi:03d}b{j:02d}", day, " ".join(toks)))
    return AgendaFixture(
        docs=docs,
        indicator=indicator,
        aliases={"USA": ["usa", "united states"]},
        lexicon={frame: frame_words},
        planted_word="missile",
        control_word="sanctions",
        frame=frame,
    )


# -- on-disk workspace for the command-line tool ------------------------------------

def _write_jsonl(records: Sequence[dict], path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for r in records:
            fh.write(json.dumps(r, ensure_ascii=False, sort_keys=True) + "\n")


def _write_values(series: TimeSeries, path: Path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("period,value\n")
        for p, v in series.points:
            fh.write(f"{p},{v!r}\n")


DEMO_CONFIG = """\
[general]
output_dir = out
seed = 0

[induce]
corpus = source.jsonl
frames = Economic,Political,Security and Defense

[project]
corpus = target.jsonl
lexicons = out/lexicons
dictionary = dictionary.tsv
output_dir = out/projected

[assign]
corpus = source.jsonl
lexicons = out/lexicons

[coverage]
corpus = news.jsonl
aliases = aliases.json

[correlate]
corpus = news.jsonl
aliases = aliases.json
indicator = indicator.csv

[granger]
target = target_series.csv
predictor = predictor_series.csv
transform = none

[npmi]
corpus = news.jsonl
aliases = aliases.json
lexicons = news_lexicons

[agendalex]
corpus = news.jsonl
aliases = aliases.json
lexicons = news_lexicons
indicator = indicator.csv
top_n = 50

[eval-primary]
corpus = annotated.jsonl
frames = Economic,Political,Security and Defense
folds = 5

[eval-frames]
corpus = annotated.jsonl
frames = Economic,Political,Security and Defense
folds = 5

[intruder-gen]
lexicons = out/projected/lexicons

[intruder-score]
sets = out/intruder_sets.jsonl
responses = responses.tsv
"""


def write_demo(directory: str | Path, bilingual_docs: int = 2000, agenda_months: int = 60) -> Path:
    """Write every input the command-line stages need, plus ``run.ini``.

    Returns the config path. ``responses.tsv`` is not written here since it
    depends on the ``intruder-gen`` output; see :func:`write_oracle_responses`.
    """
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    _write_jsonl(annotated_records(), d / "annotated.jsonl")

    bi = bilingual_fixture(n_docs=bilingual_docs)
    _write_jsonl(bi.source_records, d / "source.jsonl")
    _write_jsonl(bi.target_records, d / "target.jsonl")
    with open(d / "dictionary.tsv", "w", encoding="utf-8", newline="\n") as fh:
        for src in sorted(bi.dictionary):
            fh.write(f"{src}\t{','.join(bi.dictionary[src])}\n")

    ag = agenda_fixture(months=agenda_months)
    records = [{"id": doc.id, "date": doc.date.isoformat(), "text": " ".join(doc.tokens)} for doc in ag.docs]
    _write_jsonl(records, d / "news.jsonl")
    _write_values(ag.indicator, d / "indicator.csv")
    with open(d / "aliases.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(ag.aliases, fh, ensure_ascii=False, sort_keys=True)
    lex_dir = d / "news_lexicons"
    lex_dir.mkdir(exist_ok=True)
    for frame, words in ag.lexicon.items():
        write_lexicon(ScoredLexicon.from_scores(frame, [(w, 1.0) for w in words], "base"),
                      lex_dir / lexicon_filename(frame))

    y, x = granger_pair(0)
    _write_values(monthly(y), d / "target_series.csv")
    _write_values(monthly(x), d / "predictor_series.csv")

    cfg = d / "run.ini"
    cfg.write_text(DEMO_CONFIG, encoding="utf-8")
    return cfg


def write_oracle_responses(sets_path: str | Path, responses_path: str | Path, annotators: int = 3) -> None:
    """Responses in which every annotator picks the true intruder."""
    with open(sets_path, encoding="utf-8") as fh:
        sets = [json.loads(line) for line in fh if line.strip()]
    with open(responses_path, "w", encoding="utf-8", newline="\n") as fh:
        for a in range(1, annotators + 1):
            for s in sets:
                fh.write(f"a{a}\t{s['set_id']}\t{s['intruder']}\n")
