"""Cross-lingual lexicon projection through a bilingual dictionary."""

from __future__ import annotations

import logging
from dataclasses import dataclass
from itertools import combinations
from pathlib import Path
from typing import Mapping

from .corpus import tokenize
from .embedding import EmbeddingSpace, ExpansionConfig, expand_lexicon
from .lexicon import DF_MAX, DF_MIN, DocFrequencyTable, LexiconError, ScoredLexicon, df_filter

log = logging.getLogger(__name__)

FINAL_SIZE_BAND = (100, 300)


@dataclass(frozen=True)
class BilingualDictionary:
    """Source word -> target-language single-token translations."""

    entries: Mapping[str, tuple[str, ...]]

    def __post_init__(self):
        clean = {}
        for src, targets in self.entries.items():
            targets = tuple(dict.fromkeys(targets))
            if not targets:
                raise ValueError(f"dictionary entry {src!r} has no translations")
            for t in targets:
                if t != t.lower() or len(tokenize(t)) != 1 or tokenize(t)[0] != t:
                    raise ValueError(f"translation {t!r} of {src!r} is not a lowercased single token")
            clean[src] = targets
        object.__setattr__(self, "entries", clean)

    def get(self, word: str) -> tuple[str, ...]:
        return self.entries.get(word, ())

    def __len__(self) -> int:
        return len(self.entries)


def load_dictionary(path: str | Path) -> BilingualDictionary:
    """Read ``source<TAB>target1,target2,...`` rows.

    Multi-word translations are dropped with a warning; entries left with no
    translation are omitted.
    """
    entries: dict[str, list[str]] = {}
    dropped = 0
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.rstrip("\n")
            if not line.strip() or line.startswith("#"):
                continue
            if "\t" not in line:
                raise ValueError(f"{path}:{lineno}: expected source<TAB>targets")
            src, rest = line.split("\t", 1)
            src = src.strip().lower()
            for raw in rest.split(","):
                toks = tokenize(raw)
                if len(toks) == 1:
                    entries.setdefault(src, []).append(toks[0])
                elif toks:
                    dropped += 1
    if dropped:
        log.warning("%s: dropped %d multi-word translations", path, dropped)
    return BilingualDictionary({s: tuple(t) for s, t in entries.items() if t})


def translate_lexicon(lex: ScoredLexicon, dictionary: BilingualDictionary) -> ScoredLexicon:
    """Union of translations; a target word keeps the best score among its sources."""
    best: dict[str, float] = {}
    for word, score in lex.entries:
        for target in dictionary.get(word):
            if target not in best or score > best[target]:
                best[target] = score
    if not best:
        raise LexiconError(f"dictionary covers no words of the {lex.frame!r} lexicon")
    return ScoredLexicon.from_scores(lex.frame, best.items(), "translated")


def project_lexicon(
    base: ScoredLexicon,
    dictionary: BilingualDictionary,
    target_space: EmbeddingSpace,
    target_df: DocFrequencyTable,
    cfg: ExpansionConfig,
    df_band: tuple[float, float] = (DF_MIN, DF_MAX),
) -> ScoredLexicon:
    """translate -> cap target vocabulary -> expand -> document-frequency filter."""
    if cfg.mode != "replace":
        log.warning("%s: cross-lingual projection normally uses replace mode", base.frame)
    translated = translate_lexicon(base, dictionary)
    expanded = expand_lexicon(translated, target_space.top(cfg.vocab_cap), cfg)
    kept = df_filter(expanded.entries, target_df, *df_band)
    if not kept:
        raise LexiconError(f"no projected words for {base.frame!r} survive document-frequency filtering")
    final = ScoredLexicon(base.frame, tuple(kept), "final")
    lo, hi = FINAL_SIZE_BAND
    if not lo <= len(final) <= hi:
        log.warning("%s: final lexicon has %d words, outside the usual %d-%d", base.frame, len(final), lo, hi)
    return final


def expand_and_filter(
    lex: ScoredLexicon,
    space: EmbeddingSpace,
    df: DocFrequencyTable,
    cfg: ExpansionConfig,
    df_band: tuple[float, float] = (DF_MIN, DF_MAX),
) -> ScoredLexicon:
    """Monolingual specialization: expand, then document-frequency filter."""
    expanded = expand_lexicon(lex, space, cfg)
    kept = df_filter(expanded.entries, df, *df_band)
    if not kept:
        raise LexiconError(f"no expanded words for {lex.frame!r} survive document-frequency filtering")
    return ScoredLexicon(lex.frame, tuple(kept), "final")


def lexicon_overlap(lexicons: Mapping[str, ScoredLexicon]) -> list[tuple[str, str, int, float]]:
    """Pairwise shared-word counts and Jaccard overlap between frame lexicons."""
    rows = []
    for a, b in combinations(sorted(lexicons), 2):
        sa, sb = lexicons[a].word_set(), lexicons[b].word_set()
        shared = len(sa & sb)
        union = len(sa | sb)
        rows.append((a, b, shared, shared / union if union else 0.0))
    return rows
