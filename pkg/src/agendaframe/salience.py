"""Salience shifts around market moves: month partitions, Dirichlet log-odds, AgendaLex."""

from __future__ import annotations

import logging
import math
from collections import Counter
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence

from .corpus import Document, Period, TimeSlice, as_doc_map
from .framing import FrameAssignment
from .lexicon import ScoredLexicon
from .timeseries import SeriesError, TimeSeries, percent_change

log = logging.getLogger(__name__)

DEFAULT_PRIOR_SCALE = 500.0


class SalienceError(ValueError):
    pass


@dataclass(frozen=True)
class MonthPartition:
    up_months: frozenset[Period]
    down_months: frozenset[Period]
    after_up: frozenset[Period]
    after_down: frozenset[Period]


def partition_months(
    indicator: TimeSeries,
    decile: float = 0.10,
    last_period: Period | None = None,
) -> MonthPartition:
    """Months with the largest rises and falls of the indicator, and the months after them.

    Months are ranked by percent change; the top and bottom ``ceil(decile * N)``
    form the up and down sets. Ties go to the earlier month. Successors after
    ``last_period`` (default: the indicator's last month) are dropped.
    """
    if indicator.granularity != "month":
        raise SeriesError("month partitioning needs a monthly series")
    if len(indicator) < 10:
        raise SeriesError(f"need at least 10 months, got {len(indicator)}")
    if not 0 < decile <= 0.5:
        raise ValueError(f"decile must be in (0, 0.5], got {decile}")
    changes = percent_change(indicator).points
    k = math.ceil(round(decile * len(changes), 9))
    order = sorted(range(len(changes)), key=lambda i: (-changes[i][1], i))
    up = frozenset(changes[i][0] for i in order[:k])
    order = sorted(range(len(changes)), key=lambda i: (changes[i][1], i))
    down = frozenset(changes[i][0] for i in order[:k])
    if up & down:
        raise SalienceError("up and down months overlap; series has too few distinct changes")
    last = last_period or indicator.periods[-1]

    def after(months: frozenset[Period]) -> frozenset[Period]:
        return frozenset(p.succ() for p in months if p.succ() <= last)

    return MonthPartition(up, down, after(up), after(down))


@dataclass(frozen=True)
class WordLogOdds:
    delta: float
    variance: float
    z: float


def log_odds_dirichlet(
    counts_i: Mapping[str, int],
    counts_j: Mapping[str, int],
    prior: Mapping[str, float],
) -> dict[str, WordLogOdds]:
    """Log-odds ratio of word use in corpus i versus j with an informative Dirichlet prior.

    Positive delta/z mean the word is more salient in i.
    """
    n_i = sum(counts_i.values())
    n_j = sum(counts_j.values())
    a0 = sum(prior.values())
    vocab = sorted(set(counts_i) | set(counts_j))
    for w in vocab:
        a = prior.get(w, 0.0)
        if not a > 0:
            raise SalienceError(f"prior for {w!r} must be positive, got {a}")
    out = {}
    for w in vocab:
        a = prior[w]
        yi, yj = counts_i.get(w, 0), counts_j.get(w, 0)
        if n_i + a0 - yi - a <= 0 or n_j + a0 - yj - a <= 0:
            raise SalienceError(f"{w!r} holds all of the count and prior mass; log-odds undefined")
        li = math.log(yi + a) - math.log(n_i + a0 - yi - a)
        lj = math.log(yj + a) - math.log(n_j + a0 - yj - a)
        delta = li - lj
        var = 1.0 / (yi + a) + 1.0 / (yj + a)
        out[w] = WordLogOdds(delta, var, delta / math.sqrt(var))
    return out


def frequency_prior(
    docs: Iterable[Document], scale: float = DEFAULT_PRIOR_SCALE
) -> dict[str, float]:
    """Pseudo-counts proportional to corpus frequency, summing to ``scale``."""
    counts: Counter[str] = Counter()
    for d in docs:
        counts.update(d.tokens)
    total = sum(counts.values())
    if total == 0:
        raise SalienceError("empty corpus; cannot build a prior")
    return {w: scale * c / total for w, c in counts.items()}


def _month_of(doc: Document) -> Period:
    return Period.of(doc.date, "month")


def month_pools(
    docs: Iterable[Document],
    partition: MonthPartition,
) -> dict[str, Counter[str]]:
    pools = {name: Counter() for name in ("down", "after_down", "up", "after_up")}
    members = {
        "down": partition.down_months,
        "after_down": partition.after_down,
        "up": partition.up_months,
        "after_up": partition.after_up,
    }
    n_docs = dict.fromkeys(pools, 0)
    for d in docs:
        m = _month_of(d)
        for name, months in members.items():
            if m in months:
                pools[name].update(d.tokens)
                n_docs[name] += 1
    for name, n in n_docs.items():
        if n == 0:
            raise SalienceError(f"month pool {name!r} has no qualifying documents")
    return pools


def _top_positive(scores: Mapping[str, WordLogOdds], top_n: int) -> list[str]:
    ranked = sorted((w for w, s in scores.items() if s.z > 0), key=lambda w: (-scores[w].z, w))
    return ranked[:top_n]


def build_agendalex(
    frame: str,
    docs: Sequence[Document] | Mapping[str, Document],
    assignments: Mapping[str, FrameAssignment],
    partition: MonthPartition,
    focus: Callable[[Document], bool],
    prior: Mapping[str, float],
    top_n: int = 500,
) -> ScoredLexicon:
    """Words that rise after downturns and fall after upturns in framed, focused articles.

    Takes the ``top_n`` words by z favouring the month after a downturn over
    the downturn month, intersected with the ``top_n`` favouring an upturn
    month over the month after it. Only words with positive z count. Scores in
    the result are the downturn-test z values.
    """
    pool_docs = [
        d for d in as_doc_map(docs).values()
        if frame in assignments[d.id].present and focus(d)
    ]
    pools = month_pools(pool_docs, partition)
    down_test = log_odds_dirichlet(pools["after_down"], pools["down"], prior)
    up_test = log_odds_dirichlet(pools["up"], pools["after_up"], prior)
    rising = _top_positive(down_test, top_n)
    falling = set(_top_positive(up_test, top_n))
    words = [w for w in rising if w in falling]
    return ScoredLexicon.from_scores(frame, ((w, down_test[w].z) for w in words), "agendalex")


def lexicon_frequency_series(
    lexicon: Iterable[str],
    slices: Sequence[TimeSlice],
    docs: Mapping[str, Document] | Iterable[Document],
    focus: Callable[[Document], bool],
) -> TimeSeries:
    """Per slice: lexicon tokens over all tokens, within focus documents only."""
    if not slices:
        raise SeriesError("no time slices")
    words = frozenset(lexicon)
    by_id = as_doc_map(docs)
    pts = []
    for sl in slices:
        hits = total = 0
        for d in (by_id[i] for i in sl.documents):
            if not focus(d):
                continue
            total += len(d.tokens)
            hits += sum(1 for t in d.tokens if t in words)
        if total == 0:
            log.warning("slice %s has no focus documents; frequency set to 0", sl.period)
        pts.append((sl.period, hits / total if total else 0.0))
    return TimeSeries(slices[0].period.granularity, tuple(pts))
