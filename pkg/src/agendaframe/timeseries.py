"""Coverage series, percent change, Pearson correlation and Granger regressions."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .corpus import Document, EntityAliasSet, Period, TimeSlice, as_doc_map, entity_mention_count

log = logging.getLogger(__name__)


class AlignmentError(ValueError):
    """Two series do not cover the same periods at the same granularity."""


class SeriesError(ValueError):
    pass


@dataclass(frozen=True)
class TimeSeries:
    granularity: str
    points: tuple[tuple[Period, float], ...]

    def __post_init__(self):
        pts = tuple((p, float(v)) for p, v in self.points)
        object.__setattr__(self, "points", pts)
        for p, v in pts:
            if p.granularity != self.granularity:
                raise SeriesError(f"period {p} is not a {self.granularity}")
            if not math.isfinite(v):
                raise SeriesError(f"non-finite value at {p}")
        for (a, _), (b, _) in zip(pts, pts[1:]):
            if b != a.succ():
                raise SeriesError(f"series is not gap-free between {a} and {b}")

    @classmethod
    def from_values(cls, start: Period, values: Iterable[float]) -> "TimeSeries":
        pts, p = [], start
        for v in values:
            pts.append((p, v))
            p = p.succ()
        return cls(start.granularity, tuple(pts))

    @property
    def periods(self) -> list[Period]:
        return [p for p, _ in self.points]

    @property
    def values(self) -> np.ndarray:
        return np.array([v for _, v in self.points], dtype=np.float64)

    def __len__(self) -> int:
        return len(self.points)

    def between(self, first: Period, last: Period) -> "TimeSeries":
        return TimeSeries(self.granularity, tuple((p, v) for p, v in self.points if first <= p <= last))


def read_series(path: str | Path) -> TimeSeries:
    """Read a ``period,value`` CSV (periods ``YYYY``, ``YYYY-Qn`` or ``YYYY-MM``)."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or not {"period", "value"} <= set(reader.fieldnames):
            raise SeriesError(f"{path}: expected a header with 'period' and 'value'")
        rows = []
        for lineno, row in enumerate(reader, 2):
            try:
                rows.append((Period.parse(row["period"]), float(row["value"])))
            except (TypeError, ValueError) as exc:
                raise SeriesError(f"{path}:{lineno}: {exc}") from None
    if not rows:
        raise SeriesError(f"{path}: empty series")
    rows.sort(key=lambda pv: pv[0])
    return TimeSeries(rows[0][0].granularity, tuple(rows))


def write_series(columns: Mapping[str, TimeSeries], path: str | Path) -> None:
    """Write one or more aligned series as ``period,<name>,...`` CSV."""
    names = list(columns)
    first = columns[names[0]]
    for name in names[1:]:
        _check_aligned(first, columns[name])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["period", *names])
        for i, p in enumerate(first.periods):
            w.writerow([str(p), *(f"{columns[n].points[i][1]:.10g}" for n in names)])


def _slice_granularity(slices: Sequence[TimeSlice]) -> str:
    if not slices:
        raise SeriesError("no time slices")
    return slices[0].period.granularity


def article_coverage(
    slices: Sequence[TimeSlice],
    docs: Mapping[str, Document] | Iterable[Document],
    aliases: EntityAliasSet,
    min_mentions: int = 2,
) -> TimeSeries:
    """Share of articles per slice mentioning the entity at least ``min_mentions`` times."""
    gran = _slice_granularity(slices)
    by_id = as_doc_map(docs)
    pts = []
    for sl in slices:
        if not sl.documents:
            log.warning("slice %s has no documents; coverage set to 0", sl.period)
            pts.append((sl.period, 0.0))
            continue
        hits = sum(1 for d in sl.documents if entity_mention_count(by_id[d], aliases) >= min_mentions)
        pts.append((sl.period, hits / len(sl.documents)))
    return TimeSeries(gran, tuple(pts))


def word_coverage(
    slices: Sequence[TimeSlice],
    docs: Mapping[str, Document] | Iterable[Document],
    aliases: EntityAliasSet,
) -> TimeSeries:
    """Entity mentions per token in each slice."""
    gran = _slice_granularity(slices)
    by_id = as_doc_map(docs)
    pts = []
    for sl in slices:
        mentions = sum(entity_mention_count(by_id[d], aliases) for d in sl.documents)
        tokens = sum(len(by_id[d].tokens) for d in sl.documents)
        if tokens == 0:
            log.warning("slice %s has no tokens; coverage set to 0", sl.period)
        pts.append((sl.period, mentions / tokens if tokens else 0.0))
    return TimeSeries(gran, tuple(pts))


def percent_change(s: TimeSeries) -> TimeSeries:
    """x_t / x_{t-1} - 1, one point shorter than the input."""
    vals = s.values
    for i, v in enumerate(vals[:-1]):
        if v == 0:
            raise SeriesError(f"zero value at index {i} ({s.points[i][0]}): percent change undefined")
    changes = vals[1:] / vals[:-1] - 1.0
    return TimeSeries(s.granularity, tuple(zip(s.periods[1:], changes)))


def _check_aligned(x: TimeSeries, y: TimeSeries) -> None:
    if x.granularity != y.granularity:
        raise AlignmentError(f"cannot mix {x.granularity} and {y.granularity} series")
    if x.periods != y.periods:
        raise AlignmentError("series cover different periods")


def align(x: TimeSeries, y: TimeSeries) -> tuple[TimeSeries, TimeSeries]:
    """Restrict both series to the periods they share."""
    if x.granularity != y.granularity:
        raise AlignmentError(f"cannot mix {x.granularity} and {y.granularity} series")
    if not len(x) or not len(y):
        raise AlignmentError("empty series")
    lo = max(x.periods[0], y.periods[0])
    hi = min(x.periods[-1], y.periods[-1])
    if hi < lo:
        raise AlignmentError("series do not overlap")
    return x.between(lo, hi), y.between(lo, hi)


def _as_array(s) -> np.ndarray:
    return s.values if isinstance(s, TimeSeries) else np.asarray(s, dtype=np.float64)


def pearson(x: TimeSeries | Sequence[float], y: TimeSeries | Sequence[float]) -> float:
    if isinstance(x, TimeSeries) and isinstance(y, TimeSeries):
        _check_aligned(x, y)
    a, b = _as_array(x), _as_array(y)
    if len(a) != len(b):
        raise AlignmentError(f"lengths differ: {len(a)} vs {len(b)}")
    if len(a) < 3:
        raise SeriesError("pearson correlation needs at least 3 points")
    da, db = a - a.mean(), b - b.mean()
    sa, sb = math.sqrt(float(da @ da)), math.sqrt(float(db @ db))
    if sa == 0 or sb == 0:
        raise SeriesError("pearson correlation is undefined for a constant series")
    return max(-1.0, min(1.0, float(da @ db) / (sa * sb)))


# -- Student t via the regularized incomplete beta function -------------------

def _beta_cf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    tiny = 1e-300
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    d = 1.0 / (d if abs(d) > tiny else tiny)
    h = d
    for m in range(1, 100_000):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        d = 1.0 / (d if abs(d) > tiny else tiny)
        c = 1.0 + aa / c
        c = c if abs(c) > tiny else tiny
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < 1e-15:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float, one_minus_x: float | None = None) -> float:
    """Regularized incomplete beta I_x(a, b).

    Pass ``one_minus_x`` when it is known more precisely than ``1 - x``.
    """
    if a <= 0 or b <= 0:
        raise ValueError("betainc needs a, b > 0")
    y = 1.0 - x if one_minus_x is None else one_minus_x
    if x <= 0.0:
        return 0.0
    if y <= 0.0:
        return 1.0
    log_front = (
        math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b) + a * math.log(x) + b * math.log(y)
    )
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _beta_cf(b, a, y) / b


def t_two_sided_p(t: float, dof: float) -> float:
    """P(|T| >= |t|) for Student's t with ``dof`` degrees of freedom."""
    if dof <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    t2 = t * t
    return min(1.0, betainc(dof / 2.0, 0.5, dof / (dof + t2), t2 / (dof + t2)))


def t_cdf(t: float, dof: float) -> float:
    tail = 0.5 * t_two_sided_p(t, dof)
    return 1.0 - tail if t >= 0 else tail


# -- Granger regression --------------------------------------------------------

@dataclass(frozen=True)
class GrangerResult:
    m: int
    n: int
    names: tuple[str, ...]
    coefficients: np.ndarray
    std_errors: np.ndarray
    t_stats: np.ndarray
    p_values: np.ndarray
    residual_variance: float
    n_obs: int
    intercept: bool

    @property
    def dof(self) -> int:
        return self.n_obs - len(self.names)

    def _at(self, name: str) -> int:
        try:
            return self.names.index(name)
        except ValueError:
            raise KeyError(f"no coefficient {name!r}; have {self.names}") from None

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self._at(name)])

    def p_value(self, name: str) -> float:
        return float(self.p_values[self._at(name)])

    def rows(self) -> list[dict]:
        return [
            {
                "term": name,
                "coefficient": float(self.coefficients[i]),
                "std_error": float(self.std_errors[i]),
                "t_stat": float(self.t_stats[i]),
                "p_value": float(self.p_values[i]),
            }
            for i, name in enumerate(self.names)
        ]


def lag_design(
    target: np.ndarray, predictor: np.ndarray, m: int, n: int, intercept: bool
) -> tuple[np.ndarray, np.ndarray, tuple[str, ...]]:
    """Response vector and design matrix [1, target lags 1..m, predictor lags 1..n]."""
    p = max(m, n)
    T = len(target)
    cols, names = [], []
    if intercept:
        cols.append(np.ones(T - p))
        names.append("intercept")
    for i in range(1, m + 1):
        cols.append(target[p - i:T - i])
        names.append(f"alpha_{i}")
    for j in range(1, n + 1):
        cols.append(predictor[p - j:T - j])
        names.append(f"beta_{j}")
    return target[p:], np.column_stack(cols), tuple(names)


def granger_test(
    target: TimeSeries | Sequence[float],
    predictor: TimeSeries | Sequence[float],
    m: int = 1,
    n: int = 1,
    intercept: bool = True,
) -> GrangerResult:
    """OLS of target_t on its own ``m`` lags and the predictor's ``n`` lags.

    Inputs are used as given; callers percent-change them first. The test in
    the reverse direction is the same call with the arguments swapped.
    """
    if m < 0 or n < 0:
        raise ValueError("lag orders must be non-negative")
    k = m + n + int(intercept)
    if k == 0:
        raise ValueError("model has no regressors")
    if isinstance(target, TimeSeries) and isinstance(predictor, TimeSeries):
        _check_aligned(target, predictor)
    y_all, x_all = _as_array(target), _as_array(predictor)
    if len(y_all) != len(x_all):
        raise AlignmentError(f"lengths differ: {len(y_all)} vs {len(x_all)}")
    need = max(m, n) + k + 2
    if len(y_all) < need:
        raise SeriesError(f"series of length {len(y_all)} too short: need at least {need} points")

    y, X, names = lag_design(y_all, x_all, m, n, intercept)
    n_obs = len(y)
    xtx = X.T @ X
    if np.linalg.matrix_rank(X) < k or np.linalg.cond(xtx) > 1e14:
        raise np.linalg.LinAlgError("collinear lags")
    beta = np.linalg.solve(xtx, X.T @ y)
    resid = y - X @ beta
    dof = n_obs - k
    rss = float(resid @ resid)
    s2 = rss / dof
    xtx_inv = np.linalg.inv(xtx)
    if rss <= 1e-28 * max(float(y @ y), 1e-300):
        log.warning("degenerate fit: zero residual variance; p-values reported as 0")
        se = np.zeros(k)
        tstats = np.full(k, np.inf)
        pvals = np.zeros(k)
    else:
        se = np.sqrt(s2 * np.diag(xtx_inv))
        tstats = beta / se
        pvals = np.array([t_two_sided_p(float(t), dof) for t in tstats])
    return GrangerResult(m, n, names, beta, se, tstats, pvals, s2, n_obs, intercept)


def write_granger_rows(rows: Iterable[Mapping], path: str | Path) -> None:
    fields = ["direction", "target", "predictor", "m", "n", "term", "coefficient",
              "std_error", "t_stat", "p_value", "n_obs"]
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{v:.10g}" if isinstance(v, float) else v) for k, v in row.items()})
