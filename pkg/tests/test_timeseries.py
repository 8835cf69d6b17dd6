import logging
from datetime import date

import mpmath
import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from agendaframe.corpus import Document, EntityAliasSet, Period, slice_corpus
from agendaframe.synthetic import granger_pair, monthly
from agendaframe.timeseries import (
    AlignmentError,
    SeriesError,
    TimeSeries,
    align,
    article_coverage,
    betainc,
    granger_test,
    pearson,
    percent_change,
    read_series,
    t_cdf,
    t_two_sided_p,
    word_coverage,
    write_granger_rows,
    write_series,
)

from oracles import ols_reference, t_two_sided_p_mp

USA = EntityAliasSet.from_strings("USA", ["сша"])


def docs_in(month, token_lists):
    return [Document(f"{month}-{i}", date(2003, month, 1), toks) for i, toks in enumerate(token_lists)]


def test_article_coverage_fraction():
    docs = docs_in(1, [["сша", "сша"], ["сша", "и", "сша"], ["сша"]])
    cov = article_coverage(slice_corpus(docs, "month"), docs, USA)
    assert cov.values.tolist() == pytest.approx([2 / 3])


def test_article_coverage_no_qualifying_and_vacuous_threshold():
    docs = docs_in(1, [["а"], ["б"]])
    slices = slice_corpus(docs, "month")
    assert article_coverage(slices, docs, USA).values.tolist() == [0.0]
    assert article_coverage(slices, docs, USA, min_mentions=0).values.tolist() == [1.0]


def test_empty_slice_is_zero_with_warning(caplog):
    docs = docs_in(1, [["сша", "сша"]]) + docs_in(3, [["сша", "сша"]])
    slices = slice_corpus(docs, "month")
    with caplog.at_level(logging.WARNING):
        cov = article_coverage(slices, docs, USA)
    assert cov.values.tolist() == [1.0, 0.0, 1.0]
    assert "2003-02" in caplog.text


def test_word_coverage():
    five = docs_in(1, [["сша"] * 5 + ["и"] * 95])
    assert word_coverage(slice_corpus(five, "month"), five, USA).values.tolist() == [0.05]
    none = docs_in(1, [["и"] * 10])
    assert word_coverage(slice_corpus(none, "month"), none, USA).values.tolist() == [0.0]
    every = docs_in(1, [["сша"] * 7])
    assert word_coverage(slice_corpus(every, "month"), every, USA).values.tolist() == [1.0]


def series(values, start=Period(2003, month=1)):
    return TimeSeries.from_values(start, values)


def test_percent_change_examples():
    assert percent_change(series([100, 110, 99])).values.tolist() == pytest.approx([0.10, -0.10])
    assert percent_change(series([5, 5, 5])).values.tolist() == [0.0, 0.0]
    with pytest.raises(SeriesError, match="index 1"):
        percent_change(series([2, 0, 3]))


def test_percent_change_drops_first_period():
    pc = percent_change(series([1, 2, 4]))
    assert [str(p) for p in pc.periods] == ["2003-02", "2003-03"]


def test_pearson_examples():
    assert pearson([1, 2, 3, 4], [1, 2, 3, 4]) == pytest.approx(1.0)
    assert pearson([1, 2, 3], [2, 1, 3]) == pytest.approx(0.5, abs=1e-12)
    x = [3.0, 1.0, 4.0, 1.5, 9.0]
    assert pearson(x, [-v + 7 for v in x]) == pytest.approx(-1.0)


def test_pearson_rejects_constant():
    with pytest.raises(SeriesError):
        pearson([1, 1, 1], [1, 2, 3])


vals = st.lists(st.floats(-100, 100, allow_nan=False), min_size=3, max_size=20)


@given(vals, st.data(), st.floats(0.1, 10), st.floats(-5, 5))
def test_pearson_symmetry_and_affine_invariance(x, data, a, b):
    y = data.draw(st.lists(st.floats(-100, 100, allow_nan=False), min_size=len(x), max_size=len(x)))
    xa, ya = np.array(x), np.array(y)
    assume(np.std(xa) > 1e-3 and np.std(ya) > 1e-3)
    r = pearson(x, y)
    assert -1.0 <= r <= 1.0
    assert pearson(y, x) == pytest.approx(r, abs=1e-9)
    assert pearson(a * xa + b, y) == pytest.approx(r, abs=1e-6)
    assert pearson(-a * xa + b, y) == pytest.approx(-r, abs=1e-6)


def test_alignment_rules():
    a = series([1, 2, 3, 4])
    b = series([5, 6, 7], start=Period(2003, month=2))
    x, y = align(a, b)
    assert x.periods == y.periods and len(x) == 3
    with pytest.raises(AlignmentError):
        pearson(a, TimeSeries.from_values(Period(2003, quarter=1), [1, 2, 3, 4]))
    with pytest.raises(AlignmentError):
        align(a, TimeSeries.from_values(Period(2003), [1, 2, 3]))


def test_series_csv_roundtrip(tmp_path):
    s = series([1.5, 2.25, 3.0])
    p = tmp_path / "s.csv"
    write_series({"value": s}, p)
    assert read_series(p) == s


def test_series_must_be_gap_free():
    with pytest.raises(SeriesError):
        TimeSeries("month", ((Period(2003, month=1), 1.0), (Period(2003, month=3), 1.0)))


# -- Student t and incomplete beta --------------------------------------------------

@settings(max_examples=200, deadline=None)
@given(st.floats(0.05, 200), st.floats(0.05, 200), st.floats(0, 1))
def test_betainc_matches_mpmath(a, b, x):
    ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
    assert betainc(a, b, x) == pytest.approx(ref, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(st.floats(-60, 60), st.floats(0.5, 500))
def test_t_pvalue_matches_mpmath(t, dof):
    assert t_two_sided_p(t, dof) == pytest.approx(t_two_sided_p_mp(t, dof), abs=1e-9)


def test_t_cdf_symmetry():
    for dof in (1, 4, 30):
        for t in (0.3, 1.7, 4.0):
            assert t_cdf(t, dof) + t_cdf(-t, dof) == pytest.approx(1.0, abs=1e-14)
    assert t_cdf(0.0, 7) == pytest.approx(0.5)


def test_cauchy_closed_form():
    # with one degree of freedom, P(|T| >= 1) = 1/2
    assert t_two_sided_p(1.0, 1) == pytest.approx(0.5, abs=1e-14)


# -- Granger ------------------------------------------------------------------------

def test_granger_recovers_planted_coefficient():
    y, x = granger_pair(0)
    r = granger_test(monthly(y), monthly(x), 1, 1)
    assert r.names == ("intercept", "alpha_1", "beta_1")
    assert -0.45 <= r.coefficient("beta_1") <= -0.25
    assert r.p_value("beta_1") < 0.05
    assert r.n_obs == 167 and r.dof == 164


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(0, 3), st.integers(0, 3), st.booleans())
def test_granger_matches_qr_oracle(seed, m, n, intercept):
    assume(m + n + intercept > 0)
    rng = np.random.default_rng(seed)
    y, x = rng.normal(size=40), rng.normal(size=40)
    r = granger_test(y, x, m, n, intercept)
    p = max(m, n)
    cols = ([np.ones(40 - p)] if intercept else []) + [y[p - i:40 - i] for i in range(1, m + 1)] \
        + [x[p - j:40 - j] for j in range(1, n + 1)]
    beta, se = ols_reference(y[p:], np.column_stack(cols))
    assert np.allclose(r.coefficients, beta, atol=1e-10)
    assert np.allclose(r.std_errors, se, atol=1e-10)
    dof = len(y) - p - len(beta)
    for tval, pval in zip(r.t_stats, r.p_values):
        assert pval == pytest.approx(t_two_sided_p_mp(tval, dof), abs=1e-9)


def test_granger_names_for_two_lags_without_intercept():
    y, x = granger_pair(1)
    r = granger_test(y, x, 2, 2, intercept=False)
    assert r.names == ("alpha_1", "alpha_2", "beta_1", "beta_2")


def test_granger_length_precondition():
    with pytest.raises(SeriesError, match="too short"):
        granger_test([1.0, 2.0], [3.0, 4.0], 1, 1)


def test_granger_collinear_lags():
    y = np.sin(np.arange(30.0))
    with pytest.raises(np.linalg.LinAlgError, match="collinear"):
        granger_test(y, y, 1, 1)


def test_granger_exact_fit_warns(caplog):
    x = np.random.default_rng(0).normal(size=30)
    y = np.zeros(30)
    y[1:] = 2.0 * x[:-1]
    with caplog.at_level(logging.WARNING):
        r = granger_test(y, x, 0, 1, intercept=False)
    assert r.coefficient("beta_1") == pytest.approx(2.0)
    assert r.p_value("beta_1") == 0.0
    assert "zero residual" in caplog.text


def test_granger_rows_csv(tmp_path):
    y, x = granger_pair(0)
    r = granger_test(y, x)
    rows = [{"direction": "forward", "target": "y", "predictor": "x", "m": 1, "n": 1, **row, "n_obs": r.n_obs}
            for row in r.rows()]
    p = tmp_path / "g.csv"
    write_granger_rows(rows, p)
    lines = p.read_text().splitlines()
    assert lines[0] == "direction,target,predictor,m,n,term,coefficient,std_error,t_stat,p_value,n_obs"
    assert len(lines) == 4
