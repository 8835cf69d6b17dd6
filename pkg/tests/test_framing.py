from datetime import date

import pytest
from hypothesis import given, strategies as st

from agendaframe.corpus import Document, EntityAliasSet, entity_focus
from agendaframe.framing import (
    FramingError,
    assign_all,
    assign_frames,
    npmi,
    npmi_from_events,
    read_assignments,
    write_assignments,
)
from agendaframe.lexicon import ScoredLexicon

from oracles import assign_per_token

D = date(2010, 1, 1)


def lexicons(table):
    return {f: ScoredLexicon.from_scores(f, [(w, 1.0) for w in ws], "final") for f, ws in table.items()}


LEX = lexicons({"Economic": ["tax", "deficit", "budget", "jobs"], "Political": ["vote", "senate", "party", "poll"]})


def doc(tokens, i="d"):
    return Document(i, D, tokens)


def test_threshold_met_exactly():
    a = assign_frames(doc(["tax", "tax", "deficit"]), LEX)
    assert a.present == {"Economic"}
    assert a.primary == "Economic"
    assert a.counts == {"Economic": 3, "Political": 0}


def test_below_threshold_is_other():
    a = assign_frames(doc(["tax", "deficit"]), LEX)
    assert a.present == frozenset()
    assert a.primary == "Other"


def test_lexicographic_tie_break():
    a = assign_frames(doc(["tax", "deficit", "budget", "jobs", "vote", "senate", "party", "poll"]), LEX)
    assert a.present == {"Economic", "Political"}
    assert a.primary == "Economic"


def test_distinct_mode_counts_types():
    tokens = ["tax", "tax", "tax", "vote", "senate", "poll"]
    assert assign_frames(doc(tokens), LEX).primary == "Economic"
    d = assign_frames(doc(tokens), LEX, distinct=True)
    assert d.counts == {"Economic": 1, "Political": 3}
    assert d.primary == "Political"


def test_word_in_two_lexicons_counts_for_both():
    lex = lexicons({"A": ["x"], "B": ["x"]})
    a = assign_frames(doc(["x", "x", "x"]), lex)
    assert a.present == {"A", "B"}
    assert a.primary == "A"


vocab = st.sampled_from(["tax", "deficit", "budget", "jobs", "vote", "senate", "party", "poll", "rain", "sun"])


@given(st.lists(vocab, max_size=30), st.integers(1, 6))
def test_matches_per_token_oracle(tokens, threshold):
    a = assign_frames(doc(tokens), LEX, threshold)
    counts, present, primary = assign_per_token(tokens, {f: l.words for f, l in LEX.items()}, threshold)
    assert dict(a.counts) == counts
    assert set(a.present) == present
    assert a.primary == primary


@given(st.lists(vocab, max_size=30), st.integers(1, 6))
def test_primary_is_present_or_other(tokens, threshold):
    a = assign_frames(doc(tokens), LEX, threshold)
    if a.present:
        assert a.primary in a.present
        assert all(a.counts[a.primary] >= a.counts[f] for f in a.present)
    else:
        assert a.primary == "Other"


def test_assignments_roundtrip(tmp_path):
    docs = [doc(["tax"] * 3, "a"), doc(["vote"], "b")]
    assigned = assign_all(docs, LEX)
    p = tmp_path / "a.jsonl"
    write_assignments(assigned.values(), p)
    back = read_assignments(p)
    assert back == assigned


FOCUS = entity_focus(EntityAliasSet.from_strings("USA", ["сша"]), 2)


def corpus(pattern):
    out = []
    for i, (focused, framed) in enumerate(pattern):
        toks = (["сша", "сша"] if focused else []) + (["tax"] * 3 if framed else []) + ["и"]
        out.append(doc(toks, f"d{i}"))
    return out


def test_complete_cooccurrence_is_one():
    assert npmi(corpus([(1, 1), (1, 1), (0, 0), (0, 0)]), FOCUS, "Economic", LEX) == 1.0


def test_independence_is_zero():
    assert npmi(corpus([(1, 1), (1, 0), (0, 1), (0, 0)]), FOCUS, "Economic", LEX) == pytest.approx(0.0, abs=1e-12)


def test_disjoint_is_minus_one():
    assert npmi(corpus([(1, 0), (0, 1), (0, 0)]), FOCUS, "Economic", LEX) == -1.0


def test_missing_event_raises():
    with pytest.raises(FramingError, match="Economic"):
        npmi(corpus([(1, 0), (1, 0)]), FOCUS, "Economic", LEX)
    with pytest.raises(FramingError):
        npmi_from_events([], [])


def test_events_everywhere_is_one():
    assert npmi_from_events([True, True], [True, True]) == 1.0


def test_hand_computed_value():
    # n=4, x in 2, y in 3, both in 2: pmi = ln(0.5 / (0.5*0.75)), normalized by -ln 0.5
    import math

    expected = math.log(0.5 / (0.5 * 0.75)) / -math.log(0.5)
    assert npmi_from_events([1, 1, 0, 0], [1, 1, 1, 0]) == pytest.approx(expected, abs=1e-12)


@given(st.lists(st.tuples(st.booleans(), st.booleans()), min_size=1, max_size=50))
def test_npmi_bounded_and_symmetric(pairs):
    x = [a for a, _ in pairs]
    y = [b for _, b in pairs]
    if not any(x) or not any(y):
        return
    v = npmi_from_events(x, y)
    assert -1.0 <= v <= 1.0
    assert v == pytest.approx(npmi_from_events(y, x), abs=1e-12)
