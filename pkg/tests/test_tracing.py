import pytest

from nearmiss.logic import Theory, parse_clause, parse_theory
from nearmiss.sequence import make_sequence
from nearmiss.tracing import (
    AttributeFeature,
    FeatureSet,
    RelationFeature,
    full_bk,
    parse_feature,
    propositionalize,
    trace,
)

RULE_1 = "pain(S) :- event(S,E1,au7,_,_,_), event(S,E2,au6,_,_,_), event(S,E3,au4,_,_,_)."


def test_fig1_trace(fig1_pain):
    t = trace(parse_theory(RULE_1), fig1_pain)
    aus = [lit[3] for lit in t.grounded_literals]
    assert aus == ["au7", "au6", "au4"]
    assert all(lit[0] == "event" and lit[1] == "s1" for lit in t.grounded_literals)
    assert t.clause_indices == (0,)


def test_uncovered_trace_is_empty(fig1_pain):
    t = trace(parse_theory("pain(S) :- event(S,_,au9,_,_,_)."), fig1_pain)
    assert not t and t.grounded_literals == ()
    assert propositionalize(t, "attributes").features == frozenset()


def test_shared_literal_appears_once(fig1_pain):
    th = parse_theory(
        "pain(S) :- event(S,E1,au7,_,_,c), event(S,E2,au4,_,_,_).\n"
        "pain(S) :- event(S,E1,au4,_,_,c).\n"
    )
    t = trace(th, fig1_pain)
    assert len(t.grounded_literals) == 2
    assert t.clause_indices == (0, 1)


def test_repeated_attribute_indexing():
    s = make_sequence("s", "pain", [("e1", 4, 0, 5, "c"), ("e2", 4, 10, 15, "c")])
    th = parse_theory("pain(S) :- event(S,E1,au4,_,_,c), event(S,E2,au4,_,_,c).")
    fs = propositionalize(trace(th, s, injective=True), "attributes")
    assert fs.features == {"au4_c_1", "au4_c_2"}


def test_relation_feature(fig1_pain):
    th = parse_theory("pain(S) :- overlaps(S,au4,au43).")
    fs = propositionalize(trace(th, fig1_pain, "relations"), "relations")
    assert fs.features == {"overlaps_au4_au43_1"}
    assert fs.origin == "trace" and fs.mode == "relations"


def test_full_bk_one_feature_per_event():
    s = make_sequence("s", "pain", [(f"e{i}", au, i, i + 3, "b") for i, au in enumerate([4, 4, 6, 7, 9])])
    assert len(full_bk(s, "attributes")) == 5


def test_full_bk_relations_keeps_occurrences():
    s = make_sequence(
        "s", "pain", [("e1", 4, 0, 5, "a"), ("e2", 43, 3, 8, "a"), ("e3", 4, 6, 12, "a"), ("e4", 43, 10, 20, "b")]
    )
    fs = full_bk(s, "relations")
    assert {"overlaps_au4_au43_1", "overlaps_au4_au43_2"} <= fs.features
    assert len(fs) == 6


def test_loss_free_attributes():
    a = make_sequence("a", "pain", [("e1", 4, 0, 5, "c"), ("e2", 4, 10, 15, "c")])
    b = make_sequence("b", "pain", [("e1", 4, 0, 5, "c")])
    c = make_sequence("c", "pain", [("e1", 4, 0, 5, "c"), ("e2", 4, 10, 15, "b")])
    sets = {full_bk(x, "attributes").features for x in (a, b, c)}
    assert len(sets) == 3


def test_feature_token_round_trip():
    for f in (AttributeFeature(43, "na", 2), RelationFeature("overlaps", 4, 43, 1),
              RelationFeature("finishes", 10, 12, 3)):
        assert parse_feature(f.token) == f
    with pytest.raises(ValueError):
        parse_feature("overlap_au4_au43_1")


def test_feature_set_json(fig1_pain):
    fs = full_bk(fig1_pain, "attributes")
    assert FeatureSet.from_json(fs.to_json()) == fs
    assert fs.to_json()["features"] == sorted(fs.features)
    with pytest.raises(ValueError):
        FeatureSet("s", "both", "attributes", frozenset())


def test_trace_subset_of_full_bk(small_dataset):
    th = Theory("pain", (parse_clause("pain(S) :- event(S,E1,au4,_,_,_), event(S,E2,au43,_,_,_)."),))
    for s in small_dataset.sequences:
        for mode in ("attributes",):
            tr = propositionalize(trace(th, s, mode), mode)
            assert tr.features <= full_bk(s, mode).features
