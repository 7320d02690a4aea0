import random

import pytest

from nearmiss.allen import ALL_RELATIONS, classify, relation_facts
from nearmiss.errors import GenerationError
from nearmiss.generator import (
    contains_attribute_pattern,
    default_config,
    generate,
    realise,
    relational_config,
)
from nearmiss.sequence import render_dataset


def test_planted_overlaps_only_in_pain():
    d = generate(relational_config(seed=7, relation_patterns={"pain": (("overlaps", 4, 43),),
                                                               "disgust": (("starts", 10, 9),)}))
    for s in d.sequences:
        has = ("overlaps", s.id, "au4", "au43") in relation_facts(s)
        assert has == (s.label == "pain")


def test_default_counts():
    d = generate(default_config(seed=7))
    assert len(d.positives("pain")) == 37
    assert len(d.positives("disgust")) == 93


def test_determinism():
    a = render_dataset(generate(default_config(seed=11)))
    b = render_dataset(generate(default_config(seed=11)))
    assert a == b
    assert a != render_dataset(generate(default_config(seed=12)))


def test_attribute_patterns_planted_and_separable():
    cfg = default_config(seed=5)
    d = generate(cfg)
    for s in d.sequences:
        own = cfg.attribute_patterns[s.label]
        assert any(contains_attribute_pattern(s, p) for p in own)
        for other, ps in cfg.attribute_patterns.items():
            if other != s.label:
                assert not any(contains_attribute_pattern(s, p) for p in ps)


def test_horizon_too_small():
    with pytest.raises(GenerationError):
        generate(relational_config(seed=1, horizon=2, event_length=(1, 2)))
    with pytest.raises(GenerationError):
        generate(default_config(horizon=3))


def test_unsatisfiable_patterns():
    with pytest.raises(GenerationError):
        generate(default_config(attribute_patterns={"pain": (((4, "c"),),), "disgust": (((4, "c"), (9, "c")),)}))
    with pytest.raises(GenerationError):
        generate(default_config(attribute_patterns={"pain": (((4, "c"),),)}))


def test_realise_every_relation():
    rng = random.Random(0)
    for rel in ALL_RELATIONS:
        for _ in range(20):
            a, b = realise(rel, rng, 50)
            assert classify(a, b) == rel
            assert 0 <= a[0] and a[1] <= 50 and b[1] <= 50
