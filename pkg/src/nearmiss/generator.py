"""Synthetic AU sequence datasets with planted class patterns.

Stands in for clinical recordings, which are not shareable.  Each sequence
of a class gets one of that class's planted patterns (picked round-robin)
plus random noise events.  A confuser is an incomplete fragment of another
class's pattern (a proper subset of an attribute pattern, or the two AUs of
a relation pattern at random times); it keeps single AUs from separating the
classes.  With ``separable`` set, a sequence is resampled until it contains
no other class's complete pattern.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass, field, replace

from nearmiss.allen import ALL_RELATIONS, FORWARD, DEFAULT_RELATIONS, classify, converse, relation_facts
from nearmiss.errors import GenerationError
from nearmiss.sequence import (
    ActionUnit,
    AUEvent,
    Dataset,
    Intensity,
    SequenceRecord,
)

DEFAULT_VOCABULARY = (1, 2, 4, 6, 7, 9, 10, 12, 43)

# Patterns deliberately share elements across classes so that single AUs do
# not separate the classes and learned rules need conjunctions.
DEFAULT_ATTRIBUTE_PATTERNS = {
    "pain": (((4, "c"), (7, "c")), ((6, "b"), (43, "c"))),
    "disgust": (((4, "c"), (9, "c")), ((10, "b"), (43, "c"))),
}

DEFAULT_RELATION_PATTERNS = {
    "pain": (("overlaps", 4, 43),),
    "disgust": (("starts", 10, 9),),
}

# points needed to realise each forward relation from sorted distinct cut points
_POINTS = {"before": 4, "meets": 3, "overlaps": 4, "starts": 3, "during": 4, "finishes": 3, "equals": 2}


@dataclass(frozen=True)
class GeneratorConfig:
    class_counts: dict = field(default_factory=lambda: {"pain": 37, "disgust": 93})
    au_vocabulary: tuple = DEFAULT_VOCABULARY
    events_per_sequence: tuple = (4, 7)
    horizon: int = 100
    event_length: tuple = (5, 30)
    intensity_weights: dict = field(
        default_factory=lambda: {"a": 1, "b": 2, "c": 3, "d": 2, "e": 1, "na": 0}
    )
    attribute_patterns: dict = field(default_factory=lambda: dict(DEFAULT_ATTRIBUTE_PATTERNS))
    relation_patterns: dict = field(default_factory=dict)
    noise_rate: float = 1.0
    confuser_rate: float = 0.5
    separable: bool = True
    seed: int = 7
    max_attempts: int = 500

    @property
    def classes(self) -> tuple:
        return tuple(self.class_counts)

    def with_seed(self, seed: int) -> "GeneratorConfig":
        return replace(self, seed=seed)

    def to_json(self) -> dict:
        return {
            "class_counts": dict(self.class_counts),
            "au_vocabulary": list(self.au_vocabulary),
            "events_per_sequence": list(self.events_per_sequence),
            "horizon": self.horizon,
            "event_length": list(self.event_length),
            "intensity_weights": dict(self.intensity_weights),
            "attribute_patterns": {
                c: [[list(u) for u in p] for p in ps] for c, ps in self.attribute_patterns.items()
            },
            "relation_patterns": {
                c: [list(p) for p in ps] for c, ps in self.relation_patterns.items()
            },
            "noise_rate": self.noise_rate,
            "confuser_rate": self.confuser_rate,
            "separable": self.separable,
            "seed": self.seed,
        }


def default_config(seed: int = 7, **overrides) -> GeneratorConfig:
    return replace(GeneratorConfig(seed=seed), **overrides)


def relational_config(seed: int = 7, **overrides) -> GeneratorConfig:
    """Class-exclusive temporal relations and no attribute patterns."""
    base = GeneratorConfig(
        seed=seed,
        attribute_patterns={},
        relation_patterns=dict(DEFAULT_RELATION_PATTERNS),
    )
    return replace(base, **overrides)


PRESETS = {"default": default_config, "relational": relational_config}


def _canonical(pattern):
    rel, a, b = pattern
    if rel not in ALL_RELATIONS:
        raise GenerationError(f"unknown relation {rel!r}")
    if rel not in FORWARD:
        return (converse(rel), b, a)
    return (rel, a, b)


def _validate(config: GeneratorConfig):
    if len(config.class_counts) < 2:
        raise GenerationError("need at least two classes")
    for c, n in config.class_counts.items():
        if n < 0:
            raise GenerationError(f"negative count for {c}")
        if n and not config.attribute_patterns.get(c) and not config.relation_patterns.get(c):
            raise GenerationError(f"class {c} has no planted pattern")
    lo, hi = config.events_per_sequence
    if not 1 <= lo <= hi:
        raise GenerationError("events_per_sequence must satisfy 1 <= min <= max")
    lmin, lmax = config.event_length
    if not 1 <= lmin <= lmax:
        raise GenerationError("event_length must satisfy 1 <= min <= max")
    if lmin > config.horizon:
        raise GenerationError(f"horizon {config.horizon} is shorter than the minimum event length")
    for ps in config.relation_patterns.values():
        for p in ps:
            rel, _, _ = _canonical(p)
            if config.horizon + 1 < _POINTS[rel]:
                raise GenerationError(f"horizon {config.horizon} too small to realise {rel}")
    if not any(config.intensity_weights.get(k, 0) > 0 for k in ("a", "b", "c", "d", "e", "na")):
        raise GenerationError("intensity weights are all zero")
    if config.separable:
        for c, ps in config.attribute_patterns.items():
            for o, qs in config.attribute_patterns.items():
                if o == c:
                    continue
                for p in ps:
                    for q in qs:
                        if not Counter(p) - Counter(q):
                            raise GenerationError(
                                f"pattern {p} of {c} is contained in pattern {q} of {o}"
                            )


def _intensity(rng: random.Random, config) -> str:
    keys = [k for k in ("a", "b", "c", "d", "e", "na")]
    weights = [config.intensity_weights.get(k, 0) for k in keys]
    return rng.choices(keys, weights)[0]


def _interval(rng: random.Random, config) -> tuple[int, int]:
    lmin, lmax = config.event_length
    length = rng.randint(lmin, min(lmax, config.horizon))
    on = rng.randint(0, config.horizon - length)
    return on, on + length


def realise(relation: str, rng: random.Random, horizon: int) -> tuple[tuple[int, int], tuple[int, int]]:
    """Two intervals within ``[0, horizon]`` standing in ``relation``."""
    rel = relation if relation in FORWARD else converse(relation)
    k = _POINTS[rel]
    if horizon + 1 < k:
        raise GenerationError(f"horizon {horizon} too small to realise {relation}")
    p = sorted(rng.sample(range(horizon + 1), k))
    if rel == "before":
        a, b = (p[0], p[1]), (p[2], p[3])
    elif rel == "meets":
        a, b = (p[0], p[1]), (p[1], p[2])
    elif rel == "overlaps":
        a, b = (p[0], p[2]), (p[1], p[3])
    elif rel == "starts":
        a, b = (p[0], p[1]), (p[0], p[2])
    elif rel == "during":
        a, b = (p[1], p[2]), (p[0], p[3])
    elif rel == "finishes":
        a, b = (p[1], p[2]), (p[0], p[2])
    else:
        a = b = (p[0], p[1])
    if rel != relation:
        a, b = b, a
    assert classify(a, b) == relation
    return a, b


def _build(sid, label, raw) -> SequenceRecord:
    raw = sorted(raw, key=lambda r: (r[2], r[3], r[0], r[1]))
    width = len(str(len(raw)))
    events = tuple(
        AUEvent(sid, f"e{i:0{width}d}", ActionUnit(au), on, off, Intensity.parse(inten))
        for i, (au, inten, on, off) in enumerate(raw, start=1)
    )
    return SequenceRecord(sid, label, events)


def contains_attribute_pattern(s: SequenceRecord, pattern) -> bool:
    have = Counter((e.au.code, e.intensity.token) for e in s.events)
    return not Counter(tuple(u) for u in pattern) - have


def contains_relation_pattern(s: SequenceRecord, pattern, facts=None) -> bool:
    rel, a, b = _canonical(pattern)
    if facts is None:
        facts = relation_facts(s, DEFAULT_RELATIONS)
    keys = {(f[0], f[2], f[3]) for f in facts}
    if (rel, f"au{a}", f"au{b}") in keys:
        return True
    return rel == "equals" and ("equals", f"au{b}", f"au{a}") in keys


def _separable(s: SequenceRecord, label: str, config) -> bool:
    facts = None
    for other in config.class_counts:
        if other == label:
            continue
        for p in config.attribute_patterns.get(other, ()):
            if contains_attribute_pattern(s, p):
                return False
        rel_patterns = config.relation_patterns.get(other, ())
        if rel_patterns and facts is None:
            facts = relation_facts(s, DEFAULT_RELATIONS)
        for p in rel_patterns:
            if contains_relation_pattern(s, p, facts):
                return False
    return True


def _confusers(config, label):
    attr, rels = [], []
    for other in config.class_counts:
        if other != label:
            attr.extend(p for p in config.attribute_patterns.get(other, ()) if len(p) > 1)
            rels.extend(config.relation_patterns.get(other, ()))
    return attr, rels


def _sequence(rng, config, sid, label, k) -> SequenceRecord:
    attr = config.attribute_patterns.get(label, ())
    rels = config.relation_patterns.get(label, ())
    attr_conf, rel_conf = _confusers(config, label)
    for _ in range(config.max_attempts):
        raw = []
        if attr:
            for au, inten in attr[k % len(attr)]:
                raw.append((au, inten) + _interval(rng, config))
        if rels:
            rel, a, b = rels[k % len(rels)]
            ia, ib = realise(rel, rng, config.horizon)
            raw.append((a, _intensity(rng, config)) + ia)
            raw.append((b, _intensity(rng, config)) + ib)
        if attr_conf and rng.random() < config.confuser_rate:
            q = rng.choice(attr_conf)
            for au, inten in rng.sample(list(q), len(q) - 1):
                raw.append((au, inten) + _interval(rng, config))
        if rel_conf and rng.random() < config.confuser_rate:
            _, a, b = rng.choice(rel_conf)
            for au in (a, b):
                raw.append((au, _intensity(rng, config)) + _interval(rng, config))
        total = rng.randint(*config.events_per_sequence)
        for _ in range(max(0, total - len(raw))):
            if rng.random() < config.noise_rate:
                au = rng.choice(config.au_vocabulary)
                raw.append((au, _intensity(rng, config)) + _interval(rng, config))
        s = _build(sid, label, raw)
        if not config.separable or _separable(s, label, config):
            return s
    raise GenerationError(
        f"could not generate a separable {label} sequence in {config.max_attempts} attempts"
    )


def generate(config: GeneratorConfig = GeneratorConfig()) -> Dataset:
    """Deterministic for a fixed ``config.seed``."""
    _validate(config)
    rng = random.Random(config.seed)
    sequences = []
    for label, count in config.class_counts.items():
        width = max(3, len(str(count)))
        for k in range(count):
            sid = f"{label}_{k + 1:0{width}d}"
            sequences.append(_sequence(rng, config, sid, label, k))
    return Dataset(config.classes, tuple(sequences))
