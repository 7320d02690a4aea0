"""Traces of covering rules and their propositionalisation into feature sets."""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Union

from nearmiss.allen import ALL_RELATIONS, DEFAULT_RELATIONS, RelationConfig, enumerate_relations
from nearmiss.background import check_mode, sequence_facts
from nearmiss.logic import FactSet, Theory, theory_covers
from nearmiss.sequence import ActionUnit, SequenceRecord

ORIGINS = ("trace", "full_bk")


@dataclass(frozen=True)
class Trace:
    sequence_id: str
    label: str
    grounded_literals: tuple
    clause_indices: tuple = ()

    def __bool__(self):
        return bool(self.grounded_literals)


def trace(t: Theory, s: SequenceRecord, mode: str = "attributes",
          relations: RelationConfig = DEFAULT_RELATIONS, injective: bool = False) -> Trace:
    """Ground every covering clause with its first substitution.

    Literals are deduplicated and kept in clause order.  An uncovered
    sequence yields an empty trace.
    """
    facts = FactSet(sequence_facts(s, mode, relations))
    seen = set()
    literals = []
    hits = theory_covers(t, facts, injective)
    for i, sub in hits:
        for lit in t.clauses[i].body:
            g = lit.ground(sub)
            if g not in seen:
                seen.add(g)
                literals.append(g)
    return Trace(s.id, s.label, tuple(literals), tuple(i for i, _ in hits))


@dataclass(frozen=True, order=True)
class AttributeFeature:
    au: int
    intensity: str
    index: int

    @property
    def token(self):
        return f"au{self.au}_{self.intensity}_{self.index}"


@dataclass(frozen=True, order=True)
class RelationFeature:
    relation: str
    first_au: int
    second_au: int
    index: int

    @property
    def token(self):
        return f"{self.relation}_au{self.first_au}_au{self.second_au}_{self.index}"


Feature = Union[AttributeFeature, RelationFeature]

_ATTR = re.compile(r"^au(\d+)_(a|b|c|d|e|na)_(\d+)$")
_REL = re.compile(r"^([a-z_]+)_au(\d+)_au(\d+)_(\d+)$")


def parse_feature(token: str) -> Feature:
    m = _ATTR.match(token)
    if m:
        return AttributeFeature(int(m.group(1)), m.group(2), int(m.group(3)))
    m = _REL.match(token)
    if m and m.group(1) in ALL_RELATIONS:
        return RelationFeature(m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4)))
    raise ValueError(f"not a feature token: {token!r}")


@dataclass(frozen=True)
class FeatureSet:
    sequence_id: str
    origin: str
    mode: str
    features: frozenset

    def __post_init__(self):
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}")
        check_mode(self.mode)
        object.__setattr__(self, "features", frozenset(self.features))

    def __len__(self):
        return len(self.features)

    def __iter__(self):
        return iter(sorted(self.features))

    def to_json(self) -> dict:
        return {
            "seq": self.sequence_id,
            "origin": self.origin,
            "mode": self.mode,
            "features": sorted(self.features),
        }

    @classmethod
    def from_json(cls, payload: dict) -> "FeatureSet":
        return cls(payload["seq"], payload["origin"], payload["mode"], frozenset(payload["features"]))


def _index(units: Iterable[tuple]) -> list[tuple]:
    counts: dict[tuple, int] = {}
    out = []
    for u in units:
        counts[u] = counts.get(u, 0) + 1
        out.append(u + (counts[u],))
    return out


def _attribute_units(facts: Iterable[tuple]) -> list[tuple]:
    # (event, seq, eid, au, on, off, intensity)
    events = [f for f in facts if f[0] == "event" and len(f) == 7]
    return [(ActionUnit.from_token(f[3]).code, f[6]) for f in events]


def _attribute_features(units) -> frozenset:
    return frozenset(AttributeFeature(au, inten, k).token for au, inten, k in _index(units))


def _relation_features(units) -> frozenset:
    return frozenset(
        RelationFeature(rel, a, b, k).token for rel, a, b, k in _index(units)
    )


def propositionalize(
    source: Union[Trace, SequenceRecord],
    mode: str,
    relations: RelationConfig = DEFAULT_RELATIONS,
) -> FeatureSet:
    """Indexed feature set of a trace, or of a sequence's full background knowledge.

    The k-th occurrence of the same ground unit gets index k, so repeated AUs
    or relations stay distinguishable.  Relation features drop intensities,
    attribute features drop timestamps.
    """
    check_mode(mode)
    if isinstance(source, Trace):
        literals = source.grounded_literals
        if mode == "attributes":
            features = _attribute_features(_attribute_units(literals))
        else:
            units = [
                (f[0], ActionUnit.from_token(f[2]).code, ActionUnit.from_token(f[3]).code)
                for f in literals
                if f[0] in ALL_RELATIONS and len(f) == 4
            ]
            features = _relation_features(units)
        return FeatureSet(source.sequence_id, "trace", mode, features)

    if mode == "attributes":
        features = _attribute_features(
            (e.au.code, e.intensity.token) for e in source.events
        )
    else:
        features = _relation_features(
            (f.relation, f.first_au.code, f.second_au.code)
            for f in enumerate_relations(source, relations)
        )
    return FeatureSet(source.id, "full_bk", mode, features)


def full_bk(s: SequenceRecord, mode: str, relations: RelationConfig = DEFAULT_RELATIONS) -> FeatureSet:
    return propositionalize(s, mode, relations)
