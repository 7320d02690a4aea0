"""Allen interval relations between AU events.

Intervals are half-open ``[on, off)`` over integers, so two intervals *meet*
when the first one's offset equals the second one's onset.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from nearmiss.sequence import ActionUnit, AUEvent, SequenceRecord

FORWARD = ("before", "meets", "overlaps", "starts", "during", "finishes", "equals")
CONVERSE = {
    "before": "after",
    "meets": "met_by",
    "overlaps": "overlapped_by",
    "starts": "started_by",
    "during": "contains",
    "finishes": "finished_by",
    "equals": "equals",
}
CONVERSE.update({v: k for k, v in list(CONVERSE.items())})
RELATIONS = FORWARD + ("after", "met_by", "overlapped_by", "started_by", "contains", "finished_by")
ALL_RELATIONS = frozenset(RELATIONS)


def converse(relation: str) -> str:
    return CONVERSE[relation]


def classify(a: tuple[int, int], b: tuple[int, int]) -> str:
    """Return the Allen relation of interval ``a`` with respect to ``b``."""
    a_on, a_off = a
    b_on, b_off = b
    if not (a_on < a_off and b_on < b_off):
        raise ValueError(f"degenerate interval in {a!r}, {b!r}")
    if a_off < b_on:
        return "before"
    if b_off < a_on:
        return "after"
    if a_off == b_on:
        return "meets"
    if b_off == a_on:
        return "met_by"
    # the intervals now share at least one point
    if a_on == b_on:
        if a_off == b_off:
            return "equals"
        return "starts" if a_off < b_off else "started_by"
    if a_off == b_off:
        return "finishes" if a_on > b_on else "finished_by"
    if a_on < b_on:
        return "overlaps" if a_off < b_off else "contains"
    return "during" if a_off < b_off else "overlapped_by"


@dataclass(frozen=True)
class AllenFact:
    sequence_id: str
    relation: str
    first_au: ActionUnit
    second_au: ActionUnit
    first_occurrence: int
    second_occurrence: int

    @property
    def key(self):
        """The AU-level unit ``(relation, au1, au2)`` used in exported facts."""
        return (self.relation, self.first_au.token, self.second_au.token)

    def as_fact(self) -> tuple:
        return (self.relation, self.sequence_id, self.first_au.token, self.second_au.token)


@dataclass(frozen=True)
class RelationConfig:
    """Which relations to keep and whether to orient pairs to forward tags.

    ``retained`` may name converse tags; under canonicalisation they select
    their forward counterpart.
    """

    retained: frozenset = ALL_RELATIONS
    canonical: bool = True

    def __post_init__(self):
        retained = frozenset(self.retained)
        unknown = retained - ALL_RELATIONS
        if unknown:
            raise ValueError(f"unknown Allen relations: {sorted(unknown)}")
        object.__setattr__(self, "retained", retained)

    def keeps(self, relation: str) -> bool:
        if self.canonical:
            return relation in self.retained or converse(relation) in self.retained
        return relation in self.retained


DEFAULT_RELATIONS = RelationConfig()
OVERLAPS_AND_STARTS = RelationConfig(frozenset({"overlaps", "starts"}))


def occurrence_indices(events: Iterable[AUEvent]) -> dict[str, int]:
    """Map event id to its 1-based occurrence among events of the same AU."""
    counts: dict[int, int] = {}
    out = {}
    for ev in events:
        counts[ev.au.code] = counts.get(ev.au.code, 0) + 1
        out[ev.event_id] = counts[ev.au.code]
    return out


def oriented_pair(a: AUEvent, b: AUEvent, canonical=True) -> tuple[str, AUEvent, AUEvent]:
    """Relation of an event pair, ordered so the tag is a forward one.

    ``a`` must precede ``b`` in (onset, event id) order; with ``equals`` this
    order is kept.
    """
    rel = classify((a.onset, a.offset), (b.onset, b.offset))
    if canonical and rel not in FORWARD:
        return converse(rel), b, a
    return rel, a, b


def enumerate_relations(s: SequenceRecord, config: RelationConfig = DEFAULT_RELATIONS) -> list[AllenFact]:
    """One fact per unordered event pair, in pair order over the sorted events."""
    occ = occurrence_indices(s.events)
    facts = []
    for a, b in combinations(s.events, 2):
        rel, first, second = oriented_pair(a, b, config.canonical)
        if not config.keeps(rel):
            continue
        facts.append(
            AllenFact(
                s.id, rel, first.au, second.au, occ[first.event_id], occ[second.event_id]
            )
        )
    return facts


def relation_facts(s: SequenceRecord, config: RelationConfig = DEFAULT_RELATIONS) -> list[tuple]:
    """Ground ``relation(seq, au1, au2)`` facts, one per distinct AU-level unit."""
    seen = set()
    out = []
    for fact in enumerate_relations(s, config):
        ground = fact.as_fact()
        if ground not in seen:
            seen.add(ground)
            out.append(ground)
    return out
