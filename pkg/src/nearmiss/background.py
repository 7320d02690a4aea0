"""Ground background-knowledge facts per sequence and their text export."""

from __future__ import annotations

from nearmiss.allen import DEFAULT_RELATIONS, RelationConfig, relation_facts
from nearmiss.sequence import Dataset, SequenceRecord, check_identifier, natural_key

MODES = ("attributes", "relations")


def check_mode(mode: str) -> str:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    return mode


def event_facts(s: SequenceRecord) -> list[tuple]:
    return [
        ("event", s.id, e.event_id, e.au.token, str(e.onset), str(e.offset), e.intensity.token)
        for e in s.events
    ]


def sequence_facts(
    s: SequenceRecord, mode: str, relations: RelationConfig = DEFAULT_RELATIONS
) -> list[tuple]:
    """Event facts, followed by relation facts in relations mode."""
    check_mode(mode)
    facts = event_facts(s)
    if mode == "relations":
        facts.extend(relation_facts(s, relations))
    return facts


def format_fact(fact: tuple) -> str:
    return f"{fact[0]}({','.join(fact[1:])})."


def export_background_knowledge(
    d: Dataset, mode: str, relations: RelationConfig = DEFAULT_RELATIONS
) -> str:
    lines = []
    for s in sorted(d.sequences, key=lambda s: natural_key(s.id)):
        check_identifier(s.id, "sequence id")
        for e in s.events:
            check_identifier(e.event_id, "event id")
        lines.extend(format_fact(f) for f in sequence_facts(s, mode, relations))
    return "".join(line + "\n" for line in lines)
