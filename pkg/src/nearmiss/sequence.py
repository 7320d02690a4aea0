"""AU interval events, labelled sequences and the JSON dataset format."""

from __future__ import annotations

import enum
import json
import re
from dataclasses import dataclass, field
from typing import IO, Iterable

from nearmiss.errors import DatasetError, ParseError

# Subset of FACS action unit names used for verbalisation.
FACS_NAMES = {
    1: "inner brow raiser",
    2: "outer brow raiser",
    4: "brow lowerer",
    5: "upper lid raiser",
    6: "cheek raiser",
    7: "lid tightener",
    9: "nose wrinkler",
    10: "upper lip raiser",
    12: "lip corner puller",
    14: "dimpler",
    15: "lip corner depressor",
    17: "chin raiser",
    20: "lip stretcher",
    23: "lip tightener",
    25: "lips part",
    26: "jaw drop",
    27: "mouth stretch",
    43: "eyes closed",
    45: "blink",
}

DEFAULT_CLASSES = ("pain", "disgust")

_IDENT = re.compile(r"^[a-z][a-z0-9_]*$")
_DIGITS = re.compile(r"(\d+)")


def is_identifier(token) -> bool:
    return isinstance(token, str) and _IDENT.match(token) is not None


def check_identifier(token, what="identifier"):
    if not is_identifier(token):
        raise DatasetError(
            f"{what} {token!r} is not a lowercase alphanumeric/underscore token"
        )
    return token


def natural_key(token: str):
    """Sort key that orders ``e2`` before ``e10``."""
    return tuple(int(p) if p.isdigit() else p for p in _DIGITS.split(token))


@dataclass(frozen=True, order=True)
class ActionUnit:
    code: int

    def __post_init__(self):
        if not isinstance(self.code, int) or isinstance(self.code, bool) or self.code < 1:
            raise DatasetError(f"AU code must be a positive integer, got {self.code!r}")

    @property
    def name(self):
        return FACS_NAMES.get(self.code)

    @property
    def token(self) -> str:
        return f"au{self.code}"

    @classmethod
    def from_token(cls, token: str) -> "ActionUnit":
        if not token.startswith("au") or not token[2:].isdigit():
            raise DatasetError(f"not an AU token: {token!r}")
        return cls(int(token[2:]))


class Intensity(enum.Enum):
    """FACS intensity letter; ``NONE`` marks an uncoded intensity."""

    A = "a"
    B = "b"
    C = "c"
    D = "d"
    E = "e"
    NONE = "na"

    @property
    def token(self) -> str:
        return self.value

    @property
    def rank(self):
        return None if self is Intensity.NONE else "abcde".index(self.value)

    def __lt__(self, other):
        if not isinstance(other, Intensity):
            return NotImplemented
        if self.rank is None or other.rank is None:
            raise TypeError("uncoded intensity is not ordered")
        return self.rank < other.rank

    @classmethod
    def parse(cls, value) -> "Intensity":
        if value is None or value == "na":
            return cls.NONE
        try:
            return cls(value)
        except ValueError:
            raise DatasetError(f"intensity must be one of a-e or null, got {value!r}") from None

    def to_json(self):
        return None if self is Intensity.NONE else self.value


LETTERS = (Intensity.A, Intensity.B, Intensity.C, Intensity.D, Intensity.E)


@dataclass(frozen=True)
class AUEvent:
    sequence_id: str
    event_id: str
    au: ActionUnit
    onset: int
    offset: int
    intensity: Intensity = Intensity.NONE

    def __post_init__(self):
        for name in ("onset", "offset"):
            value = getattr(self, name)
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise DatasetError(f"{name} must be a non-negative integer, got {value!r}")
        if not self.onset < self.offset:
            raise DatasetError(
                f"event {self.event_id}: onset < offset violated ({self.onset} >= {self.offset})"
            )

    @property
    def sort_key(self):
        return (self.onset, natural_key(self.event_id))


@dataclass(frozen=True)
class SequenceRecord:
    id: str
    label: str
    events: tuple[AUEvent, ...]

    def __post_init__(self):
        check_identifier(self.id, "sequence id")
        check_identifier(self.label, "label")
        if not self.events:
            raise DatasetError(f"sequence {self.id} has no events")
        seen = set()
        for ev in self.events:
            check_identifier(ev.event_id, "event id")
            if ev.sequence_id != self.id:
                raise DatasetError(
                    f"event {ev.event_id} carries sequence id {ev.sequence_id}, expected {self.id}"
                )
            if ev.event_id in seen:
                raise DatasetError(f"duplicate event id {ev.event_id} in sequence {self.id}")
            seen.add(ev.event_id)
        ordered = tuple(sorted(self.events, key=lambda e: e.sort_key))
        object.__setattr__(self, "events", ordered)

    def __len__(self):
        return len(self.events)


@dataclass(frozen=True)
class Dataset:
    classes: tuple[str, ...]
    sequences: tuple[SequenceRecord, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        object.__setattr__(self, "sequences", tuple(self.sequences))
        if len(set(self.classes)) != len(self.classes):
            raise DatasetError("class names must be unique")
        if len(self.classes) < 2:
            raise DatasetError("a dataset needs at least two classes")
        for c in self.classes:
            check_identifier(c, "class name")
        ids = set()
        for seq in self.sequences:
            if seq.label not in self.classes:
                raise DatasetError(f"sequence {seq.id} has undeclared label {seq.label!r}")
            if seq.id in ids:
                raise DatasetError(f"duplicate sequence id {seq.id}")
            ids.add(seq.id)

    def __len__(self):
        return len(self.sequences)

    def get(self, sequence_id: str) -> SequenceRecord:
        for seq in self.sequences:
            if seq.id == sequence_id:
                return seq
        raise KeyError(sequence_id)

    def positives(self, target: str) -> list[SequenceRecord]:
        return [s for s in self.sequences if s.label == target]

    def negatives(self, target: str) -> list[SequenceRecord]:
        return [s for s in self.sequences if s.label != target]


def make_sequence(sequence_id, label, events: Iterable[tuple]) -> SequenceRecord:
    """Build a sequence from ``(event_id, au_code, onset, offset, intensity)`` tuples."""
    built = []
    for event_id, code, on, off, intensity in events:
        built.append(
            AUEvent(sequence_id, event_id, ActionUnit(code), on, off, Intensity.parse(intensity))
        )
    return SequenceRecord(sequence_id, label, tuple(built))


def _require(obj, key, path, kind):
    if not isinstance(obj, dict):
        raise ParseError("expected an object", field=path)
    if key not in obj:
        raise ParseError("missing", field=f"{path}.{key}" if path else key)
    value = obj[key]
    if kind is int:
        ok = isinstance(value, int) and not isinstance(value, bool)
    else:
        ok = isinstance(value, kind)
    if not ok:
        raise ParseError(
            f"expected {getattr(kind, '__name__', kind)}, got {type(value).__name__}",
            field=f"{path}.{key}" if path else key,
        )
    return value


def _decode(payload) -> Dataset:
    classes = _require(payload, "classes", "", list)
    raw_sequences = _require(payload, "sequences", "", list)
    sequences = []
    for i, raw in enumerate(raw_sequences):
        path = f"sequences[{i}]"
        sid = _require(raw, "id", path, str)
        label = _require(raw, "label", path, str)
        raw_events = _require(raw, "events", path, list)
        events = []
        for j, rev in enumerate(raw_events):
            epath = f"{path}.events[{j}]"
            eid = _require(rev, "e", epath, str)
            code = _require(rev, "au", epath, int)
            on = _require(rev, "on", epath, int)
            off = _require(rev, "off", epath, int)
            if not isinstance(rev, dict) or "int" not in rev:
                raise ParseError("missing", field=f"{epath}.int")
            try:
                events.append(
                    AUEvent(sid, eid, ActionUnit(code), on, off, Intensity.parse(rev["int"]))
                )
            except ParseError:
                raise
            except DatasetError as exc:
                raise DatasetError(f"{epath}: {exc}") from None
        sequences.append(SequenceRecord(sid, label, tuple(events)))
    return Dataset(tuple(classes), tuple(sequences))


def parse_dataset(source: str | bytes | IO[str]) -> Dataset:
    """Read and validate a dataset from JSON text or a text stream."""
    text = source if isinstance(source, (str, bytes)) else source.read()
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, line=exc.lineno) from None
    return _decode(payload)


def dataset_to_json(d: Dataset) -> dict:
    return {
        "classes": list(d.classes),
        "sequences": [
            {
                "id": s.id,
                "label": s.label,
                "events": [
                    {
                        "e": e.event_id,
                        "au": e.au.code,
                        "on": e.onset,
                        "off": e.offset,
                        "int": e.intensity.to_json(),
                    }
                    for e in s.events
                ],
            }
            for s in d.sequences
        ],
    }


def render_dataset(d: Dataset) -> str:
    return json.dumps(dataset_to_json(d), indent=1) + "\n"
