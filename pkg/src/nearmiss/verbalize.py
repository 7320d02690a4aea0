"""Plain-language rendering of contrastive explanations."""

from __future__ import annotations

from typing import Mapping

from nearmiss.selection import ContrastiveExplanation
from nearmiss.sequence import FACS_NAMES
from nearmiss.tracing import AttributeFeature, parse_feature

ORDINALS = {2: "second", 3: "third", 4: "fourth", 5: "fifth"}


def au_label(code: int, au_table: Mapping[int, str] = FACS_NAMES) -> str:
    name = au_table.get(code)
    return name if name else f"AU {code}"


def describe_feature(token: str, au_table: Mapping[int, str] = FACS_NAMES) -> str:
    f = parse_feature(token)
    if isinstance(f, AttributeFeature):
        text = au_label(f.au, au_table)
        if f.intensity != "na":
            text += f" (intensity {f.intensity})"
    else:
        text = (
            f"{au_label(f.first_au, au_table)} {f.relation.replace('_', ' ')} "
            f"{au_label(f.second_au, au_table)}"
        )
    if f.index > 1:
        text += f" a {ORDINALS.get(f.index, f'{f.index}th')} time"
    return text


def verbalize(e: ContrastiveExplanation, au_table: Mapping[int, str] = FACS_NAMES) -> str:
    """One sentence per differing feature, present-only ones first."""
    if e.length == 0:
        return "no differences found"
    lines = [f"shows {describe_feature(t, au_table)}" for t in sorted(e.present_only)]
    lines += [f"does not show {describe_feature(t, au_table)}" for t in sorted(e.absent_only)]
    return "\n".join(lines)
