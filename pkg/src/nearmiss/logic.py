"""Function-free Horn clauses and coverage of ground sequence facts.

Coverage is theta-subsumption: a clause covers a sequence when some
substitution maps every body literal onto one of the sequence's facts.
Variables whose names start with ``_`` are anonymous; each one is distinct
and prints as ``_``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Iterator, Union

from nearmiss.errors import StructureError

_CONST = re.compile(r"^[a-z0-9][a-z0-9_]*$")
_VAR = re.compile(r"^([A-Z][A-Za-z0-9_]*|_[A-Za-z0-9_]*)$")


@dataclass(frozen=True)
class Const:
    value: str

    def __post_init__(self):
        if not _CONST.match(self.value):
            raise StructureError(f"invalid constant {self.value!r}")

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        if not _VAR.match(self.name):
            raise StructureError(f"invalid variable name {self.name!r}")

    @property
    def anonymous(self) -> bool:
        return self.name.startswith("_")

    def __str__(self):
        return "_" if self.anonymous else self.name


Term = Union[Const, Var]
Substitution = dict  # Var -> Const


def term(token: str) -> Term:
    return Var(token) if _VAR.match(token) else Const(token)


@dataclass(frozen=True)
class Literal:
    predicate: str
    args: tuple

    def __post_init__(self):
        object.__setattr__(self, "args", tuple(self.args))
        if not _CONST.match(self.predicate) or self.predicate[0].isdigit():
            raise StructureError(f"invalid predicate {self.predicate!r}")

    @property
    def variables(self) -> list[Var]:
        return [a for a in self.args if isinstance(a, Var)]

    def ground(self, sub: Substitution) -> tuple:
        """Apply ``sub`` and return the fact tuple ``(predicate, *args)``."""
        out = [self.predicate]
        for a in self.args:
            if isinstance(a, Var):
                if a not in sub:
                    raise KeyError(f"unbound variable {a.name}")
                out.append(sub[a].value)
            else:
                out.append(a.value)
        return tuple(out)

    def __str__(self):
        return f"{self.predicate}({','.join(str(a) for a in self.args)})"


@dataclass(frozen=True)
class Clause:
    head: Literal
    body: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "body", tuple(self.body))
        if len(self.head.args) != 1 or not isinstance(self.head.args[0], Var):
            raise StructureError(f"head {self.head} must take exactly one sequence variable")
        if self.head.args[0].anonymous:
            raise StructureError("the sequence variable cannot be anonymous")
        seq = self.head.args[0]
        for lit in self.body:
            if not lit.args or lit.args[0] != seq:
                raise StructureError(
                    f"body literal {lit} must take the sequence variable {seq.name} first"
                )

    @property
    def seq_var(self) -> Var:
        return self.head.args[0]

    @property
    def variables(self) -> list[Var]:
        seen = {}
        for lit in self.body:
            for v in lit.variables:
                seen.setdefault(v, None)
        return list(seen)

    def __len__(self):
        return len(self.body)

    def __str__(self):
        if not self.body:
            return f"{self.head}."
        return f"{self.head} :- {', '.join(str(lit) for lit in self.body)}."


@dataclass(frozen=True)
class Theory:
    target_class: str
    clauses: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "clauses", tuple(self.clauses))
        for c in self.clauses:
            if c.head.predicate != self.target_class:
                raise StructureError(
                    f"clause head {c.head.predicate} differs from target {self.target_class}"
                )

    def __len__(self):
        return len(self.clauses)

    def __str__(self):
        return "".join(f"{c}\n" for c in self.clauses)


class FactSet:
    """Ground facts of one sequence, indexed by predicate."""

    def __init__(self, facts: Iterable[tuple]):
        self.facts = tuple(facts)
        self.index: dict[tuple[str, int], list[tuple]] = {}
        ids = set()
        for f in self.facts:
            self.index.setdefault((f[0], len(f) - 1), []).append(f)
            if len(f) > 1:
                ids.add(f[1])
        if len(ids) > 1:
            raise ValueError(f"facts reference several sequences: {sorted(ids)}")
        self.sequence_id = next(iter(ids)) if ids else None

    def __contains__(self, fact):
        return fact in self.index.get((fact[0], len(fact) - 1), ())

    def __len__(self):
        return len(self.facts)


def _as_factset(facts) -> FactSet:
    return facts if isinstance(facts, FactSet) else FactSet(facts)


def _solutions(body, i, facts: FactSet, sub: dict, injective: bool, seq_var) -> Iterator[dict]:
    if i == len(body):
        yield dict(sub)
        return
    lit = body[i]
    for fact in facts.index.get((lit.predicate, len(lit.args)), ()):
        bound = []
        ok = True
        for arg, value in zip(lit.args, fact[1:]):
            if isinstance(arg, Const):
                if arg.value != value:
                    ok = False
                    break
                continue
            current = sub.get(arg)
            if current is None:
                if injective and not arg.anonymous and any(
                    c.value == value
                    for v, c in sub.items()
                    if v != seq_var and not v.anonymous
                ):
                    ok = False
                    break
                sub[arg] = Const(value)
                bound.append(arg)
            elif current.value != value:
                ok = False
                break
        if ok:
            yield from _solutions(body, i + 1, facts, sub, injective, seq_var)
        for v in bound:
            del sub[v]


def covers(c: Clause, facts, injective: bool = False, sequence_id: str | None = None):
    """First covering substitution of ``c`` over ``facts``, or None.

    Search order is body-literal order, then fact order.  With ``injective``
    set, distinct named variables must bind distinct constants.  ``sequence_id``
    is only needed when ``facts`` is empty.
    """
    for sub in covers_all(c, facts, injective, sequence_id):
        return sub
    return None


def covers_all(c: Clause, facts, injective: bool = False, sequence_id: str | None = None):
    """Every covering substitution, in search order."""
    if not isinstance(c, Clause):
        raise StructureError(f"not a clause: {c!r}")
    fs = _as_factset(facts)
    sid = fs.sequence_id if fs.sequence_id is not None else sequence_id
    if sid is None:
        return
    if sequence_id is not None and sid != sequence_id:
        raise ValueError(f"facts belong to {sid}, not {sequence_id}")
    sub = {c.seq_var: Const(sid)}
    yield from _solutions(c.body, 0, fs, sub, injective, c.seq_var)


def theory_covers(t: Theory, facts, injective: bool = False) -> list[tuple[int, dict]]:
    """``(clause index, substitution)`` for every clause covering the facts."""
    fs = _as_factset(facts)
    out = []
    for i, c in enumerate(t.clauses):
        sub = covers(c, fs, injective)
        if sub is not None:
            out.append((i, sub))
    return out


# -- text format -----------------------------------------------------------

_LITERAL = re.compile(r"\s*([a-z][a-z0-9_]*)\s*\(([^()]*)\)\s*")


def _parse_literal(text: str, fresh) -> Literal:
    m = _LITERAL.fullmatch(text)
    if not m:
        raise StructureError(f"cannot parse literal {text!r}")
    args = []
    for tok in m.group(2).split(","):
        tok = tok.strip()
        if tok == "_":
            args.append(fresh())
        else:
            args.append(term(tok))
    return Literal(m.group(1), tuple(args))


def _split_literals(text: str) -> list[str]:
    parts, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    if "".join(cur).strip():
        parts.append("".join(cur))
    return parts


def parse_clause(text: str) -> Clause:
    text = text.strip()
    if not text.endswith("."):
        raise StructureError(f"clause must end with '.': {text!r}")
    text = text[:-1]
    counter = iter(range(1, 1 << 30))

    def fresh():
        return Var(f"_G{next(counter)}")

    if ":-" in text:
        head_text, body_text = text.split(":-", 1)
        body = tuple(_parse_literal(p, fresh) for p in _split_literals(body_text))
    else:
        head_text, body = text, ()
    return Clause(_parse_literal(head_text, fresh), body)


def parse_theory(text: str, target_class: str | None = None) -> Theory:
    clauses = [parse_clause(line) for line in text.splitlines() if line.strip() and not line.lstrip().startswith("%")]
    if target_class is None:
        if not clauses:
            raise StructureError("empty theory needs an explicit target class")
        target_class = clauses[0].head.predicate
    return Theory(target_class, tuple(clauses))
