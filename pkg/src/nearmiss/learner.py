"""Sequential-covering Horn clause learner.

The loop follows the classic bottom-clause scheme: pick an uncovered positive
seed, saturate it into a most specific clause, search for a more general
clause among subsets of the bottom clause's literals, drop the positives the
new clause covers, repeat.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from nearmiss.allen import DEFAULT_RELATIONS, RelationConfig, enumerate_relations
from nearmiss.background import check_mode, sequence_facts
from nearmiss.errors import LearnerError
from nearmiss.logic import Clause, Const, FactSet, Literal, Theory, Var, covers, theory_covers
from nearmiss.sequence import Dataset, SequenceRecord, natural_key

log = logging.getLogger(__name__)

SEQ = Var("S")
SEED_SELECTIONS = ("first-uncovered", "index-order")


@dataclass(frozen=True)
class LearnerConfig:
    mode: str = "attributes"
    max_body_literals: int = 4
    beam_width: int = 16
    noise: int = 0
    seed_selection: str = "first-uncovered"
    on_seed_error: str = "skip"
    injective: bool = False
    relations: RelationConfig = DEFAULT_RELATIONS

    def __post_init__(self):
        check_mode(self.mode)
        if self.max_body_literals < 1:
            raise ValueError("max_body_literals must be positive")
        if self.beam_width < 1:
            raise ValueError("beam_width must be positive")
        if self.noise < 0:
            raise ValueError("noise must be non-negative")
        if self.seed_selection not in SEED_SELECTIONS:
            raise ValueError(f"seed_selection must be one of {SEED_SELECTIONS}")
        if self.on_seed_error not in ("skip", "raise"):
            raise ValueError("on_seed_error must be 'skip' or 'raise'")


@dataclass(frozen=True)
class BottomClause:
    head: Literal
    candidate_literals: tuple
    seed_id: str = ""

    def clause(self, indices: Sequence[int]) -> Clause:
        return make_clause(self.head.predicate, [self.candidate_literals[i] for i in indices])


def _anon(counter):
    counter[0] += 1
    return Var(f"_G{counter[0]}")


def make_clause(target: str, literals) -> Clause:
    """Assemble a clause, renaming event variables E1..En in body order."""
    renames: dict[Var, Var] = {}
    body = []
    for lit in literals:
        args = []
        for a in lit.args:
            if isinstance(a, Var) and a != SEQ and not a.anonymous:
                if a not in renames:
                    renames[a] = Var(f"E{len(renames) + 1}")
                a = renames[a]
            args.append(a)
        body.append(Literal(lit.predicate, tuple(args)))
    return Clause(Literal(target, (SEQ,)), tuple(body))


def saturate(
    seed: SequenceRecord,
    mode: str,
    relations: RelationConfig = DEFAULT_RELATIONS,
    target: str | None = None,
) -> BottomClause:
    """Lift a seed's facts to the candidate literals of its bottom clause."""
    check_mode(mode)
    if not seed.events:
        raise LearnerError(f"seed {seed.id} has no events", seed=seed.id)
    counter = [0]
    candidates = []
    if mode == "attributes":
        for i, e in enumerate(seed.events, start=1):
            candidates.append(
                Literal(
                    "event",
                    (SEQ, Var(f"E{i}"), Const(e.au.token), _anon(counter), _anon(counter),
                     Const(e.intensity.token)),
                )
            )
    else:
        seen = set()
        for fact in enumerate_relations(seed, relations):
            if fact.key in seen:
                continue
            seen.add(fact.key)
            rel, a, b = fact.key
            candidates.append(Literal(rel, (SEQ, Const(a), Const(b))))
        aus = []
        for e in seed.events:
            if e.au not in aus:
                aus.append(e.au)
        for i, au in enumerate(aus, start=1):
            candidates.append(
                Literal(
                    "event",
                    (SEQ, Var(f"E{i}"), Const(au.token), _anon(counter), _anon(counter),
                     _anon(counter)),
                )
            )
    if not candidates:
        raise LearnerError(f"seed {seed.id} yields no candidate literals", seed=seed.id)
    return BottomClause(Literal(target or seed.label, (SEQ,)), tuple(candidates), seed.id)


class CoverageIndex:
    """Coverage of literals and clauses over a fixed example pool, as bitmasks.

    Candidate literals from a bottom clause share no variable other than the
    sequence variable, so without injectivity a clause's coverage is the AND
    of its literals' coverages.
    """

    def __init__(self, examples: Sequence[SequenceRecord], config: LearnerConfig):
        self.config = config
        self.examples = list(examples)
        self.bit = {s.id: 1 << i for i, s in enumerate(self.examples)}
        self.facts = [
            FactSet(sequence_facts(s, config.mode, config.relations)) for s in self.examples
        ]
        self._literal_masks: dict = {}
        self.evaluations = 0

    def mask_of(self, sequences) -> int:
        m = 0
        for s in sequences:
            m |= self.bit[s.id]
        return m

    def ids(self, mask: int) -> list[str]:
        return [s.id for s in self.examples if mask & self.bit[s.id]]

    def _literal_key(self, lit: Literal):
        return (lit.predicate,) + tuple(
            a.value if isinstance(a, Const) else None for a in lit.args[1:]
        )

    def literal_mask(self, lit: Literal) -> int:
        key = self._literal_key(lit)
        m = self._literal_masks.get(key)
        if m is None:
            m = self.clause_mask(make_clause("q", [lit]), -1, independent=False)
            self._literal_masks[key] = m
        return m

    def clause_mask(self, clause: Clause, within: int = -1, independent: bool = True) -> int:
        if independent and not self.config.injective:
            m = within
            for lit in clause.body:
                m &= self.literal_mask(lit)
            return m & ((1 << len(self.examples)) - 1)
        m = 0
        for i, fs in enumerate(self.facts):
            if within & (1 << i):
                self.evaluations += 1
                if covers(clause, fs, self.config.injective) is not None:
                    m |= 1 << i
        return m


@dataclass
class _Node:
    indices: tuple
    mask: int
    pos: int
    neg: int


def _search(bottom, positives, negatives, config, index: CoverageIndex):
    seed_bit = index.bit[bottom.seed_id] if bottom.seed_id in index.bit else 0
    pos_mask = index.mask_of(positives)
    neg_mask = index.mask_of(negatives)
    if not seed_bit & pos_mask:
        raise ValueError(f"seed {bottom.seed_id} is not among the positives")
    lits = bottom.candidate_literals
    if config.injective:
        lit_masks = None
    else:
        lit_masks = [index.literal_mask(l) for l in lits]

    def node(indices, within):
        if lit_masks is not None:
            m = within & lit_masks[indices[-1]] if indices else within
        else:
            m = index.clause_mask(bottom.clause(indices), within, independent=False)
        return _Node(indices, m, (m & pos_mask).bit_count(), (m & neg_mask).bit_count())

    def better(a, b):
        if b is None:
            return True
        return (-a.pos, len(a.indices), a.indices) < (-b.pos, len(b.indices), b.indices)

    root = node((), pos_mask | neg_mask)
    best = root if root.neg <= config.noise else None
    beam = [root]
    for _depth in range(config.max_body_literals):
        children: dict[int, _Node] = {}
        for parent in beam:
            if parent.neg <= config.noise:
                continue
            start = parent.indices[-1] + 1 if parent.indices else 0
            for j in range(start, len(lits)):
                child = node(parent.indices + (j,), parent.mask)
                if child.mask == parent.mask or not child.mask & seed_bit:
                    continue
                known = children.get(child.mask)
                if known is None or child.indices < known.indices:
                    children[child.mask] = child
        if not children:
            break
        for child in children.values():
            if child.neg <= config.noise and better(child, best):
                best = child
        ranked = sorted(
            children.values(), key=lambda n: (-(n.pos - n.neg), -n.pos, n.indices)
        )
        beam = [n for n in ranked[: config.beam_width] if n.neg > config.noise]
        if best is not None:
            beam = [n for n in beam if n.pos > best.pos]
        if not beam:
            break
    if best is None:
        raise LearnerError(
            f"no clause of at most {config.max_body_literals} literals covering seed "
            f"{bottom.seed_id} covers at most {config.noise} negatives",
            seed=bottom.seed_id,
        )
    return best


def search(
    bottom: BottomClause,
    positives: Sequence[SequenceRecord],
    negatives: Sequence[SequenceRecord],
    config: LearnerConfig = LearnerConfig(),
    index: CoverageIndex | None = None,
) -> Clause:
    """Beam search for the best consistent generalisation of ``bottom``.

    Best means most positives covered, then fewest body literals, then
    earliest candidate literals.  Consistent means at most ``config.noise``
    negatives covered.
    """
    if index is None:
        index = CoverageIndex(list(positives) + list(negatives), config)
    best = _search(bottom, positives, negatives, config, index)
    return bottom.clause(best.indices)


def exhaustive_search(
    bottom: BottomClause,
    positives: Sequence[SequenceRecord],
    negatives: Sequence[SequenceRecord],
    config: LearnerConfig = LearnerConfig(),
    max_literals: int = 2,
) -> Clause:
    """Same objective as :func:`search`, enumerating every literal subset.

    Only meant for small bottom clauses; used to check the beam search.
    """
    facts = {
        s.id: FactSet(sequence_facts(s, config.mode, config.relations))
        for s in list(positives) + list(negatives)
    }
    best_key, best_clause = None, None
    n = len(bottom.candidate_literals)
    for size in range(max_literals + 1):
        for idx in combinations(range(n), size):
            clause = bottom.clause(idx)
            if covers(clause, facts[bottom.seed_id], config.injective) is None:
                continue
            neg = sum(covers(clause, facts[s.id], config.injective) is not None for s in negatives)
            if neg > config.noise:
                continue
            pos = sum(covers(clause, facts[s.id], config.injective) is not None for s in positives)
            key = (-pos, size, idx)
            if best_key is None or key < best_key:
                best_key, best_clause = key, clause
    if best_clause is None:
        raise LearnerError(f"no consistent clause for seed {bottom.seed_id}", seed=bottom.seed_id)
    return best_clause


@dataclass
class ClauseStats:
    clause: Clause
    seed: str
    positives_covered: int
    negatives_covered: int


@dataclass
class LearnReport:
    target_class: str
    mode: str
    n_positives: int
    n_negatives: int
    clauses: list = field(default_factory=list)
    skipped_seeds: list = field(default_factory=list)
    covered_positives: list = field(default_factory=list)
    covered_negatives: list = field(default_factory=list)

    @property
    def accuracy(self) -> Fraction:
        total = self.n_positives + self.n_negatives
        correct = len(self.covered_positives) + self.n_negatives - len(self.covered_negatives)
        return Fraction(correct, total)

    @property
    def positive_accuracy(self) -> Fraction:
        if not self.n_positives:
            return Fraction(0)
        return Fraction(len(self.covered_positives), self.n_positives)

    @property
    def complete(self) -> bool:
        return len(self.covered_positives) == self.n_positives

    @property
    def consistent(self) -> bool:
        return not self.covered_negatives

    def to_json(self) -> dict:
        return {
            "class": self.target_class,
            "mode": self.mode,
            "positives": self.n_positives,
            "negatives": self.n_negatives,
            "covered": len(self.covered_positives),
            "negatives_covered": len(self.covered_negatives),
            "accuracy": round(float(self.accuracy), 4),
            "clauses": [
                {"clause": str(c.clause), "seed": c.seed, "positives": c.positives_covered,
                 "negatives": c.negatives_covered}
                for c in self.clauses
            ],
            "skipped_seeds": list(self.skipped_seeds),
        }


@dataclass
class LearnResult:
    theory: Theory
    report: LearnReport


def learn(dataset: Dataset, target_class: str, config: LearnerConfig = LearnerConfig()) -> LearnResult:
    """Learn a theory for ``target_class`` against every other class."""
    if target_class not in dataset.classes:
        raise ValueError(f"unknown class {target_class!r}")
    positives = dataset.positives(target_class)
    negatives = dataset.negatives(target_class)
    if not positives or not negatives:
        raise ValueError(f"class {target_class!r} needs at least one positive and one negative")
    if config.seed_selection == "index-order":
        positives = sorted(positives, key=lambda s: natural_key(s.id))

    index = CoverageIndex(positives + negatives, config)
    remaining = list(positives)
    skipped: list[str] = []
    clauses: list[tuple[Clause, str]] = []
    while True:
        seed = next((s for s in remaining if s.id not in skipped), None)
        if seed is None:
            break
        try:
            bottom = saturate(seed, config.mode, config.relations, target_class)
            best = _search(bottom, remaining, negatives, config, index)
        except LearnerError:
            if config.on_seed_error == "raise":
                raise
            log.debug("skipping seed %s", seed.id)
            skipped.append(seed.id)
            continue
        clause = bottom.clause(best.indices)
        clauses.append((clause, seed.id))
        remaining = [s for s in remaining if not best.mask & index.bit[s.id]]

    theory = Theory(target_class, tuple(c for c, _ in clauses))
    report = LearnReport(target_class, config.mode, len(positives), len(negatives))
    per_clause_pos = [0] * len(clauses)
    per_clause_neg = [0] * len(clauses)
    for s, fs in zip(index.examples, index.facts):
        hits = theory_covers(theory, fs, config.injective)
        for i, _ in hits:
            if s.label == target_class:
                per_clause_pos[i] += 1
            else:
                per_clause_neg[i] += 1
        if hits:
            if s.label == target_class:
                report.covered_positives.append(s.id)
            else:
                report.covered_negatives.append(s.id)
    report.clauses = [
        ClauseStats(c, seed, per_clause_pos[i], per_clause_neg[i])
        for i, (c, seed) in enumerate(clauses)
    ]
    report.skipped_seeds = [sid for sid in skipped if sid not in report.covered_positives]
    return LearnResult(theory, report)
