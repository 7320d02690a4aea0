"""Set-similarity ranking of contrast examples and near/far-miss explanations."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from nearmiss.errors import ContractError
from nearmiss.sequence import natural_key
from nearmiss.tracing import FeatureSet

METRICS = ("jaccard", "overlap")


def jaccard(a: frozenset, b: frozenset) -> Fraction:
    if not a or not b:
        return Fraction(0)
    return Fraction(len(a & b), len(a | b))


def overlap(a: frozenset, b: frozenset) -> Fraction:
    if not a or not b:
        return Fraction(0)
    return Fraction(len(a & b), min(len(a), len(b)))


_METRIC_FUNCS = {"jaccard": jaccard, "overlap": overlap}


def _check_compatible(a: FeatureSet, b: FeatureSet):
    if a.mode != b.mode or a.origin != b.origin:
        raise ContractError(
            f"cannot compare {a.origin}/{a.mode} set of {a.sequence_id} "
            f"with {b.origin}/{b.mode} set of {b.sequence_id}"
        )


def similarity(a: FeatureSet, b: FeatureSet, metric: str) -> Fraction:
    """Exact similarity in [0, 1]; anything involving an empty set scores 0."""
    if metric not in _METRIC_FUNCS:
        raise ValueError(f"metric must be one of {METRICS}, got {metric!r}")
    _check_compatible(a, b)
    return _METRIC_FUNCS[metric](a.features, b.features)


def format_fraction(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class MissRanking:
    target_id: str
    metric: str
    entries: tuple  # (contrast id, Fraction), best first

    @property
    def max_similarity(self) -> Fraction:
        return self.entries[0][1]

    @property
    def min_similarity(self) -> Fraction:
        return self.entries[-1][1]

    def similarity_of(self, contrast_id: str) -> Fraction:
        for cid, sim in self.entries:
            if cid == contrast_id:
                return sim
        raise KeyError(contrast_id)


def rank(target: FeatureSet, pool: Sequence[FeatureSet], metric: str) -> MissRanking:
    if not pool:
        raise ValueError(f"empty contrast pool for target {target.sequence_id}")
    scored = [(fs.sequence_id, similarity(target, fs, metric)) for fs in pool]
    scored.sort(key=lambda e: (-e[1], natural_key(e[0])))
    return MissRanking(target.sequence_id, metric, tuple(scored))


def select_near(r: MissRanking) -> list[str]:
    """Every contrast example at the maximum similarity, if that maximum is positive."""
    top = r.max_similarity
    if top <= 0:
        return []
    return [cid for cid, sim in r.entries if sim == top]


def select_far(r: MissRanking) -> list[str]:
    bottom = r.min_similarity
    return [cid for cid, sim in r.entries if sim == bottom]


@dataclass(frozen=True)
class ContrastiveExplanation:
    target_id: str
    miss_id: str
    miss_kind: str
    present_only: frozenset
    absent_only: frozenset
    similarity: Fraction | None = None

    @property
    def length(self) -> int:
        return len(self.present_only) + len(self.absent_only)

    def to_json(self) -> dict:
        return {
            "target": self.target_id,
            "miss": self.miss_id,
            "kind": self.miss_kind,
            "similarity": None if self.similarity is None else format_fraction(self.similarity),
            "present_only": sorted(self.present_only),
            "absent_only": sorted(self.absent_only),
            "length": self.length,
        }


def contrast(target: FeatureSet, miss: FeatureSet, kind: str, metric: str | None = None) -> ContrastiveExplanation:
    """What the target shows that the miss lacks, and vice versa."""
    if kind not in ("near", "far"):
        raise ValueError("kind must be 'near' or 'far'")
    _check_compatible(target, miss)
    sim = similarity(target, miss, metric) if metric else None
    return ContrastiveExplanation(
        target.sequence_id,
        miss.sequence_id,
        kind,
        target.features - miss.features,
        miss.features - target.features,
        sim,
    )
