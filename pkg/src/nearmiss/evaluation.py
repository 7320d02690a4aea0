"""End-to-end evaluation: near/far-miss statistics per approach, mode and metric."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from nearmiss.background import MODES
from nearmiss.errors import LearnerError
from nearmiss.learner import LearnerConfig, LearnResult, learn
from nearmiss.selection import METRICS, contrast, rank, select_far, select_near
from nearmiss.sequence import Dataset, SequenceRecord
from nearmiss.tracing import FeatureSet, propositionalize, trace

APPROACHES = ("trace", "full_bk")

REFERENCE_LABEL = "paper-reported (TMS, not reproducible)"

# (approach, mode, metric) -> (n_nm, l_nm, l_fm) as reported on the TMS recordings
REFERENCE = {
    ("full_bk", "attributes", "jaccard"): (1.09, 7.92, 18.92),
    ("full_bk", "attributes", "overlap"): (2.36, 8.69, 12.33),
    ("full_bk", "relations", "jaccard"): (1.19, 50.68, 99.88),
    ("full_bk", "relations", "overlap"): (3.06, 69.76, 57.49),
    ("trace", "attributes", "jaccard"): (1.75, 4.52, 6.72),
    ("trace", "attributes", "overlap"): (3.58, 4.65, 6.21),
}

CSV_COLUMNS = ("approach", "mode", "metric", "n_nm", "l_nm", "l_fm", "acc_pos", "covered")


def mean(values: Iterable) -> Fraction | None:
    values = list(values)
    if not values:
        return None
    return Fraction(sum(Fraction(v) for v in values), len(values))


def _num(x) -> float | None:
    return None if x is None else round(float(x), 2)


def _fmt(x) -> str:
    return "" if x is None else f"{float(x):.2f}"


@dataclass
class TargetResult:
    target_id: str
    near: list
    far: list
    max_similarity: Fraction
    near_lengths: list
    far_lengths: list


@dataclass
class Cell:
    approach: str
    mode: str
    metric: str
    n_targets: int = 0
    n_pool: int = 0
    n_nm: Fraction | None = None
    l_nm: Fraction | None = None
    l_fm: Fraction | None = None
    targets_without_near_miss: int = 0
    zero_intersection: bool = False
    acc_pos: Fraction | None = None
    covered: int | None = None
    error: str | None = None
    per_target: list = field(default_factory=list)

    @property
    def key(self):
        return (self.approach, self.mode, self.metric)

    def to_json(self) -> dict:
        ref = REFERENCE.get(self.key)
        return {
            "approach": self.approach,
            "mode": self.mode,
            "metric": self.metric,
            "n_targets": self.n_targets,
            "n_pool": self.n_pool,
            "n_nm": _num(self.n_nm),
            "l_nm": _num(self.l_nm),
            "l_fm": _num(self.l_fm),
            "targets_without_near_miss": self.targets_without_near_miss,
            "zero_intersection": self.zero_intersection,
            "acc_pos": _num(None if self.acc_pos is None else self.acc_pos * 100),
            "covered": self.covered,
            "error": self.error,
            "reference": None
            if ref is None
            else {"label": REFERENCE_LABEL, "n_nm": ref[0], "l_nm": ref[1], "l_fm": ref[2]},
        }

    def csv_row(self) -> list:
        return [
            self.approach,
            self.mode,
            self.metric,
            _fmt(self.n_nm),
            _fmt(self.l_nm),
            _fmt(self.l_fm),
            _fmt(None if self.acc_pos is None else self.acc_pos * 100),
            "" if self.covered is None else str(self.covered),
        ]


@dataclass
class EvaluationReport:
    target_class: str
    cells: list
    training: dict  # mode -> class -> LearnResult, or an error string per mode
    dataset_summary: dict
    learner: dict

    def cell(self, approach: str, mode: str, metric: str) -> Cell:
        for c in self.cells:
            if c.key == (approach, mode, metric):
                return c
        raise KeyError((approach, mode, metric))

    def to_json(self) -> dict:
        training = {}
        for mode, per_class in self.training.items():
            if isinstance(per_class, str):
                training[mode] = {"error": per_class}
            else:
                training[mode] = {c: r.report.to_json() for c, r in per_class.items()}
        return {
            "target_class": self.target_class,
            "dataset": self.dataset_summary,
            "learner": self.learner,
            "training": training,
            "reference_label": REFERENCE_LABEL,
            "cells": [c.to_json() for c in self.cells],
        }

    def render_json(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=False) + "\n"

    def render_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for c in self.cells:
            w.writerow(c.csv_row())
        return buf.getvalue()


def feature_sets(
    sequences: Sequence[SequenceRecord],
    theories: Mapping[str, LearnResult],
    approach: str,
    config: LearnerConfig,
) -> dict[str, FeatureSet]:
    """Feature set per sequence; traces use each sequence's own class theory."""
    out = {}
    for s in sequences:
        if approach == "trace":
            t = trace(theories[s.label].theory, s, config.mode, config.relations, config.injective)
            out[s.id] = propositionalize(t, config.mode, config.relations)
        else:
            out[s.id] = propositionalize(s, config.mode, config.relations)
    return out


def evaluate_cell(targets: Sequence[FeatureSet], pool: Sequence[FeatureSet], metric: str, cell: Cell) -> Cell:
    cell.n_targets = len(targets)
    cell.n_pool = len(pool)
    if not targets or not pool:
        return cell
    by_id = {fs.sequence_id: fs for fs in pool}
    results = []
    for tfs in targets:
        ranking = rank(tfs, pool, metric)
        near = select_near(ranking)
        far = select_far(ranking)
        results.append(
            TargetResult(
                tfs.sequence_id,
                near,
                far,
                ranking.max_similarity,
                [contrast(tfs, by_id[m], "near").length for m in near],
                [contrast(tfs, by_id[m], "far").length for m in far],
            )
        )
    cell.per_target = results
    cell.n_nm = mean(len(r.near) for r in results)
    cell.l_nm = mean(mean(r.near_lengths) for r in results if r.near)
    cell.l_fm = mean(mean(r.far_lengths) for r in results)
    cell.targets_without_near_miss = sum(1 for r in results if not r.near)
    cell.zero_intersection = all(r.max_similarity == 0 for r in results)
    return cell


def learn_all(dataset: Dataset, config: LearnerConfig) -> dict[str, LearnResult]:
    return {c: learn(dataset, c, config) for c in dataset.classes}


def evaluate(
    dataset: Dataset,
    config: LearnerConfig | Mapping[str, LearnerConfig] | None = None,
    target_class: str | None = None,
    modes: Sequence[str] = MODES,
    metrics: Sequence[str] = METRICS,
) -> EvaluationReport:
    """Train per-class theories per mode and fill every (approach, mode, metric) cell.

    Targets are the target-class sequences covered by their theory; the pool
    is every covered sequence of the other classes.
    """
    if target_class is None:
        target_class = "pain" if "pain" in dataset.classes else dataset.classes[0]
    if target_class not in dataset.classes:
        raise ValueError(f"unknown class {target_class!r}")
    if isinstance(config, Mapping):
        configs = dict(config)
    else:
        base = config or LearnerConfig()
        configs = {m: replace(base, mode=m) for m in modes}

    cells = []
    training: dict = {}
    for mode in modes:
        cfg = configs[mode]
        try:
            theories = learn_all(dataset, cfg)
        except LearnerError as exc:
            training[mode] = str(exc)
            for approach in APPROACHES:
                for metric in metrics:
                    cells.append(Cell(approach, mode, metric, error=str(exc)))
            continue
        training[mode] = theories
        covered = {sid for r in theories.values() for sid in r.report.covered_positives}
        targets = [s for s in dataset.positives(target_class) if s.id in covered]
        pool = [s for s in dataset.negatives(target_class) if s.id in covered]
        own = theories[target_class].report
        for approach in APPROACHES:
            sets = feature_sets(targets + pool, theories, approach, cfg)
            tsets = [sets[s.id] for s in targets]
            psets = [sets[s.id] for s in pool]
            for metric in metrics:
                cell = Cell(approach, mode, metric, acc_pos=own.accuracy,
                            covered=len(own.covered_positives))
                cells.append(evaluate_cell(tsets, psets, metric, cell))

    summary = {
        "sequences": len(dataset),
        "classes": {c: len(dataset.positives(c)) for c in dataset.classes},
    }
    learner = {
        m: {
            "max_body_literals": c.max_body_literals,
            "beam_width": c.beam_width,
            "noise": c.noise,
            "seed_selection": c.seed_selection,
        }
        for m, c in configs.items()
        if m in modes
    }
    return EvaluationReport(target_class, cells, training, summary, learner)
