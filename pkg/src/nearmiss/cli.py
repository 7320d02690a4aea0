"""Command-line entry point: generate, export, learn, explain, evaluate.

Exit codes: 0 success, 1 invalid input or usage, 2 learner failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace

from nearmiss.allen import ALL_RELATIONS, RelationConfig
from nearmiss.background import MODES, export_background_knowledge
from nearmiss.errors import DatasetError, GenerationError, LearnerError, StructureError
from nearmiss.evaluation import evaluate, feature_sets, learn_all
from nearmiss.generator import PRESETS, generate
from nearmiss.learner import SEED_SELECTIONS, LearnerConfig, learn
from nearmiss.selection import METRICS, contrast, format_fraction, rank, select_far, select_near
from nearmiss.sequence import parse_dataset, render_dataset
from nearmiss.verbalize import verbalize

log = logging.getLogger("nearmiss")

EXIT_OK, EXIT_INVALID, EXIT_LEARNER = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _read_dataset(path):
    if path == "-":
        return parse_dataset(sys.stdin)
    with open(path, encoding="utf-8") as fh:
        return parse_dataset(fh)


def _write(path, text):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _relations(arg) -> RelationConfig:
    if not arg:
        return RelationConfig()
    names = frozenset(n.strip() for n in arg.split(",") if n.strip())
    unknown = names - ALL_RELATIONS
    if unknown:
        raise DatasetError(f"unknown relations: {', '.join(sorted(unknown))}")
    return RelationConfig(names)


def _learner_args(p, with_mode=True):
    if with_mode:
        p.add_argument("--mode", choices=MODES, default="attributes")
    p.add_argument("--max-literals", type=int, default=4)
    p.add_argument("--beam", type=int, default=16)
    p.add_argument("--noise", type=int, default=0)
    p.add_argument("--seed-selection", choices=SEED_SELECTIONS, default="first-uncovered")
    p.add_argument("--relations", help="comma-separated Allen relations to keep (default: all)")
    p.add_argument("--strict", action="store_true", help="fail instead of skipping unlearnable seeds")


def _learner_config(args, mode=None) -> LearnerConfig:
    return LearnerConfig(
        mode=mode or args.mode,
        max_body_literals=args.max_literals,
        beam_width=args.beam,
        noise=args.noise,
        seed_selection=args.seed_selection,
        on_seed_error="raise" if args.strict else "skip",
        relations=_relations(args.relations),
    )


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nearmiss", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    g = sub.add_parser("generate", help="write a synthetic dataset")
    g.add_argument("--preset", choices=sorted(PRESETS), default="default")
    g.add_argument("--seed", type=int, default=7, help="overridden by $NEARMISS_SEED")
    g.add_argument("--pain", type=int, default=None, help="number of pain sequences")
    g.add_argument("--disgust", type=int, default=None, help="number of disgust sequences")
    g.add_argument("--out", default=None)

    e = sub.add_parser("export", help="print background knowledge facts")
    e.add_argument("--data", required=True)
    e.add_argument("--mode", choices=MODES, default="attributes")
    e.add_argument("--relations", default=None)
    e.add_argument("--out", default=None)

    lp = sub.add_parser("learn", help="learn a theory for one class")
    lp.add_argument("--data", required=True)
    lp.add_argument("--class", dest="target_class", required=True)
    _learner_args(lp)
    lp.add_argument("--out", default=None)
    lp.add_argument("--report", default=None, help="write coverage report JSON here")

    x = sub.add_parser("explain", help="contrast one target with its near or far misses")
    x.add_argument("--data", required=True)
    x.add_argument("--target", required=True)
    x.add_argument("--metric", choices=METRICS, default="jaccard")
    x.add_argument("--basis", choices=("trace", "full-bk"), default="trace")
    x.add_argument("--miss", choices=("near", "far"), default="near")
    _learner_args(x)

    ev = sub.add_parser("evaluate", help="run the full near/far-miss evaluation")
    ev.add_argument("--data", required=True)
    ev.add_argument("--report", default=None)
    ev.add_argument("--csv", default=None)
    ev.add_argument("--target-class", default=None)
    _learner_args(ev, with_mode=False)
    return parser


def cmd_generate(args):
    seed = int(os.environ.get("NEARMISS_SEED", args.seed))
    config = PRESETS[args.preset](seed)
    counts = dict(config.class_counts)
    if args.pain is not None:
        counts["pain"] = args.pain
    if args.disgust is not None:
        counts["disgust"] = args.disgust
    config = replace(config, class_counts=counts)
    _write(args.out, render_dataset(generate(config)))
    return EXIT_OK


def cmd_export(args):
    d = _read_dataset(args.data)
    _write(args.out, export_background_knowledge(d, args.mode, _relations(args.relations)))
    return EXIT_OK


def cmd_learn(args):
    d = _read_dataset(args.data)
    result = learn(d, args.target_class, _learner_config(args))
    _write(args.out, str(result.theory))
    r = result.report
    print(
        f"{args.target_class}/{args.mode}: {len(result.theory)} clauses, "
        f"{len(r.covered_positives)}/{r.n_positives} positives, "
        f"{len(r.covered_negatives)}/{r.n_negatives} negatives covered, "
        f"accuracy {float(r.accuracy) * 100:.2f}%",
        file=sys.stderr,
    )
    if args.report:
        _write(args.report, json.dumps(r.to_json(), indent=2) + "\n")
    return EXIT_OK


def explain(d, args) -> dict:
    """Result object for one target; ``explanations`` is empty without misses."""
    config = _learner_config(args)
    target = d.get(args.target)
    theories = learn_all(d, config)
    approach = "trace" if args.basis == "trace" else "full_bk"
    covered = {sid for r in theories.values() for sid in r.report.covered_positives}
    if approach == "trace" and target.id not in covered:
        raise DatasetError(f"target {target.id} is not covered by the {target.label} theory")
    pool = [s for s in d.sequences if s.label != target.label and s.id in covered]
    result = {
        "target": target.id,
        "class": target.label,
        "metric": args.metric,
        "mode": config.mode,
        "basis": approach,
        "kind": args.miss,
        "explanations": [],
    }
    if not pool:
        result["result"] = "empty contrast pool"
        return result
    sets = feature_sets([target] + pool, theories, approach, config)
    ranking = rank(sets[target.id], [sets[s.id] for s in pool], args.metric)
    misses = select_near(ranking) if args.miss == "near" else select_far(ranking)
    result["max_similarity"] = format_fraction(ranking.max_similarity)
    if not misses:
        result["result"] = "no near misses"
        return result
    result["result"] = "ok"
    result["explanations"] = [
        contrast(sets[target.id], sets[m], args.miss, args.metric) for m in misses
    ]
    return result


def cmd_explain(args):
    d = _read_dataset(args.data)
    try:
        result = explain(d, args)
    except KeyError:
        raise DatasetError(f"unknown target {args.target}") from None
    explanations = result["explanations"]
    payload = dict(result, explanations=[e.to_json() for e in explanations])
    print(json.dumps(payload, indent=2))
    if not explanations:
        print(result["result"])
    for e in explanations:
        print(f"\n{e.target_id} vs {e.miss_id} ({e.miss_kind} miss):")
        print(verbalize(e))
    return EXIT_OK


def cmd_evaluate(args):
    d = _read_dataset(args.data)
    config = _learner_config(args, mode="attributes")
    report = evaluate(d, config, target_class=args.target_class)
    _write(args.report, report.render_json())
    if args.csv:
        _write(args.csv, report.render_csv())
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "export": cmd_export,
    "learn": cmd_learn,
    "explain": cmd_explain,
    "evaluate": cmd_evaluate,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return COMMANDS[args.command](args)
    except BrokenPipeError:
        return EXIT_OK
    except LearnerError as exc:
        print(f"learner error: {exc}", file=sys.stderr)
        return EXIT_LEARNER
    except (DatasetError, StructureError, GenerationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
