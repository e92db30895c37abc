"""Command-line front end.

Subcommands: fingerprint, index add, index show, match, predict, eval, gen.
Exit codes: 0 success, 1 operational error, 2 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .errors import (
    ConfigMismatch,
    CorpusLoadError,
    InputError,
    MissingRuntime,
    QdagHashError,
)
from .evaluate import eval_leave_one_out, render_report_json, render_report_text
from .features import FEATURE_SCHEMA_VERSION
from .fingerprint import (
    APPROACH_NGRAM,
    APPROACH_STRUCTURED,
    APPROACHES,
    FingerprintConfig,
    fingerprint_document,
)
from .index import Index, IndexHeader, IndexRecord
from .ingest import PlanDocument, load_corpus, load_plan_file
from .ngrams import NGramConfig
from .simhash import HASH_ALGORITHM_ID
from .synth import default_spec, generate_corpus


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qdaghash",
        description="Fingerprint query-plan DAGs and predict runtime complexity "
        "by fuzzy nearest-neighbor matching.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_flags(p: argparse.ArgumentParser) -> None:
        p.add_argument("--approach", choices=APPROACHES, default=None,
                       help="node fingerprint algorithm (default: structured, or the index's)")
        p.add_argument("--ngram-n", type=int, default=None, metavar="N",
                       help="n-gram length for the ngram approach (default 3)")
        p.add_argument("--keep-ids", action="store_true",
                       help="keep '#<digits>' tokens when shingling facts")
        p.add_argument("--no-normalize", action="store_true",
                       help="do not collapse whitespace runs before shingling")
        p.add_argument("--ngram-dedupe", action="store_true",
                       help="deduplicate grams per node (set semantics)")

    p_fp = sub.add_parser("fingerprint", help="print fingerprints of plan files")
    p_fp.add_argument("plans", nargs="+", metavar="PLAN")
    add_config_flags(p_fp)
    p_fp.add_argument("--json", action="store_true")
    p_fp.set_defaults(func=cmd_fingerprint)

    p_index = sub.add_parser("index", help="maintain a fingerprint index")
    index_sub = p_index.add_subparsers(dest="index_command", required=True)

    p_add = index_sub.add_parser("add", help="fingerprint plans and add them to an index")
    p_add.add_argument("plans", nargs="+", metavar="PLAN")
    p_add.add_argument("--index", required=True, metavar="PATH")
    add_config_flags(p_add)
    p_add.set_defaults(func=cmd_index_add)

    p_show = index_sub.add_parser("show", help="print an index's header and records")
    p_show.add_argument("--index", required=True, metavar="PATH")
    p_show.add_argument("--json", action="store_true")
    p_show.set_defaults(func=cmd_index_show)

    p_match = sub.add_parser("match", help="rank nearest index records for a plan")
    p_match.add_argument("plan", metavar="PLAN")
    p_match.add_argument("--index", required=True, metavar="PATH")
    p_match.add_argument("--k", type=int, default=10, help="edge-filter candidate count")
    p_match.add_argument("--top", type=int, default=5, help="results to print")
    add_config_flags(p_match)
    p_match.add_argument("--json", action="store_true")
    p_match.set_defaults(func=cmd_match)

    p_predict = sub.add_parser("predict", help="predict a plan's complexity (1-NN)")
    p_predict.add_argument("plan", metavar="PLAN")
    p_predict.add_argument("--index", required=True, metavar="PATH")
    p_predict.add_argument("--k", type=int, default=10)
    add_config_flags(p_predict)
    p_predict.add_argument("--json", action="store_true")
    p_predict.set_defaults(func=cmd_predict)

    p_eval = sub.add_parser("eval", help="leave-one-out evaluation over a corpus")
    p_eval.add_argument("corpus", metavar="CORPUS_DIR")
    p_eval.add_argument("--k", type=int, default=10)
    add_config_flags(p_eval)
    p_eval.add_argument("--json", action="store_true")
    p_eval.set_defaults(func=cmd_eval)

    p_gen = sub.add_parser("gen", help="generate a synthetic labeled corpus")
    p_gen.add_argument("out_dir", metavar="OUT_DIR")
    p_gen.add_argument("--seed", type=int, default=42)
    p_gen.add_argument("--count", type=int, default=100, help="plans per family")
    p_gen.add_argument("--perturbation", type=float, default=0.1,
                       help="fraction of node properties perturbed within a family")
    p_gen.set_defaults(func=cmd_gen)

    return parser


def _ngram_config_from_args(args: argparse.Namespace) -> NGramConfig:
    return NGramConfig(
        n=args.ngram_n if args.ngram_n is not None else 3,
        strip_ids=not args.keep_ids,
        collapse_whitespace=not args.no_normalize,
        dedupe=args.ngram_dedupe,
    )


def _config_from_args(
    args: argparse.Namespace, header: IndexHeader | None = None
) -> FingerprintConfig:
    """Build the fingerprint config from flags, deferring to an index header.

    Explicit flags that contradict the header raise ConfigMismatch; flags
    left at their defaults inherit the header's configuration.
    """
    if header is None:
        approach = args.approach or APPROACH_STRUCTURED
        return FingerprintConfig(approach=approach, ngram=_ngram_config_from_args(args))

    if header.hash_algo != HASH_ALGORITHM_ID:
        raise ConfigMismatch("hash_algo", header.hash_algo, HASH_ALGORITHM_ID)
    if args.approach is not None and args.approach != header.approach:
        raise ConfigMismatch("approach", header.approach, args.approach)

    if header.approach == APPROACH_STRUCTURED:
        if header.node_config != FEATURE_SCHEMA_VERSION:
            raise ConfigMismatch(
                "feature_schema_version", header.node_config, FEATURE_SCHEMA_VERSION
            )
        config = FingerprintConfig(approach=APPROACH_STRUCTURED)
    else:
        try:
            ngram = NGramConfig.from_id(header.node_config)
        except (KeyError, ValueError) as exc:
            raise ConfigMismatch("ngram_config", header.node_config, str(exc)) from exc
        if args.ngram_n is not None and args.ngram_n != ngram.n:
            raise ConfigMismatch("ngram_config", f"n={ngram.n}", f"n={args.ngram_n}")
        # store_true flags can only conflict in the True direction
        if args.keep_ids and ngram.strip_ids:
            raise ConfigMismatch("ngram_config", "strip_ids=1", "--keep-ids")
        if args.no_normalize and ngram.collapse_whitespace:
            raise ConfigMismatch("ngram_config", "collapse_ws=1", "--no-normalize")
        if args.ngram_dedupe and not ngram.dedupe:
            raise ConfigMismatch("ngram_config", "dedupe=0", "--ngram-dedupe")
        config = FingerprintConfig(approach=APPROACH_NGRAM, ngram=ngram)

    if header.edge_layout_version != config.edge_layout_version:
        raise ConfigMismatch(
            "edge_layout_version", header.edge_layout_version, config.edge_layout_version
        )
    return config


def _load_plan(path: str) -> PlanDocument:
    """load_plan_file, with the offending filename in any error message."""
    try:
        return load_plan_file(path)
    except InputError as exc:
        raise CorpusLoadError(f"{path}: {exc}") from exc


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_fingerprint(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    for path in args.plans:
        doc = _load_plan(path)
        fp = fingerprint_document(doc, config)
        if args.json:
            print(json.dumps({
                "plan_id": doc.plan_id,
                "approach": config.approach,
                "hash_algo": config.hash_algo,
                "node_config": config.node_config_id(),
                "edge_layout": config.edge_layout_version,
                "edge_fp": fp.edge_hex,
                "node_fp": fp.node_hex,
            }))
        else:
            print(
                f"plan_id={doc.plan_id} approach={config.approach} "
                f"hash_algo={config.hash_algo} node_config={config.node_config_id()} "
                f"edge_layout={config.edge_layout_version} "
                f"edge_fp={fp.edge_hex} node_fp={fp.node_hex}"
            )
    return 0


def cmd_index_add(args: argparse.Namespace) -> int:
    path = Path(args.index)
    if path.exists():
        index = Index.load(path)
        config = _config_from_args(args, index.header)
    else:
        config = _config_from_args(args)
        index = Index.new(config)
    added = 0
    for plan_path in args.plans:
        doc = _load_plan(plan_path)
        if doc.runtime_seconds is None:
            raise MissingRuntime(doc.plan_id)
        fp = fingerprint_document(doc, config)
        index.add(IndexRecord.from_runtime(doc.plan_id, fp, doc.runtime_seconds))
        added += 1
    index.save(path)
    print(f"indexed {added} plan(s); index now holds {len(index)} record(s) at {path}")
    return 0


def cmd_index_show(args: argparse.Namespace) -> int:
    index = Index.load(args.index)
    records = sorted(index.records(), key=lambda r: r.plan_id)
    if args.json:
        print(json.dumps({
            "header": index.header.to_json_obj(),
            "records": [
                {
                    "plan_id": r.plan_id,
                    "edge_fp": r.fingerprint.edge_hex,
                    "node_fp": r.fingerprint.node_hex,
                    "runtime_seconds": r.runtime_seconds,
                    "label": r.label.display,
                }
                for r in records
            ],
        }, indent=2))
        return 0
    print(f"header: {json.dumps(index.header.to_json_obj())}")
    print(f"records: {len(records)}")
    for r in records:
        print(
            f"  {r.plan_id:<24} edge_fp={r.fingerprint.edge_hex} "
            f"node_fp={r.fingerprint.node_hex} runtime={r.runtime_seconds:g}s "
            f"label={r.label.display}"
        )
    return 0


def cmd_match(args: argparse.Namespace) -> int:
    index = Index.load(args.index)
    config = _config_from_args(args, index.header)
    doc = _load_plan(args.plan)
    fp = fingerprint_document(doc, config)
    results = index.match(fp, k=args.k, top_n=args.top)
    if args.json:
        print(json.dumps([
            {
                "plan_id": m.plan_id,
                "edge_distance": m.edge_distance,
                "node_distance": m.node_distance,
                "label": m.label.display,
                "runtime_seconds": m.runtime_seconds,
            }
            for m in results
        ], indent=2))
        return 0
    print(f"matches for {doc.plan_id} (approach={config.approach}, k={args.k}):")
    for rank, m in enumerate(results, start=1):
        print(
            f"  {rank}. {m.plan_id:<24} edge_distance={m.edge_distance:<3} "
            f"node_distance={m.node_distance:<3} label={m.label.display} "
            f"runtime={m.runtime_seconds:g}s"
        )
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    index = Index.load(args.index)
    config = _config_from_args(args, index.header)
    doc = _load_plan(args.plan)
    fp = fingerprint_document(doc, config)
    label, evidence = index.predict(fp, k=args.k)
    if args.json:
        print(json.dumps({
            "plan_id": doc.plan_id,
            "predicted_label": label.display,
            "neighbor": evidence.plan_id,
            "edge_distance": evidence.edge_distance,
            "node_distance": evidence.node_distance,
            "neighbor_runtime_seconds": evidence.runtime_seconds,
        }))
        return 0
    print(
        f"{doc.plan_id}: predicted={label.display} "
        f"(nearest neighbor {evidence.plan_id}, edge_distance={evidence.edge_distance}, "
        f"node_distance={evidence.node_distance}, neighbor_runtime={evidence.runtime_seconds:g}s)"
    )
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    corpus = load_corpus(args.corpus)
    config = _config_from_args(args)
    report = eval_leave_one_out(corpus, config, k=args.k)
    print(render_report_json(report) if args.json else render_report_text(report))
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    spec = default_spec(
        seed=args.seed,
        counts=(args.count, args.count, args.count),
        perturbation_rate=args.perturbation,
    )
    corpus = generate_corpus(spec, args.out_dir)
    families = ", ".join(f"{f.name} ({f.label.display})" for f in spec.families)
    print(f"wrote {len(corpus)} plans to {args.out_dir} [seed={args.seed}; families: {families}]")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (QdagHashError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
