"""Command-line entry point: single runs and beta/lambda sweeps.

``activerules run`` loads a schema, a CSV dataset, and an oracle spec,
splits the data, searches for a decision set on the training part, scores
it on the held-out part, and writes ``rules.txt`` plus ``report.json``
into the output directory. ``activerules sweep`` repeats runs over a
beta x lambda x seed grid with a shared split and emits one CSV table.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import kernels
from .errors import ActiveRulesError
from .metrics import evaluate_rows, interpretability_metrics
from .objective import ObjectiveParams
from .oracle import (
    Oracle,
    make_boxes_oracle,
    make_linear_oracle,
    make_subprocess_oracle,
)
from .rules import decision_set_from_json, decision_set_to_json, render_decision_set
from .schema import InputSpace, load_schema_file, parse_dataset
from .search import SearchConfig, run_search


def load_oracle_spec(path, space: InputSpace) -> Oracle:
    """Build an oracle from a JSON spec file.

    Supported forms:
      {"type": "boxes", "rules": [...]}           positive decision-set region
      {"type": "linear", "weights": {...}, "bias": b}
      {"type": "subprocess", "command": [...] | "cmd string", "timeout": s}
    """
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as e:
        raise ActiveRulesError(f"cannot read oracle spec {path}: {e}") from e
    except json.JSONDecodeError as e:
        raise ActiveRulesError(f"oracle spec {path} is not valid JSON: {e}") from e

    typ = doc.get("type")
    if typ == "boxes":
        region = decision_set_from_json(doc, space)
        return make_boxes_oracle(region, space)
    if typ == "linear":
        weights, value_weights = {}, {}
        for name, w in (doc.get("weights") or {}).items():
            j = space.index_of(name)
            if isinstance(w, dict):
                value_weights[j] = w
            else:
                weights[j] = float(w)
        return make_linear_oracle(
            weights, float(doc.get("bias", 0.0)), space, value_weights
        )
    if typ == "subprocess":
        return make_subprocess_oracle(
            doc["command"], space, timeout=float(doc.get("timeout", 30.0))
        )
    raise ActiveRulesError(f"unknown oracle type {typ!r} in {path}")


def split_rows(rows: np.ndarray, fraction: float, seed: int):
    if not 0.0 < fraction < 1.0:
        raise ActiveRulesError(f"split fraction must be in (0, 1), got {fraction}")
    n = rows.shape[0]
    n_train = int(n * fraction)
    if n_train < 1 or n_train >= n:
        raise ActiveRulesError(
            f"split {fraction} leaves an empty train or test side for n={n}"
        )
    perm = np.random.default_rng(seed).permutation(n)
    return rows[perm[:n_train]], rows[perm[n_train:]]


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        params=ObjectiveParams(lam=args.lam, beta=args.beta),
        epsilon=args.epsilon,
        max_iters=args.max_iters,
        pool_size=args.pool_size,
        query_budget_per_iter=args.budget,
        bins=args.bins,
        seed=args.seed,
    )


def _config_echo(args) -> dict:
    return {
        "data": str(args.data),
        "schema": str(args.schema),
        "oracle": str(args.oracle),
        "lambda": args.lam,
        "beta": args.beta,
        "epsilon": args.epsilon,
        "max_iters": args.max_iters,
        "pool_size": args.pool_size,
        "bins": args.bins,
        "budget": args.budget,
        "seed": args.seed,
        "split": args.split,
        "split_seed": args.split_seed,
        "backend": kernels.backend_name(),
    }


def _execute_run(cfg: SearchConfig, space, train, test, oracle):
    """Search on train rows, evaluate on test rows, return the report body."""
    result = run_search(cfg, train, oracle, space)
    search_backend = oracle.total_queries
    metrics = evaluate_rows(result.best, oracle, test, space)
    eval_backend = oracle.total_queries - search_backend
    num_rules, avg_conditions, max_conditions = interpretability_metrics(result.best)

    # Every backend invocation is one distinct instance: the distinct train
    # rows, one per synthetic query, and the previously unseen test rows.
    train_distinct = int(np.unique(train, axis=0).shape[0])
    identity_holds = (
        oracle.total_queries == oracle.distinct_queried()
        and oracle.total_queries
        == train_distinct + result.state.synthetic_count + eval_backend
    )
    queries = {
        "backend_invocations": oracle.total_queries,
        "cache_hits": oracle.cache_hits,
        "train_instances": int(train.shape[0]),
        "train_distinct": train_distinct,
        "synthetic": result.state.synthetic_count,
        "eval_backend": eval_backend,
        "distinct_instances": oracle.distinct_queried(),
        "identity_holds": identity_holds,
    }
    if not identity_holds:
        raise ActiveRulesError(
            "query accounting violated: backend invocations != "
            "train + synthetic + new test instances"
        )
    return {
        "decision_set": decision_set_to_json(result.best, space),
        "rules_text": render_decision_set(result.best, space),
        "best_objective": result.best_objective,
        "best_theta": result.best_theta,
        "metrics": metrics.to_json(),
        "interpretability": {
            "num_rules": num_rules,
            "avg_conditions": avg_conditions,
            "max_conditions": max_conditions,
        },
        "queries": queries,
        "history": [rec.to_json() for rec in result.history],
    }


def _load_rows(args, space):
    try:
        with open(args.data, "r", encoding="utf-8") as fh:
            instances = parse_dataset(fh.read(), space)
    except OSError as e:
        raise ActiveRulesError(f"cannot read dataset {args.data}: {e}") from e
    return space.encode_many(instances)


def cmd_run(args) -> int:
    space = load_schema_file(args.schema)
    rows = _load_rows(args, space)
    train, test = split_rows(rows, args.split, args.split_seed)
    oracle = load_oracle_spec(args.oracle, space)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    rules_path = out_dir / "rules.txt"
    report_path = out_dir / "report.json"
    written = []
    try:
        cfg = _search_config(args)
        body = _execute_run(cfg, space, train, test, oracle)
        report = {"config": _config_echo(args), **body, "timestamp": time.time()}
        rules_path.write_text(body["rules_text"] + ("\n" if body["rules_text"] else ""))
        written.append(rules_path)
        report_path.write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
        written.append(report_path)
    except Exception:
        for p in written:
            p.unlink(missing_ok=True)
        raise
    finally:
        oracle.close()
    print(f"wrote {rules_path} and {report_path}")
    return 0


def cmd_sweep(args) -> int:
    space = load_schema_file(args.schema)
    rows = _load_rows(args, space)
    train, test = split_rows(rows, args.split, args.split_seed)

    betas = [float(b) for b in args.betas.split(",") if b.strip() != ""]
    lambdas = [float(l) for l in args.lambdas.split(",") if l.strip() != ""]
    if not betas or not lambdas:
        raise ActiveRulesError("sweep needs non-empty --betas and --lambdas")
    seeds = [args.seed + i for i in range(args.num_seeds)]

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    out_path = out_dir / "sweep.csv"
    failures = 0
    with open(out_path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["beta", "lambda", "seed", "f1", "num_rules", "synthetic_queries"])
        for beta in betas:
            for lam in lambdas:
                for seed in seeds:
                    oracle = load_oracle_spec(args.oracle, space)
                    try:
                        cfg = SearchConfig(
                            params=ObjectiveParams(lam=lam, beta=beta),
                            epsilon=args.epsilon,
                            max_iters=args.max_iters,
                            pool_size=args.pool_size,
                            query_budget_per_iter=args.budget,
                            bins=args.bins,
                            seed=seed,
                        )
                        result = run_search(cfg, train, oracle, space)
                        metrics = evaluate_rows(result.best, oracle, test, space)
                        writer.writerow([
                            beta, lam, seed, metrics.f1,
                            len(result.best), result.state.synthetic_count,
                        ])
                    except ActiveRulesError as e:
                        failures += 1
                        print(
                            f"sweep cell beta={beta} lambda={lam} seed={seed} "
                            f"failed: {e}",
                            file=sys.stderr,
                        )
                    finally:
                        oracle.close()
    print(f"wrote {out_path}" + (f" ({failures} failed cells)" if failures else ""))
    return 0


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--data", required=True, help="dataset CSV path")
    p.add_argument("--schema", required=True, help="schema JSON path")
    p.add_argument("--oracle", required=True, help="oracle spec JSON path")
    p.add_argument("--epsilon", type=float, default=0.1, help="random-edit rate")
    p.add_argument("--max-iters", type=int, default=500, dest="max_iters")
    p.add_argument("--pool-size", type=int, default=50, dest="pool_size")
    p.add_argument("--bins", type=int, default=20, help="cut-point grid size")
    p.add_argument("--budget", type=int, default=100,
                   help="synthetic queries allowed per iteration")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--split", type=float, default=0.9, help="train fraction")
    p.add_argument("--split-seed", type=int, default=None, dest="split_seed")
    p.add_argument("--out", default="out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="activerules",
        description="Learn a decision set that mimics a black-box binary classifier.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="single search run")
    _add_common(run_p)
    run_p.add_argument("--lambda", type=float, default=0.01, dest="lam",
                       help="per-rule complexity penalty")
    run_p.add_argument("--beta", type=float, default=0.02, help="exploration rate")

    sweep_p = sub.add_parser("sweep", help="beta x lambda x seed grid")
    _add_common(sweep_p)
    sweep_p.add_argument("--betas", default="0,0.02", help="comma-separated betas")
    sweep_p.add_argument("--lambdas", default="0.01", help="comma-separated lambdas")
    sweep_p.add_argument("--num-seeds", type=int, default=1, dest="num_seeds")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.split_seed is None:
        args.split_seed = args.seed
    try:
        if args.command == "run":
            return cmd_run(args)
        return cmd_sweep(args)
    except ActiveRulesError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
