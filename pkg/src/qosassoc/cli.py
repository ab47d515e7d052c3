"""Command line entry point: ``qosassoc {run,trial,converge,verify}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .config import ScenarioConfig, load_config, parse_list
from .exceptions import ConfigurationError

log = logging.getLogger("qosassoc")


def _common(p: argparse.ArgumentParser):
    p.add_argument("--config", help="flat YAML/JSON config file")
    p.add_argument("--seed", type=int, help="master seed (overrides config)")
    p.add_argument("--out", default="out", help="output directory (default: out)")
    p.add_argument("--algorithms", help="comma-separated algorithm list")
    p.add_argument("--policy", help="scheduling policy: mprf, marf or a comma list")
    p.add_argument("--trials", type=int, help="trials per density point")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qosassoc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    _common(sub.add_parser("run", help="density sweep; writes metrics.csv and summary.json"))
    p = sub.add_parser("trial", help="one trial with per-iteration traces")
    _common(p)
    p.add_argument("--users", type=int, help="users per macrocell (default: first density)")
    p = sub.add_parser("converge", help="utility-vs-iteration tables on one realization")
    _common(p)
    p.add_argument("--users", type=int, help="users per macrocell (default: first density)")
    p = sub.add_parser("verify", help="compare the solvers with exhaustive optima on tiny instances")
    _common(p)
    p.add_argument("--bs", type=int, default=3, help="BSs per tiny instance (default 3)")
    p.add_argument("--users", type=int, default=6, help="users per tiny instance (default 6)")
    return parser


def resolve_config(args) -> ScenarioConfig:
    cfg = load_config(args.config) if args.config else ScenarioConfig()
    changes = {}
    if args.seed is not None:
        changes["seed"] = args.seed
    if args.trials is not None:
        changes["trials"] = args.trials
    if args.algorithms:
        changes["algorithms"] = parse_list(args.algorithms)
    if args.policy:
        changes["policies"] = parse_list(args.policy)
    return cfg.replace(**changes) if changes else cfg


def _cmd_run(cfg, args):
    from .experiment import run_sweep

    def progress(upm, t, n):
        log.info("density %d: trial %d/%d", upm, t + 1, n)

    res = run_sweep(cfg, args.out, progress)
    for g in res.summary:
        print(f"u={g['users_per_macrocell']:<3d} {g['algorithm']:<16s} {g['policy']:<5s} "
              f"blocking={g['blocking_mean']:.4f} jain={g['jain_overall_mean']:.4f} "
              f"jain_macro={g['jain_macro_mean']:.4f} failed={g['failed']}")
    print(f"wrote {Path(args.out) / 'metrics.csv'} and {Path(args.out) / 'summary.json'}")
    return 0


def _cmd_trial(cfg, args):
    from .experiment import run_trial, trial_seed, write_rows

    upm = args.users or cfg.users_per_macrocell[0]
    seed = trial_seed(cfg.seed, upm, 0)
    tr = run_trial(cfg, seed, upm)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_rows(tr.rows, out / "trial.csv")
    for name, res in tr.results.items():
        with open(out / f"trace_{name}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("iteration", "dual_value", "primal_objective", "utility"))
            for t in res.trace:
                w.writerow((t.iteration, repr(t.dual_value), repr(t.primal_objective),
                            repr(t.utility)))
    for r in tr.rows:
        print(f"{r['algorithm']:<16s} {r['policy']:<5s} blocking={r['blocking']:.4f} "
              f"jain={r['jain_overall']:.4f} iterations={r['iterations']} {r['error']}")
    print(f"realization {tr.realization.digest}, traces in {out}")
    return 0


def _cmd_converge(cfg, args):
    from .experiment import emit_convergence, iterations_to_settle

    tables = emit_convergence(cfg, out_dir=args.out, users_per_macrocell=args.users)
    for name, table in tables.items():
        vals = [u for _, u in table]
        print(f"{name:<16s} iterations={len(vals)} settled_after={iterations_to_settle(vals)} "
              f"final={vals[-1]:.6g}")
    return 0


def _cmd_verify(cfg, args):
    from .algorithms import max_probability, qos_distributed
    from .core import objective_resource_based
    from .oracle import TinyInstance, exhaustive_resource_opt

    rng = np.random.default_rng(cfg.seed)
    opts = cfg.solver_opts()
    rows = []
    bad = 0
    for i in range(cfg.trials):
        inst = TinyInstance.random(rng, args.bs, args.users, float(cfg.n_subbands))
        best, opt = exhaustive_resource_opt(inst)
        mp = max_probability(inst.rates, inst.demand, inst.M, opts)
        qd = qos_distributed(inst.rates, inst.demand, inst.M, opts)
        rounded = objective_resource_based(mp.association, inst.rates, inst.demand)
        min_dual = min(qd.dual_values())
        bound_ok = bool(best is None or mp.relaxed_objective >= opt - 1e-6 * abs(opt))
        dual_ok = bool(best is None or min_dual >= opt - 1e-9 * abs(opt))
        bad += not (bound_ok and dual_ok)
        rows.append({"instance": i, "integral_opt": opt if best is not None else None,
                     "relaxed_opt": mp.relaxed_objective, "rounded": rounded,
                     "min_dual": float(min_dual), "bound_ok": bound_ok, "dual_ok": dual_ok})
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "verify.json").write_text(json.dumps(rows, indent=2) + "\n")
    print(f"{len(rows)} instances, {bad} violating the relaxation or weak-duality bound")
    return 1 if bad else 0


COMMANDS = {"run": _cmd_run, "trial": _cmd_trial, "converge": _cmd_converge, "verify": _cmd_verify}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
    except (ConfigurationError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    return COMMANDS[args.command](cfg, args)


if __name__ == "__main__":
    sys.exit(main())
