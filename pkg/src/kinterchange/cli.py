"""Command-line front end.

Subcommands: ``table``, ``landscape``, ``search``, ``probe``,
``verify-paper`` and ``export-dot``.  Exit codes: 0 success, 1 failed
verification or infeasible request, 2 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Sequence

from . import __version__
from .control import execute_plan, probe_instance, select_strategy, verify_paper
from .errors import (
    CapExceeded,
    InvalidK,
    InvalidPermutation,
    KInterchangeError,
    ObjectiveParseError,
)
from .landscape import analyze, build_digraph, export_dot
from .objectives import (
    InversionObjective,
    Objective,
    TableObjective,
    build_search_distance_objective,
    load_objective,
    parse_value,
    table1_objective,
    value_to_json,
)
from .perm import Permutation, all_permutations, check_k, parse_permutation
from .search import StrategyConfig, run_multistart


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"{flag}: {message}")
        self.flag = flag


class Infeasible(Exception):
    pass


def _err_name(exc: Exception) -> str:
    return f"{type(exc).__name__}: {exc}"


# --------------------------------------------------------------------------
# argument helpers


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=0, help="random seed (echoed in output)")
    p.add_argument("--out", type=Path, help="write machine-readable output to this file")
    p.add_argument("--format", choices=("json", "text"), help="output format (default: json with --out, else text)")
    p.add_argument("--no-timestamp", action="store_true", help="omit the timestamp from output metadata")


def _objective_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("objective")
    g.add_argument("--objective", type=Path, help="objective document (JSON)")
    g.add_argument("--builtin", choices=("table1", "inversion", "distance"), default="table1",
                   help="built-in objective when --objective is not given (default: table1)")
    g.add_argument("--n", type=int, help="order (required for inversion/distance)")
    g.add_argument("--distance-k", type=int, default=3, help="window size defining the distance objective")
    g.add_argument("--target", help="target permutation of the distance objective (default identity)")


def _perm_arg(flag: str, text: str, n: int | None = None) -> Permutation:
    try:
        return parse_permutation(text, n)
    except InvalidPermutation as exc:
        raise UsageError(flag, _err_name(exc)) from None


def _k_arg(flag: str, n: int, k: int) -> int:
    try:
        check_k(n, k)
    except InvalidK as exc:
        raise UsageError(flag, _err_name(exc)) from None
    return k


def _resolve_objective(args: argparse.Namespace) -> tuple[Objective, int]:
    if args.objective is not None:
        try:
            f = load_objective(args.objective)
        except OSError as exc:
            raise UsageError("--objective", str(exc)) from None
        except ObjectiveParseError as exc:
            raise Infeasible(_err_name(exc)) from None
        n = f.n if f.n is not None else args.n
        if n is None:
            raise UsageError("--n", "objective has no fixed order; pass --n")
    elif args.builtin == "table1":
        f, n = table1_objective(), 4
    else:
        if args.n is None:
            raise UsageError("--n", f"required for --builtin {args.builtin}")
        n = args.n
        if n < 2:
            raise UsageError("--n", "must be at least 2")
        if args.builtin == "inversion":
            f = InversionObjective(n, known_optima=frozenset([Permutation.identity(n)]))
        else:
            target = _perm_arg("--target", args.target, n) if args.target else None
            k = _k_arg("--distance-k", n, args.distance_k)
            try:
                f = build_search_distance_objective(n, k, target)
            except CapExceeded as exc:
                raise Infeasible(_err_name(exc)) from None
    if args.n is not None and args.n != n:
        raise UsageError("--n", f"ArityMismatch: objective has n={n}, got --n {args.n}")
    return f, n


def _objective_meta(f: Objective) -> dict[str, Any]:
    return {"objective_id": f.objective_id, "kind": f.kind, "n": f.n}


# --------------------------------------------------------------------------
# subcommands; each returns (document, text, exit code)


def cmd_table(args: argparse.Namespace):
    n = args.n if args.n is not None else 4
    if n < 2:
        raise UsageError("--n", "must be at least 2")
    k = _k_arg("--k", n, args.k)
    target = _perm_arg("--target", args.target, n) if args.target else Permutation.identity(n)
    try:
        g = build_search_distance_objective(n, k, target)
    except CapExceeded as exc:
        raise Infeasible(_err_name(exc)) from None
    if args.paper_order:
        if (n, k) != (4, 3) or target != Permutation.identity(4):
            raise UsageError("--paper-order", "only defined for --n 4 --k 3 with the identity target")
        order = table1_objective().order
    else:
        order = g.order
    rows = [{"row": i, "perm": Permutation(t).compact(), "value": value_to_json(g.value(t))}
            for i, t in enumerate(order, start=1)]
    text = "\n".join([f"{'No':>4}  {'s':<{max(n, 1)}}  f(s)"] + [f"{r['row']:>4}  {r['perm']}  {r['value']}" for r in rows])
    return {"n": n, "k": k, "target": str(target), "rows": rows}, text, 0


def cmd_landscape(args: argparse.Namespace):
    f, n = _resolve_objective(args)
    k = _k_arg("--k", n, args.k)
    try:
        report = analyze(f, n, k, args.mode)
    except CapExceeded as exc:
        raise Infeasible(_err_name(exc)) from None
    d = report.to_dict()
    text = "\n".join([
        f"digraph {args.mode} k={k} over n={n} ({f.objective_id})",
        f"global optima: {', '.join(d['global_optima'])} (value {d['optimum_value']})",
        f"reach: {d['reach_count']} points, fraction {d['reach_fraction']}  property1={d['property1']}",
        f"local optima ({len(d['local_optima'])}): {', '.join(d['local_optima'])}",
        f"levels: {d['level_count']}  max shortest path to optimum: {d['max_shortest_path_to_optimum']}"
        f" (bound n(n-1)/2 = {d['path_bound']}, within={d['within_path_bound']})",
        f"nesting k->k+1 verified: {d['nesting_verified']}",
    ])
    return {"objective": _objective_meta(f), "report": d}, text, 0


def _strategy_from_args(args: argparse.Namespace, n: int) -> StrategyConfig:
    base: dict[str, Any] = {}
    if args.config is not None:
        try:
            base = StrategyConfig.from_dict(json.loads(args.config.read_text())).__dict__.copy()
        except (OSError, json.JSONDecodeError, KInterchangeError, TypeError) as exc:
            raise UsageError("--config", str(exc)) from None
    if args.k is not None:
        base["k_min"] = base["k_max"] = _k_arg("--k", n, args.k)
    if args.k_min is not None:
        base["k_min"] = _k_arg("--k-min", n, args.k_min)
    if args.k_max is not None:
        base["k_max"] = _k_arg("--k-max", n, args.k_max)
    base.setdefault("k_min", 2)
    base.setdefault("k_max", base["k_min"])
    if base["k_min"] > base["k_max"]:
        raise UsageError("--k-min", f"InvalidK: k_min={base['k_min']} exceeds k_max={base['k_max']}")
    for key, attr in (("trajectory_kind", "kind"), ("pivot", "pivot"), ("step_limit", "step_limit"),
                      ("aside_budget", "aside_budget")):
        if getattr(args, attr) is not None:
            base[key] = getattr(args, attr)
    if args.step_limit is not None and args.step_limit <= 0:
        raise UsageError("--step-limit", "must be positive")
    if args.lower_bound is not None:
        try:
            base["lower_bound"] = parse_value(args.lower_bound)
        except KInterchangeError as exc:
            raise UsageError("--lower-bound", str(exc)) from None
    if args.start:
        base["starts"] = tuple(_perm_arg("--start", s, n) for s in args.start)
        base["random_starts"] = 0
    elif args.all_starts:
        if n > 9:
            raise Infeasible("CapExceeded: --all-starts needs n <= 9")
        base["starts"] = tuple(all_permutations(n))
        base["random_starts"] = 0
    elif args.random_starts is not None:
        base["starts"] = ()
        base["random_starts"] = args.random_starts
    elif not base.get("starts") and not base.get("random_starts"):
        base["random_starts"] = 1
    base["seed"] = args.seed
    return StrategyConfig(**base)


def cmd_search(args: argparse.Namespace):
    f, n = _resolve_objective(args)
    cfg = _strategy_from_args(args, n)
    try:
        cfg.validate(n)
    except KInterchangeError as exc:
        raise UsageError("--config", _err_name(exc)) from None
    doc: dict[str, Any] = {"objective": _objective_meta(f), "strategy": cfg.to_dict()}
    if args.repo is not None:
        try:
            record = execute_plan(f, cfg, args.repo, n)
        except OSError as exc:
            raise Infeasible(f"IoError: {exc}") from None
        doc["run"] = record.to_dict()
        best, success, runs = record.best_point, record.success_count, len(record.trajectories)
        lines = [f"run {record.run_id} persisted to {args.repo}"]
        trajectories = record.trajectories
    else:
        result = run_multistart(f, cfg, n)
        doc["result"] = result.to_dict(steps=args.trace)
        best, success, runs = str(result.best_point), result.success_count, len(result.trajectories)
        lines = []
        trajectories = tuple(tr.summary() for tr in result.trajectories)
    for tr in trajectories:
        lines.append(
            f"{tr['start']} -> {tr['final_point']}  f={tr['final_value']}  {tr['status']}"
            f"  (forward {tr['forward_count']}, aside {tr['aside_count']}, backward {tr['backward_count']})"
        )
    lines.append(f"{cfg.multi_kind} {cfg.schedule}(k={cfg.k_min}..{cfg.k_max}) pivot={cfg.pivot}: "
                 f"{success}/{runs} reached an identified optimum; best {best}")
    return doc, "\n".join(lines), 0


def _k_range(args: argparse.Namespace, n: int) -> list[int]:
    lo = args.k_min if args.k_min is not None else 2
    hi = args.k_max if args.k_max is not None else n
    _k_arg("--k-min", n, lo)
    _k_arg("--k-max", n, hi)
    if lo > hi:
        raise UsageError("--k-min", f"InvalidK: k_min={lo} exceeds k_max={hi}")
    return list(range(lo, hi + 1))


def cmd_probe(args: argparse.Namespace):
    f, n = _resolve_objective(args)
    ks = _k_range(args, n)
    samples: int | str = "exhaustive"
    if args.samples != "exhaustive":
        try:
            samples = int(args.samples)
        except ValueError:
            raise UsageError("--samples", "expected a count or 'exhaustive'") from None
        if samples <= 0:
            raise UsageError("--samples", "must be positive")
    try:
        report = probe_instance(f, n, ks, samples, args.seed)
    except CapExceeded as exc:
        raise Infeasible(_err_name(exc)) from None
    cfg = select_strategy(report)
    doc: dict[str, Any] = {"objective": _objective_meta(f), "probe": report.to_dict(), "strategy": cfg.to_dict()}
    lines = [f"probe of {f.objective_id}: {report.sample_count} points"
             f"{' (exhaustive)' if report.exhaustive else ''}, seed {report.seed}"]
    for q in report.per_k:
        lines.append(f"  k={q.k}: local optima {q.local_optimum_fraction} (spurious {q.spurious_fraction}),"
                     f" plateau {q.plateau_rate}, mean improving degree {float(q.mean_improving_degree):.3f}")
    lines.append(f"selected: {cfg.multi_kind} {cfg.schedule}(k={cfg.k_min}..{cfg.k_max}),"
                 f" {cfg.random_starts} random starts")
    if args.execute:
        try:
            record = execute_plan(f, cfg, args.repo, n)
        except OSError as exc:
            raise Infeasible(f"IoError: {exc}") from None
        doc["run"] = record.to_dict()
        lines.append(f"executed: outcome {record.outcome}, best {record.best_point}"
                     f" (value {value_to_json(record.best_value)})")
    return doc, "\n".join(lines), 0


def cmd_verify(args: argparse.Namespace):
    table = None
    if args.table is not None:
        try:
            table = load_objective(args.table)
        except OSError as exc:
            raise UsageError("--table", str(exc)) from None
        except ObjectiveParseError as exc:
            raise Infeasible(_err_name(exc)) from None
        if not isinstance(table, TableObjective) or table.n != 4:
            raise UsageError("--table", "expected an n=4 table objective")
    report = verify_paper(table)
    return report.to_dict(), report.format_text(), 0 if report.all_passed else 1


def cmd_export_dot(args: argparse.Namespace):
    if args.dot is None:
        raise UsageError("--dot", "required: path of the DOT file to write")
    f, n = _resolve_objective(args)
    k = _k_arg("--k", n, args.k)
    try:
        d = build_digraph(f if args.mode != "moves" else None, n, k, args.mode)
    except CapExceeded as exc:
        raise Infeasible(_err_name(exc)) from None
    try:
        export_dot(d, f if args.mode != "moves" else None, args.dot)
    except OSError as exc:
        raise Infeasible(f"IoError: {exc}") from None
    doc = {"objective": _objective_meta(f), "dot": str(args.dot), "mode": args.mode, "k": k,
           "nodes": len(d), "arcs": d.arc_count}
    text = f"wrote {args.dot}: {len(d)} nodes, {d.arc_count if d.mode != 'moves' else d.edge_count} " \
           f"{'arcs' if d.mode != 'moves' else 'edges'} ({args.mode}, k={k})"
    return doc, text, 0


# --------------------------------------------------------------------------


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage errors keep argparse's exit code 2
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="kinterchange", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table", help="tabulate the k-interchange distance function")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--target")
    p.add_argument("--paper-order", action="store_true", help="use the published row order (n=4, k=3)")
    _common(p)
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("landscape", help="analyze a strict or weak operational digraph")
    _objective_args(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mode", choices=("strict", "weak"), default="strict")
    _common(p)
    p.set_defaults(func=cmd_landscape)

    p = sub.add_parser("search", help="run (multi-start) k-interchange local search")
    _objective_args(p)
    p.add_argument("--config", type=Path, help="strategy config document (JSON); flags override it")
    p.add_argument("--k", type=int, help="fixed window size")
    p.add_argument("--k-min", type=int, help="adaptive schedule lower bound")
    p.add_argument("--k-max", type=int, help="adaptive schedule upper bound")
    p.add_argument("--kind", choices=("F", "FA", "FAB"))
    p.add_argument("--pivot", choices=("first", "best", "random"))
    p.add_argument("--start", action="append", help="start permutation (repeatable)")
    p.add_argument("--all-starts", action="store_true", help="start from every permutation")
    p.add_argument("--random-starts", type=int, help="number of seeded random starts")
    p.add_argument("--step-limit", type=int)
    p.add_argument("--aside-budget", type=int)
    p.add_argument("--lower-bound", help="value known to be optimal once reached")
    p.add_argument("--repo", type=Path, help="persist a run record into this repository directory")
    p.add_argument("--trace", action="store_true", help="include every step in the output document")
    _common(p)
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("probe", help="probe an instance and select a strategy")
    _objective_args(p)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--samples", default="exhaustive", help="sample count or 'exhaustive'")
    p.add_argument("--execute", action="store_true", help="run the selected strategy")
    p.add_argument("--repo", type=Path, help="run repository for --execute")
    _common(p)
    p.set_defaults(func=cmd_probe)

    p = sub.add_parser("verify-paper", help="recompute the published worked example")
    p.add_argument("--table", type=Path, help="replacement worked-example table (fault injection)")
    _common(p)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("export-dot", help="write an operational digraph in DOT format")
    _objective_args(p)
    p.add_argument("--k", type=int, default=2)
    p.add_argument("--mode", choices=("moves", "strict", "weak"), default="strict")
    p.add_argument("--dot", type=Path, help="DOT output path")
    _common(p)
    p.set_defaults(func=cmd_export_dot)
    return parser


def _effective_config(args: argparse.Namespace) -> dict[str, Any]:
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in ("func", "no_timestamp"):
            continue
        out[key] = str(val) if isinstance(val, Path) else val
    return out


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    fmt = args.format or ("json" if args.out is not None else "text")
    try:
        doc, text, code = args.func(args)
    except UsageError as exc:
        print(f"kinterchange {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (Infeasible, KInterchangeError) as exc:
        msg = _err_name(exc) if isinstance(exc, KInterchangeError) else str(exc)
        print(f"kinterchange {args.command}: {msg}", file=sys.stderr)
        return 1

    meta: dict[str, Any] = {"tool": "kinterchange", "version": __version__, "command": args.command,
                            "config": _effective_config(args)}
    if not args.no_timestamp:
        meta["timestamp"] = datetime.now(timezone.utc).isoformat(timespec="seconds")
    payload = {"meta": meta, **doc}
    rendered = json.dumps(payload, indent=2, sort_keys=True) + "\n" if fmt == "json" else text + "\n"

    if args.out is not None:
        if fmt == "text":
            rendered = f"# {json.dumps(meta, sort_keys=True)}\n" + rendered
        try:
            args.out.write_text(rendered)
        except OSError as exc:
            print(f"kinterchange {args.command}: IoError: {exc}", file=sys.stderr)
            return 1
        print(text)
        print(f"wrote {args.out}")
    elif fmt == "json":
        sys.stdout.write(rendered)
    else:
        print(f"# seed={args.seed} version={__version__}")
        sys.stdout.write(rendered)
    return code


if __name__ == "__main__":
    sys.exit(main())
