"""Operator command line.

    evoroute coldstart --tasks 50 --seed 7 --kb kb.jsonl
    evoroute simulate --policy evoroute --episodes 200 --seed 7 --out report.csv
    evoroute route --kb kb.jsonl --role coder --instruction "run the tests"
    evoroute kb stats --kb kb.jsonl
    evoroute report --compare a.csv b.csv
    evoroute serve --kb kb.jsonl --bind 127.0.0.1:8000

Exit codes: 0 success, 1 usage error, 2 data error. Output files are staged
with a `.partial` suffix and renamed only when complete, so an interrupted
run never leaves a truncated file in place of a finished one.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .config import load_runtime
from .core import Phase
from .errors import EvoRouteError
from .experience_base import ExperienceBase
from .retrieval import build_context
from .rng import derive, make_rng
from .router import RoutingEngine, cold_start, route
from .simulator import (
    TrilemmaReport,
    evaluate,
    parse_policy,
    report_csv,
    role_table_csv,
    task_stream,
)

_COLD_STREAM = 0xC01D


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # usage problems exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _write_staged(path: Path, content: str) -> None:
    staged = path.with_name(path.name + ".partial")
    staged.write_text(content, encoding="utf-8")
    staged.replace(path)


def _load_kb(path: Path, dimension: int, journal: bool = False) -> ExperienceBase:
    if path.exists():
        return ExperienceBase.load(path, journal=path if journal else None)
    return ExperienceBase(dimension=dimension, journal=path if journal else None)


def build_parser() -> _Parser:
    parser = _Parser(prog="evoroute", description="Experience-driven model routing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("coldstart", help="populate a knowledge base with uniform-random episodes")
    p.add_argument("--tasks", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--kb", type=Path, required=True)
    p.add_argument("--config", type=Path, default=None)

    p = sub.add_parser("simulate", help="run an evaluation campaign and write report CSVs")
    p.add_argument("--policy", required=True, help="evoroute | random | fixed:<model>")
    p.add_argument("--episodes", type=int, required=True)
    p.add_argument("--phase", choices=[ph.value for ph in Phase], default=Phase.INFERENCE.value)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--kb", type=Path, default=None, help="optional starting KB (read-only)")
    p.add_argument("--coldstart-tasks", type=int, default=0)
    p.add_argument("--plot", type=Path, default=None, help="prefix for optional PNG charts")

    p = sub.add_parser("route", help="one-off routing decision against a knowledge base")
    p.add_argument("--kb", type=Path, required=True)
    p.add_argument("--role", required=True)
    p.add_argument("--instruction", required=True)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("kb", help="knowledge-base inspection and transfer")
    kb_sub = p.add_subparsers(dest="kb_command", required=True)
    q = kb_sub.add_parser("stats")
    q.add_argument("--kb", type=Path, required=True)
    q = kb_sub.add_parser("export")
    q.add_argument("--kb", type=Path, required=True)
    q.add_argument("--out", type=Path, default=None, help="default: stdout")
    q = kb_sub.add_parser("import")
    q.add_argument("--kb", type=Path, required=True)
    q.add_argument("--src", dest="src", type=Path, required=True)

    p = sub.add_parser("report", help="paired comparison of two report CSVs")
    p.add_argument("--compare", nargs=2, metavar=("A", "B"), required=True, type=Path)

    p = sub.add_parser("serve", help="start the HTTP gateway")
    p.add_argument("--kb", type=Path, default=None)
    p.add_argument("--config", type=Path, default=None)
    p.add_argument("--bind", default=None)

    return parser


def _cmd_coldstart(args) -> int:
    if args.tasks < 1:
        print("coldstart: --tasks must be >= 1", file=sys.stderr)
        return 1
    setup = load_runtime(args.config)
    kb = _load_kb(args.kb, setup.embedder.dimension, journal=True)
    tasks = task_stream(setup.environment.generator, derive(args.seed, _COLD_STREAM), prefix="cold-")
    summary = cold_start(
        tasks,
        args.tasks,
        setup.pool,
        kb,
        make_rng(args.seed),
        env=setup.environment,
        embedder=setup.embedder,
    )
    print(
        f"tasks={summary.tasks_run} records={summary.records_added} "
        f"total_cost_usd={summary.total_cost:.4f} total_duration_s={summary.total_duration:.1f} "
        f"kb_records={len(kb)} generation={kb.generation}"
    )
    return 0


def _cmd_simulate(args) -> int:
    if args.episodes < 1:
        print("simulate: --episodes must be >= 1", file=sys.stderr)
        return 1
    try:
        parse_policy(args.policy)
    except EvoRouteError:
        print(f"simulate: unknown policy {args.policy!r}", file=sys.stderr)
        return 1
    if args.coldstart_tasks < 0:
        print("simulate: --coldstart-tasks must be >= 0", file=sys.stderr)
        return 1
    setup = load_runtime(args.config)
    config = replace(setup.router, phase=Phase(args.phase))
    if args.kb is not None:
        kb = ExperienceBase.load(args.kb)
    else:
        kb = ExperienceBase(dimension=setup.embedder.dimension)
    if args.coldstart_tasks:
        tasks = task_stream(
            setup.environment.generator, derive(args.seed, _COLD_STREAM), prefix="cold-"
        )
        cold_start(
            tasks,
            args.coldstart_tasks,
            setup.pool,
            kb,
            make_rng(args.seed),
            env=setup.environment,
            embedder=setup.embedder,
        )
    report = evaluate(
        args.policy,
        args.episodes,
        setup.environment,
        setup.pool,
        config,
        seed=args.seed,
        kb=kb,
        embedder=setup.embedder,
    )
    _write_staged(args.out, report_csv(report))
    roles_path = args.out.with_name(args.out.stem + ".roles" + (args.out.suffix or ".csv"))
    _write_staged(roles_path, role_table_csv(report))
    print(f"wrote {args.out} and {roles_path}")
    if args.plot is not None:
        _emit_plots(report, args.plot)
    return 0


def _emit_plots(report: TrilemmaReport, prefix: Path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    roles = sorted({r for r, _m in report.selection_by_role})
    models = sorted({m for _r, m in report.selection_by_role})
    fig, ax = plt.subplots(figsize=(8, 4.5))
    bottoms = [0.0] * len(roles)
    for model in models:
        totals = [
            sum(c for (r, _m), c in report.selection_by_role.items() if r == role) for role in roles
        ]
        shares = [
            report.selection_by_role.get((role, model), 0) / t if t else 0.0
            for role, t in zip(roles, totals)
        ]
        ax.bar(roles, shares, bottom=bottoms, label=model)
        bottoms = [b + s for b, s in zip(bottoms, shares)]
    ax.set_ylabel("selection share")
    ax.set_title(f"model selection by role — {report.policy}")
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(f"{prefix}_selection.png", dpi=120)
    plt.close(fig)

    fig, axes = plt.subplots(1, 3, figsize=(9, 3))
    for ax, (label, value) in zip(
        axes,
        [
            ("mean performance", report.mean_performance),
            ("total cost (USD)", report.total_cost),
            ("total duration (s)", report.total_duration),
        ],
    ):
        ax.bar([report.policy], [value])
        ax.set_title(label, fontsize=9)
    fig.tight_layout()
    fig.savefig(f"{prefix}_trilemma.png", dpi=120)
    plt.close(fig)


def _cmd_route(args) -> int:
    setup = load_runtime(args.config)
    kb = ExperienceBase.load(args.kb)
    ctx = build_context(args.role, args.instruction, setup.embedder, "cli", 0)
    decision = route(ctx, kb.snapshot(), setup.pool, setup.router, make_rng(args.seed))
    out = {"decision_id": decision.decision_id}
    out.update(decision.diagnostics())
    print(json.dumps(out, indent=2))
    return 0


def _cmd_kb(args) -> int:
    if args.kb_command == "stats":
        kb = ExperienceBase.load(args.kb)
        print(f"records={len(kb)} generation={kb.generation} dimension={kb.dimension}")
        return 0
    if args.kb_command == "export":
        kb = ExperienceBase.load(args.kb)
        payload = kb.persist().decode("utf-8")
        if args.out is None:
            sys.stdout.write(payload)
        else:
            _write_staged(args.out, payload)
        return 0
    if args.kb_command == "import":
        existing = args.kb.read_bytes() if args.kb.exists() else b""
        merged = ExperienceBase.load(existing + args.src.read_bytes())
        _write_staged(args.kb, merged.persist().decode("utf-8"))
        print(f"records={len(merged)} generation={merged.generation}")
        return 0
    raise AssertionError(args.kb_command)


def _read_report_row(path: Path) -> dict[str, str]:
    lines = path.read_text(encoding="utf-8").strip().splitlines()
    if len(lines) < 2:
        raise EvoRouteError(f"{path}: expected a header and one data row")
    header = lines[0].split(",")
    row = lines[1].split(",")
    return dict(zip(header, row))


def _cmd_report(args) -> int:
    a, b = (_read_report_row(p) for p in args.compare)
    print(f"{'metric':<22}{a.get('policy', '?'):>16}{b.get('policy', '?'):>16}{'delta (B-A)':>16}")
    for key in ("mean_performance", "total_cost_usd", "total_duration_s"):
        va, vb = float(a[key]), float(b[key])
        print(f"{key:<22}{va:>16.6f}{vb:>16.6f}{vb - va:>+16.6f}")
    return 0


def _cmd_serve(args) -> int:
    from .gateway import serve

    serve(
        kb_path=str(args.kb) if args.kb else None,
        config_path=str(args.config) if args.config else None,
        bind=args.bind,
    )
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "coldstart": _cmd_coldstart,
        "simulate": _cmd_simulate,
        "route": _cmd_route,
        "kb": _cmd_kb,
        "report": _cmd_report,
        "serve": _cmd_serve,
    }
    try:
        return handlers[args.command](args)
    except EvoRouteError as exc:
        print(f"evoroute: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"evoroute: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
