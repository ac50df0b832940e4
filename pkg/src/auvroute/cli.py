"""Command-line driver: generate scenarios, solve, run campaigns, check against the oracle.

Exit codes: 0 success, 1 usage/config error, 2 I/O error, 3 no feasible route.
Log verbosity comes from the ``AUVROUTE_LOG_LEVEL`` environment variable.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Sequence

from .bench_harness import (
    CampaignConfig,
    emit_history,
    emit_report,
    format_summary,
    history_name,
    monte_carlo,
    run_once,
)
from .cost_model import CostParams, evaluate_route
from .ga_engine import GAConfig
from .graph_model import GenerationError, GraphError, MissionGraph, ScenarioConfig, generate_scenario, load_graph, save_graph
from .oracle import DEFAULT_MAX_NODES, GraphTooLarge, enumerate_simple_paths, optimal_route_bruteforce
from .pso_engine import SwarmConfig

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_INFEASIBLE = 3

LIST_PATHS_LIMIT = 20

log = logging.getLogger("auvroute")


class ConfigError(ValueError):
    pass


@dataclasses.dataclass
class RunConfig:
    scenario: ScenarioConfig = dataclasses.field(default_factory=ScenarioConfig)
    ga: GAConfig = dataclasses.field(default_factory=GAConfig)
    pso: SwarmConfig = dataclasses.field(default_factory=SwarmConfig)
    cost: CostParams = dataclasses.field(default_factory=CostParams)
    campaign: dict = dataclasses.field(default_factory=dict)

    def campaign_config(self) -> CampaignConfig:
        return CampaignConfig(scenario=self.scenario, ga=self.ga, pso=self.pso, cost=self.cost, **self.campaign)


_SECTIONS = {"scenario": ScenarioConfig, "ga": GAConfig, "pso": SwarmConfig, "cost": CostParams}
_CAMPAIGN_KEYS = {"n_runs", "regenerate_graph_per_run", "master_seed", "workers"}


def _build(cls, section: str, values: Any):
    if not isinstance(values, dict):
        raise ConfigError(f"section '{section}' must be an object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = sorted(set(values) - known)
    if unknown:
        raise ConfigError(f"unknown key(s) in '{section}': {', '.join(unknown)}")
    try:
        return cls(**values)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{section}' section: {exc}") from exc


def parse_run_config(doc: Any) -> RunConfig:
    """Build a RunConfig from a decoded JSON document; every section is optional."""
    if not isinstance(doc, dict):
        raise ConfigError("config document must be an object")
    unknown = sorted(set(doc) - set(_SECTIONS) - {"campaign"})
    if unknown:
        raise ConfigError(f"unknown top-level key(s): {', '.join(unknown)}")
    cfg = RunConfig(**{name: _build(cls, name, doc.get(name, {})) for name, cls in _SECTIONS.items()})
    campaign = doc.get("campaign", {})
    if not isinstance(campaign, dict):
        raise ConfigError("section 'campaign' must be an object")
    bad = sorted(set(campaign) - _CAMPAIGN_KEYS)
    if bad:
        raise ConfigError(f"unknown key(s) in 'campaign': {', '.join(bad)}")
    cfg.campaign = dict(campaign)
    try:
        cfg.campaign_config()
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid 'campaign' section: {exc}") from exc
    return cfg


def default_config_document() -> dict:
    """Every configurable key with its default value."""
    cfg = RunConfig()
    doc = {name: dataclasses.asdict(getattr(cfg, name)) for name in _SECTIONS}
    camp = CampaignConfig()
    doc["campaign"] = {k: getattr(camp, k) for k in sorted(_CAMPAIGN_KEYS)}
    return doc


def load_run_config(path: str | None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_run_config(doc)


def _read_graph(path: str) -> MissionGraph:
    try:
        data = Path(path).read_bytes()
    except OSError as exc:
        raise OSError(f"cannot read graph {path}: {exc}") from exc
    return load_graph(data)


def _write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(data)


def _engine_config(cfg: RunConfig, algo: str, seed: int | None):
    engine_cfg = cfg.ga if algo == "GA" else cfg.pso
    return dataclasses.replace(engine_cfg, seed=seed) if seed is not None else engine_cfg


# --------------------------------------------------------------------------
# Commands
# --------------------------------------------------------------------------


def cmd_generate(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    scenario = cfg.scenario if args.seed is None else dataclasses.replace(cfg.scenario, seed=args.seed)
    g = generate_scenario(scenario)
    _write(Path(args.out), save_graph(g))
    print(f"nodes={g.n_nodes} edges={g.n_edges} start={g.start} destination={g.destination} -> {args.out}")
    return EXIT_OK


def cmd_solve(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    g = _read_graph(args.graph)
    algo = args.algo.upper()
    record = run_once(g, algo, _engine_config(cfg, algo, args.seed), cfg.cost)
    print(format_summary(record))
    if record.error or not record.feasible:
        print("no feasible route found", file=sys.stderr)
        return EXIT_INFEASIBLE
    if args.out:
        out = Path(args.out)
        _write(out, emit_report(record, args.format))
        hist = out.with_name(f"{out.stem}_history.csv")
        _write(hist, emit_history(record.history))
        print(f"report -> {out}\nhistory -> {hist}")
    return EXIT_OK


def _check_writable(out_dir: Path) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    if not os.access(out_dir, os.W_OK | os.X_OK):
        raise PermissionError(f"output directory {out_dir} is not writable")


def cmd_bench(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    camp = cfg.campaign_config()
    if args.seed is not None:
        camp = dataclasses.replace(camp, master_seed=args.seed)
    if args.runs is not None:
        camp = dataclasses.replace(camp, n_runs=args.runs)
    out_dir = Path(args.out)
    _check_writable(out_dir)

    report = monte_carlo(camp)
    _write(out_dir / "campaign.csv", emit_report(report, "csv"))
    _write(out_dir / "campaign.json", emit_report(report, "json"))
    for r in report.records:
        if r.error is None:
            _write(out_dir / "histories" / f"{history_name(r)}.csv", emit_history(r.history))

    print(f"runs={camp.n_runs} master_seed={camp.master_seed} -> {out_dir}")
    for algo, s in report.summary().items():
        print(
            f"{algo:<4} feasible={s.feasibility_rate:.2%} failed={s.n_failed} "
            f"t_route mean={s.t_route.mean:.0f}s std={s.t_route.std:.0f}s "
            f"weight mean={s.total_weight.mean:.2f} std={s.total_weight.std:.2f}"
        )
    for f in report.failures:
        print(f"run {f['run_index']} failed during {f['stage']}: {f['error']}", file=sys.stderr)
    if not any(r.error is None for r in report.records):
        print("no run completed", file=sys.stderr)
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_oracle(args: argparse.Namespace) -> int:
    cfg = load_run_config(args.config)
    g = _read_graph(args.graph)
    p = cfg.cost
    result = optimal_route_bruteforce(g, p, max_graph_nodes=args.max_nodes)

    all_paths = []
    for route in enumerate_simple_paths(g):
        all_paths.append(evaluate_route(route, g, p))
        if len(all_paths) > LIST_PATHS_LIMIT:
            break
    if len(all_paths) <= LIST_PATHS_LIMIT:
        for ev in all_paths:
            flag = "ok" if ev.feasible else ",".join(ev.report.violations)
            print(f"path {list(ev.route)} cost={ev.cost.cost_total:.6g} [{flag}]")

    print(f"paths within budget: {result.n_paths_enumerated} (feasible {result.n_feasible})")
    if not result.found:
        print("no feasible route found", file=sys.stderr)
        return EXIT_INFEASIBLE
    best_cost = result.best.cost.cost_total
    print(f"optimal route: {list(result.best_route)}")
    print(f"optimal cost: {best_cost:.6g}")
    if args.compare:
        for algo in ("GA", "PSO"):
            rec = run_once(g, algo, _engine_config(cfg, algo, args.seed), p)
            gap = (rec.best_cost - best_cost) / best_cost
            print(f"{algo}: cost={rec.best_cost:.6g} gap={gap:.4%} route={list(rec.route)}")
    return EXIT_OK


def cmd_defaults(args: argparse.Namespace) -> int:
    print(json.dumps(default_config_document(), indent=2))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="auvroute", description="Time-budgeted task route planning with GA and PSO.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random scenario graph")
    p.add_argument("--config", help="run configuration (JSON)")
    p.add_argument("--out", required=True, help="graph file to write")
    p.add_argument("--seed", type=int, help="override scenario.seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("solve", help="solve one graph with GA or PSO")
    p.add_argument("--graph", required=True)
    p.add_argument("--algo", required=True, type=str.lower, choices=("ga", "pso"))
    p.add_argument("--config")
    p.add_argument("--seed", type=int, help="override the engine seed")
    p.add_argument("--out", help="report file to write")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("bench", help="Monte Carlo GA vs PSO campaign")
    p.add_argument("--config")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--seed", type=int, help="override campaign.master_seed")
    p.add_argument("--runs", type=int, help="override campaign.n_runs")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("oracle", help="exhaustive optimum for a small graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--config")
    p.add_argument("--compare", action="store_true", help="also run GA and PSO and print optimality gaps")
    p.add_argument("--seed", type=int, help="engine seed for --compare")
    p.add_argument("--max-nodes", type=int, default=DEFAULT_MAX_NODES)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("defaults", help="print the default run configuration")
    p.set_defaults(func=cmd_defaults)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    logging.basicConfig(
        level=os.environ.get("AUVROUTE_LOG_LEVEL", "WARNING").upper(),
        format="%(levelname)s %(name)s: %(message)s",
    )
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        return args.func(args)
    except (ConfigError, GraphError, GraphTooLarge, GenerationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
