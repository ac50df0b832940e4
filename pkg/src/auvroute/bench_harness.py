"""Single runs, GA-vs-PSO Monte Carlo campaigns and report emission."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .cost_model import CostParams, evaluate_route, violation
from .ga_engine import GAConfig, evolve
from .graph_model import MissionGraph, ScenarioConfig, generate_scenario
from .pso_engine import SwarmConfig, run_pso
from .solution import HistoryRecord, SolveResult

log = logging.getLogger(__name__)

ALGORITHMS = ("GA", "PSO")

CSV_COLUMNS = (
    "algorithm",
    "seed",
    "cpu_time_s",
    "best_cost",
    "t_available_s",
    "t_route_s",
    "total_distance_m",
    "total_weight",
    "n_tasks",
    "violation",
    "feasible",
    "route",
)


@dataclass
class RunRecord:
    algorithm: str
    seed: int
    cpu_time: float
    best_cost: float
    t_available: float
    t_route: float
    total_distance: float
    total_weight: float
    n_tasks: int
    violation: float
    feasible: bool
    route: tuple[int, ...]
    run_index: int = 0
    error: str | None = None
    history: list[HistoryRecord] = field(default_factory=list, repr=False, compare=False)

    def csv_row(self) -> list[str]:
        return [
            self.algorithm,
            str(self.seed),
            repr(self.cpu_time),
            repr(self.best_cost),
            repr(self.t_available),
            repr(self.t_route),
            repr(self.total_distance),
            repr(self.total_weight),
            str(self.n_tasks),
            repr(self.violation),
            str(self.feasible).lower(),
            "-".join(str(v) for v in self.route),
        ]

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("history")
        d["route"] = list(self.route)
        return {k: _json_safe(v) for k, v in d.items()}


def _json_safe(v):
    if isinstance(v, float) and not math.isfinite(v):
        return None
    return v


def _engine(algo: str):
    algo = algo.upper()
    if algo == "GA":
        return evolve
    if algo == "PSO":
        return run_pso
    raise ValueError(f"unknown algorithm {algo!r}; expected GA or PSO")


def solve(g: MissionGraph, algo: str, cfg: GAConfig | SwarmConfig, p: CostParams) -> SolveResult:
    return _engine(algo)(g, cfg, p)


def failed_record(algo: str, seed: int, t_available: float, error: str, run_index: int = 0) -> RunRecord:
    nan = math.nan
    return RunRecord(algo.upper(), seed, nan, nan, t_available, nan, nan, nan, 0, nan, False, (), run_index, error)


def run_once(
    g: MissionGraph, algo: str, cfg: GAConfig | SwarmConfig, p: CostParams, run_index: int = 0
) -> RunRecord:
    """Solve once and record the returned route's metrics after re-evaluating it from scratch."""
    algo = algo.upper()
    engine = _engine(algo)
    try:
        t0 = time.perf_counter()
        result = engine(g, cfg, p)
        elapsed = time.perf_counter() - t0
    except Exception as exc:  # noqa: BLE001 - recorded, not raised
        log.warning("%s run %d failed: %s", algo, run_index, exc)
        return failed_record(algo, cfg.seed, p.t_available, f"{type(exc).__name__}: {exc}", run_index)

    ev = evaluate_route(result.route, g, p)
    m = ev.metrics
    nan = math.nan
    t_route = m.t_route if m else nan
    return RunRecord(
        algorithm=algo,
        seed=cfg.seed,
        cpu_time=elapsed,
        best_cost=ev.cost.cost_total,
        t_available=p.t_available,
        t_route=t_route,
        total_distance=m.total_distance if m else nan,
        total_weight=m.total_weight if m else nan,
        n_tasks=m.n_tasks if m else len(ev.route) - 1,
        violation=violation(t_route, p.t_available) if m and t_route > 0 else nan,
        feasible=ev.feasible,
        route=ev.route,
        run_index=run_index,
        history=result.history,
    )


# --------------------------------------------------------------------------
# Monte Carlo campaigns
# --------------------------------------------------------------------------


def derive_seed(master_seed: int, *key: int) -> int:
    """Counter-based child seed: independent streams, reproducible from (master, key)."""
    ss = np.random.SeedSequence([master_seed & 0xFFFFFFFFFFFFFFFF, *key])
    return int(ss.generate_state(1, np.uint64)[0] >> np.uint64(1))


@dataclass
class CampaignConfig:
    n_runs: int = 100
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    ga: GAConfig = field(default_factory=GAConfig)
    pso: SwarmConfig = field(default_factory=SwarmConfig)
    cost: CostParams = field(default_factory=CostParams)
    regenerate_graph_per_run: bool = True
    master_seed: int = 0
    workers: int = 1

    def __post_init__(self) -> None:
        if self.n_runs < 1:
            raise ValueError("n_runs must be >= 1")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")


@dataclass
class Stats:
    mean: float
    std: float
    min: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> Stats:
        a = np.asarray([v for v in values if math.isfinite(v)], dtype=float)
        if a.size == 0:
            return cls(math.nan, math.nan, math.nan, math.nan)
        return cls(float(a.mean()), float(a.std()), float(a.min()), float(a.max()))


@dataclass
class AlgorithmSummary:
    algorithm: str
    n_runs: int
    n_failed: int
    feasibility_rate: float
    t_route: Stats
    total_weight: Stats
    best_cost: Stats


def summarize(records: Iterable[RunRecord], algorithm: str) -> AlgorithmSummary:
    recs = [r for r in records if r.algorithm == algorithm]
    ok = [r for r in recs if r.error is None]
    return AlgorithmSummary(
        algorithm=algorithm,
        n_runs=len(recs),
        n_failed=len(recs) - len(ok),
        feasibility_rate=(sum(r.feasible for r in recs) / len(recs)) if recs else math.nan,
        t_route=Stats.of([r.t_route for r in ok]),
        total_weight=Stats.of([r.total_weight for r in ok]),
        best_cost=Stats.of([r.best_cost for r in ok if r.feasible]),
    )


@dataclass
class CampaignReport:
    records: list[RunRecord] = field(default_factory=list)
    failures: list[dict] = field(default_factory=list)
    master_seed: int = 0

    def summary(self) -> dict[str, AlgorithmSummary]:
        return {a: summarize(self.records, a) for a in ALGORITHMS}

    def by_algorithm(self, algorithm: str) -> list[RunRecord]:
        return [r for r in self.records if r.algorithm == algorithm]


def _campaign_graph(cfg: CampaignConfig, run: int) -> MissionGraph:
    key = run if cfg.regenerate_graph_per_run else 0
    return generate_scenario(replace(cfg.scenario, seed=derive_seed(cfg.master_seed, key, 0)))


def _run_pair(cfg: CampaignConfig, run: int) -> tuple[list[RunRecord], dict | None]:
    engine_seed = derive_seed(cfg.master_seed, run, 1)
    try:
        g = _campaign_graph(cfg, run)
    except Exception as exc:  # noqa: BLE001
        msg = f"{type(exc).__name__}: {exc}"
        return [failed_record(a, engine_seed, cfg.cost.t_available, msg, run) for a in ALGORITHMS], {
            "run_index": run,
            "stage": "generate",
            "error": msg,
        }
    records = [
        run_once(g, "GA", replace(cfg.ga, seed=engine_seed), cfg.cost, run),
        run_once(g, "PSO", replace(cfg.pso, seed=engine_seed), cfg.cost, run),
    ]
    return records, None


def monte_carlo(cfg: CampaignConfig) -> CampaignReport:
    """Run ``n_runs`` GA/PSO pairs, each on its own seeded random graph.

    Both engines of a pair see the same graph and the same engine seed.
    Records are merged in run order regardless of ``workers``.
    """
    runs = range(cfg.n_runs)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_pair, [cfg] * cfg.n_runs, runs))
    else:
        results = [_run_pair(cfg, r) for r in runs]
    report = CampaignReport(master_seed=cfg.master_seed)
    for records, failure in results:
        report.records.extend(records)
        if failure:
            report.failures.append(failure)
    return report


# --------------------------------------------------------------------------
# Report emission
# --------------------------------------------------------------------------


def _as_records(report) -> list[RunRecord]:
    if isinstance(report, CampaignReport):
        return report.records
    if isinstance(report, RunRecord):
        return [report]
    return list(report)


def emit_report(report, fmt: str = "csv") -> bytes:
    """Serialise a campaign, a record list or a single record as CSV or JSON."""
    records = _as_records(report)
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(r.csv_row() for r in records)
        return buf.getvalue().encode("utf-8")
    if fmt == "json":
        doc: dict = {"records": [r.to_dict() for r in records]}
        if isinstance(report, CampaignReport):
            doc["master_seed"] = report.master_seed
            doc["failures"] = report.failures
            doc["summary"] = {
                a: {k: _json_safe_tree(v) for k, v in asdict(s).items()} for a, s in report.summary().items()
            }
        doc["histories"] = {
            history_name(r): [[h.iteration, _json_safe(h.best_cost)] for h in r.history] for r in records
        }
        return (json.dumps(doc, indent=2) + "\n").encode("utf-8")
    raise ValueError(f"unknown report format {fmt!r}; expected csv or json")


def _json_safe_tree(v):
    if isinstance(v, dict):
        return {k: _json_safe_tree(x) for k, x in v.items()}
    return _json_safe(v)


def history_name(r: RunRecord) -> str:
    return f"{r.algorithm.lower()}_run{r.run_index:03d}"


def emit_history(history: Sequence[HistoryRecord]) -> bytes:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(("iteration", "best_cost", "mean_cost"))
    w.writerows((h.iteration, repr(h.best_cost), repr(h.mean_cost)) for h in history)
    return buf.getvalue().encode("utf-8")


def parse_csv_report(data: bytes | str) -> list[RunRecord]:
    text = data.decode("utf-8") if isinstance(data, bytes) else data
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    out = []
    for row in reader:
        out.append(
            RunRecord(
                algorithm=row["algorithm"],
                seed=int(row["seed"]),
                cpu_time=float(row["cpu_time_s"]),
                best_cost=float(row["best_cost"]),
                t_available=float(row["t_available_s"]),
                t_route=float(row["t_route_s"]),
                total_distance=float(row["total_distance_m"]),
                total_weight=float(row["total_weight"]),
                n_tasks=int(row["n_tasks"]),
                violation=float(row["violation"]),
                feasible=row["feasible"] == "true",
                route=tuple(int(v) for v in row["route"].split("-")) if row["route"] else (),
            )
        )
    return out


def format_summary(r: RunRecord) -> str:
    """Human-readable block using the usual performance-metric row labels."""
    if r.error:
        return f"{r.algorithm} run failed: {r.error}"
    hours = r.t_available / 3600.0
    if r.feasible:
        feas = "Yes"
    elif r.violation > 0 and math.isfinite(r.violation):
        feas = "Slightly late" if r.violation <= 0.005 else "No (late)"
    else:
        feas = "No"
    rows = [
        ("Algorithm", r.algorithm),
        ("CPU Run Time(sec)", f"{r.cpu_time:.2f}"),
        ("Best Cost", f"{r.best_cost:.4g}"),
        ("Total Available Time(sec)", f"{r.t_available:.0f} ({hours:g}h)"),
        ("Route Travel Time(sec)", f"{r.t_route:.0f}"),
        ("Total Distance", f"{r.total_distance:.0f}"),
        ("Total Weight", f"{r.total_weight:.2f}"),
        ("N-Tasks", str(r.n_tasks)),
        ("Violation", f"{r.violation:.4f}"),
        ("Feasibility", feas),
        ("Route", "[" + ",".join(str(v) for v in r.route) + "]"),
    ]
    width = max(len(k) for k, _ in rows)
    return "\n".join(f"{k:<{width}}  {v}" for k, v in rows)
