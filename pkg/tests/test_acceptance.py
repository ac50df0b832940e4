"""Acceptance criteria, each checked at its stated tolerance.

A PASS/FAIL line per criterion is printed in the terminal summary.
"""

import statistics
import subprocess
import sys
import time
import warnings
from pathlib import Path

import numpy as np
import pytest

from auvroute.bench_harness import CampaignConfig, monte_carlo, run_once
from auvroute.cost_model import CostParams, violation
from auvroute.ga_engine import GAConfig
from auvroute.graph_model import ScenarioConfig, generate_scenario, neighbors
from auvroute.oracle import optimal_route_bruteforce
from auvroute.pso_engine import SwarmConfig
from auvroute.route_codec import decode, decode_partial, validate

from conftest import ACCEPTANCE, SAMPLE18_U, sample18_graph


def record(k, ok, detail):
    ACCEPTANCE[k] = (bool(ok), detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


def test_criterion_1_decoder_fidelity():
    g = sample18_graph()
    u = np.array(SAMPLE18_U, dtype=float)
    decode(u, g)  # warm caches (adjacency) outside the timed call
    t0 = time.perf_counter()
    route = decode(u, g)
    elapsed = time.perf_counter() - t0
    first = decode_partial(u, g)[1]
    ok = route == (1, 3, 8, 13, 18) and neighbors(g, 1) == (2, 3, 4, 5) and first == 3 and elapsed < 1e-3
    record(1, ok, f"route={list(route)} first_step={first} time={elapsed * 1e3:.3f} ms")
    assert route == (1, 3, 8, 13, 18)
    assert neighbors(g, 1) == (2, 3, 4, 5) and first == 3
    assert elapsed < 1e-3


def test_criterion_2_violation_formula():
    a = violation(23166, 25200)
    b = violation(25232, 25200)
    expected = 1 - 25200 / 25232
    ok = a == 0 and abs(b - expected) <= 1e-9 and abs(b - 0.0012682) < 1e-7
    record(2, ok, f"violation(23166,25200)={a} violation(25232,25200)={b:.10f}")
    assert a == 0
    assert b == pytest.approx(expected, abs=1e-9)
    assert b == pytest.approx(0.0012682, abs=1e-7)


# Pre-declared family: 30 graphs of 6..10 nodes, generator defaults otherwise.
ORACLE_FAMILY = [(6 + i % 5, 1000 + i) for i in range(30)]
ORACLE_PARAMS = CostParams(t_available=6000.0)


@pytest.mark.slow
def test_criterion_3_oracle_equivalence():
    t0 = time.perf_counter()
    ga_hits = pso_hits = 0
    misses = []
    for i, (n, scenario_seed) in enumerate(ORACLE_FAMILY):
        g = generate_scenario(ScenarioConfig(n_nodes=n, seed=scenario_seed))
        opt = optimal_route_bruteforce(g, ORACLE_PARAMS)
        assert opt.found, f"instance {i} has no feasible route"
        best = opt.best.cost.cost_total
        ga = run_once(g, "GA", GAConfig(max_generations=200, seed=i), ORACLE_PARAMS)
        pso = run_once(g, "PSO", SwarmConfig(max_iterations=500, seed=i), ORACLE_PARAMS)
        ga_gap = (ga.best_cost - best) / best
        pso_gap = (pso.best_cost - best) / best
        ga_hits += ga_gap <= 0.01
        pso_hits += pso_gap <= 0.05
        if ga_gap > 0.01 or pso_gap > 0.05:
            misses.append((i, round(ga_gap, 4), round(pso_gap, 4)))
    elapsed = time.perf_counter() - t0
    ok = ga_hits >= 27 and pso_hits >= 27 and elapsed < 30
    record(3, ok, f"GA {ga_hits}/30 within 1%, PSO {pso_hits}/30 within 5%, {elapsed:.1f} s; misses={misses}")
    assert ga_hits >= 27
    assert pso_hits >= 27
    assert elapsed < 30


SCALE_RUNS = 20
SCALES = {50: 0.977, 100: 0.987}  # edge densities giving ~1200 and ~4900 edges
_scale_records: dict = {}


def scale_records():
    if not _scale_records:
        p = CostParams()
        for n, density in SCALES.items():
            for seed in range(SCALE_RUNS):
                g = generate_scenario(ScenarioConfig(n_nodes=n, edge_density=density, seed=seed))
                for algo, cfg in (("GA", GAConfig(seed=seed)), ("PSO", SwarmConfig(seed=seed))):
                    rec = run_once(g, algo, cfg, p, run_index=seed)
                    _scale_records[(n, algo, seed)] = (rec, g.n_edges)
    return _scale_records


@pytest.mark.slow
def test_criterion_4_feasibility_at_scale():
    recs = scale_records()
    lines, ok = [], True
    for n in SCALES:
        for algo in ("GA", "PSO"):
            rs = [recs[(n, algo, s)] for s in range(SCALE_RUNS)]
            good = 0
            for rec, _ in rs:
                g_ok = rec.error is None and rec.feasible and rec.violation <= 0.005
                g_ok = g_ok and validate(rec.route, generate_scenario(
                    ScenarioConfig(n_nodes=n, edge_density=SCALES[n], seed=rec.run_index)), None,
                    rec.t_available, v_auv=CostParams().v_auv).feasible
                good += g_ok
            slowest = max(r.cpu_time for r, _ in rs)
            edges = statistics.mean(e for _, e in rs)
            ok &= good >= 0.95 * SCALE_RUNS and slowest < 60
            lines.append(f"{algo}@{n} ({edges:.0f} edges) {good}/{SCALE_RUNS} feasible, max {slowest:.1f} s")
    record(4, ok, "; ".join(lines))
    assert ok


@pytest.mark.slow
def test_criterion_5_budget_utilization():
    recs = scale_records()
    lines, ok = [], True
    for n in SCALES:
        for algo in ("GA", "PSO"):
            ratios = [r.t_route / r.t_available for r, _ in (recs[(n, algo, s)] for s in range(SCALE_RUNS))]
            med = statistics.median(ratios)
            ok &= med >= 0.85
            lines.append(f"{algo}@{n} median t_route/t_available={med:.3f}")
    record(5, ok, "; ".join(lines))
    assert ok


@pytest.mark.slow
def test_criterion_6_monte_carlo_direction():
    cfg = CampaignConfig(
        n_runs=100,
        scenario=ScenarioConfig(n_nodes=20),
        cost=CostParams(t_available=30600.0),
        master_seed=2024,
    )
    report = monte_carlo(cfg)
    s = report.summary()
    ga, pso = s["GA"], s["PSO"]
    direction = ga.total_weight.mean >= pso.total_weight.mean
    feasible = ga.feasibility_rate >= 0.95 and pso.feasibility_rate >= 0.95
    detail = (
        f"mean weight GA={ga.total_weight.mean:.3f} PSO={pso.total_weight.mean:.3f}; "
        f"mean cost GA={ga.best_cost.mean:.4f} PSO={pso.best_cost.mean:.4f}; "
        f"feasibility GA={ga.feasibility_rate:.2f} PSO={pso.feasibility_rate:.2f}"
    )
    if not direction:
        worse = [
            (a.run_index, a.seed)
            for a, b in zip(report.by_algorithm("GA"), report.by_algorithm("PSO"))
            if a.total_weight < b.total_weight
        ]
        warnings.warn(f"GA mean weight below PSO (master_seed={cfg.master_seed}); runs where GA<PSO: {worse}")
        detail += f"; soft direction GA>=PSO not met ({len(worse)}/100 runs GA<PSO, master_seed={cfg.master_seed})"
    record(6, feasible, detail)
    assert feasible


@pytest.mark.slow
def test_criterion_7_invariant_suites():
    here = Path(__file__).parent
    proc = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-p", "no:cacheprovider", str(here / "test_properties.py")],
        capture_output=True,
        text=True,
    )
    tail = proc.stdout.strip().splitlines()[-1] if proc.stdout.strip() else proc.stderr[-200:]
    record(7, proc.returncode == 0, f"property suite: {tail}")
    assert proc.returncode == 0, proc.stdout[-3000:]
