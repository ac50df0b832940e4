"""Time-budgeted, task-prioritised route planning over waypoint graphs with GA and PSO."""

from .bench_harness import CampaignConfig, RunRecord, emit_report, monte_carlo, run_once
from .cost_model import CostBreakdown, CostParams, cost_route, cost_task, cost_total, evaluate_route, violation
from .ga_engine import GAConfig, evolve
from .graph_model import (
    Edge,
    MissionGraph,
    ScenarioConfig,
    Task,
    Waypoint,
    euclidean_distance,
    generate_scenario,
    load_graph,
    neighbors,
    save_graph,
    traversal_time,
)
from .oracle import enumerate_simple_paths, optimal_route_bruteforce
from .pso_engine import SwarmConfig, run_pso
from .route_codec import decode, repair, route_metrics, validate

__version__ = "0.1.0"
