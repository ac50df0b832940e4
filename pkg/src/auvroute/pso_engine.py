"""Particle swarm optimisation over priority vectors.

Each particle position is a priority vector; its route is whatever the
decoder makes of it. The swarm is updated synchronously: all velocities for
iteration t+1 are computed from the gbest of iteration t.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .cost_model import CostBreakdown, CostParams, Evaluation, RouteEvaluator
from .graph_model import MissionGraph
from .route_codec import PRIORITY_HIGH, PRIORITY_LOW, decode_table, random_priority_vector
from .solution import HistoryRecord, SolveResult


@dataclass
class SwarmConfig:
    swarm_size: int = 100
    max_iterations: int = 250
    omega: float = 0.729
    c1: float = 1.494
    c2: float = 1.494
    v_max: float = 20.0
    init_velocity: float = 20.0
    position_bounds: tuple[float, float] = (PRIORITY_LOW, PRIORITY_HIGH)
    per_component_random: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        self.position_bounds = tuple(self.position_bounds)
        self.validate()

    def validate(self) -> None:
        if self.swarm_size < 1:
            raise ValueError("swarm_size must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")
        if min(self.omega, self.c1, self.c2) < 0:
            raise ValueError("omega, c1, c2 must be >= 0")
        if not (self.v_max > 0 and self.init_velocity >= 0):
            raise ValueError("v_max must be > 0 and init_velocity >= 0")
        lo, hi = self.position_bounds
        if not lo < hi:
            raise ValueError("position_bounds must satisfy lo < hi")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Particle:
    position: np.ndarray
    velocity: np.ndarray
    pbest_position: np.ndarray
    pbest_cost: CostBreakdown | None = None
    current_cost: CostBreakdown | None = None


@dataclass
class SwarmState:
    positions: np.ndarray
    velocities: np.ndarray
    pbest_positions: np.ndarray
    pbest_costs: np.ndarray
    current_costs: np.ndarray
    gbest_position: np.ndarray
    gbest: Evaluation
    iteration: int = 0
    pbest_evals: list[Evaluation] = field(default_factory=list)

    @property
    def gbest_cost(self) -> float:
        return self.gbest.cost.cost_total

    def particle(self, i: int) -> Particle:
        return Particle(
            self.positions[i].copy(),
            self.velocities[i].copy(),
            self.pbest_positions[i].copy(),
            self.pbest_evals[i].cost if self.pbest_evals else None,
        )


def velocity_step(v, x, pbest, gbest, omega, c1, c2, r1, r2, v_max):
    """Inertia + cognitive + social update, clamped to [-v_max, v_max]; broadcasts over arrays."""
    new_v = omega * v + c1 * r1 * (pbest - x) + c2 * r2 * (gbest - x)
    return np.clip(new_v, -v_max, v_max)


def position_step(x, v, bounds):
    return np.clip(x + v, bounds[0], bounds[1])


def _draw_r(rng: np.random.Generator, shape: tuple[int, ...], cfg: SwarmConfig) -> tuple[np.ndarray, np.ndarray]:
    if cfg.per_component_random:
        return rng.random(shape), rng.random(shape)
    scalar_shape = shape[:-1] + (1,)
    return rng.random(scalar_shape), rng.random(scalar_shape)


def update_velocity(p: Particle, gbest: np.ndarray, cfg: SwarmConfig, rng: np.random.Generator) -> np.ndarray:
    r1, r2 = _draw_r(rng, p.velocity.shape, cfg)
    return velocity_step(p.velocity, p.position, p.pbest_position, gbest, cfg.omega, cfg.c1, cfg.c2, r1, r2, cfg.v_max)


def update_position(p: Particle, cfg: SwarmConfig) -> np.ndarray:
    return position_step(p.position, p.velocity, cfg.position_bounds)


class _TableEvaluator:
    """Evaluates padded decode tables, keyed on raw row bytes to skip tuple building."""

    def __init__(self, evaluate: RouteEvaluator) -> None:
        self.evaluate = evaluate
        self.cache: dict[bytes, Evaluation] = {}

    def __call__(self, table: np.ndarray) -> list[Evaluation]:
        out = []
        for row in table:
            key = row.tobytes()
            ev = self.cache.get(key)
            if ev is None:
                ev = self.evaluate(tuple(int(v) for v in row[row > 0]))
                self.cache[key] = ev
            out.append(ev)
        return out


def _mean_unpenalized(costs: np.ndarray, penalty: float) -> float:
    ok = costs[costs < penalty]
    return float(ok.mean()) if ok.size else float("nan")


def run_pso(
    g: MissionGraph,
    cfg: SwarmConfig,
    p: CostParams,
    observer: Callable[[SwarmState], None] | None = None,
) -> SolveResult:
    """Optimise priority vectors with PSO and return the route decoded from gbest.

    pbest and gbest only move on strict improvement, so a penalised state is
    kept only until some feasible one turns up.
    """
    rng = np.random.default_rng(cfg.seed)
    evaluate = RouteEvaluator(g, p)
    table_eval = _TableEvaluator(evaluate)
    n, s = g.n_nodes, cfg.swarm_size
    lo, hi = cfg.position_bounds

    x = np.clip(np.stack([random_priority_vector(n, rng) for _ in range(s)]), lo, hi)
    v = np.clip(rng.uniform(-cfg.init_velocity, cfg.init_velocity, (s, n)), -cfg.v_max, cfg.v_max)
    evals = table_eval(decode_table(x, g))
    costs = np.array([e.cost.cost_total for e in evals])

    pbest_x = x.copy()
    pbest_costs = costs.copy()
    pbest_evals = list(evals)
    gi = int(np.argmin(pbest_costs))
    state = SwarmState(x, v, pbest_x, pbest_costs, costs, pbest_x[gi].copy(), pbest_evals[gi], 0, pbest_evals)
    history = [HistoryRecord(0, state.gbest_cost, _mean_unpenalized(costs, p.penalty))]
    if observer:
        observer(state)

    for it in range(1, cfg.max_iterations + 1):
        r1, r2 = _draw_r(rng, (s, n), cfg)
        v = velocity_step(v, x, pbest_x, state.gbest_position, cfg.omega, cfg.c1, cfg.c2, r1, r2, cfg.v_max)
        x = position_step(x, v, cfg.position_bounds)
        evals = table_eval(decode_table(x, g))
        costs = np.array([e.cost.cost_total for e in evals])

        improved = costs < pbest_costs
        pbest_x[improved] = x[improved]
        pbest_costs[improved] = costs[improved]
        for i in np.flatnonzero(improved):
            pbest_evals[i] = evals[i]
        gi = int(np.argmin(pbest_costs))
        if pbest_costs[gi] < state.gbest_cost:
            state.gbest_position = pbest_x[gi].copy()
            state.gbest = pbest_evals[gi]

        state.positions, state.velocities, state.current_costs, state.iteration = x, v, costs, it
        history.append(HistoryRecord(it, state.gbest_cost, _mean_unpenalized(costs, p.penalty)))
        if observer:
            observer(state)

    return SolveResult("PSO", state.gbest, history, evaluate.n_unique)
