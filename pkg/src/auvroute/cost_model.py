"""Hybrid route cost: weighted task term plus normalised, violation-scaled time gap."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Sequence

from .graph_model import MissionGraph
from .route_codec import (
    MetricsUndefined,
    Route,
    RouteMetrics,
    ValidationReport,
    route_metrics,
    validate,
)

PENALTY = 1e6


@dataclass
class CostParams:
    phi1: float = 0.5
    phi2: float = 0.5
    gamma: float = 100.0
    eta: float = 1.0
    beta: float = 1.0
    v_auv: float = 3.0
    t_available: float = 25_200.0
    penalty: float = PENALTY
    # Literal signed gap (T_route - T_available) instead of the absolute gap.
    signed_gap: bool = False
    # Over-budget routes get the penalty outright rather than only the gamma*viol scaling.
    overtime_penalty: bool = True

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.phi1 < 0 or self.phi2 < 0 or self.phi1 + self.phi2 <= 0:
            raise ValueError("phi1, phi2 must be >= 0 with a positive sum")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")
        if not (self.eta > 0 and self.beta > 0):
            raise ValueError("eta and beta must be positive")
        if not self.v_auv > 0:
            raise ValueError("v_auv must be positive")
        if not self.t_available > 0:
            raise ValueError("t_available must be positive")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CostBreakdown:
    cost_task: float
    cost_route: float
    viol: float
    cost_total: float
    t_travel: float

    @property
    def penalized(self) -> bool:
        return self.cost_total >= PENALTY


def violation(t_travel: float, t_available: float) -> float:
    """Relative overshoot of the time budget, zero when within it."""
    if not (t_travel > 0 and t_available > 0):
        raise ValueError(f"times must be positive, got t_travel={t_travel}, t_available={t_available}")
    return max(1.0 - t_available / t_travel, 0.0)


def cost_route(m: RouteMetrics, p: CostParams) -> float:
    gap = m.t_route - p.t_available
    if not p.signed_gap:
        gap = abs(gap)
    viol = violation(m.t_route, p.t_available) if m.t_route > 0 else 0.0
    return gap / p.t_available * (1.0 + p.gamma * viol)


def cost_task(m: RouteMetrics, p: CostParams) -> float:
    if m.n_tasks == 0 or m.sum_priority <= 0:
        return p.penalty
    return (p.eta * m.sum_risk) / (p.beta * m.sum_priority)


def cost_total(m: RouteMetrics | None, report: ValidationReport, p: CostParams) -> CostBreakdown:
    """Combine both sub-costs; lower is better.

    Structurally invalid routes cost ``p.penalty``; so do over-budget routes
    when ``p.overtime_penalty`` is set. Sub-cost fields are still filled in
    whenever metrics exist.
    """
    if m is None:
        nan = math.nan
        return CostBreakdown(nan, nan, nan, p.penalty, nan)
    viol = violation(m.t_route, p.t_available) if m.t_route > 0 else 0.0
    ct = cost_task(m, p)
    cr = cost_route(m, p)
    total = p.phi1 * ct + p.phi2 * cr
    if report.structural or (p.overtime_penalty and viol > 0):
        total = p.penalty
    return CostBreakdown(ct, cr, viol, total, m.t_route)


@dataclass(frozen=True)
class Evaluation:
    route: Route
    metrics: RouteMetrics | None
    report: ValidationReport
    cost: CostBreakdown

    @property
    def feasible(self) -> bool:
        return self.report.feasible


def evaluate_route(route: Sequence[int], g: MissionGraph, p: CostParams) -> Evaluation:
    route = tuple(int(v) for v in route)
    try:
        metrics = route_metrics(route, g, p.v_auv)
    except MetricsUndefined:
        metrics = None
    report = validate(route, g, metrics, p.t_available)
    return Evaluation(route, metrics, report, cost_total(metrics, report, p))


class RouteEvaluator:
    """Memoised :func:`evaluate_route` for one (graph, params) pair."""

    def __init__(self, g: MissionGraph, p: CostParams) -> None:
        self.graph = g
        self.params = p
        self._cache: dict[Route, Evaluation] = {}

    def __call__(self, route: Sequence[int]) -> Evaluation:
        key = tuple(route)
        ev = self._cache.get(key)
        if ev is None:
            ev = evaluate_route(key, self.graph, self.params)
            self._cache[key] = ev
        return ev

    @property
    def n_unique(self) -> int:
        return len(self._cache)
