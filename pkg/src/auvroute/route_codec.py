"""Priority-vector decoding, route repair, feasibility checks and route metrics.

A priority vector holds one real value per node. Decoding starts at the
start node and repeatedly moves to the unvisited neighbour with the highest
priority; visited nodes are masked with ``-inf`` on a working copy so the
genotype itself is never touched. Ties go to the lowest node id.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .graph_model import MissionGraph

PRIORITY_LOW = -100.0
PRIORITY_HIGH = 100.0

BAD_ENDPOINTS = "bad-endpoints"
NONEXISTENT_EDGE = "nonexistent-edge"
REPEATED_NODE = "repeated-node"
REPEATED_EDGE = "repeated-edge"
TIME_BUDGET_EXCEEDED = "time-budget-exceeded"

CRITERIA = (BAD_ENDPOINTS, NONEXISTENT_EDGE, REPEATED_NODE, REPEATED_EDGE, TIME_BUDGET_EXCEEDED)
STRUCTURAL = frozenset(CRITERIA[:4])

Route = tuple[int, ...]


class MetricsUndefined(ValueError):
    """Route metrics requested for a route that uses a missing edge."""


@dataclass(frozen=True)
class RouteMetrics:
    t_route: float
    total_weight: float
    total_distance: float
    n_tasks: int
    sum_priority: float
    sum_risk: float


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[str, ...] = ()

    @property
    def feasible(self) -> bool:
        return not self.violations

    @property
    def structural(self) -> bool:
        """True when any violation other than the time budget is present."""
        return any(v in STRUCTURAL for v in self.violations)


def random_priority_vector(n: int, rng: np.random.Generator) -> np.ndarray:
    """Pairwise distinct values drawn uniformly from [-100, 100]."""
    while True:
        u = rng.uniform(PRIORITY_LOW, PRIORITY_HIGH, n)
        if np.unique(u).size == n:
            return u


def _check_length(u: np.ndarray, g: MissionGraph) -> None:
    if u.shape[-1] != g.n_nodes:
        raise ValueError(f"priority vector length {u.shape[-1]} != node count {g.n_nodes}")


def decode_partial(u: Sequence[float], g: MissionGraph) -> Route:
    """Greedy walk without repair; stops at the destination or a dead end."""
    u = np.asarray(u, dtype=float)
    _check_length(u, g)
    work = np.empty(g.n_nodes + 1)
    work[0] = -np.inf
    work[1:] = u
    adj = g.adjacency
    n = g.n_nodes
    cur = g.start
    work[cur] = -np.inf
    route = [cur]
    while cur != g.destination and len(route) < n:
        masked = np.where(adj[cur], work, -np.inf)
        nxt = int(masked.argmax())
        if masked[nxt] == -np.inf:
            break
        route.append(nxt)
        work[nxt] = -np.inf
        cur = nxt
    return tuple(route)


def repair(partial: Sequence[int], g: MissionGraph) -> Route:
    """Force the route to terminate at the destination.

    A non-destination ending has its last node replaced by the destination;
    a bare start node gets the destination appended instead.
    """
    route = list(partial)
    if route[-1] == g.destination:
        return tuple(route)
    if len(route) == 1:
        route.append(g.destination)
    else:
        route[-1] = g.destination
    return tuple(route)


def decode(u: Sequence[float], g: MissionGraph) -> Route:
    return repair(decode_partial(u, g), g)


def decode_table(positions: np.ndarray, g: MissionGraph) -> np.ndarray:
    """Decode and repair every row of ``positions`` at once.

    Returns an int array of shape (rows, n) holding each route left-aligned
    and padded with -1.
    """
    positions = np.asarray(positions, dtype=float)
    _check_length(positions, g)
    k, n = positions.shape
    dest = g.destination
    work = np.full((k, n + 1), -np.inf)
    work[:, 1:] = positions
    work[:, g.start] = -np.inf
    table = np.full((k, n), -1, dtype=np.int64)
    table[:, 0] = g.start
    cur = np.full(k, g.start)
    length = np.ones(k, dtype=np.int64)
    active = np.ones(k, dtype=bool)
    mask = g.adjacency_mask
    for step in range(1, n):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        masked = work[idx] + mask[cur[idx]]
        nxt = masked.argmax(axis=1)
        ok = masked[np.arange(idx.size), nxt] > -np.inf
        moved, nodes = idx[ok], nxt[ok]
        table[moved, step] = nodes
        work[moved, nodes] = -np.inf
        cur[moved] = nodes
        length[moved] += 1
        active[idx[~ok]] = False
        active[moved[nodes == dest]] = False

    rows = np.arange(k)
    unfinished = table[rows, length - 1] != dest
    bare = unfinished & (length == 1)
    table[bare, 1] = dest
    longer = unfinished & (length > 1)
    table[rows[longer], length[longer] - 1] = dest
    return table


def decode_batch(positions: np.ndarray, g: MissionGraph) -> list[Route]:
    """Decode every row of ``positions``; equivalent to ``[decode(p, g) for p in positions]``."""
    return [tuple(int(v) for v in row[row > 0]) for row in decode_table(positions, g)]


def route_metrics(route: Sequence[int], g: MissionGraph, v_auv: float) -> RouteMetrics:
    if not v_auv > 0:
        raise ValueError(f"v_auv must be positive, got {v_auv}")
    a = np.asarray(route[:-1], dtype=int)
    b = np.asarray(route[1:], dtype=int)
    if a.size and not g.adjacency[a, b].all():
        bad = next((int(x), int(y)) for x, y in zip(a, b) if not g.adjacency[x, y])
        raise MetricsUndefined(f"route uses missing edge {bad}")
    prio, risk, ttime = g.task_matrices
    dist = g.distance_matrix[a, b]
    total_distance = float(dist.sum())
    p = prio[a, b]
    r = risk[a, b]
    return RouteMetrics(
        t_route=float((dist / v_auv + ttime[a, b]).sum()),
        total_weight=float((p / r).sum()),
        total_distance=total_distance,
        n_tasks=int(a.size),
        sum_priority=float(p.sum()),
        sum_risk=float(r.sum()),
    )


def validate(
    route: Sequence[int],
    g: MissionGraph,
    metrics: RouteMetrics | None,
    t_available: float,
    v_auv: float | None = None,
) -> ValidationReport:
    """Check the five route feasibility criteria.

    The time budget is only checked when the route is built from real edges;
    ``metrics`` may be omitted if ``v_auv`` is given.
    """
    violations = []
    if len(route) < 2 or route[0] != g.start or route[-1] != g.destination:
        violations.append(BAD_ENDPOINTS)
    hops = list(zip(route, route[1:]))
    n = g.n_nodes
    if any(not (1 <= a <= n and 1 <= b <= n) or not g.adjacency[a, b] for a, b in hops):
        violations.append(NONEXISTENT_EDGE)
    if len(set(route)) != len(route):
        violations.append(REPEATED_NODE)
    keys = [(min(a, b), max(a, b)) for a, b in hops]
    if len(set(keys)) != len(keys):
        violations.append(REPEATED_EDGE)
    if NONEXISTENT_EDGE not in violations:
        if metrics is None and v_auv is not None:
            metrics = route_metrics(route, g, v_auv)
        if metrics is not None and metrics.t_route > t_available:
            violations.append(TIME_BUDGET_EXCEEDED)
    return ValidationReport(tuple(violations))
