"""Exhaustive simple-path enumeration used as ground truth on small graphs."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

from .cost_model import CostBreakdown, CostParams, Evaluation, evaluate_route
from .graph_model import MissionGraph, neighbors
from .route_codec import Route

DEFAULT_MAX_NODES = 12


class GraphTooLarge(ValueError):
    pass


@dataclass(frozen=True)
class OracleResult:
    best: Evaluation | None
    n_paths_enumerated: int
    n_feasible: int

    @property
    def found(self) -> bool:
        return self.best is not None

    @property
    def best_route(self) -> Route | None:
        return self.best.route if self.best else None

    @property
    def best_cost(self) -> CostBreakdown | None:
        return self.best.cost if self.best else None


def enumerate_simple_paths(
    g: MissionGraph, max_nodes: int | None = None, time_limit: float | None = None, v_auv: float = 1.0
) -> Iterator[Route]:
    """Yield every simple start-to-destination path, depth first, ascending neighbours.

    Paths are produced in lexicographic order. With ``time_limit`` set, partial
    paths whose accumulated edge time already exceeds it are cut.
    """
    max_nodes = g.n_nodes if max_nodes is None else max_nodes
    if max_nodes > g.n_nodes:
        raise ValueError(f"max_nodes {max_nodes} exceeds node count {g.n_nodes}")
    dest = g.destination
    if time_limit is not None:
        dist = g.distance_matrix
        ttime = g.task_matrices[2]
    path = [g.start]
    on_path = {g.start}

    def dfs(cur: int, elapsed: float) -> Iterator[Route]:
        for nb in neighbors(g, cur):
            if nb in on_path:
                continue
            t = elapsed
            if time_limit is not None:
                t += dist[cur, nb] / v_auv + ttime[cur, nb]
                if t > time_limit:
                    continue
            if nb == dest:
                yield (*path, nb)
                continue
            if len(path) + 1 >= max_nodes:
                continue
            path.append(nb)
            on_path.add(nb)
            yield from dfs(nb, t)
            path.pop()
            on_path.discard(nb)

    if max_nodes >= 2:
        yield from dfs(g.start, 0.0)


def optimal_route_bruteforce(
    g: MissionGraph, p: CostParams, max_graph_nodes: int = DEFAULT_MAX_NODES
) -> OracleResult:
    """Minimum-cost feasible route over all simple paths; ties go to the lexicographically smallest."""
    if g.n_nodes > max_graph_nodes:
        raise GraphTooLarge(
            f"graph has {g.n_nodes} nodes; exhaustive search is limited to {max_graph_nodes}"
        )
    best: Evaluation | None = None
    count = feasible = 0
    for route in enumerate_simple_paths(g, time_limit=p.t_available, v_auv=p.v_auv):
        count += 1
        ev = evaluate_route(route, g, p)
        if not ev.feasible:
            continue
        feasible += 1
        if best is None or ev.cost.cost_total < best.cost.cost_total:
            best = ev
    return OracleResult(best, count, feasible)
