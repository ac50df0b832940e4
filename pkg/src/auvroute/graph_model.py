"""Operating-area graph: waypoints, task-labelled edges, adjacency and scenario generation."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

# Lower clamp on task risk so that priority/risk stays finite.
RISK_EPSILON = 0.1


class GraphError(ValueError):
    """Malformed or inconsistent graph data."""


class GenerationError(RuntimeError):
    """Scenario generation could not produce a connected graph."""


@dataclass(frozen=True)
class Waypoint:
    id: int
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise GraphError(f"waypoint {self.id}: non-finite coordinate")
        if self.z < 0:
            raise GraphError(f"waypoint {self.id}: negative depth {self.z}")


@dataclass(frozen=True)
class Task:
    priority: float
    risk_pct: float
    completion_time: float = 0.0

    def __post_init__(self) -> None:
        if not self.priority > 0:
            raise GraphError(f"task priority must be > 0, got {self.priority}")
        if not self.risk_pct > 0 or self.risk_pct > 100:
            raise GraphError(f"task risk_pct must be in (0, 100], got {self.risk_pct}")
        if not self.completion_time >= 0:
            raise GraphError(f"task completion_time must be >= 0, got {self.completion_time}")
        if self.risk_pct < RISK_EPSILON:
            object.__setattr__(self, "risk_pct", RISK_EPSILON)

    @property
    def weight(self) -> float:
        return self.priority / self.risk_pct


@dataclass(frozen=True)
class Edge:
    a: int
    b: int
    task: Task

    def __post_init__(self) -> None:
        if self.a == self.b:
            raise GraphError(f"self-loop on node {self.a}")

    @property
    def key(self) -> tuple[int, int]:
        return (self.a, self.b) if self.a < self.b else (self.b, self.a)


@dataclass(frozen=True, eq=False)
class MissionGraph:
    """Immutable undirected mission graph with 1-based node ids.

    Dense lookup matrices are built lazily and indexed directly by node id;
    row/column 0 is padding.
    """

    waypoints: tuple[Waypoint, ...]
    edges: tuple[Edge, ...]
    start: int
    destination: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "waypoints", tuple(self.waypoints))
        object.__setattr__(self, "edges", tuple(self.edges))
        ids = [w.id for w in self.waypoints]
        if ids != list(range(1, len(ids) + 1)):
            raise GraphError("waypoint ids must be contiguous 1..n in order")
        n = len(ids)
        for node in (self.start, self.destination):
            if not 1 <= node <= n:
                raise GraphError(f"start/destination {node} is not a waypoint id")
        if self.start == self.destination:
            raise GraphError("start and destination must differ")
        seen: set[tuple[int, int]] = set()
        for e in self.edges:
            for end in (e.a, e.b):
                if not 1 <= end <= n:
                    raise GraphError(f"edge ({e.a}, {e.b}) references unknown node {end}")
            if e.key in seen:
                raise GraphError(f"duplicate edge ({e.a}, {e.b})")
            seen.add(e.key)

    @property
    def n_nodes(self) -> int:
        return len(self.waypoints)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def _edge_index(self) -> dict[tuple[int, int], Edge]:
        return {e.key: e for e in self.edges}

    @cached_property
    def adjacency(self) -> np.ndarray:
        n = self.n_nodes
        adj = np.zeros((n + 1, n + 1), dtype=bool)
        for e in self.edges:
            adj[e.a, e.b] = adj[e.b, e.a] = True
        adj.flags.writeable = False
        return adj

    @cached_property
    def adjacency_mask(self) -> np.ndarray:
        """0.0 where an edge exists, -inf elsewhere; added to priorities to mask non-neighbours."""
        m = np.where(self.adjacency, 0.0, -np.inf)
        m.flags.writeable = False
        return m

    @cached_property
    def _neighbor_lists(self) -> tuple[tuple[int, ...], ...]:
        adj = self.adjacency
        return tuple(tuple(int(j) for j in np.flatnonzero(adj[i])) for i in range(self.n_nodes + 1))

    @cached_property
    def coords(self) -> np.ndarray:
        xyz = np.zeros((self.n_nodes + 1, 3))
        for w in self.waypoints:
            xyz[w.id] = (w.x, w.y, w.z)
        return xyz

    @cached_property
    def distance_matrix(self) -> np.ndarray:
        xyz = self.coords
        d = np.sqrt(((xyz[:, None, :] - xyz[None, :, :]) ** 2).sum(axis=-1))
        d.flags.writeable = False
        return d

    @cached_property
    def task_matrices(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(priority, risk_pct, completion_time) per node pair; NaN where no edge."""
        n = self.n_nodes + 1
        mats = [np.full((n, n), np.nan) for _ in range(3)]
        for e in self.edges:
            for m, v in zip(mats, (e.task.priority, e.task.risk_pct, e.task.completion_time)):
                m[e.a, e.b] = m[e.b, e.a] = v
        for m in mats:
            m.flags.writeable = False
        return mats[0], mats[1], mats[2]

    def has_edge(self, a: int, b: int) -> bool:
        return (min(a, b), max(a, b)) in self._edge_index

    def edge(self, a: int, b: int) -> Edge:
        try:
            return self._edge_index[(min(a, b), max(a, b))]
        except KeyError:
            raise KeyError(f"no edge between {a} and {b}") from None

    def waypoint(self, node: int) -> Waypoint:
        if not 1 <= node <= self.n_nodes:
            raise KeyError(f"unknown node {node}")
        return self.waypoints[node - 1]

    def structurally_equal(self, other: MissionGraph) -> bool:
        return (
            self.waypoints == other.waypoints
            and self.start == other.start
            and self.destination == other.destination
            and {e.key: e.task for e in self.edges} == {e.key: e.task for e in other.edges}
        )


def euclidean_distance(a: Waypoint, b: Waypoint) -> float:
    return math.sqrt((b.x - a.x) ** 2 + (b.y - a.y) ** 2 + (b.z - a.z) ** 2)


def traversal_time(d: float, v_auv: float, task: Task) -> float:
    """Seconds to cover ``d`` metres at ``v_auv`` plus the edge task's completion time."""
    if not v_auv > 0:
        raise ValueError(f"v_auv must be positive, got {v_auv}")
    return d / v_auv + task.completion_time


def neighbors(g: MissionGraph, node: int) -> tuple[int, ...]:
    """Adjacent node ids in ascending order."""
    if not 1 <= node <= g.n_nodes:
        raise KeyError(f"unknown node {node}")
    return g._neighbor_lists[node]


def reachable(g: MissionGraph, src: int, dst: int) -> bool:
    seen = {src}
    stack = [src]
    while stack:
        cur = stack.pop()
        if cur == dst:
            return True
        for nb in g._neighbor_lists[cur]:
            if nb not in seen:
                seen.add(nb)
                stack.append(nb)
    return False


# --------------------------------------------------------------------------
# Scenario generation
# --------------------------------------------------------------------------


@dataclass
class ScenarioConfig:
    n_nodes: int = 20
    area_x: float = 10_000.0
    area_y: float = 1_000.0
    depth: float = 100.0
    edge_density: float = 0.5
    priority_range: tuple[float, float] = (1.0, 10.0)
    risk_range: tuple[float, float] = (1.0, 10.0)
    task_time_range: tuple[float, float] = (60.0, 600.0)
    seed: int = 0
    spanning_path: bool = True
    max_retries: int = 50

    def __post_init__(self) -> None:
        self.priority_range = tuple(self.priority_range)
        self.risk_range = tuple(self.risk_range)
        self.task_time_range = tuple(self.task_time_range)
        self.validate()

    def validate(self) -> None:
        if self.n_nodes < 2:
            raise ValueError(f"n_nodes must be >= 2, got {self.n_nodes}")
        if min(self.area_x, self.area_y) <= 0 or self.depth < 0:
            raise ValueError("area extents must be positive and depth non-negative")
        if not 0 < self.edge_density <= 1:
            raise ValueError(f"edge_density must be in (0, 1], got {self.edge_density}")
        for name in ("priority_range", "risk_range", "task_time_range"):
            lo, hi = getattr(self, name)
            if not lo < hi:
                raise ValueError(f"{name} must satisfy min < max, got {(lo, hi)}")
        if self.priority_range[0] <= 0:
            raise ValueError("priority_range must be positive")
        if self.risk_range[0] < 0 or self.risk_range[1] > 100:
            raise ValueError("risk_range must lie within [0, 100]")
        if self.task_time_range[0] < 0:
            raise ValueError("task_time_range must be non-negative")
        if self.max_retries < 1:
            raise ValueError("max_retries must be >= 1")


def _lattice(n: int, ax: float, ay: float) -> tuple[np.ndarray, float, float]:
    nx = max(1, math.ceil(math.sqrt(n * ax / ay)))
    ny = max(1, math.ceil(n / nx))
    cx, cy = ax / nx, ay / ny
    gx, gy = np.meshgrid((np.arange(nx) + 0.5) * cx, (np.arange(ny) + 0.5) * cy, indexing="ij")
    return np.column_stack([gx.ravel(), gy.ravel()]), cx, cy


def generate_scenario(cfg: ScenarioConfig) -> MissionGraph:
    """Random mission graph reproducible from ``cfg.seed``.

    Waypoints are Gaussian perturbations of lattice cell centres spread over
    the operating volume (clipped back inside it). Each node pair gets an edge
    with probability ``edge_density``; a random spanning path from start to
    destination is added on top so the endpoints are always connected.
    Start is node 1, destination node ``n_nodes``.
    """
    cfg.validate()
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_nodes
    for _ in range(cfg.max_retries):
        cells, cx, cy = _lattice(n, cfg.area_x, cfg.area_y)
        chosen = cells[rng.permutation(len(cells))[:n]]
        x = np.clip(chosen[:, 0] + rng.normal(0.0, cx / 4, n), 0.0, cfg.area_x)
        y = np.clip(chosen[:, 1] + rng.normal(0.0, cy / 4, n), 0.0, cfg.area_y)
        z = np.clip(rng.normal(cfg.depth / 2, cfg.depth / 4, n), 0.0, cfg.depth)
        waypoints = [Waypoint(i + 1, float(x[i]), float(y[i]), float(z[i])) for i in range(n)]

        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < cfg.edge_density
        pairs = {(int(a) + 1, int(b) + 1) for a, b in zip(iu[keep], ju[keep])}
        if cfg.spanning_path:
            order = [1, *(int(k) + 2 for k in rng.permutation(n - 2)), n]
            pairs.update((min(a, b), max(a, b)) for a, b in zip(order, order[1:]))
        pairs_sorted = sorted(pairs)

        m = len(pairs_sorted)
        prio = rng.uniform(*cfg.priority_range, m)
        # uniform on (lo, hi]: 1 - U[0,1) lies in (0, 1]
        risk = cfg.risk_range[0] + (1.0 - rng.random(m)) * (cfg.risk_range[1] - cfg.risk_range[0])
        ttime = rng.uniform(*cfg.task_time_range, m)
        edges = [
            Edge(a, b, Task(float(prio[k]), max(float(risk[k]), RISK_EPSILON), float(ttime[k])))
            for k, (a, b) in enumerate(pairs_sorted)
        ]
        g = MissionGraph(tuple(waypoints), tuple(edges), start=1, destination=n)
        if reachable(g, g.start, g.destination):
            return g
    raise GenerationError(
        f"no start-destination connectivity after {cfg.max_retries} attempts "
        f"(n_nodes={n}, edge_density={cfg.edge_density})"
    )


# --------------------------------------------------------------------------
# Graph file I/O
# --------------------------------------------------------------------------


def graph_to_dict(g: MissionGraph) -> dict:
    return {
        "nodes": [{"id": w.id, "x": w.x, "y": w.y, "z": w.z} for w in g.waypoints],
        "edges": [
            {
                "a": e.a,
                "b": e.b,
                "priority": e.task.priority,
                "risk_pct": e.task.risk_pct,
                "completion_time": e.task.completion_time,
            }
            for e in g.edges
        ],
        "start": g.start,
        "destination": g.destination,
    }


def save_graph(g: MissionGraph) -> bytes:
    return (json.dumps(graph_to_dict(g), indent=2) + "\n").encode("utf-8")


def _require(obj: dict, key: str, where: str):
    if key not in obj:
        raise GraphError(f"{where}: missing field '{key}'")
    return obj[key]


def graph_from_dict(doc: dict) -> MissionGraph:
    if not isinstance(doc, dict):
        raise GraphError("graph document must be an object")
    nodes = _require(doc, "nodes", "graph")
    raw_edges = _require(doc, "edges", "graph")
    try:
        waypoints = sorted(
            (
                Waypoint(
                    int(_require(nd, "id", f"node #{k}")),
                    float(_require(nd, "x", f"node #{k}")),
                    float(_require(nd, "y", f"node #{k}")),
                    float(_require(nd, "z", f"node #{k}")),
                )
                for k, nd in enumerate(nodes)
            ),
            key=lambda w: w.id,
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"bad node entry: {exc}") from exc
    ids = [w.id for w in waypoints]
    if len(set(ids)) != len(ids):
        raise GraphError("duplicate node id")
    if ids != list(range(1, len(ids) + 1)):
        raise GraphError(f"node ids must be contiguous 1..{len(ids)}")

    edges = []
    for k, ed in enumerate(raw_edges):
        where = f"edge #{k}"
        try:
            a = int(_require(ed, "a", where))
            b = int(_require(ed, "b", where))
            task = Task(
                float(_require(ed, "priority", where)),
                float(_require(ed, "risk_pct", where)),
                float(ed.get("completion_time", 0.0)),
            )
            edges.append(Edge(a, b, task))
        except GraphError as exc:
            raise GraphError(f"{where} ({ed.get('a')}-{ed.get('b')}): {exc}") from exc
        except (TypeError, ValueError) as exc:
            raise GraphError(f"{where}: {exc}") from exc
    return MissionGraph(
        tuple(waypoints),
        tuple(edges),
        start=int(_require(doc, "start", "graph")),
        destination=int(_require(doc, "destination", "graph")),
    )


def load_graph(data: bytes | str) -> MissionGraph:
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise GraphError(f"graph file is not valid JSON: {exc}") from exc
    return graph_from_dict(doc)


def build_graph(
    coords: Sequence[Sequence[float]],
    edges: Iterable[tuple],
    start: int = 1,
    destination: int | None = None,
) -> MissionGraph:
    """Convenience constructor: ``coords[i]`` is node ``i+1``; edges are
    ``(a, b, priority, risk_pct, completion_time)`` tuples (task fields optional)."""
    waypoints = tuple(
        Waypoint(i + 1, float(c[0]), float(c[1]), float(c[2]) if len(c) > 2 else 0.0)
        for i, c in enumerate(coords)
    )
    built = []
    for e in edges:
        a, b, *rest = e
        task = Task(*rest) if rest else Task(1.0, 1.0, 0.0)
        built.append(Edge(int(a), int(b), task))
    return MissionGraph(waypoints, tuple(built), start, destination or len(waypoints))
