"""Genetic algorithm over node-sequence chromosomes.

Chromosomes are routes whose first and last genes are the start and
destination. Initial and refill individuals come from decoding random
priority vectors, so every one of them starts life as a greedy walk through
the graph. Offspring that fail the feasibility check are dropped; mutants
that fail it fall back to their parent. Children duplicating a route already
in the next generation are dropped too, and every dropped slot is refilled
with a fresh random decode.
"""

from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass
from typing import Callable, Sequence

import numpy as np

from .cost_model import CostParams, Evaluation, RouteEvaluator
from .graph_model import MissionGraph
from .route_codec import decode, random_priority_vector
from .solution import HistoryRecord, SolveResult

log = logging.getLogger(__name__)

Chromosome = Evaluation

FITNESS_EPS = 1e-12
MUTATIONS = ("inversion", "insertion", "swap")


class InitializationError(RuntimeError):
    pass


@dataclass
class GAConfig:
    population_size: int = 100
    max_generations: int = 250
    stall_generations: int = 50
    crossover_fraction: float = 0.8
    mutation_fraction: float = 0.3
    mix_probability: float = 0.5
    elite_count: int = 2
    seed: int = 0
    init_retries: int = 20

    def __post_init__(self) -> None:
        self.validate()

    def validate(self) -> None:
        if self.population_size < 2:
            raise ValueError("population_size must be >= 2")
        if self.max_generations < 0 or self.stall_generations < 1:
            raise ValueError("max_generations must be >= 0 and stall_generations >= 1")
        for name in ("crossover_fraction", "mutation_fraction", "mix_probability"):
            if not 0.0 <= getattr(self, name) <= 1.0:
                raise ValueError(f"{name} must be in [0, 1]")
        if not 0 <= self.elite_count < self.population_size:
            raise ValueError("elite_count must be in [0, population_size)")
        if self.init_retries < 0:
            raise ValueError("init_retries must be >= 0")

    def to_dict(self) -> dict:
        return asdict(self)


def _random_chromosome(g: MissionGraph, rng: np.random.Generator, evaluate: RouteEvaluator) -> Chromosome:
    return evaluate(decode(random_priority_vector(g.n_nodes, rng), g))


def init_population(
    g: MissionGraph,
    cfg: GAConfig,
    p: CostParams,
    rng: np.random.Generator | None = None,
    evaluate: RouteEvaluator | None = None,
) -> list[Chromosome]:
    """Decode ``population_size`` random priority vectors.

    An infeasible decode is redrawn up to ``cfg.init_retries`` times and then
    admitted carrying its penalty cost.
    """
    rng = np.random.default_rng(cfg.seed) if rng is None else rng
    evaluate = RouteEvaluator(g, p) if evaluate is None else evaluate
    population = []
    for _ in range(cfg.population_size):
        c = _random_chromosome(g, rng, evaluate)
        for _ in range(cfg.init_retries):
            if c.feasible:
                break
            c = _random_chromosome(g, rng, evaluate)
        population.append(c)
    if not any(c.feasible for c in population):
        raise InitializationError(
            f"no feasible route among {cfg.population_size} chromosomes after "
            f"{cfg.init_retries} redraws each"
        )
    return population


def fitness(costs: Sequence[float]) -> np.ndarray:
    return 1.0 / (np.asarray(costs, dtype=float) + FITNESS_EPS)


def roulette_select(population: Sequence[Chromosome], k: int, rng: np.random.Generator) -> list[Chromosome]:
    """Sample ``k`` parents with replacement, probability proportional to 1/(cost+eps)."""
    idx = roulette_indices([c.cost.cost_total for c in population], k, rng)
    return [population[i] for i in idx]


def roulette_indices(costs: Sequence[float], k: int, rng: np.random.Generator) -> np.ndarray:
    wheel = np.cumsum(fitness(costs))
    picks = np.searchsorted(wheel, rng.random(k) * wheel[-1], side="right")
    return np.minimum(picks, len(wheel) - 1)


def crossover_routes(a: Sequence[int], b: Sequence[int], mask: Sequence[bool]) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Swap interior genes where ``mask`` is set; positions align from the left.

    ``mask[i]`` refers to gene ``i + 1``; its length is the shorter interior.
    """
    child_a, child_b = list(a), list(b)
    for i, flip in enumerate(mask):
        if flip:
            child_a[i + 1], child_b[i + 1] = child_b[i + 1], child_a[i + 1]
    return tuple(child_a), tuple(child_b)


def uniform_crossover(
    a: Chromosome,
    b: Chromosome,
    mix_probability: float,
    rng: np.random.Generator,
    evaluate: RouteEvaluator,
) -> list[Chromosome]:
    """Uniform crossover; returns only the offspring that pass validation."""
    span = min(len(a.route), len(b.route)) - 2
    mask = rng.random(max(span, 0)) < mix_probability
    offspring = (evaluate(r) for r in crossover_routes(a.route, b.route, mask))
    return [c for c in offspring if c.feasible]


def apply_mutation(route: Sequence[int], kind: str, i: int, j: int) -> tuple[int, ...]:
    """Apply one mutation operator to interior positions ``i`` and ``j`` (0-based within the interior)."""
    head, inner, tail = route[0], list(route[1:-1]), route[-1]
    if kind == "inversion":
        lo, hi = min(i, j), max(i, j)
        inner[lo : hi + 1] = inner[lo : hi + 1][::-1]
    elif kind == "insertion":
        gene = inner.pop(i)
        inner.insert(j, gene)
    elif kind == "swap":
        inner[i], inner[j] = inner[j], inner[i]
    else:
        raise ValueError(f"unknown mutation {kind!r}")
    return (head, *inner, tail)


def mutate(c: Chromosome, rng: np.random.Generator, evaluate: RouteEvaluator) -> Chromosome:
    """Random inversion, insertion or swap on interior genes; an invalid mutant keeps the parent."""
    kind = MUTATIONS[int(rng.integers(3))]
    n_inner = len(c.route) - 2
    if n_inner < 2:
        return c
    i, j = (int(v) for v in rng.choice(n_inner, size=2, replace=False))
    mutant = evaluate(apply_mutation(c.route, kind, i, j))
    return mutant if mutant.feasible else c


def _finite_mean(costs: Sequence[float], penalty: float) -> float:
    vals = [c for c in costs if c < penalty]
    return float(np.mean(vals)) if vals else math.nan


def evolve(
    g: MissionGraph,
    cfg: GAConfig,
    p: CostParams,
    observer: Callable[[int, list[Chromosome]], None] | None = None,
) -> SolveResult:
    """Run the generational GA and return the best chromosome and its history.

    History ``mean_cost`` averages the unpenalised members of each generation.
    """
    rng = np.random.default_rng(cfg.seed)
    evaluate = RouteEvaluator(g, p)
    population = init_population(g, cfg, p, rng, evaluate)
    population.sort(key=lambda c: c.cost.cost_total)
    best = population[0]
    history = [HistoryRecord(0, best.cost.cost_total, _finite_mean([c.cost.cost_total for c in population], p.penalty))]
    if observer:
        observer(0, population)

    n_free = cfg.population_size - cfg.elite_count
    n_cross = int(round(cfg.crossover_fraction * n_free))
    stall = 0
    for gen in range(1, cfg.max_generations + 1):
        costs = [c.cost.cost_total for c in population]
        n_pairs = math.ceil(n_cross / 2)
        picks = roulette_indices(costs, 2 * n_pairs + (n_free - n_cross), rng)

        children: list[Chromosome] = []
        for k in range(n_pairs):
            a, b = population[picks[2 * k]], population[picks[2 * k + 1]]
            children.extend(uniform_crossover(a, b, cfg.mix_probability, rng, evaluate))
        children = children[:n_cross]
        children.extend(population[i] for i in picks[2 * n_pairs :])
        children = [mutate(c, rng, evaluate) if rng.random() < cfg.mutation_fraction else c for c in children]

        nxt = population[: cfg.elite_count]
        seen = {c.route for c in nxt}
        for c in children:
            if c.route not in seen:
                seen.add(c.route)
                nxt.append(c)
        while len(nxt) < cfg.population_size:
            nxt.append(_random_chromosome(g, rng, evaluate))

        population = nxt
        population.sort(key=lambda c: c.cost.cost_total)
        if population[0].cost.cost_total < best.cost.cost_total:
            best = population[0]
            stall = 0
        else:
            stall += 1
        history.append(
            HistoryRecord(gen, best.cost.cost_total, _finite_mean([c.cost.cost_total for c in population], p.penalty))
        )
        if observer:
            observer(gen, population)
        if stall >= cfg.stall_generations:
            log.debug("GA stalled after %d generations", gen)
            break

    return SolveResult("GA", best, history, evaluate.n_unique)
