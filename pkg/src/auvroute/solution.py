"""Result container shared by the GA and PSO engines."""

from __future__ import annotations

from dataclasses import dataclass, field

from .cost_model import Evaluation


@dataclass(frozen=True)
class HistoryRecord:
    iteration: int
    best_cost: float
    mean_cost: float


@dataclass
class SolveResult:
    algorithm: str
    best: Evaluation
    history: list[HistoryRecord] = field(default_factory=list)
    n_evaluations: int = 0

    @property
    def route(self) -> tuple[int, ...]:
        return self.best.route

    @property
    def best_cost(self) -> float:
        return self.best.cost.cost_total
