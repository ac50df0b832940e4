import math
from fractions import Fraction

import pytest

from auvroute.cost_model import (
    PENALTY,
    CostParams,
    cost_route,
    cost_task,
    cost_total,
    evaluate_route,
    violation,
)
from auvroute.route_codec import NONEXISTENT_EDGE, RouteMetrics, ValidationReport


def metrics(t_route=25200.0, sum_priority=40.0, sum_risk=20.0, n_tasks=4):
    return RouteMetrics(t_route, 0.0, 0.0, n_tasks, sum_priority, sum_risk)


def test_violation_values():
    assert violation(23166, 25200) == 0.0
    assert violation(25200, 25200) == 0.0
    expected = float(1 - Fraction(25200, 25232))
    assert violation(25232, 25200) == pytest.approx(expected, abs=1e-12)
    assert violation(25232, 25200) == pytest.approx(0.0012682, abs=1e-7)


@pytest.mark.parametrize("t", [(0, 1), (1, 0), (-1, 5)])
def test_violation_rejects(t):
    with pytest.raises(ValueError):
        violation(*t)


def test_cost_route_values():
    p = CostParams(t_available=25200)
    assert cost_route(metrics(25200), p) == 0.0
    assert cost_route(metrics(23166), CostParams(gamma=7, t_available=25200)) == pytest.approx(2034 / 25200)
    viol = 1 - 25200 / 25232
    assert cost_route(metrics(25232), CostParams(gamma=100, t_available=25200)) == pytest.approx(
        32 / 25200 * (1 + 100 * viol)
    )
    assert cost_route(metrics(25232), CostParams(gamma=100, t_available=25200)) == pytest.approx(0.001431, abs=5e-7)


def test_cost_route_signed_variant():
    p = CostParams(t_available=25200, signed_gap=True)
    assert cost_route(metrics(23166), p) == pytest.approx(-2034 / 25200)


def test_cost_task_values():
    p = CostParams()
    assert cost_task(metrics(sum_priority=40, sum_risk=20), p) == pytest.approx(0.5)
    assert cost_task(metrics(sum_priority=13, sum_risk=13), CostParams(eta=3, beta=3)) == pytest.approx(1.0)
    base = cost_task(metrics(), p)
    assert cost_task(metrics(), CostParams(eta=2)) == pytest.approx(2 * base)
    assert cost_task(metrics(n_tasks=0, sum_priority=0, sum_risk=0), p) == PENALTY


def test_cost_total_combination():
    p = CostParams(phi1=0.5, phi2=0.5, t_available=25200)
    m = metrics(t_route=25200 - 0.08 * 25200, sum_priority=40, sum_risk=20)
    b = cost_total(m, ValidationReport(), p)
    assert b.cost_total == pytest.approx(0.5 * 0.5 + 0.5 * 0.08)
    assert b.cost_total == pytest.approx(0.29)
    assert b.viol == 0.0


def test_cost_total_projection():
    p = CostParams(phi1=1, phi2=0)
    m = metrics(t_route=20000)
    assert cost_total(m, ValidationReport(), p).cost_total == pytest.approx(cost_task(m, p))


def test_cost_total_penalties():
    p = CostParams()
    assert cost_total(None, ValidationReport((NONEXISTENT_EDGE,)), p).cost_total == PENALTY
    over = metrics(t_route=30000)
    assert cost_total(over, ValidationReport(("time-budget-exceeded",)), p).cost_total == PENALTY
    soft = CostParams(overtime_penalty=False)
    b = cost_total(over, ValidationReport(("time-budget-exceeded",)), soft)
    assert b.cost_total < PENALTY
    assert b.viol > 0


def test_cost_params_validation():
    with pytest.raises(ValueError):
        CostParams(phi1=0, phi2=0)
    with pytest.raises(ValueError):
        CostParams(v_auv=0)
    with pytest.raises(ValueError):
        CostParams(t_available=-1)


def test_evaluate_route_infeasible_structure(five):
    ev = evaluate_route((1, 4, 5), five, CostParams())
    assert ev.metrics is None
    assert ev.cost.cost_total == PENALTY
    assert math.isnan(ev.cost.viol)


def test_evaluate_route_feasible(five, five_params):
    ev = evaluate_route((1, 2, 4, 5), five, five_params)
    assert ev.feasible
    assert ev.cost.cost_total == pytest.approx(
        five_params.phi1 * ev.cost.cost_task + five_params.phi2 * ev.cost.cost_route
    )
