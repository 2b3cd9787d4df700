"""Desk-scale certificates for the solver guarantees.

Every check here compares solver behavior against quantities certified by
full enumeration (an optimal solution and exhaustive subset scans), so the
approximation guarantees become executable assertions on small instances.
Inequalities are tested with a small absolute slack because the analysis
assumes exact reals while we compute in doubles.
"""

from __future__ import annotations

import math
from typing import List, Tuple

from .core import MCSCInstance, Subset, _best_ratio_scan, f_tau
from .coverage import OptimalSolution
from .easc import PopulationEntry
from .greedy import GreedyResult

__all__ = [
    "DEFAULT_SLACK",
    "gain_contraction_violations",
    "best_element_cost_violations",
    "greedy_prefix_violations",
    "greedy_step_gain_violations",
    "bicriteria_cost_bound",
    "is_cost_effective",
    "level_climb_iteration_bound",
    "worst_case_iteration_bound",
]

DEFAULT_SLACK = 1e-9


def _all_subsets(n: int):
    for mask in range(1 << n):
        yield Subset(n, mask)


def gain_contraction_violations(
    instance: MCSCInstance, optimum: OptimalSolution, slack: float = DEFAULT_SLACK
) -> List[Tuple[int, float, float]]:
    """Exhaustively check the best-ratio gain contraction over every X.

    For every X and x* = argmax Delta f_tau(X, x)/c(x):

        tau - f_tau(X + x*) <= (1 - c(x*)/c(A*)) * (tau - f_tau(X))

    Returns (subset mask, lhs, rhs) triples that exceed rhs by more than
    ``slack``; an empty list certifies the property at this size.
    """
    tau = instance.tau
    c_star = optimum.cost
    violations = []
    for x_set in _all_subsets(instance.n):
        base = f_tau(instance, x_set)
        x, _, new_f = _best_ratio_scan(instance, x_set, base)
        lhs = tau - new_f
        rhs = (1.0 - instance.costs[x] / c_star) * (tau - base)
        if lhs > rhs + slack:
            violations.append((x_set.mask, lhs, rhs))
    return violations


def best_element_cost_violations(
    instance: MCSCInstance, optimum: OptimalSolution, slack: float = DEFAULT_SLACK
) -> List[Tuple[int, int, float]]:
    """Exhaustively check c(x*) <= c(A*) for every X with f(X) < tau.

    Returns (subset mask, element, cost) triples violating the bound.
    """
    tau = instance.tau
    c_star = optimum.cost
    violations = []
    for x_set in _all_subsets(instance.n):
        base = f_tau(instance, x_set)
        if base >= tau:
            continue
        x, _, _ = _best_ratio_scan(instance, x_set, base)
        if instance.costs[x] > c_star + slack:
            violations.append((x_set.mask, x, float(instance.costs[x])))
    return violations


def greedy_prefix_violations(
    instance: MCSCInstance,
    optimum: OptimalSolution,
    result: GreedyResult,
    slack: float = DEFAULT_SLACK,
) -> List[Tuple[int, float]]:
    """Check cost-effectiveness of every proper greedy prefix.

    For each prefix A_i with 1 <= i < k:

        c(A_i) / ln(tau / (tau - f(A_i))) <= c(A*)

    Proper prefixes sit strictly below the stopping threshold, so the
    logarithm is positive.  Returns (i, lhs) for violations.
    """
    tau = instance.tau
    c_star = optimum.cost
    violations = []
    prefix_cost = 0.0
    for i in range(1, len(result.order)):
        prefix_cost += float(instance.costs[result.order[i - 1]])
        f_i = result.f_values[i - 1]
        lhs = prefix_cost / math.log(tau / (tau - f_i))
        if lhs > c_star + slack:
            violations.append((i, lhs))
    return violations


def greedy_step_gain_violations(
    instance: MCSCInstance,
    optimum: OptimalSolution,
    result: GreedyResult,
    slack: float = DEFAULT_SLACK,
) -> List[Tuple[int, float, float]]:
    """Check the per-step gain lower bound along the greedy sequence.

    For each step, with a the element added to A_i:

        f(A_{i+1}) - f(A_i) >= (c(a)/c(A*)) * (tau - f(A_i))

    using the cost of the newly added element, the reading consistent with
    the gain contraction above.  Benefit values are tau-clamped.  Returns
    (step, gain, required) for violations.
    """
    tau = instance.tau
    c_star = optimum.cost
    violations = []
    previous = f_tau(instance, Subset(instance.n))
    for i, element in enumerate(result.order):
        gain = result.f_values[i] - previous
        required = (float(instance.costs[element]) / c_star) * (tau - previous)
        if gain < required - slack:
            violations.append((i, gain, required))
        previous = result.f_values[i]
    return violations


def bicriteria_cost_bound(epsilon: float, optimum_cost: float) -> float:
    """(ln(1/epsilon) + 1) * c(A*), the bicriteria cost guarantee."""
    return (math.log(1.0 / epsilon) + 1.0) * optimum_cost


def is_cost_effective(
    entry: PopulationEntry,
    r: int,
    optimum_cost: float,
    epsilon: float,
    slack: float = DEFAULT_SLACK,
) -> bool:
    """Whether a population entry is cost-effective relative to c(A*).

    Interior and zero bins require phi(X) <= c(A*); the final bin requires
    c(X) <= (ln(1/epsilon) + 1) * c(A*).  This is the quantity the
    population's replacement rule preserves.
    """
    if entry.bin_idx == r:
        return entry.cost <= bicriteria_cost_bound(epsilon, optimum_cost) + slack
    return entry.phi <= optimum_cost + slack


def level_climb_iteration_bound(n: int, r: int) -> float:
    """e * n * r * (r + 1): expected iterations for the cost-effective
    frontier to climb from bin 0 to the final bin."""
    return math.e * n * r * (r + 1)


def worst_case_iteration_bound(
    n: int, c_max: float, c_min: float, epsilon: float
) -> float:
    """e * n * ((c_max/c_min) ln(1/epsilon) n + 1)^2, the parameter-only
    form of the expected-iteration guarantee."""
    q = (c_max / c_min) * math.log(1.0 / epsilon) * n
    return math.e * n * (q + 1.0) ** 2
