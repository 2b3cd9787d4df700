"""Bicriteria greedy for minimum cost submodular cover.

Repeatedly adds the element with the best marginal-gain-to-cost ratio until
the clamped benefit reaches (1 - epsilon) * tau.  On success the returned
set A satisfies f(A) >= (1 - epsilon) * tau and
c(A) <= (ln(1/epsilon) + 1) * c(A*).  Run with epsilon = 0 this is the
classic greedy; its cost doubles as the upper bound B used to pick the
evolutionary solver's delta.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional

from .core import MCSCInstance, Subset, _best_ratio_scan, cost, f_tau
from .errors import DomainError, StepLimitExceeded

__all__ = ["GreedyResult", "run_greedy"]


@dataclass(frozen=True)
class GreedyResult:
    """Outcome of a greedy run.

    ``order`` lists the chosen elements in pick order and ``f_values`` the
    clamped benefit after each pick (recorded from the selection scan, no
    extra oracle calls).  ``f_value`` is the final clamped benefit; when the
    run stopped because no element had positive gain it sits below the
    (1 - epsilon) * tau target.
    """

    solution: Subset
    order: List[int]
    cost: float
    f_value: float
    evaluations: int
    f_values: List[float]


def run_greedy(
    instance: MCSCInstance, epsilon: float, max_steps: Optional[int] = None
) -> GreedyResult:
    """Greedy loop: while f(A) < (1 - epsilon) * tau, add the best-ratio element.

    ``max_steps`` defaults to n, which suffices for any valid instance; the
    guard exists because floating-point saturation of a sampled oracle could
    otherwise stall the loop.  If the best available ratio drops to 0 before
    the target is met (possible only with a misbehaving oracle), the run
    stops and reports the benefit it achieved instead of looping forever.

    Raises StepLimitExceeded when the step budget runs out with positive
    gains still available.
    """
    if not 0.0 <= epsilon < 1.0:
        raise DomainError(f"epsilon must be in [0, 1), got {epsilon}")
    n = instance.n
    if max_steps is None:
        max_steps = n
    target = (1.0 - epsilon) * instance.tau
    before = instance.oracle.evaluation_count
    solution = Subset(n)
    order: List[int] = []
    f_values: List[float] = []
    current = f_tau(instance, solution)
    while current < target:
        if len(order) >= max_steps:
            raise StepLimitExceeded(
                f"greedy did not reach {target} within {max_steps} steps "
                f"(achieved f = {current})",
                achieved_f=current,
            )
        x, ratio, new_f = _best_ratio_scan(instance, solution, current)
        if ratio <= 0.0:
            break
        solution = solution.with_added(x)
        order.append(x)
        f_values.append(new_f)
        current = new_f
    return GreedyResult(
        solution=solution,
        order=order,
        cost=cost(instance, solution),
        f_value=current,
        evaluations=instance.oracle.evaluation_count - before,
        f_values=f_values,
    )
