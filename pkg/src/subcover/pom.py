"""Pareto-archive baseline for minimum cost submodular cover.

Solutions are compared on the pair (benefit, cost): X weakly dominates Y
when f(Y) <= f(X) and c(X) <= c(Y), strictly when additionally one of the
inequalities is strict.  The archive keeps mutually non-dominated solutions
only.  Each iteration mutates a uniform random archive member (same per-bit
flip operator as the evolutionary solver), evaluates the child once with
benefit clamped at the run threshold, keeps it unless some incumbent
strictly dominates it, and on acceptance drops every incumbent the child
weakly dominates.

Because the benefit is clamped, every solution at or above the threshold
competes at the same benefit value, so the archive holds at most one such
solution: the cheapest seen.  The archive size otherwise equals the number
of distinct benefit values represented and can grow without bound.
"""

from __future__ import annotations

import enum
from bisect import bisect_left
from typing import Callable, List, Optional, Tuple

import numpy as np

from .core import MCSCInstance, Subset, cost
from .easc import TraceRow, mutate
from .errors import DomainError

__all__ = ["Domination", "dominates", "ParetoPopulation", "run_pom"]


class Domination(enum.Enum):
    NONE = "none"
    WEAK = "weak"
    STRICT = "strict"


def dominates(a: Tuple[float, float], b: Tuple[float, float]) -> Domination:
    """Domination of (f, c) pair ``a`` over ``b``.

    Weak iff f(b) <= f(a) and c(a) <= c(b); strict iff weak with at least
    one inequality strict.
    """
    fa, ca = a
    fb, cb = b
    if fb <= fa and ca <= cb:
        return Domination.STRICT if (fb < fa or ca < cb) else Domination.WEAK
    return Domination.NONE


class ParetoPopulation:
    """Canonical non-dominated front, sorted by benefit.

    On the front, benefit and cost are both strictly increasing, so a
    single bisection finds the cheapest potential dominator of a candidate
    and the weakly dominated incumbents form one contiguous run.
    ``max_size_seen`` tracks the archive's peak size across a run.
    """

    def __init__(self, tau_prime: float):
        self.tau_prime = tau_prime
        self._fs: List[float] = []
        self._cs: List[float] = []
        self._subsets: List[Subset] = []
        self.max_size_seen = 0

    def __len__(self) -> int:
        return len(self._fs)

    def entries(self) -> List[Tuple[Subset, float, float]]:
        return list(zip(self._subsets, self._fs, self._cs))

    def random_entry(self, rng: np.random.Generator) -> Tuple[Subset, float, float]:
        i = int(rng.integers(0, len(self._fs)))
        return self._subsets[i], self._fs[i], self._cs[i]

    def best_feasible(self) -> Tuple[Optional[float], Optional[float]]:
        """(cost, f) of the cheapest entry with f >= tau_prime, or (None, None)."""
        if self._fs and self._fs[-1] >= self.tau_prime:
            return self._cs[-1], self._fs[-1]
        return None, None

    def consider(self, subset: Subset, f_value: float, cost_value: float) -> bool:
        """Acceptance test and insertion for a candidate solution.

        Rejects iff an incumbent strictly dominates (f_value, cost_value);
        on acceptance removes every incumbent the candidate weakly
        dominates.  An incumbent with the identical (f, c) pair does not
        dominate strictly, so the candidate replaces it.
        """
        fs, cs = self._fs, self._cs
        i = bisect_left(fs, f_value)
        if i < len(fs) and cs[i] <= cost_value:
            # Entry i is the cheapest incumbent with f >= f_value; any other
            # incumbent with f >= f_value costs more and cannot dominate if
            # this one does not.
            if fs[i] > f_value or cs[i] < cost_value:
                return False
        hi = i + 1 if i < len(fs) and fs[i] == f_value else i
        lo = bisect_left(cs, cost_value, 0, hi)
        del fs[lo:hi], cs[lo:hi], self._subsets[lo:hi]
        fs.insert(lo, f_value)
        cs.insert(lo, cost_value)
        self._subsets.insert(lo, subset)
        if len(fs) > self.max_size_seen:
            self.max_size_seen = len(fs)
        return True


def run_pom(
    instance: MCSCInstance,
    tau_prime: float,
    iterations: int,
    rng_seed: int,
    trace_stride: int = 100,
    *,
    on_row: Optional[Callable[[TraceRow], None]] = None,
    on_accept: Optional[Callable[[int, "ParetoPopulation"], None]] = None,
) -> Tuple[ParetoPopulation, List[TraceRow]]:
    """Run the Pareto baseline with benefit clamped at ``tau_prime``.

    For comparison against the bicriteria solvers the threshold is usually
    (1 - epsilon) * tau.  One benefit and one cost evaluation per
    iteration; trace rows follow the same schedule and schema as the
    evolutionary solver, with feasibility meaning f >= tau_prime.
    """
    if tau_prime > instance.tau:
        raise DomainError(
            f"tau_prime {tau_prime} exceeds the instance threshold {instance.tau}"
        )
    if tau_prime < 0.0:
        raise DomainError(f"tau_prime must be >= 0, got {tau_prime}")
    if iterations < 0:
        raise DomainError("iterations must be >= 0")
    if trace_stride < 1:
        raise DomainError("trace_stride must be >= 1")
    rng = np.random.default_rng(rng_seed)
    n = instance.n
    oracle = instance.oracle
    evaluations_before = oracle.evaluation_count

    empty = Subset(n)
    f_empty = min(oracle.evaluate(empty), tau_prime)
    c_empty = cost(instance, empty)
    population = ParetoPopulation(tau_prime)
    population.consider(empty, f_empty, c_empty)

    trace: List[TraceRow] = []

    def emit(iteration: int) -> None:
        best_cost, best_f = population.best_feasible()
        row = TraceRow(
            iteration=iteration,
            evaluations=oracle.evaluation_count - evaluations_before,
            best_feasible_cost=best_cost,
            best_feasible_f=best_f,
            population_size=len(population),
        )
        trace.append(row)
        if on_row is not None:
            on_row(row)

    emit(0)
    for t in range(1, iterations + 1):
        parent_subset, _, _ = population.random_entry(rng)
        child = mutate(parent_subset, n, rng)
        f_child = min(oracle.evaluate(child), tau_prime)
        c_child = cost(instance, child)
        if population.consider(child, f_child, c_child) and on_accept is not None:
            on_accept(t, population)
        if t % trace_stride == 0 or t == iterations:
            emit(t)
    return population, trace
