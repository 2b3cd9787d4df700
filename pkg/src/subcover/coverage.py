"""Weighted coverage benefit functions and the exhaustive verifier.

Weighted coverage is the workhorse exact oracle for desk-scale checks: it
is monotone and submodular by construction and cheap enough that every
subset of a small ground set can be evaluated.  ``brute_force_optimum``
certifies an optimal solution by full enumeration, which is what makes the
approximation guarantees of the solvers testable.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import MCSCInstance, Subset, SubmodularOracle
from .errors import BudgetExceededError, InfeasibleError, InstanceError

__all__ = [
    "CoverageFunction",
    "CoverageOracle",
    "coverage_eval",
    "OptimalSolution",
    "brute_force_optimum",
    "random_instance",
]

# Above this universe size the 2^m weight-sum lookup table is skipped.
_TABLE_LIMIT = 16

# Full enumeration guard: 2^24 evaluations is seconds at desk scale.
_ENUMERATION_LIMIT = 24


class CoverageFunction:
    """f(X) = total weight of the universe items covered by the members of X.

    ``covers[i]`` lists the universe items element i covers.  For universes
    of at most 2^16 items a weight-sum table over item masks makes single
    evaluations O(|X|).
    """

    def __init__(self, universe_weights, covers: Sequence[Iterable[int]]):
        weights = np.asarray(universe_weights, dtype=np.float64)
        if weights.ndim != 1:
            raise InstanceError("universe_weights must be a 1-d vector")
        if weights.size and not np.all(weights > 0.0):
            raise InstanceError("universe weights must be strictly positive")
        m = weights.size
        masks = []
        cover_lists = []
        for i, items in enumerate(covers):
            mask = 0
            item_list = sorted(set(int(j) for j in items))
            for j in item_list:
                if not 0 <= j < m:
                    raise InstanceError(
                        f"covers[{i}] references item {j} outside 0..{m - 1}"
                    )
                mask |= 1 << j
            masks.append(mask)
            cover_lists.append(item_list)
        self.universe_weights = weights
        self.universe_weights.setflags(write=False)
        self.covers = tuple(cover_lists)
        self.cover_masks = tuple(masks)
        self._table = self._build_table() if m <= _TABLE_LIMIT else None

    @property
    def universe_size(self) -> int:
        return self.universe_weights.size

    @property
    def ground_size(self) -> int:
        return len(self.cover_masks)

    def _build_table(self) -> np.ndarray:
        # table[mask] = sum of weights of the items in mask, accumulated in
        # ascending item order so supersets never sum below subsets.
        m = self.universe_size
        table = np.zeros(1 << m, dtype=np.float64)
        for bit in range(m):
            lo = 1 << bit
            table[lo : 2 * lo] = table[:lo] + self.universe_weights[bit]
        return table

    def weight_of_items(self, item_mask: int) -> float:
        if self._table is not None:
            return float(self._table[item_mask])
        total = 0.0
        while item_mask:
            lsb = item_mask & -item_mask
            total += self.universe_weights[lsb.bit_length() - 1]
            item_mask ^= lsb
        return total

    def covered_items(self, subset_mask: int) -> int:
        union = 0
        while subset_mask:
            lsb = subset_mask & -subset_mask
            union |= self.cover_masks[lsb.bit_length() - 1]
            subset_mask ^= lsb
        return union

    def value_of_mask(self, subset_mask: int) -> float:
        return self.weight_of_items(self.covered_items(subset_mask))


class CoverageOracle(SubmodularOracle):
    """Oracle adapter over a :class:`CoverageFunction`."""

    def __init__(self, function: CoverageFunction):
        super().__init__()
        self.function = function

    def _value(self, subset: Subset) -> float:
        return self.function.value_of_mask(subset.mask)


def coverage_eval(fn: CoverageFunction, x_set: Subset) -> float:
    """Weight of the union of the members' covered items; empty set gives 0."""
    return fn.value_of_mask(x_set.mask)


@dataclass(frozen=True)
class OptimalSolution:
    """A certified optimum: no cheaper feasible subset exists among all 2^n."""

    subset: Subset
    cost: float
    certified: bool


def brute_force_optimum(instance: MCSCInstance) -> OptimalSolution:
    """Exhaustively scan all 2^n subsets for the cheapest one with f >= tau.

    Ties break to the lexicographically smallest bitset (smallest mask).
    Coverage oracles with a weight table enumerate via vectorized mask
    dynamic programming; any other oracle falls back to per-subset
    evaluation, which also counts against its evaluation counter.
    """
    n = instance.n
    if n > _ENUMERATION_LIMIT:
        raise BudgetExceededError(
            f"brute force capped at n <= {_ENUMERATION_LIMIT}, got {n}"
        )
    fn = _table_function(instance)
    if fn is not None:
        best_mask, best_cost = _scan_with_table(instance, fn)
    else:
        best_mask, best_cost = _scan_generic(instance)
    if best_mask is None:
        raise InfeasibleError(
            "no subset reaches tau; instance validation should have caught this"
        )
    return OptimalSolution(Subset(n, best_mask), best_cost, certified=True)


def _table_function(instance):
    oracle = instance.oracle
    if isinstance(oracle, CoverageOracle) and oracle.function._table is not None:
        return oracle.function
    return None


def _scan_with_table(instance, fn):
    n = instance.n
    size = 1 << n
    covered = np.zeros(size, dtype=np.int64)
    costs = np.zeros(size, dtype=np.float64)
    for bit in range(n):
        lo = 1 << bit
        covered[lo : 2 * lo] = covered[:lo] | fn.cover_masks[bit]
        costs[lo : 2 * lo] = costs[:lo] + instance.costs[bit]
    values = fn._table[covered]
    feasible = np.flatnonzero(values >= instance.tau)
    if feasible.size == 0:
        return None, None
    best_cost = costs[feasible].min()
    winners = feasible[costs[feasible] == best_cost]
    return int(winners.min()), float(best_cost)

def _scan_generic(instance):
    n = instance.n
    oracle = instance.oracle
    best_mask = None
    best_cost = np.inf
    for mask in range(1 << n):
        subset = Subset(n, mask)
        c = float(instance.costs[subset.indices()].sum()) if mask else 0.0
        if c >= best_cost:
            continue
        if oracle.evaluate(subset) >= instance.tau:
            best_mask = mask
            best_cost = c
    return best_mask, best_cost


def random_instance(
    n: int,
    m: int,
    density: float,
    cost_spread: float,
    tau_fraction: float,
    seed: int,
) -> MCSCInstance:
    """Seeded random coverage instance for the verifier and property suites.

    Each element covers each universe item independently with probability
    ``density``; item weights are uniform on [0.5, 1.5); element costs are
    uniform on [1, cost_spread]; tau = tau_fraction * f(S).  Draws repeat
    from the same stream until f(S) > 0, so the result is deterministic per
    seed.
    """
    if n > _ENUMERATION_LIMIT:
        raise BudgetExceededError(
            f"verifier instances are capped at n <= {_ENUMERATION_LIMIT}, got {n}"
        )
    if not 0.0 <= tau_fraction <= 1.0:
        raise InstanceError(f"tau_fraction must be in [0, 1], got {tau_fraction}")
    if cost_spread < 1.0:
        raise InstanceError(f"cost_spread must be >= 1, got {cost_spread}")
    rng = np.random.default_rng(seed)
    while True:
        incidence = rng.random((n, m)) < density
        weights = rng.uniform(0.5, 1.5, size=m)
        costs = rng.uniform(1.0, cost_spread, size=n)
        covers = [np.flatnonzero(incidence[i]).tolist() for i in range(n)]
        fn = CoverageFunction(weights, covers)
        f_full = fn.value_of_mask((1 << n) - 1)
        if f_full > 0.0:
            break
    tau = tau_fraction * f_full
    return MCSCInstance(costs, CoverageOracle(fn), tau)
