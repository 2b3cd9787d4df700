"""Problem instances and the submodular-oracle contract.

A minimum cost submodular cover (MCSC) instance consists of a ground set
S = {0, ..., n-1}, a strictly positive modular cost vector, a monotone
submodular benefit oracle f, and a threshold tau with tau <= f(S).  The
solvers in this package work with the clamped benefit

    f_tau(X) = min(f(X), tau)

and its marginal gains Delta f_tau(X, x) = f_tau(X + x) - f_tau(X).

Oracle evaluations are the unit of time throughout; every operation below
documents exactly how many ``evaluate`` calls it performs.
"""

from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Iterable, Iterator, Optional, Tuple

import numpy as np

from .errors import InstanceError

__all__ = [
    "Subset",
    "SubmodularOracle",
    "MCSCInstance",
    "cost",
    "f_tau",
    "marginal_gain_tau",
    "best_ratio_element",
]


class Subset:
    """Immutable dense bitset over the ground set {0, ..., n-1}.

    Bit i of ``mask`` is set iff element i is a member.  Cardinality is the
    popcount of the mask; member indices are materialized lazily and cached,
    so repeated cost/benefit evaluations of the same subset share one
    extraction.  Subsets are hashable value objects and safe to share
    between threads.
    """

    __slots__ = ("n", "mask", "_indices")

    def __init__(self, n: int, mask: int = 0):
        if n < 1:
            raise InstanceError(f"ground set size must be >= 1, got {n}")
        if mask < 0 or mask >> n:
            raise InstanceError(f"mask {mask:#x} has bits outside 0..{n - 1}")
        self.n = n
        self.mask = mask
        self._indices: Optional[np.ndarray] = None

    @classmethod
    def from_indices(cls, n: int, indices: Iterable[int]) -> "Subset":
        mask = 0
        for i in indices:
            if not 0 <= i < n:
                raise InstanceError(f"element {i} outside 0..{n - 1}")
            mask |= 1 << i
        return cls(n, mask)

    @classmethod
    def full(cls, n: int) -> "Subset":
        return cls(n, (1 << n) - 1)

    def indices(self) -> np.ndarray:
        """Member indices as a sorted int64 array (computed once, cached)."""
        if self._indices is None:
            buf = self.mask.to_bytes((self.n + 7) // 8, "little")
            bits = np.unpackbits(
                np.frombuffer(buf, dtype=np.uint8), bitorder="little", count=self.n
            )
            self._indices = np.flatnonzero(bits).astype(np.int64)
        return self._indices

    def with_added(self, x: int) -> "Subset":
        """Return this subset with element x added (self if already present)."""
        bit = 1 << x
        if self.mask & bit:
            return self
        child = Subset(self.n, self.mask | bit)
        if self._indices is not None:
            pos = int(np.searchsorted(self._indices, x))
            child._indices = np.insert(self._indices, pos, x)
        return child

    def flipped(self, flip_mask: int) -> "Subset":
        """Return this subset with the positions in ``flip_mask`` toggled."""
        return Subset(self.n, self.mask ^ flip_mask)

    def __contains__(self, x: int) -> bool:
        return 0 <= x < self.n and bool(self.mask >> x & 1)

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices().tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subset) and self.n == other.n and self.mask == other.mask
        )

    def __hash__(self) -> int:
        return hash((self.n, self.mask))

    def __repr__(self) -> str:
        return f"Subset(n={self.n}, members={self.indices().tolist()})"


class SubmodularOracle(ABC):
    """Contract for a monotone submodular benefit function f: 2^S -> R>=0.

    ``evaluate`` increments ``evaluation_count`` by exactly one per call;
    that counter is the time axis reported by every solver.  Implementations
    must be monotone (A subset of B implies f(A) <= f(B)) and submodular,
    and must return a value >= 0 for the empty set.

    The counter is a plain attribute guarded by the CPython GIL.  Concurrent
    runs that need independent accounting should each own an oracle handle
    over the shared immutable data rather than share one counter.
    """

    def __init__(self):
        self._evaluations = 0

    @property
    def evaluation_count(self) -> int:
        return self._evaluations

    def evaluate(self, subset: Subset) -> float:
        self._evaluations += 1
        return self._value(subset)

    @abstractmethod
    def _value(self, subset: Subset) -> float:
        """Benefit of ``subset``; does not touch the evaluation counter."""


class MCSCInstance:
    """An MCSC problem instance: costs, benefit oracle, and threshold.

    Construction validates that every cost is strictly positive and that
    tau <= f(S); the latter check spends one oracle evaluation.  Instances
    are immutable after construction apart from the ``cost_evaluations``
    counter, which mirrors the oracle counter for the modular cost side.
    """

    __slots__ = ("costs", "oracle", "tau", "cost_evaluations")

    def __init__(self, costs, oracle: SubmodularOracle, tau: float):
        costs = np.asarray(costs, dtype=np.float64)
        if costs.ndim != 1 or costs.size < 1:
            raise InstanceError("costs must be a non-empty 1-d vector")
        if not np.all(costs > 0.0):
            raise InstanceError("every element cost must be strictly positive")
        tau = float(tau)
        if not np.isfinite(tau) or tau < 0.0:
            raise InstanceError(f"threshold must be finite and >= 0, got {tau}")
        f_full = oracle.evaluate(Subset.full(costs.size))
        if tau > f_full:
            raise InstanceError(
                f"threshold {tau} exceeds f(S) = {f_full}; instance is infeasible"
            )
        self.costs = costs
        self.costs.setflags(write=False)
        self.oracle = oracle
        self.tau = tau
        self.cost_evaluations = 0

    @property
    def n(self) -> int:
        return self.costs.size

    @property
    def c_min(self) -> float:
        return float(self.costs.min())

    @property
    def c_max(self) -> float:
        return float(self.costs.max())

    @property
    def total_cost(self) -> float:
        """c(S), the cost of the full ground set."""
        return float(self.costs.sum())

    def __repr__(self) -> str:
        return (
            f"MCSCInstance(n={self.n}, tau={self.tau}, "
            f"oracle={type(self.oracle).__name__})"
        )


def cost(instance: MCSCInstance, x_set: Subset) -> float:
    """Modular cost of ``x_set``: the sum of its members' costs.

    cost of the empty set is exactly 0.  Counts as one cost evaluation.
    """
    instance.cost_evaluations += 1
    idx = x_set.indices()
    if idx.size == 0:
        return 0.0
    return float(instance.costs[idx].sum())


def f_tau(instance: MCSCInstance, x_set: Subset) -> float:
    """Clamped benefit min(f(X), tau).  Spends exactly one oracle evaluation."""
    return min(instance.oracle.evaluate(x_set), instance.tau)


def marginal_gain_tau(instance: MCSCInstance, x_set: Subset, x: int) -> float:
    """Delta f_tau(X, x) = f_tau(X + x) - f_tau(X).

    Returns 0 without evaluating when x is already a member; otherwise
    spends exactly two oracle evaluations.  Non-negative for monotone f.
    """
    if x in x_set:
        return 0.0
    return f_tau(instance, x_set.with_added(x)) - f_tau(instance, x_set)


def best_ratio_element(
    instance: MCSCInstance, x_set: Subset, base_f_tau: Optional[float] = None
) -> Tuple[int, float]:
    """Element maximizing Delta f_tau(X, x) / c(x) over all of S, with its ratio.

    The scan covers every element including current members (whose gain is
    0); ties break to the lowest index, so when every gain is 0 the result
    is (0, 0.0).  Spends n + 1 oracle evaluations, or n when the caller
    supplies ``base_f_tau`` = f_tau(X).
    """
    if base_f_tau is None:
        base_f_tau = f_tau(instance, x_set)
    x, ratio, _ = _best_ratio_scan(instance, x_set, base_f_tau)
    return x, ratio


def _best_ratio_scan(
    instance: MCSCInstance, x_set: Subset, base_f_tau: float
) -> Tuple[int, float, float]:
    """Scan all candidates; returns (element, ratio, f_tau of X + element).

    Exactly n oracle evaluations.  Strictly-greater comparison keeps the
    lowest index on ties.
    """
    costs = instance.costs
    best_x = 0
    best_ratio = -np.inf
    best_f = base_f_tau
    for x in range(instance.n):
        fx = f_tau(instance, x_set.with_added(x))
        ratio = (fx - base_f_tau) / costs[x]
        if ratio > best_ratio:
            best_x = x
            best_ratio = ratio
            best_f = fx
    return best_x, float(best_ratio), best_f
