"""Evolutionary algorithm for minimum cost submodular cover.

The benefit range [0, tau] is discretized into bins: bin i holds solutions
whose clamped benefit falls in [(1 - delta^i) tau, (1 - delta^(i+1)) tau),
and the final bin r holds every solution with f >= (1 - epsilon) tau.  The
population keeps at most one solution per bin.  Each iteration mutates a
uniformly random population member by independent per-bit flips, evaluates
the child once, and lets it challenge the incumbent of its bin under the
cost-effectiveness order: lower

    phi(X) = c(X) / ln(tau / (tau - f(X)))

wins in interior bins, lower plain cost wins in bin 0 and the final bin.
With delta in [1 - c_min/c(A*), 1 - c_min/c(S)] the final bin acquires, in
expected polynomial iterations, a solution whose cost is within a factor
ln(1/epsilon) + 1 of optimal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Tuple

import numpy as np

from .core import MCSCInstance, Subset, cost, f_tau
from .errors import BinOverflowError, DomainError

__all__ = [
    "EASCConfig",
    "PopulationEntry",
    "Population",
    "TraceRow",
    "final_bin_index",
    "bin_of",
    "phi",
    "precedes",
    "mutate",
    "run_easc",
    "choose_delta",
]

# Guard against delta -> 1 requesting an absurd number of bins.
DEFAULT_MAX_BINS = 5_000_000

# Ratios this close to an integer are treated as exact when taking the
# ceiling in final_bin_index, so analytically integral inputs (for example
# log_0.5(0.125) = 3) are not bumped a bin by floating-point noise.
_INTEGER_SNAP = 1e-9


@dataclass(frozen=True)
class EASCConfig:
    """Run parameters.

    The approximation guarantee additionally requires
    delta >= 1 - c_min/c(A*), which cannot be validated here because c(A*)
    is unknown in general; ``choose_delta`` derives an admissible value from
    any upper bound on c(A*).
    """

    epsilon: float
    delta: float
    iterations: int
    rng_seed: int
    trace_stride: int = 100
    max_bins: int = DEFAULT_MAX_BINS

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise DomainError(f"epsilon must be in (0, 1), got {self.epsilon}")
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must be in (0, 1), got {self.delta}")
        if self.iterations < 0:
            raise DomainError("iterations must be >= 0")
        if self.trace_stride < 1:
            raise DomainError("trace_stride must be >= 1")


@dataclass(frozen=True)
class PopulationEntry:
    """A stored solution with its cached benefit, cost, bin, and phi."""

    subset: Subset
    f_value: float  # clamped benefit min(f(X), tau)
    cost: float
    bin_idx: int
    phi: float


@dataclass(frozen=True)
class TraceRow:
    """Telemetry checkpoint; built from cached values, never calls the oracle.

    ``best_feasible_cost`` is the minimum cost over population entries with
    f >= (1 - epsilon) * tau (None while no such entry exists) and
    ``best_feasible_f`` the benefit of that entry.
    """

    iteration: int
    evaluations: int
    best_feasible_cost: Optional[float]
    best_feasible_f: Optional[float]
    population_size: int


def final_bin_index(
    epsilon: float, delta: float, max_bins: int = DEFAULT_MAX_BINS
) -> int:
    """Index r of the final bin: ceil(log_delta(epsilon)).

    The paper treats log_delta(epsilon) as integral; taking the ceiling
    keeps the final-bin membership test f >= (1 - epsilon) tau exact while
    adding at most one bin.  Raises BinOverflowError when r would exceed
    ``max_bins``.
    """
    if not 0.0 < epsilon < 1.0:
        raise DomainError(f"epsilon must be in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must be in (0, 1), got {delta}")
    ratio = math.log(1.0 / epsilon) / math.log(1.0 / delta)
    nearest = round(ratio)
    if abs(ratio - nearest) <= _INTEGER_SNAP and nearest >= 1:
        r = int(nearest)
    else:
        r = int(math.ceil(ratio))
    if r > max_bins:
        raise BinOverflowError(
            f"epsilon={epsilon}, delta={delta} would need {r} bins "
            f"(cap {max_bins})"
        )
    return r


def bin_of(x_f: float, tau: float, epsilon: float, delta: float, r: int) -> int:
    """Bin index of a solution with benefit ``x_f``.

    The final-bin test f >= (1 - epsilon) tau runs first, which resolves
    the overlap between interval r-1's upper edge and the feasibility
    threshold.  Interior lookup uses a logarithm for an O(1) estimate and
    then corrects against the exact interval edges so boundary values land
    in the higher bin.
    """
    f = min(x_f, tau)
    if f >= (1.0 - epsilon) * tau:
        return r
    if f <= 0.0:
        return 0
    g = 1.0 - f / tau
    i = int(math.floor(math.log(g) / math.log(delta)))
    if i < 0:
        i = 0
    elif i > r - 1:
        i = r - 1
    while i > 0 and f < (1.0 - delta**i) * tau:
        i -= 1
    while i < r - 1 and f >= (1.0 - delta ** (i + 1)) * tau:
        i += 1
    return i


def phi(x_cost: float, x_f: float, bin_idx: int, r: int, tau: float) -> float:
    """Cost-effectiveness: c(X) in bin 0 and bin r, else c(X)/ln(tau/(tau - f)).

    Lower is better.  Raises DomainError for an interior bin whose benefit
    is not strictly inside (0, tau): such an entry cannot have come from a
    consistent bin assignment.
    """
    if not 0 <= bin_idx <= r:
        raise DomainError(f"bin index {bin_idx} outside 0..{r}")
    if bin_idx == 0 or bin_idx == r:
        return x_cost
    if not 0.0 < x_f < tau:
        raise DomainError(
            f"interior bin {bin_idx} requires 0 < f < tau, got f={x_f}, tau={tau}"
        )
    return x_cost / math.log(tau / (tau - x_f))


def precedes(y_entry: PopulationEntry, x_entry: PopulationEntry) -> bool:
    """Whether y is weaker than x: same bin and phi(x) strictly below phi(y)."""
    return y_entry.bin_idx == x_entry.bin_idx and x_entry.phi < y_entry.phi


class Population:
    """Bin-indexed store holding at most one solution per bin.

    Bin 0 holds the empty set from initialization on and never loses it:
    evicting it would need a challenger of cost at most c(empty) = 0, and
    only the empty set has zero cost.
    """

    def __init__(self, r: int):
        self.r = r
        self._by_bin: dict[int, int] = {}
        self._entries: List[PopulationEntry] = []
        self.max_size_seen = 0

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self) -> Tuple[PopulationEntry, ...]:
        return tuple(self._entries)

    def get(self, bin_idx: int) -> Optional[PopulationEntry]:
        pos = self._by_bin.get(bin_idx)
        return None if pos is None else self._entries[pos]

    def random_entry(self, rng: np.random.Generator) -> PopulationEntry:
        return self._entries[int(rng.integers(0, len(self._entries)))]

    def challenge(
        self, entry: PopulationEntry
    ) -> Tuple[bool, Optional[PopulationEntry]]:
        """Let ``entry`` challenge its bin; returns (inserted, evicted).

        The challenger is inserted unless the incumbent strictly precedes
        it, so equal phi replaces the incumbent (newer wins).
        """
        if not 0 <= entry.bin_idx <= self.r:
            raise DomainError(f"bin index {entry.bin_idx} outside 0..{self.r}")
        pos = self._by_bin.get(entry.bin_idx)
        if pos is None:
            self._by_bin[entry.bin_idx] = len(self._entries)
            self._entries.append(entry)
            if len(self._entries) > self.max_size_seen:
                self.max_size_seen = len(self._entries)
            return True, None
        incumbent = self._entries[pos]
        if precedes(entry, incumbent):
            return False, None
        self._entries[pos] = entry
        return True, incumbent


def mutate(x_set: Subset, n: int, rng: np.random.Generator) -> Subset:
    """Flip each of the n membership bits independently with probability 1/n.

    Sampled as a Binomial(n, 1/n) flip count followed by a uniformly random
    set of that many distinct positions, which is distributionally identical
    to n independent Bernoulli(1/n) draws.  The expected number of changed
    elements is 1.
    """
    k = int(rng.binomial(n, 1.0 / n))
    if k == 0:
        return x_set
    if k == n:
        return x_set.flipped((1 << n) - 1)
    while True:
        positions = rng.integers(0, n, size=k)
        flip = 0
        for p in positions.tolist():
            flip |= 1 << p
        if flip.bit_count() == k:
            return x_set.flipped(flip)


def run_easc(
    instance: MCSCInstance,
    config: EASCConfig,
    *,
    on_row: Optional[Callable[[TraceRow], None]] = None,
    on_replace: Optional[Callable[[int, PopulationEntry, PopulationEntry], None]] = None,
    stop_when: Optional[Callable[[int, PopulationEntry], bool]] = None,
) -> Tuple[Population, List[TraceRow]]:
    """Run the evolutionary solver for ``config.iterations`` iterations.

    The population starts as {empty set}.  Each iteration picks a uniform
    random entry, mutates it, and spends exactly one benefit and one cost
    evaluation on the child before the bin challenge.  A trace row is
    emitted at iteration 0, every ``trace_stride`` iterations, and at the
    final iteration.

    Instrumentation hooks (all optional, used by the verification suites):
    ``on_row`` sees every trace row; ``on_replace(t, evicted, inserted)``
    fires when an incumbent is evicted; ``stop_when(t, inserted)`` is
    consulted after every insertion and ends the run early when it returns
    true.  The last trace row always reflects the final iteration executed.
    """
    rng = np.random.default_rng(config.rng_seed)
    n = instance.n
    tau = instance.tau
    r = final_bin_index(config.epsilon, config.delta, config.max_bins)
    oracle = instance.oracle
    evaluations_before = oracle.evaluation_count

    empty = Subset(n)
    f_empty = f_tau(instance, empty)
    c_empty = cost(instance, empty)
    b_empty = bin_of(f_empty, tau, config.epsilon, config.delta, r)
    population = Population(r)
    population.challenge(
        PopulationEntry(
            empty, f_empty, c_empty, b_empty, phi(c_empty, f_empty, b_empty, r, tau)
        )
    )

    trace: List[TraceRow] = []

    def emit(iteration: int) -> None:
        final = population.get(r)
        row = TraceRow(
            iteration=iteration,
            evaluations=oracle.evaluation_count - evaluations_before,
            best_feasible_cost=None if final is None else final.cost,
            best_feasible_f=None if final is None else final.f_value,
            population_size=len(population),
        )
        trace.append(row)
        if on_row is not None:
            on_row(row)

    emit(0)
    stride = config.trace_stride
    for t in range(1, config.iterations + 1):
        parent = population.random_entry(rng)
        child = mutate(parent.subset, n, rng)
        f_child = f_tau(instance, child)
        c_child = cost(instance, child)
        b_child = bin_of(f_child, tau, config.epsilon, config.delta, r)
        entry = PopulationEntry(
            child, f_child, c_child, b_child, phi(c_child, f_child, b_child, r, tau)
        )
        inserted, evicted = population.challenge(entry)
        stop = False
        if inserted:
            if evicted is not None and on_replace is not None:
                on_replace(t, evicted, entry)
            if stop_when is not None and stop_when(t, entry):
                stop = True
        if stop or t % stride == 0 or t == config.iterations:
            emit(t)
        if stop:
            break
    return population, trace


def choose_delta(instance: MCSCInstance, greedy_bound_B: float) -> float:
    """delta = 1 - c_min / min(B, c(S)) for an upper bound B on c(A*).

    Lands inside the admissible interval
    [1 - c_min/c(A*), 1 - c_min/c(S)] whenever B >= c(A*).  Raises
    DomainError when the effective bound is no larger than c_min, which
    would give delta <= 0.
    """
    if greedy_bound_B <= 0.0:
        raise DomainError(f"bound B must be positive, got {greedy_bound_B}")
    effective = min(greedy_bound_B, instance.total_cost)
    c_min = instance.c_min
    if effective <= c_min:
        raise DomainError(
            f"bound {effective} does not exceed c_min = {c_min}; delta would be <= 0"
        )
    return 1.0 - c_min / effective
