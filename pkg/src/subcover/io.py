"""File formats: SNAP edge lists, instance JSON, trace CSV, RR-set cache.

Trace CSVs use LF line endings, '.' as the decimal separator, and floats
printed with 17 significant digits so reruns with the same seeds are
byte-identical.  The instance JSON writer emits a canonical key order, so
write(read(path)) reproduces the file exactly.
"""

from __future__ import annotations

import csv
import json
import struct
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import MCSCInstance
from .coverage import CoverageFunction, CoverageOracle
from .easc import TraceRow
from .errors import CacheError, EmptyGraphError, SchemaError, SnapParseError
from .influence import DirectedGraph, RRSetIndex

__all__ = [
    "load_snap_graph",
    "read_instance",
    "write_instance",
    "write_trace_csv",
    "read_trace_csv",
    "write_rr_cache",
    "read_rr_cache",
]

TRACE_HEADER = ["iteration", "evaluations", "best_cost", "best_f", "population_size"]

_CACHE_MAGIC = b"SCRR"
_CACHE_VERSION = 1


def load_snap_graph(
    path, edge_probability: float = 1.0
) -> Tuple[DirectedGraph, List[int]]:
    """Parse a SNAP-style edge list: one "u v" integer pair per line.

    Lines starting with '#' and blank lines are skipped.  Arbitrary vertex
    ids are remapped to dense 0-based indices by first appearance; the
    returned list maps dense index back to the original id.  Duplicate
    edges collapse.  Raises SnapParseError with the offending line number
    and EmptyGraphError when the file defines no vertices and no edges.
    """
    ids: dict[int, int] = {}
    edges = []
    with open(path, "r", encoding="utf-8") as handle:
        for line_number, line in enumerate(handle, 1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise SnapParseError(
                    f"expected two fields, got {len(parts)}: {text!r}", line_number
                )
            try:
                u_raw, v_raw = int(parts[0]), int(parts[1])
            except ValueError:
                raise SnapParseError(f"non-integer endpoint in {text!r}", line_number)
            u = ids.setdefault(u_raw, len(ids))
            v = ids.setdefault(v_raw, len(ids))
            edges.append((u, v))
    if not ids:
        raise EmptyGraphError(f"{path} contains no edges")
    graph = DirectedGraph(len(ids), edges, edge_probability)
    return graph, list(ids.keys())


def write_instance(instance: MCSCInstance, path) -> None:
    """Serialize a coverage instance to JSON (n, m, tau, costs, weights, covers)."""
    oracle = instance.oracle
    if not isinstance(oracle, CoverageOracle):
        raise SchemaError(
            "oracle", "only coverage-backed instances have a JSON representation"
        )
    fn = oracle.function
    payload = {
        "n": instance.n,
        "m": fn.universe_size,
        "tau": instance.tau,
        "costs": instance.costs.tolist(),
        "weights": fn.universe_weights.tolist(),
        "covers": [list(items) for items in fn.covers],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as handle:
        json.dump(payload, handle, sort_keys=True, indent=2)
        handle.write("\n")


def read_instance(path) -> MCSCInstance:
    """Load a coverage instance written by :func:`write_instance`.

    Raises SchemaError naming the first offending field.
    """
    with open(path, "r", encoding="utf-8") as handle:
        payload = json.load(handle)
    for key in ("n", "m", "tau", "costs", "weights", "covers"):
        if key not in payload:
            raise SchemaError(key)
    n, m = payload["n"], payload["m"]
    if not isinstance(n, int) or n < 1:
        raise SchemaError("n", f"n must be a positive integer, got {n!r}")
    if not isinstance(m, int) or m < 0:
        raise SchemaError("m", f"m must be a non-negative integer, got {m!r}")
    costs = payload["costs"]
    if len(costs) != n:
        raise SchemaError("costs", f"expected {n} costs, got {len(costs)}")
    weights = payload["weights"]
    if len(weights) != m:
        raise SchemaError("weights", f"expected {m} weights, got {len(weights)}")
    covers = payload["covers"]
    if len(covers) != n:
        raise SchemaError("covers", f"expected {n} cover lists, got {len(covers)}")
    for i, items in enumerate(covers):
        for j in items:
            if not isinstance(j, int) or not 0 <= j < m:
                raise SchemaError(
                    "covers", f"covers[{i}] item {j!r} outside 0..{m - 1}"
                )
    fn = CoverageFunction(np.asarray(weights, dtype=np.float64), covers)
    return MCSCInstance(
        np.asarray(costs, dtype=np.float64), CoverageOracle(fn), payload["tau"]
    )


def _format_float(value: float) -> str:
    return "%.17g" % value


def write_trace_csv(path, rows: Sequence[TraceRow]) -> None:
    """Write trace rows; best_cost/best_f are empty while undefined."""
    with open(path, "w", encoding="utf-8", newline="") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(TRACE_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.iteration,
                    row.evaluations,
                    "" if row.best_feasible_cost is None
                    else _format_float(row.best_feasible_cost),
                    "" if row.best_feasible_f is None
                    else _format_float(row.best_feasible_f),
                    row.population_size,
                ]
            )


def read_trace_csv(path) -> List[TraceRow]:
    with open(path, "r", encoding="utf-8", newline="") as handle:
        reader = csv.reader(handle)
        header = next(reader)
        if header != TRACE_HEADER:
            raise SchemaError("header", f"unexpected trace header {header!r}")
        rows = []
        for record in reader:
            rows.append(
                TraceRow(
                    iteration=int(record[0]),
                    evaluations=int(record[1]),
                    best_feasible_cost=float(record[2]) if record[2] else None,
                    best_feasible_f=float(record[3]) if record[3] else None,
                    population_size=int(record[4]),
                )
            )
    return rows


def write_rr_cache(
    path, index: RRSetIndex, graph_hash: str, edge_probability: float
) -> None:
    """Persist an RR-set index keyed by (graph hash, p, sample count, seed)."""
    header = struct.pack(
        "<4sI32sdQqq",
        _CACHE_MAGIC,
        _CACHE_VERSION,
        bytes.fromhex(graph_hash),
        edge_probability,
        index.sample_count,
        index.seed,
        index.vertex_count,
    )
    with open(path, "wb") as handle:
        handle.write(header)
        offsets = index.sets_off.astype(np.int64)
        flat = index.sets_flat.astype(np.int64)
        handle.write(struct.pack("<q", flat.size))
        handle.write(offsets.tobytes())
        handle.write(flat.tobytes())


def read_rr_cache(
    path,
    graph_hash: str,
    edge_probability: float,
    sample_count: Optional[int] = None,
    seed: Optional[int] = None,
) -> RRSetIndex:
    """Load an RR-set cache, validating format version and key fields.

    Raises CacheError on a foreign file, a version mismatch, or a key
    mismatch (different graph, p, sample count, or seed).
    """
    with open(path, "rb") as handle:
        raw = handle.read(struct.calcsize("<4sI32sdQqq"))
        magic, version, stored_hash, stored_p, stored_m, stored_seed, v_count = (
            struct.unpack("<4sI32sdQqq", raw)
        )
        if magic != _CACHE_MAGIC:
            raise CacheError(f"{path} is not an RR cache file")
        if version != _CACHE_VERSION:
            raise CacheError(f"unsupported cache version {version}")
        if stored_hash.hex() != graph_hash:
            raise CacheError("cache was built for a different graph")
        if stored_p != edge_probability:
            raise CacheError(
                f"cache was built with p={stored_p}, requested {edge_probability}"
            )
        if sample_count is not None and stored_m != sample_count:
            raise CacheError(
                f"cache holds {stored_m} samples, requested {sample_count}"
            )
        if seed is not None and stored_seed != seed:
            raise CacheError(f"cache seed {stored_seed} != requested {seed}")
        (flat_size,) = struct.unpack("<q", handle.read(8))
        offsets = np.frombuffer(
            handle.read(8 * (stored_m + 1)), dtype=np.int64
        ).copy()
        flat = np.frombuffer(handle.read(8 * flat_size), dtype=np.int64).copy()
    rr_sets = [
        flat[offsets[i] : offsets[i + 1]] for i in range(stored_m)
    ]
    return RRSetIndex.from_sets(v_count, rr_sets, seed=stored_seed)
