"""Directed graphs and per-node dimension bookkeeping.

Edges are ordered pairs ``(i, j)`` of 0-based node indices, read as
"node i may use information from node j": block ``(i, j)`` of a state
or output matrix may be nonzero only when ``(i, j)`` is an edge.
Self-loops are never implicit; a node with internal dynamics must
declare ``(i, i)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .errors import InputError


def _as_edge(item) -> tuple[int, int]:
    try:
        i, j = item
    except (TypeError, ValueError) as exc:
        raise InputError(f"edge {item!r} is not an (i, j) pair") from exc
    return int(i), int(j)


@dataclass(frozen=True)
class NetworkGraph:
    """Directed graph on nodes ``0 .. num_nodes - 1`` with an explicit edge set.

    Immutable after construction and safe to share between threads.
    """

    num_nodes: int
    edges: frozenset[tuple[int, int]] = frozenset()

    def __post_init__(self):
        count = int(self.num_nodes)
        if count < 1:
            raise InputError(f"num_nodes must be a positive integer, got {self.num_nodes!r}")
        object.__setattr__(self, "num_nodes", count)
        edges = frozenset(_as_edge(e) for e in self.edges)
        for i, j in edges:
            if not (0 <= i < count and 0 <= j < count):
                raise InputError(f"edge ({i}, {j}) out of range for {count} nodes")
        object.__setattr__(self, "edges", edges)

    def has_edge(self, i: int, j: int) -> bool:
        """True when information may flow from node ``j`` into node ``i``."""
        if not (0 <= i < self.num_nodes and 0 <= j < self.num_nodes):
            raise InputError(f"node pair ({i}, {j}) out of range for {self.num_nodes} nodes")
        return (i, j) in self.edges

    def transpose(self) -> "NetworkGraph":
        """Graph with every edge reversed. An involution on edge sets."""
        return NetworkGraph(self.num_nodes, frozenset((j, i) for i, j in self.edges))

    @property
    def num_non_self_edges(self) -> int:
        return sum(1 for i, j in self.edges if i != j)

    def sorted_edges(self) -> list[tuple[int, int]]:
        return sorted(self.edges)


def build_graph(num_nodes: int, edges: Iterable) -> NetworkGraph:
    """Validate an edge list (duplicates allowed, deduplicated) into a graph."""
    return NetworkGraph(num_nodes, frozenset(_as_edge(e) for e in edges))


def _as_counts(values, label: str) -> tuple[int, ...]:
    try:
        counts = tuple(int(v) for v in values)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{label} must be a sequence of integers") from exc
    if any(v < 0 for v in counts):
        raise InputError(f"{label} must be nonnegative, got {counts}")
    return counts


def _block_slice(counts: Sequence[int], index: int) -> slice:
    if not 0 <= index < len(counts):
        raise InputError(f"node index {index} out of range for {len(counts)} nodes")
    start = sum(counts[:index])
    return slice(start, start + counts[index])


@dataclass(frozen=True)
class NodeDims:
    """Per-node state/input/output counts partitioning global matrices.

    All three sequences have one entry per node; entries may be zero.
    Global vectors and matrix blocks are ordered node-major: node 0's
    rows and columns first, then node 1's, and so on.
    """

    states: tuple[int, ...]
    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        states = _as_counts(self.states, "states")
        inputs = _as_counts(self.inputs, "inputs")
        outputs = _as_counts(self.outputs, "outputs")
        if not states:
            raise InputError("dimension lists must cover at least one node")
        if not (len(states) == len(inputs) == len(outputs)):
            raise InputError(
                "states, inputs and outputs must have one entry per node, got "
                f"lengths {len(states)}, {len(inputs)}, {len(outputs)}")
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)

    @classmethod
    def from_triples(cls, triples: Iterable) -> "NodeDims":
        """Build from per-node ``(n_i, m_i, p_i)`` triples."""
        rows = list(triples)
        try:
            return cls(
                tuple(r[0] for r in rows),
                tuple(r[1] for r in rows),
                tuple(r[2] for r in rows),
            )
        except (IndexError, TypeError) as exc:
            raise InputError("each dims entry must be an (n, m, p) triple") from exc

    def triples(self) -> list[tuple[int, int, int]]:
        return list(zip(self.states, self.inputs, self.outputs))

    @property
    def num_nodes(self) -> int:
        return len(self.states)

    @property
    def n_total(self) -> int:
        return sum(self.states)

    @property
    def m_total(self) -> int:
        return sum(self.inputs)

    @property
    def p_total(self) -> int:
        return sum(self.outputs)

    def state_slice(self, i: int) -> slice:
        return _block_slice(self.states, i)

    def input_slice(self, i: int) -> slice:
        return _block_slice(self.inputs, i)

    def output_slice(self, i: int) -> slice:
        return _block_slice(self.outputs, i)
