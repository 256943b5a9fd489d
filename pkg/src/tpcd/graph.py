"""Mixed-graph values and pure graph algorithms.

A :class:`MixedGraph` stores, for every ordered node pair ``(i, j)``, the
edge mark found at the ``j`` end of the edge between ``i`` and ``j``:

======================  ==================  ==================
edge                    ``mark(i, j)``      ``mark(j, i)``
======================  ==================  ==================
no edge                 NONE                NONE
``i - j`` (undirected)  TAIL                TAIL
``i -> j`` (directed)   ARROW               TAIL
``i <-> j`` (conflict)  ARROW               ARROW
======================  ==================  ==================

The same value type is used for DAGs, PDAGs, CPDAGs and maximally oriented
PDAGs; :class:`Dag` merely validates the DAG invariants at construction.
Graphs are cheap to copy and all algorithms here are pure functions of
their inputs, so values can be shared freely between workers.
"""

from __future__ import annotations

import io
from collections import deque
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

NONE, TAIL, ARROW = 0, 1, 2

__all__ = [
    "MixedGraph",
    "Dag",
    "GraphFormatError",
    "markov_equivalent",
    "NONE",
    "TAIL",
    "ARROW",
]


class GraphFormatError(ValueError):
    """Raised when a graph CSV does not follow the documented encoding."""


def _default_labels(p: int) -> tuple[str, ...]:
    return tuple(f"X{i + 1}" for i in range(p))


class MixedGraph:
    """Edge-mark matrix over ``p`` nodes with none/undirected/directed/bidirected edges."""

    __slots__ = ("_marks", "labels")

    def __init__(self, p: int, labels: Sequence[str] | None = None):
        if p < 0:
            raise ValueError("node count must be non-negative")
        self._marks = np.zeros((p, p), dtype=np.int8)
        self.labels = tuple(labels) if labels is not None else _default_labels(p)
        if len(self.labels) != p:
            raise ValueError("label count does not match node count")

    # -- construction ---------------------------------------------------

    @classmethod
    def complete_undirected(cls, p: int, labels: Sequence[str] | None = None) -> "MixedGraph":
        g = cls(p, labels)
        g._marks[:] = TAIL
        np.fill_diagonal(g._marks, NONE)
        return g

    @classmethod
    def from_edges(
        cls,
        p: int,
        directed: Iterable[tuple[int, int]] = (),
        undirected: Iterable[tuple[int, int]] = (),
        bidirected: Iterable[tuple[int, int]] = (),
        labels: Sequence[str] | None = None,
    ) -> "MixedGraph":
        g = cls(p, labels)
        for i, j in undirected:
            g.set_undirected(i, j)
        for i, j in directed:
            g.set_directed(i, j)
        for i, j in bidirected:
            g.set_bidirected(i, j)
        return g

    def copy(self) -> "MixedGraph":
        g = MixedGraph.__new__(MixedGraph)
        g._marks = self._marks.copy()
        g.labels = self.labels
        return g

    # -- basic properties -----------------------------------------------

    @property
    def p(self) -> int:
        return self._marks.shape[0]

    @property
    def marks(self) -> np.ndarray:
        """Read-only view of the mark table."""
        v = self._marks.view()
        v.flags.writeable = False
        return v

    def __eq__(self, other) -> bool:
        """Structural equality: same node count and mark table (labels are presentation)."""
        if not isinstance(other, MixedGraph):
            return NotImplemented
        return self.p == other.p and np.array_equal(self._marks, other._marks)

    def __hash__(self):
        raise TypeError("MixedGraph is mutable and unhashable; use marks.tobytes() as a key")

    def __repr__(self) -> str:
        kinds = []
        for i, j in self.edge_pairs():
            if self.is_undirected(i, j):
                kinds.append(f"{self.labels[i]}-{self.labels[j]}")
            elif self.is_directed(i, j):
                kinds.append(f"{self.labels[i]}->{self.labels[j]}")
            elif self.is_directed(j, i):
                kinds.append(f"{self.labels[j]}->{self.labels[i]}")
            else:
                kinds.append(f"{self.labels[i]}<->{self.labels[j]}")
        return f"MixedGraph(p={self.p}, edges=[{', '.join(kinds)}])"

    def _check_node(self, *nodes: int) -> None:
        for v in nodes:
            if not 0 <= v < self.p:
                raise IndexError(f"node index {v} out of range [0, {self.p})")

    # -- edge mutation ---------------------------------------------------

    def _set(self, i: int, j: int, mi: int, mj: int) -> None:
        self._check_node(i, j)
        if i == j:
            raise ValueError("self-loops are not allowed")
        self._marks[i, j] = mj
        self._marks[j, i] = mi

    def set_undirected(self, i: int, j: int) -> None:
        self._set(i, j, TAIL, TAIL)

    def set_directed(self, i: int, j: int) -> None:
        """Insert or reorient the pair as ``i -> j``."""
        self._set(i, j, TAIL, ARROW)

    def set_bidirected(self, i: int, j: int) -> None:
        self._set(i, j, ARROW, ARROW)

    def remove_edge(self, i: int, j: int) -> None:
        self._set(i, j, NONE, NONE)

    # -- edge queries ------------------------------------------------------

    def has_edge(self, i: int, j: int) -> bool:
        return self._marks[i, j] != NONE

    def is_undirected(self, i: int, j: int) -> bool:
        return self._marks[i, j] == TAIL and self._marks[j, i] == TAIL

    def is_directed(self, i: int, j: int) -> bool:
        """True iff the edge is exactly ``i -> j``."""
        return self._marks[i, j] == ARROW and self._marks[j, i] == TAIL

    def is_bidirected(self, i: int, j: int) -> bool:
        return self._marks[i, j] == ARROW and self._marks[j, i] == ARROW

    def adjacent(self, i: int) -> list[int]:
        return [int(v) for v in np.nonzero(self._marks[i])[0]]

    def parents(self, i: int) -> list[int]:
        """Nodes ``u`` with a directed edge ``u -> i``."""
        row = self._marks[i]
        col = self._marks[:, i]
        return [int(v) for v in np.nonzero((col == ARROW) & (row == TAIL))[0]]

    def children(self, i: int) -> list[int]:
        row = self._marks[i]
        col = self._marks[:, i]
        return [int(v) for v in np.nonzero((row == ARROW) & (col == TAIL))[0]]

    def undirected_neighbors(self, i: int) -> list[int]:
        row = self._marks[i]
        col = self._marks[:, i]
        return [int(v) for v in np.nonzero((row == TAIL) & (col == TAIL))[0]]

    def edge_pairs(self) -> list[tuple[int, int]]:
        """All adjacent pairs ``(i, j)`` with ``i < j``."""
        ii, jj = np.nonzero(np.triu(self._marks, k=1) | np.triu(self._marks.T, k=1))
        return [(int(a), int(b)) for a, b in zip(ii, jj)]

    def directed_edges(self) -> list[tuple[int, int]]:
        out = []
        for i, j in self.edge_pairs():
            if self.is_directed(i, j):
                out.append((i, j))
            elif self.is_directed(j, i):
                out.append((j, i))
        return out

    def undirected_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in self.edge_pairs() if self.is_undirected(i, j)]

    def bidirected_edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j in self.edge_pairs() if self.is_bidirected(i, j)]

    @property
    def n_edges(self) -> int:
        return len(self.edge_pairs())

    # -- graph algorithms --------------------------------------------------

    def skeleton(self) -> "MixedGraph":
        """Same adjacencies with every edge undirected."""
        g = self.copy()
        g._marks[g._marks != NONE] = TAIL
        return g

    def is_acyclic(self) -> bool:
        """True iff the directed part of the graph contains no directed cycle.

        A bidirected pair carries an arrowhead each way and counts as a
        two-edge cycle.
        """
        if any(True for _ in self.bidirected_edges()):
            return False
        indeg = [len(self.parents(i)) for i in range(self.p)]
        queue = deque(i for i in range(self.p) if indeg[i] == 0)
        seen = 0
        while queue:
            v = queue.popleft()
            seen += 1
            for c in self.children(v):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return seen == self.p

    def v_structures(self) -> set[tuple[int, int, int]]:
        """Unshielded triples ``a -> b <- c`` (directed edges only), canonical ``a < c``."""
        out = set()
        for b in range(self.p):
            pa = self.parents(b)
            for a, c in combinations(sorted(pa), 2):
                if not self.has_edge(a, c):
                    out.add((a, b, c))
        return out

    def ancestors(self, v: int) -> set[int]:
        """Nodes with a directed path of length >= 1 to ``v`` (``v`` excluded)."""
        self._check_node(v)
        seen: set[int] = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in self.parents(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        seen.discard(v)
        return seen

    def descendants(self, v: int) -> set[int]:
        """Nodes reachable from ``v`` by a directed path of length >= 1."""
        self._check_node(v)
        seen: set[int] = set()
        stack = [v]
        while stack:
            u = stack.pop()
            for w in self.children(u):
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        seen.discard(v)
        return seen

    def possible_ancestors(self, v: int) -> set[int]:
        """Nodes with a path to ``v`` on which no edge points backward.

        A step ``a *-* b`` towards ``v`` qualifies only if it is ``a - b`` or
        ``a -> b``; bidirected edges carry a backward arrowhead and block the
        walk in both directions.
        """
        self._check_node(v)
        seen: set[int] = set()
        stack = [v]
        while stack:
            b = stack.pop()
            for a in self.adjacent(b):
                if a in seen or a == v:
                    continue
                if self.is_undirected(a, b) or self.is_directed(a, b):
                    seen.add(a)
                    stack.append(a)
        return seen

    def relabel(self, perm: Sequence[int]) -> "MixedGraph":
        """Return the graph with node ``k`` renamed to ``perm[k]``.

        ``perm`` must be a permutation of ``0..p-1``; the result has the edge
        ``perm[i] *-* perm[j]`` wherever ``self`` has ``i *-* j``.
        """
        perm = list(perm)
        if sorted(perm) != list(range(self.p)):
            raise ValueError("perm must be a permutation of 0..p-1")
        g = MixedGraph(self.p)
        idx = np.asarray(perm)
        g._marks[np.ix_(idx, idx)] = self._marks
        labels = [""] * self.p
        for k, target in enumerate(perm):
            labels[target] = self.labels[k]
        g.labels = tuple(labels)
        return g

    # -- CSV codec (bit-exact interchange format) ---------------------------

    def to_csv_text(self) -> str:
        """Encode as CSV: cell ``m[i or j]`` in {0,1,2}, see :func:`MixedGraph.from_csv_text`."""
        code = np.zeros((self.p, self.p), dtype=np.int8)
        for i, j in self.edge_pairs():
            if self.is_undirected(i, j):
                code[i, j] = code[j, i] = 1
            elif self.is_bidirected(i, j):
                code[i, j] = code[j, i] = 2
            elif self.is_directed(i, j):
                code[i, j] = 1
            else:
                code[j, i] = 1
        buf = io.StringIO()
        buf.write(",".join(self.labels) + "\n")
        for i in range(self.p):
            buf.write(",".join(str(int(c)) for c in code[i]) + "\n")
        return buf.getvalue()

    @classmethod
    def from_csv_text(cls, text: str) -> "MixedGraph":
        """Decode the CSV encoding.

        Cell pair semantics: ``(1,0)`` is ``i -> j``, ``(1,1)`` undirected,
        ``(2,2)`` bidirected, ``(0,0)`` no edge.  Any other combination (for
        example ``(2,0)`` or ``(2,1)``) is a parse error, as is a nonzero
        diagonal.
        """
        lines = [ln for ln in text.splitlines() if ln.strip() != ""]
        if not lines:
            raise GraphFormatError("empty graph file")
        labels = [s.strip() for s in lines[0].split(",")]
        p = len(labels)
        if len(lines) != p + 1:
            raise GraphFormatError(f"expected {p} matrix rows, found {len(lines) - 1}")
        code = np.zeros((p, p), dtype=np.int8)
        for i, ln in enumerate(lines[1:]):
            cells = [s.strip() for s in ln.split(",")]
            if len(cells) != p:
                raise GraphFormatError(f"row {i} has {len(cells)} cells, expected {p}")
            for j, cell in enumerate(cells):
                try:
                    val = int(cell)
                except ValueError as exc:
                    raise GraphFormatError(f"non-integer cell at ({i},{j}): {cell!r}") from exc
                if val not in (0, 1, 2):
                    raise GraphFormatError(f"cell value {val} at ({i},{j}) not in {{0,1,2}}")
                code[i, j] = val
        if np.any(np.diag(code) != 0):
            raise GraphFormatError("diagonal cells must be 0")
        g = cls(p, labels)
        for i in range(p):
            for j in range(i + 1, p):
                pair = (int(code[i, j]), int(code[j, i]))
                if pair == (0, 0):
                    continue
                if pair == (1, 1):
                    g.set_undirected(i, j)
                elif pair == (1, 0):
                    g.set_directed(i, j)
                elif pair == (0, 1):
                    g.set_directed(j, i)
                elif pair == (2, 2):
                    g.set_bidirected(i, j)
                else:
                    raise GraphFormatError(
                        f"invalid code pair {pair} for nodes ({i},{j})"
                    )
        return g


class Dag(MixedGraph):
    """A MixedGraph whose edges are all directed and acyclic (checked at construction)."""

    def __init__(self, p: int, edges: Iterable[tuple[int, int]] = (), labels: Sequence[str] | None = None):
        super().__init__(p, labels)
        for i, j in edges:
            self.set_directed(i, j)
        self._validate()

    def _validate(self) -> None:
        for i, j in self.edge_pairs():
            if not (self.is_directed(i, j) or self.is_directed(j, i)):
                raise ValueError(f"edge ({i},{j}) is not directed; not a DAG")
        if not self.is_acyclic():
            raise ValueError("directed cycle found; not a DAG")

    @classmethod
    def from_graph(cls, g: MixedGraph) -> "Dag":
        d = cls(g.p, labels=g.labels)
        d._marks[:] = g.marks
        d._validate()
        return d

    def copy(self) -> "Dag":
        d = Dag.__new__(Dag)
        d._marks = self._marks.copy()
        d.labels = self.labels
        return d

    def topological_order(self) -> list[int]:
        indeg = [len(self.parents(i)) for i in range(self.p)]
        queue = deque(sorted(i for i in range(self.p) if indeg[i] == 0))
        order = []
        while queue:
            v = queue.popleft()
            order.append(v)
            for c in sorted(self.children(v)):
                indeg[c] -= 1
                if indeg[c] == 0:
                    queue.append(c)
        return order

    def d_separated(self, i: int, j: int, s: Iterable[int]) -> bool:
        """True iff every path between ``i`` and ``j`` is blocked by ``s``.

        Decided by reachability over (node, entry-direction) states rather
        than path enumeration, so the cost is linear in the graph size.
        """
        s = frozenset(int(v) for v in s)
        self._check_node(i, j, *s)
        if i == j:
            raise ValueError("d-separation query requires two distinct nodes")
        if i in s or j in s:
            raise ValueError("conditioning set must not contain the queried nodes")

        # Ancestors of s (including s): colliders there are opened by s.
        anc_s = set(s)
        stack = list(s)
        while stack:
            v = stack.pop()
            for u in self.parents(v):
                if u not in anc_s:
                    anc_s.add(u)
                    stack.append(u)

        # States: (node, came_from_child). Starting node behaves as if entered
        # from a child, which permits leaving through both parents and children.
        visited = set()
        queue = deque([(i, True)])
        while queue:
            v, from_child = queue.popleft()
            if (v, from_child) in visited:
                continue
            visited.add((v, from_child))
            if v == j:
                return False
            if from_child:
                if v not in s:
                    for u in self.parents(v):
                        queue.append((u, True))
                    for u in self.children(v):
                        queue.append((u, False))
            else:
                if v not in s:
                    for u in self.children(v):
                        queue.append((u, False))
                if v in anc_s:
                    for u in self.parents(v):
                        queue.append((u, True))
        return True


def markov_equivalent(d1: Dag, d2: Dag) -> bool:
    """True iff the two DAGs have the same skeleton and the same v-structures."""
    if d1.p != d2.p:
        raise ValueError("DAGs must have the same node count")
    if set(d1.edge_pairs()) != set(d2.edge_pairs()):
        return False
    return d1.v_structures() == d2.v_structures()
