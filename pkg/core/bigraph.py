"""
Finite bipartite graphs: maximum matching (Hopcroft-Karp), Hall checks with
witnesses, and bottleneck (min-max weight) perfect matching.

Left vertices are 0..left_count-1, right vertices 0..right_count-1.
Adjacency lists are sorted and scanned in ascending order, so every result is
reproducible for a fixed input.
"""
import math
from collections import deque
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple, Union

from utils.logger import log
from .errors import InputError

Edge = Tuple[int, int]
Weight = Union[int, float, Fraction]

# Formally infinite BFS layer
INF = math.inf


class Side(str, Enum):
    LEFT = "left"
    RIGHT = "right"

    @property
    def other(self) -> "Side":
        return Side.RIGHT if self is Side.LEFT else Side.LEFT


@dataclass(frozen=True)
class FiniteBigraph:
    """
    Explicit finite bipartite graph. Edges are stored sorted; weights, when
    present, are aligned with the sorted edge tuple.
    """
    left_count: int
    right_count: int
    edges: Tuple[Edge, ...]
    weights: Optional[Tuple[Weight, ...]] = None

    def __post_init__(self):
        if self.left_count < 0 or self.right_count < 0:
            raise InputError("Vertex counts must be non-negative")
        if self.weights is not None and len(self.weights) != len(self.edges):
            raise InputError("Every edge needs exactly one weight")
        seen = set()
        for i, j in self.edges:
            if not (0 <= i < self.left_count and 0 <= j < self.right_count):
                raise InputError(f"Edge ({i}, {j}) out of bounds for a "
                                 f"{self.left_count}x{self.right_count} graph")
            if (i, j) in seen:
                raise InputError(f"Duplicate edge ({i}, {j})")
            seen.add((i, j))
        if self.weights is not None:
            for w in self.weights:
                if isinstance(w, float) and not math.isfinite(w):
                    raise InputError(f"Edge weight must be finite, got {w}")
                if w < 0:
                    raise InputError(f"Edge weight must be >= 0, got {w}")

    @classmethod
    def build(cls, left_count: int, right_count: int, edges: Iterable[Edge],
              weights: Optional[Iterable[Weight]] = None) -> "FiniteBigraph":
        """Build from edges in any order, sorting edges (and weights with them)."""
        edges = [(int(i), int(j)) for i, j in edges]
        if weights is None:
            return cls(left_count, right_count, tuple(sorted(edges)))
        weights = list(weights)
        if len(weights) != len(edges):
            raise InputError("Every edge needs exactly one weight")
        order = sorted(range(len(edges)), key=lambda k: edges[k])
        return cls(left_count, right_count,
                   tuple(edges[k] for k in order), tuple(weights[k] for k in order))

    @classmethod
    def complete(cls, left_count: int, right_count: int) -> "FiniteBigraph":
        return cls(left_count, right_count,
                   tuple((i, j) for i in range(left_count) for j in range(right_count)))

    @property
    def weighted(self) -> bool:
        return self.weights is not None

    def count(self, side: Side) -> int:
        return self.left_count if side is Side.LEFT else self.right_count

    @cached_property
    def adj_left(self) -> Tuple[Tuple[int, ...], ...]:
        adj: List[List[int]] = [[] for _ in range(self.left_count)]
        for i, j in self.edges:
            adj[i].append(j)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def adj_right(self) -> Tuple[Tuple[int, ...], ...]:
        adj: List[List[int]] = [[] for _ in range(self.right_count)]
        for i, j in self.edges:
            adj[j].append(i)
        return tuple(tuple(sorted(a)) for a in adj)

    @cached_property
    def edge_set(self) -> FrozenSet[Edge]:
        return frozenset(self.edges)

    def adjacency(self, side: Side) -> Tuple[Tuple[int, ...], ...]:
        return self.adj_left if side is Side.LEFT else self.adj_right

    def weight_of(self, edge: Edge) -> Weight:
        if not self.weighted:
            raise InputError("Graph has no weights")
        return self._weight_map[edge]

    @cached_property
    def _weight_map(self) -> Dict[Edge, Weight]:
        return dict(zip(self.edges, self.weights or ()))

    def transpose(self) -> "FiniteBigraph":
        """Swap the two sides."""
        return FiniteBigraph.build(self.right_count, self.left_count,
                                   [(j, i) for i, j in self.edges], self.weights)

    def subgraph(self, max_weight: Weight) -> "FiniteBigraph":
        """Keep only the edges of weight <= max_weight (weights dropped)."""
        if not self.weighted:
            raise InputError("Graph has no weights")
        kept = tuple(e for e, w in zip(self.edges, self.weights) if w <= max_weight)
        return FiniteBigraph(self.left_count, self.right_count, kept)


@dataclass(frozen=True)
class Matching:
    """Set of (left, right) pairs, kept sorted."""
    pairs: Tuple[Edge, ...]

    @classmethod
    def of(cls, pairs: Iterable[Edge]) -> "Matching":
        return cls(tuple(sorted((int(i), int(j)) for i, j in pairs)))

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @cached_property
    def left_map(self) -> Dict[int, int]:
        return {i: j for i, j in self.pairs}

    @cached_property
    def right_map(self) -> Dict[int, int]:
        return {j: i for i, j in self.pairs}

    def covered(self, side: Side) -> FrozenSet[int]:
        return frozenset(self.left_map if side is Side.LEFT else self.right_map)


@dataclass(frozen=True)
class HallWitness:
    """Certified Hall violation: |subset| > |neighborhood(subset)| on one side."""
    side: Side
    subset: Tuple[int, ...]
    neighborhood_size: int

    @property
    def deficiency(self) -> int:
        return len(self.subset) - self.neighborhood_size


@dataclass(frozen=True)
class BottleneckResult:
    threshold: Weight
    matching: Matching


def _check_indices(g: FiniteBigraph, side: Side, subset: Iterable[int]) -> List[int]:
    limit = g.count(side)
    indices = []
    for v in subset:
        if not (0 <= v < limit):
            raise InputError(f"{side.value} index {v} out of bounds (size {limit})")
        indices.append(v)
    return indices


def neighborhood(g: FiniteBigraph, side: Side, subset: Iterable[int]) -> FrozenSet[int]:
    """E(X): all vertices of the other side adjacent to some vertex of subset."""
    side = Side(side)
    adj = g.adjacency(side)
    result = set()
    for v in _check_indices(g, side, subset):
        result.update(adj[v])
    return frozenset(result)


class HopcroftKarp:
    """
    Hopcroft-Karp maximum matching with sorted adjacency and ascending scans.
    The augmenting DFS is iterative, so long alternating paths on large
    windows do not hit the recursion limit.
    """

    def __init__(self, graph: FiniteBigraph):
        self.graph = graph
        self.adj = graph.adj_left
        self.pair_left = [-1] * graph.left_count
        self.pair_right = [-1] * graph.right_count
        self.dist: List[float] = [INF] * graph.left_count
        self.limit = INF

    def _bfs(self) -> bool:
        queue = deque()
        for u in range(self.graph.left_count):
            if self.pair_left[u] == -1:
                self.dist[u] = 0
                queue.append(u)
            else:
                self.dist[u] = INF
        self.limit = INF
        while queue:
            u = queue.popleft()
            if self.dist[u] >= self.limit:
                continue
            for v in self.adj[u]:
                w = self.pair_right[v]
                if w == -1:
                    if self.limit == INF:
                        self.limit = self.dist[u] + 1
                elif self.dist[w] == INF:
                    self.dist[w] = self.dist[u] + 1
                    queue.append(w)
        return self.limit != INF

    def _augment(self, root: int, pointer: List[int]) -> bool:
        stack = [root]
        path: List[int] = []
        while stack:
            u = stack[-1]
            advanced = False
            neighbors = self.adj[u]
            while pointer[u] < len(neighbors):
                v = neighbors[pointer[u]]
                pointer[u] += 1
                w = self.pair_right[v]
                if w == -1:
                    if self.dist[u] + 1 == self.limit:
                        path.append(v)
                        for uu, vv in zip(stack, path):
                            self.pair_left[uu] = vv
                            self.pair_right[vv] = uu
                        return True
                elif self.dist[w] == self.dist[u] + 1:
                    path.append(v)
                    stack.append(w)
                    advanced = True
                    break
            if not advanced:
                self.dist[u] = INF
                stack.pop()
                if path:
                    path.pop()
        return False

    def run(self) -> Matching:
        size = 0
        while self._bfs():
            pointer = [0] * self.graph.left_count
            for u in range(self.graph.left_count):
                if self.pair_left[u] == -1 and self._augment(u, pointer):
                    size += 1
        log.debug(f"Hopcroft-Karp: {self.graph.left_count}x{self.graph.right_count}, "
                  f"{len(self.graph.edges)} edges, matching {size}")
        return Matching(tuple((u, v) for u, v in enumerate(self.pair_left) if v != -1))


def max_matching(g: FiniteBigraph) -> Matching:
    """Maximum-cardinality matching; deterministic for a fixed graph."""
    return HopcroftKarp(g).run()


def validate_matching(g: FiniteBigraph, m: Matching):
    """Raise InputError unless m is a matching of g."""
    lefts, rights = set(), set()
    for i, j in m.pairs:
        if (i, j) not in g.edge_set:
            raise InputError(f"Pair ({i}, {j}) is not an edge of the graph")
        if i in lefts or j in rights:
            raise InputError(f"Pair ({i}, {j}) reuses a matched vertex")
        lefts.add(i)
        rights.add(j)


def _alternating_witness(g: FiniteBigraph, m: Matching) -> Optional[HallWitness]:
    """
    Left-side witness from a maximum matching: the left vertices reachable
    from unmatched left vertices by alternating paths. Every right vertex
    reached is matched back into the set, so |N(Z)| = |Z| - #unmatched.
    """
    matched = m.left_map
    partner = m.right_map
    free = [u for u in range(g.left_count) if u not in matched]
    if not free:
        return None
    reached_left = set(free)
    reached_right = set()
    queue = deque(free)
    while queue:
        u = queue.popleft()
        for v in g.adj_left[u]:
            if v in reached_right:
                continue
            reached_right.add(v)
            w = partner.get(v)
            if w is not None and w not in reached_left:
                reached_left.add(w)
                queue.append(w)
    return HallWitness(Side.LEFT, tuple(sorted(reached_left)), len(reached_right))


def hall_check(g: FiniteBigraph, side: Side) -> Optional[HallWitness]:
    """None when every subset S of `side` has |S| <= |E(S)|, else a witness."""
    side = Side(side)
    oriented = g if side is Side.LEFT else g.transpose()
    witness = _alternating_witness(oriented, max_matching(oriented))
    if witness is None:
        return None
    return HallWitness(side, witness.subset, witness.neighborhood_size)


def is_perfect(g: FiniteBigraph, m: Matching) -> bool:
    validate_matching(g, m)
    return len(m) == g.left_count and len(m) == g.right_count


def deficiency(g: FiniteBigraph) -> int:
    """max over left subsets S of |S| - |E(S)| (König), via the matching size."""
    return g.left_count - len(max_matching(g))


def bottleneck_matching(g: FiniteBigraph) -> Optional[BottleneckResult]:
    """
    Perfect matching minimizing the largest edge weight used. Binary search
    over the sorted distinct weights; None when g has no perfect matching.
    """
    if not g.weighted:
        raise InputError("Bottleneck matching needs a weight on every edge")
    if g.left_count != g.right_count:
        return None
    if g.left_count == 0:
        return BottleneckResult(0, Matching(()))

    candidates: Sequence[Weight] = sorted(set(g.weights))
    full = max_matching(g)
    if len(full) != g.left_count:
        return None

    # invariant: best is a perfect matching within candidates[hi]
    lo, hi = 0, len(candidates) - 1
    best = full
    while lo < hi:
        mid = (lo + hi) // 2
        m = max_matching(g.subgraph(candidates[mid]))
        if len(m) == g.left_count:
            hi = mid
            best = m
        else:
            lo = mid + 1
    log.debug(f"Bottleneck threshold {candidates[lo]} over {len(candidates)} candidate weights")
    return BottleneckResult(candidates[lo], best)
