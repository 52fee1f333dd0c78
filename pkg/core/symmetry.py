"""
G-symmetric bipartite graphs presented by orbit-representative triples.

A triple (i, g, j) stands for the edge orbit {((h, i), (h*g, j)) | h in G}:
vertex (h, i) is the translate by h of the i-th A-orbit representative, and
G acts by left multiplication on the group coordinate of both sides.
The factor graph is then a pure reindexing of the triples.
"""
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from utils.logger import log
from .bigraph import (
    FiniteBigraph, HallWitness, Matching, Side, hall_check, is_perfect, max_matching,
    neighborhood,
)
from .config import MAX_WORKERS, PROBE_MAX_ORBITS
from .errors import InputError
from .groups import FiniteSubset, GroupDescriptor, GroupElem, ball, compose, inverse, product_set

Triple = Tuple[int, GroupElem, int]
OrbitPair = Tuple[int, int]
Vertex = Tuple[GroupElem, int]


@dataclass(frozen=True)
class SymGraph:
    """Finite presentation of a G-symmetric bipartite graph."""
    group: GroupDescriptor
    a_orbits: int
    b_orbits: int
    triples: Tuple[Triple, ...]

    def __post_init__(self):
        if self.a_orbits < 0 or self.b_orbits < 0:
            raise InputError("Orbit counts must be non-negative")
        seen = set()
        for i, g, j in self.triples:
            if not (0 <= i < self.a_orbits and 0 <= j < self.b_orbits):
                raise InputError(f"Triple ({i}, {g}, {j}) out of bounds for "
                                 f"{self.a_orbits} A-orbits and {self.b_orbits} B-orbits")
            if not isinstance(g, GroupElem) or g.group != self.group:
                raise InputError(f"Triple element {g!r} is not in {self.group.label}")
            if (i, g, j) in seen:
                # would present the same edge twice, identifying vertices
                raise InputError(f"Duplicate triple ({i}, {g}, {j})")
            seen.add((i, g, j))
        object.__setattr__(self, "triples", tuple(sorted(self.triples, key=triple_key)))

    @cached_property
    def by_left(self) -> Tuple[Tuple[Tuple[GroupElem, int], ...], ...]:
        """For each A-orbit i, its (g, j) pairs: (h, i) ~ (h*g, j)."""
        rows: List[List[Tuple[GroupElem, int]]] = [[] for _ in range(self.a_orbits)]
        for i, g, j in self.triples:
            rows[i].append((g, j))
        return tuple(tuple(r) for r in rows)

    @cached_property
    def by_right(self) -> Tuple[Tuple[Tuple[GroupElem, int], ...], ...]:
        """For each B-orbit j, its (g^-1, i) pairs: (h, j) ~ (h*g^-1, i)."""
        rows: List[List[Tuple[GroupElem, int]]] = [[] for _ in range(self.b_orbits)]
        for i, g, j in self.triples:
            rows[j].append((inverse(g), i))
        return tuple(tuple(r) for r in rows)

    def orbits(self, side: Side) -> int:
        return self.a_orbits if side is Side.LEFT else self.b_orbits


def triple_key(t: Triple):
    i, g, j = t
    return (i, g.sort_key, j)


@dataclass(frozen=True)
class FactorGraph:
    """Quotient graph on orbits; multiplicity lists the g of every triple on (i, j)."""
    underlying: FiniteBigraph
    multiplicity: Mapping[OrbitPair, Tuple[GroupElem, ...]]


@dataclass(frozen=True)
class SymMatching:
    """G-symmetric matching: one chosen g per matched factor edge."""
    chosen: Tuple[Tuple[OrbitPair, GroupElem], ...]

    def __len__(self) -> int:
        return len(self.chosen)

    def as_dict(self) -> Dict[OrbitPair, GroupElem]:
        return dict(self.chosen)


@dataclass(frozen=True)
class WindowGraph:
    """
    Finite piece of a SymGraph over a window of group elements. Interior
    vertices have all their presented neighbors inside the window.
    """
    graph: FiniteBigraph
    left_labels: Tuple[Vertex, ...]
    right_labels: Tuple[Vertex, ...]
    interior_left: FrozenSet[int]
    interior_right: FrozenSet[int]

    def labels(self, side: Side) -> Tuple[Vertex, ...]:
        return self.left_labels if side is Side.LEFT else self.right_labels

    def interior(self, side: Side) -> FrozenSet[int]:
        return self.interior_left if side is Side.LEFT else self.interior_right

    @cached_property
    def left_index(self) -> Dict[Vertex, int]:
        return {label: k for k, label in enumerate(self.left_labels)}

    @cached_property
    def right_index(self) -> Dict[Vertex, int]:
        return {label: k for k, label in enumerate(self.right_labels)}


def factor(sg: SymGraph) -> FactorGraph:
    """Factor edge (i, j) iff some triple (i, ., j); multiplicities collect the g."""
    multiplicity: Dict[OrbitPair, List[GroupElem]] = {}
    for i, g, j in sg.triples:
        multiplicity.setdefault((i, j), []).append(g)
    frozen = {pair: tuple(sorted(gs)) for pair, gs in sorted(multiplicity.items())}
    graph = FiniteBigraph(sg.a_orbits, sg.b_orbits, tuple(frozen))
    return FactorGraph(graph, frozen)


def is_proper(sg: SymGraph) -> bool:
    """
    Proper iff every orbit pair carries at most one triple. Two triples
    (i, g1, j), (i, g2, j) put (h g1 g2^-1, i) and (h, i) on the common
    neighbor (h g1, j), and those two differ by a non-identity translate.
    """
    return all(len(gs) == 1 for gs in factor(sg).multiplicity.values())


def materialize(sg: SymGraph, window: FiniteSubset) -> WindowGraph:
    """Vertices (h, i) for h in window; edges ((h, i), (h g, j)) with both ends inside."""
    if window.group != sg.group:
        raise InputError(f"Window group {window.group.label} does not match {sg.group.label}")
    if len(window) == 0:
        raise InputError("Window must be non-empty")

    left_labels = tuple((h, i) for h in window for i in range(sg.a_orbits))
    right_labels = tuple((h, j) for h in window for j in range(sg.b_orbits))
    position = {h: k for k, h in enumerate(window)}

    edges = []
    interior_left = set()
    for h in window:
        base = position[h]
        for i in range(sg.a_orbits):
            inside = True
            for g, j in sg.by_left[i]:
                target = position.get(compose(h, g))
                if target is None:
                    inside = False
                    continue
                edges.append((base * sg.a_orbits + i, target * sg.b_orbits + j))
            if inside:
                interior_left.add(base * sg.a_orbits + i)

    interior_right = set()
    for h in window:
        base = position[h]
        for j in range(sg.b_orbits):
            if all(compose(h, g_inv) in position for g_inv, _ in sg.by_right[j]):
                interior_right.add(base * sg.b_orbits + j)

    graph = FiniteBigraph.build(len(left_labels), len(right_labels), edges)
    log.debug(f"Materialized {len(window)} group elements: {graph.left_count}+{graph.right_count} "
              f"vertices, {len(graph.edges)} edges")
    return WindowGraph(graph, left_labels, right_labels,
                       frozenset(interior_left), frozenset(interior_right))


def lift(sg: SymGraph, fm: Matching,
         choice: Optional[Mapping[OrbitPair, GroupElem]] = None) -> SymMatching:
    """
    Lift a factor matching to a symmetric matching, taking the chosen g per
    edge (default: first in canonical order; forced on proper graphs).
    """
    fg = factor(sg)
    choice = choice or {}
    lefts, rights = set(), set()
    chosen = []
    for pair in fm.pairs:
        if pair not in fg.multiplicity:
            raise InputError(f"{pair} is not an edge of the factor graph")
        i, j = pair
        if i in lefts or j in rights:
            raise InputError(f"{pair} reuses a matched orbit")
        lefts.add(i)
        rights.add(j)
        g = choice.get(pair, fg.multiplicity[pair][0])
        if g not in fg.multiplicity[pair]:
            raise InputError(f"{g} is not in the multiplicity list of {pair}")
        chosen.append((pair, g))
    return SymMatching(tuple(sorted(chosen, key=lambda c: c[0])))


def project(sm: SymMatching) -> Matching:
    """Forget the chosen group elements: the factor matching."""
    return Matching.of(pair for pair, _ in sm.chosen)


def materialize_matching(sg: SymGraph, sm: SymMatching, wg: WindowGraph) -> Matching:
    """Restriction of the symmetric matching to a materialized window."""
    pairs = []
    for (i, j), g in sm.chosen:
        for h, orbit in wg.left_labels:
            if orbit != i:
                continue
            target = wg.right_index.get((compose(h, g), j))
            if target is not None:
                pairs.append((wg.left_index[(h, i)], target))
    return Matching.of(pairs)


def interior_coverage(wg: WindowGraph, m: Matching) -> Tuple[FrozenSet[int], FrozenSet[int]]:
    """Interior vertices (left, right) that m leaves uncovered."""
    return (wg.interior_left - m.covered(Side.LEFT),
            wg.interior_right - m.covered(Side.RIGHT))


def restricted_hall_check(graph: FiniteBigraph, side: Side,
                          vertices: Iterable[int]) -> Optional[HallWitness]:
    """Hall check over the subsets of `vertices` only; indices refer to `graph`."""
    side = Side(side)
    chosen = sorted(set(vertices))
    adjacency = graph.adjacency(side)
    reindex = {v: k for k, v in enumerate(chosen)}
    edges = [(reindex[v], w) for v in chosen for w in adjacency[v]]
    sub = FiniteBigraph.build(len(chosen), graph.count(side.other), edges)
    witness = hall_check(sub, Side.LEFT)
    if witness is None:
        return None
    return HallWitness(side, tuple(chosen[k] for k in witness.subset), witness.neighborhood_size)


def interior_hall_check(wg: WindowGraph, side: Side) -> Optional[HallWitness]:
    """
    Hall check restricted to interior vertices of `side`. Their neighborhoods
    are complete inside the window, so a witness is a genuine violation of
    the infinite graph. Subset indices refer to the window graph.
    """
    side = Side(side)
    return restricted_hall_check(wg.graph, side, wg.interior(side))


def properness_oracle(sg: SymGraph, radius: int) -> Optional[Tuple[Vertex, Vertex, Vertex]]:
    """
    Window search for edges (x, y) and (g x, y) with g != e. Returns
    (x, g x, y) for the first hit over ball(radius), None if there is none.
    """
    wg = materialize(sg, ball(sg.group, radius))
    for y, neighbors in enumerate(wg.graph.adj_right):
        by_orbit: Dict[int, Vertex] = {}
        for x in neighbors:
            h, i = wg.left_labels[x]
            if i in by_orbit:
                return by_orbit[i], (h, i), wg.right_labels[y]
            by_orbit[i] = (h, i)
    return None


def symmetric_perfect_matching(sg: SymGraph) -> Union[SymMatching, HallWitness]:
    """
    Perfect G-symmetric matching via the factor graph, or a Hall witness of
    the factor (left side checked first). Equivalent to a perfect matching of
    the whole graph when G is amenable.
    """
    fg = factor(sg)
    fm = max_matching(fg.underlying)
    if is_perfect(fg.underlying, fm):
        return lift(sg, fm)
    for side in (Side.LEFT, Side.RIGHT):
        witness = hall_check(fg.underlying, side)
        if witness is not None:
            return witness
    raise AssertionError("imperfect maximum matching without a Hall witness")


# =============================================================================
# WINDOW HALL PROBE
# =============================================================================

@dataclass(frozen=True)
class HallProbeRow:
    window: str
    orbit_subset: Tuple[int, ...]
    neighborhood: Tuple[int, ...]
    u_size: int
    f_size: int
    fu_size: int
    lhs: int          # |F| * |X|
    rhs: int          # |FU| * |Y|
    ratio: Fraction   # |FU| / |F|
    certifies: bool   # |X| <= ratio * |Y| forces |X| <= |Y|


@dataclass(frozen=True)
class HallProbeReport:
    side: Side
    rows: Tuple[HallProbeRow, ...]
    factor_witness: Optional[HallWitness]
    interior_violations: Tuple[Tuple[str, HallWitness], ...] = field(default=())


def _translation_set(sg: SymGraph, side: Side, orbit_subset: Sequence[int]) -> FiniteSubset:
    """Smallest U with E(X) in U Y, X and Y the identity representatives."""
    rows = sg.by_left if side is Side.LEFT else sg.by_right
    return FiniteSubset.of(sg.group, (g for k in orbit_subset for g, _ in rows[k]))


def _probe_window(sg: SymGraph, side: Side, label: str, window: FiniteSubset,
                  subsets: Sequence[Tuple[Tuple[int, ...], Tuple[int, ...], FiniteSubset]]):
    rows = []
    for orbit_subset, nbhd, u in subsets:
        fu = product_set(window, u) if len(u) else FiniteSubset(sg.group, ())
        f_size, fu_size = len(window), len(fu)
        x, y = len(orbit_subset), len(nbhd)
        ratio = Fraction(fu_size, f_size)
        rows.append(HallProbeRow(
            window=label, orbit_subset=orbit_subset, neighborhood=nbhd,
            u_size=len(u), f_size=f_size, fu_size=fu_size,
            lhs=f_size * x, rhs=fu_size * y, ratio=ratio,
            certifies=fu_size * y < (y + 1) * f_size,
        ))
    witness = interior_hall_check(materialize(sg, window), side)
    return rows, witness


def window_hall_probe(sg: SymGraph, windows: Sequence[Tuple[str, FiniteSubset]],
                      side: Side = Side.LEFT, max_workers: int = MAX_WORKERS) -> HallProbeReport:
    """
    Empirical check of the counting chain |F||X| <= |FU||Y| for every window F
    and every non-empty orbit subset X~ of `side`, plus interior Hall
    violations of each materialized window. Windows are evaluated
    independently; rows come back in window order.
    """
    side = Side(side)
    count = sg.orbits(side)
    if count > PROBE_MAX_ORBITS:
        raise InputError(f"Probe enumerates all orbit subsets; {count} orbits exceed the cap of {PROBE_MAX_ORBITS}")
    for label, window in windows:
        if len(window) == 0:
            raise InputError(f"Window {label} is empty")

    fg = factor(sg)
    subsets = []
    for size in range(1, count + 1):
        for orbit_subset in itertools.combinations(range(count), size):
            nbhd = tuple(sorted(neighborhood(fg.underlying, side, orbit_subset)))
            subsets.append((orbit_subset, nbhd, _translation_set(sg, side, orbit_subset)))

    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = [executor.submit(_probe_window, sg, side, label, window, subsets)
                   for label, window in windows]
        results = [f.result() for f in futures]

    rows: List[HallProbeRow] = []
    violations = []
    for (label, _), (window_rows, witness) in zip(windows, results):
        rows.extend(window_rows)
        if witness is not None:
            log.debug(f"Interior Hall violation in window {label}: "
                      f"{len(witness.subset)} > {witness.neighborhood_size}")
            violations.append((label, witness))
    return HallProbeReport(side, tuple(rows), hall_check(fg.underlying, side), tuple(violations))


def interior_violation(sg: SymGraph, window: FiniteSubset) -> Optional[HallWitness]:
    """First interior Hall violation of the materialized window, left side first."""
    wg = materialize(sg, window)
    for side in (Side.LEFT, Side.RIGHT):
        witness = interior_hall_check(wg, side)
        if witness is not None:
            return witness
    return None

