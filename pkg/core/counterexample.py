"""
Proper F_2-symmetric bipartite graph with a perfect matching but no
symmetric perfect matching.

With F the index set of a paradoxical decomposition and phi a Latin square
on F: A = G x F, B = G x F x {1, 2} and
    E = {((x g, phi(g, h)), (x, h, i)) | g, h in F, x in G, i in {1, 2}}.
"""
from collections import Counter
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Set, Tuple

from utils.logger import log
from .amenability import ParadoxDecomp, standard_f2_paradox
from .bigraph import HallWitness, Matching, Side, hall_check, max_matching
from .errors import InputError
from .groups import FiniteSubset, GroupElem, compose, inverse
from .symmetry import SymGraph, WindowGraph, factor, materialize

Vertex = Tuple[GroupElem, int]


@dataclass(frozen=True)
class LatinSquare:
    """phi(g, h) = table[g][h], all entries indices into F."""
    order: int
    table: Tuple[Tuple[int, ...], ...]

    def __post_init__(self):
        if self.order < 1:
            raise InputError("Latin square order must be >= 1")
        if len(self.table) != self.order or any(len(row) != self.order for row in self.table):
            raise InputError(f"Latin square table must be {self.order}x{self.order}")
        for row in self.table:
            for value in row:
                if not 0 <= value < self.order:
                    raise InputError(f"Latin square entry {value} out of range")

    def __call__(self, g: int, h: int) -> int:
        return self.table[g][h]

    def is_latin(self) -> bool:
        full = set(range(self.order))
        rows_ok = all(set(row) == full for row in self.table)
        cols_ok = all({row[c] for row in self.table} == full for c in range(self.order))
        return rows_ok and cols_ok


def cyclic_latin_square(order: int) -> LatinSquare:
    """Cayley table of Z_order: phi(g, h) = g + h mod order."""
    return LatinSquare(order, tuple(tuple((g + h) % order for h in range(order)) for g in range(order)))


def corrupt_latin_square(phi: LatinSquare) -> LatinSquare:
    """Repeat the first entry of row 0 (mutation for verifier tests)."""
    if phi.order < 2:
        raise InputError("Cannot corrupt a Latin square of order 1")
    rows = [list(row) for row in phi.table]
    rows[0][1] = rows[0][0]
    return LatinSquare(phi.order, tuple(tuple(r) for r in rows))


def b_orbit(h_index: int, copy: int) -> int:
    """B-orbit of (h, copy) with copy in {1, 2}."""
    return 2 * h_index + (copy - 1)


@dataclass(frozen=True)
class CounterexampleBundle:
    sym_graph: SymGraph
    decomposition: ParadoxDecomp
    phi: LatinSquare
    twisted: bool = True
    index: Dict[GroupElem, int] = field(default_factory=dict, compare=False)

    @property
    def index_elems(self) -> Tuple[GroupElem, ...]:
        return self.decomposition.index_set.elements

    def a_orbit(self, g: GroupElem, h: GroupElem) -> int:
        if not self.twisted:
            return 0
        return self.phi(self.index[g], self.index[h])

    def b_orbit(self, h: GroupElem, copy: int) -> int:
        if not self.twisted:
            return copy - 1
        return b_orbit(self.index[h], copy)

    def matching(self, window: FiniteSubset) -> Matching:
        return explicit_matching(self, window)


def build_counterexample(p: Optional[ParadoxDecomp] = None, phi: Optional[LatinSquare] = None,
                         twisted: bool = True) -> CounterexampleBundle:
    """
    Encode the edge family as SymGraph triples. Substituting y = x g, the
    edge ((y, phi(g, h)), (y g^-1, h, i)) is the orbit of the triple
    (phi(g, h), g^-1, b_orbit(h, i)). Untwisted: A = G, B = G x {1, 2},
    edges (x g, (x, i)), triples (0, g^-1, i - 1); not proper.
    """
    p = p or standard_f2_paradox()
    elems = p.index_set.elements
    phi = phi or cyclic_latin_square(len(elems))
    if phi.order != len(elems):
        raise InputError(f"Latin square order {phi.order} does not match |F| = {len(elems)}")
    if not phi.is_latin():
        log.warning("phi is not a Latin square; the explicit matching will not be perfect")
    index = {g: k for k, g in enumerate(elems)}

    triples = []
    if twisted:
        for g in elems:
            for h in elems:
                for copy in (1, 2):
                    triples.append((phi(index[g], index[h]), inverse(g), b_orbit(index[h], copy)))
        sg = SymGraph(p.group, len(elems), 2 * len(elems), tuple(triples))
    else:
        for g in elems:
            for copy in (1, 2):
                triples.append((0, inverse(g), copy - 1))
        sg = SymGraph(p.group, 1, 2, tuple(triples))
    log.debug(f"Counterexample graph: {sg.a_orbits} A-orbits, {sg.b_orbits} B-orbits, "
              f"{len(sg.triples)} triples")
    return CounterexampleBundle(sg, p, phi, twisted, index)


def direct_edges(b: CounterexampleBundle, window: FiniteSubset) -> Set[Tuple[Vertex, Vertex]]:
    """Edges of the defining formula with both ends in the window, as labels."""
    edges = set()
    for x in window:
        for g in b.index_elems:
            y = compose(x, g)
            if y not in window:
                continue
            hs = b.index_elems if b.twisted else b.index_elems[:1]
            for h in hs:
                for copy in (1, 2):
                    edges.add(((y, b.a_orbit(g, h)), (x, b.b_orbit(h, copy))))
    return edges


def matching_pairs(b: CounterexampleBundle, window: FiniteSubset) -> List[Tuple[Vertex, Vertex]]:
    """
    Pairs ((x g, phi(g, h)), (x, h, 1)) for g = classify_A(x) and
    ((x g', phi(g', h)), (x, h, 2)) for g' = classify_B(x), both ends in the
    window. Labels, possibly conflicting when phi is not Latin.
    """
    pairs = []
    hs = b.index_elems if b.twisted else b.index_elems[:1]
    for x in window:
        for copy, classify in ((1, b.decomposition.classify_a), (2, b.decomposition.classify_b)):
            g = classify(x)
            y = compose(x, g)
            if y not in window:
                continue
            for h in hs:
                pairs.append(((y, b.a_orbit(g, h)), (x, b.b_orbit(h, copy))))
    return pairs


def _to_indices(wg: WindowGraph, pairs: Iterable[Tuple[Vertex, Vertex]]) -> List[Tuple[int, int]]:
    return [(wg.left_index[a], wg.right_index[bv]) for a, bv in pairs]


def explicit_matching(b: CounterexampleBundle, window: FiniteSubset) -> Matching:
    """The explicit matching restricted to a materialized window."""
    if len(window) == 0:
        return Matching(())
    wg = materialize(b.sym_graph, window)
    pairs = _to_indices(wg, matching_pairs(b, window))
    lefts = Counter(u for u, _ in pairs)
    rights = Counter(v for _, v in pairs)
    if any(c > 1 for c in lefts.values()) or any(c > 1 for c in rights.values()):
        raise InputError("Matching rule produces conflicting pairs; phi or the decomposition is broken")
    return Matching.of(pairs)


@dataclass(frozen=True)
class WindowVerification:
    window: str
    left_vertices: int
    right_vertices: int
    pairs: int
    conflicts: Tuple[str, ...]
    uncovered_left: int
    uncovered_right: int
    interior_left: int
    interior_right: int

    @property
    def ok(self) -> bool:
        return not self.conflicts and self.uncovered_left == 0 and self.uncovered_right == 0

    def to_json(self) -> dict:
        return {
            "window": self.window, "left_vertices": self.left_vertices,
            "right_vertices": self.right_vertices, "pairs": self.pairs,
            "interior_left": self.interior_left, "interior_right": self.interior_right,
            "conflicts": list(self.conflicts),
            "uncovered_left": self.uncovered_left, "uncovered_right": self.uncovered_right,
            "ok": self.ok,
        }


def _label(v: Vertex) -> str:
    return f"({v[0].serialize()},{v[1]})"


def verify_window(b: CounterexampleBundle, label: str, window: FiniteSubset) -> WindowVerification:
    """
    Check the matching rule on one window: every pair is an edge, no vertex is
    used twice, every interior vertex on both sides is covered exactly once.
    """
    wg = materialize(b.sym_graph, window)
    label_pairs = matching_pairs(b, window)
    pairs = _to_indices(wg, label_pairs)

    conflicts = []
    for u, v in pairs:
        if (u, v) not in wg.graph.edge_set:
            conflicts.append(f"non-edge {_label(wg.left_labels[u])}-{_label(wg.right_labels[v])}")
    for side, counts, labels in ((Side.LEFT, Counter(u for u, _ in pairs), wg.left_labels),
                                 (Side.RIGHT, Counter(v for _, v in pairs), wg.right_labels)):
        for vertex, c in sorted(counts.items()):
            if c > 1:
                conflicts.append(f"{side.value} vertex {_label(labels[vertex])} used {c} times")

    covered_left = {u for u, _ in pairs}
    covered_right = {v for _, v in pairs}
    report = WindowVerification(
        window=label,
        left_vertices=wg.graph.left_count,
        right_vertices=wg.graph.right_count,
        pairs=len(pairs),
        conflicts=tuple(conflicts),
        uncovered_left=len(wg.interior_left - covered_left),
        uncovered_right=len(wg.interior_right - covered_right),
        interior_left=len(wg.interior_left),
        interior_right=len(wg.interior_right),
    )
    log.debug(f"Window {label}: {report.pairs} pairs, {len(conflicts)} conflicts, "
              f"{report.uncovered_left}+{report.uncovered_right} uncovered interior vertices")
    return report


def certify_no_symmetric_matching(b: CounterexampleBundle) -> HallWitness:
    """Right-side Hall witness of the factor: 2|F| orbits against |F|."""
    fg = factor(b.sym_graph)
    witness = hall_check(fg.underlying, Side.RIGHT)
    if witness is None:
        raise AssertionError("factor graph unexpectedly satisfies Hall's condition on B")
    log.debug(f"Factor maximum matching: {len(max_matching(fg.underlying))} of {fg.underlying.right_count}")
    return witness
