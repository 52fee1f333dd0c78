"""
Seeded property checks over random instances.

Generators are zero-argument closures over one random.Random, combined the
way small QuickCheck ports do; every property returns the counterexamples it
found, so a run with the same seed reproduces the same report.
"""
import random
import traceback
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from tqdm import tqdm

from utils.logger import log
from .amenability import ParadoxCertificate, standard_f2_paradox, verify_paradox
from .bigraph import FiniteBigraph, Side, hall_check, is_perfect, max_matching
from .counterexample import build_counterexample, verify_window
from .groups import Family, GroupDescriptor, GroupElem, ball, compose, inverse
from .symmetry import (
    SymGraph, factor, interior_coverage, interior_violation, lift, materialize,
    materialize_matching, project,
)

Gen = Callable[[], object]

SHOWN_COUNTEREXAMPLES = 5


def gen_range(rng: random.Random, start: int, stop: int) -> Gen:
    return lambda: rng.randint(start, stop)


def gen_choice(rng: random.Random, options: Sequence) -> Gen:
    return lambda: rng.choice(list(options))


def gen_bigraph(rng: random.Random, max_left: int, max_right: int) -> Gen:
    left_count = gen_range(rng, 0, max_left)
    right_count = gen_range(rng, 0, max_right)

    def a_graph():
        left, right = left_count(), right_count()
        density = rng.random()
        edges = [(i, j) for i in range(left) for j in range(right) if rng.random() < density]
        return FiniteBigraph.build(left, right, edges)
    return a_graph


def small_groups() -> List[Tuple[GroupDescriptor, List]]:
    """Amenable groups with offsets for random triples."""
    z1 = GroupDescriptor(Family.ZD, 1)
    z2 = GroupDescriptor(Family.ZD, 2)
    families = [
        (z1, [z1.elem((v,)) for v in (-1, 0, 1)]),
        (z2, [z2.elem((x, y)) for x in (0, 1) for y in (0, 1)]),
    ]
    for n in range(1, 9):
        cyc = GroupDescriptor(Family.CYCLIC, n)
        families.append((cyc, [cyc.elem(v) for v in range(n)]))
    return families


def gen_proper_symgraph(rng: random.Random, max_orbits: int = 4, max_triples: int = 12) -> Gen:
    """Random SymGraph with at most one triple per orbit pair."""
    family = gen_choice(rng, small_groups())
    orbit_count = gen_range(rng, 1, max_orbits)

    def a_symgraph():
        group, offsets = family()
        a = orbit_count()
        b = a if rng.random() < 0.75 else orbit_count()
        pairs = [(i, j) for i in range(a) for j in range(b)]
        rng.shuffle(pairs)
        chosen = pairs[:rng.randint(0, min(max_triples, len(pairs)))]
        triples = tuple((i, rng.choice(offsets), j) for i, j in chosen)
        return SymGraph(group, a, b, triples)
    return a_symgraph


def law_groups() -> List[GroupDescriptor]:
    """One or two groups of every family, including the trivial Z_1 and F_1."""
    shapes = [(Family.ZD, 1), (Family.ZD, 3), (Family.CYCLIC, 1), (Family.CYCLIC, 2), (Family.CYCLIC, 7),
              (Family.FREE, 1), (Family.FREE, 2), (Family.FREE, 3)]
    return [GroupDescriptor(family, param) for family, param in shapes]


def gen_group_elem(rng: random.Random, desc: GroupDescriptor, reach: int = 6) -> Gen:
    """Vectors with negative coordinates, residues from any integer, unreduced words."""
    if desc.family is Family.ZD:
        return lambda: desc.elem(tuple(rng.randint(-reach, reach) for _ in range(desc.param)))
    if desc.family is Family.CYCLIC:
        return lambda: desc.elem(rng.randint(-reach * desc.param, reach * desc.param))
    return lambda: desc.elem("".join(rng.choice(desc.letters) for _ in range(rng.randint(0, reach))))


def gen_group_triple(rng: random.Random, groups: Optional[Sequence[GroupDescriptor]] = None) -> Gen:
    pick = gen_choice(rng, groups or law_groups())

    def a_triple():
        elem = gen_group_elem(rng, pick())
        return elem(), elem(), elem()
    return a_triple


def brute_force_matching_size(g: FiniteBigraph) -> int:
    """Exhaustive search over left vertices in order."""
    adjacency = g.adj_left

    def best(u: int, used: frozenset) -> int:
        if u == g.left_count:
            return 0
        result = best(u + 1, used)
        for v in adjacency[u]:
            if v not in used:
                result = max(result, 1 + best(u + 1, used | {v}))
        return result

    return best(0, frozenset())


# =============================================================================
# PROPERTIES
# =============================================================================

def prop_group_laws(triple: Tuple[GroupElem, GroupElem, GroupElem]) -> bool:
    x, y, z = triple
    e = x.group.identity()
    return (
        compose(compose(x, y), z) == compose(x, compose(y, z))
        and compose(x, e) == x == compose(e, x)
        and compose(x, inverse(x)).is_identity
        and compose(inverse(x), x).is_identity
        and inverse(compose(x, y)) == compose(inverse(y), inverse(x))
    )


def prop_matching_is_maximum(g: FiniteBigraph) -> bool:
    return len(max_matching(g)) == brute_force_matching_size(g)


def prop_finite_hall(g: FiniteBigraph) -> bool:
    covers_left = len(max_matching(g)) == g.left_count
    return (hall_check(g, Side.LEFT) is None) == covers_left


def prop_factor_correspondence(sg: SymGraph, radius: int = 4) -> bool:
    fg = factor(sg)
    fm = max_matching(fg.underlying)
    sm = lift(sg, fm)
    if project(sm) != fm or lift(sg, project(sm), sm.as_dict()) != sm:
        return False
    if not is_perfect(fg.underlying, fm):
        return True
    wg = materialize(sg, ball(sg.group, radius))
    uncovered_left, uncovered_right = interior_coverage(wg, materialize_matching(sg, sm, wg))
    return not uncovered_left and not uncovered_right


def prop_main_theorem(sg: SymGraph, radii: Sequence[int] = (2, 4)) -> bool:
    """Factor perfect iff no window shows an interior Hall violation."""
    fg = factor(sg)
    factor_perfect = is_perfect(fg.underlying, max_matching(fg.underlying))
    violation = any(interior_violation(sg, ball(sg.group, r)) is not None for r in radii)
    return factor_perfect != violation


@dataclass
class PropertyResult:
    name: str
    cases: int
    failures: int
    counterexamples: List[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {"property": self.name, "cases": self.cases, "failures": self.failures,
                "counterexamples": self.counterexamples}


def check(name: str, predicate: Callable[[object], bool], generator: Gen, count: int,
          progress: Optional[tqdm] = None) -> PropertyResult:
    result = PropertyResult(name, count, 0)
    for _ in range(count):
        case = generator()
        try:
            ok = predicate(case)
            failure = None if ok else repr(case)
        except Exception:
            failure = f"{case!r} : {traceback.format_exc(limit=1).strip()}"
        if failure is not None:
            result.failures += 1
            if len(result.counterexamples) < SHOWN_COUNTEREXAMPLES:
                result.counterexamples.append(failure)
        if progress is not None:
            progress.update(1)
    return result


def run_selftest(seed: int, count: int) -> Dict:
    """Run every property with `count` cases each, plus the fixed certificates."""
    rng = random.Random(seed)
    properties = [
        ("max_matching_equals_brute_force", prop_matching_is_maximum, gen_bigraph(rng, 5, 5)),
        ("finite_hall_theorem", prop_finite_hall, gen_bigraph(rng, 6, 6)),
        ("factor_correspondence", prop_factor_correspondence, gen_proper_symgraph(rng)),
        ("main_theorem_amenable", prop_main_theorem, gen_proper_symgraph(rng)),
        ("group_laws", prop_group_laws, gen_group_triple(rng)),
    ]
    results = []
    with tqdm(total=count * len(properties), desc="selftest", unit="case",
              disable=log.level == 0, leave=False) as progress:
        for name, predicate, generator in properties:
            result = check(name, predicate, generator, count, progress)
            results.append(result)
            if result.failures:
                log.warning(f"{name}: {result.failures} of {count} cases failed")

    certificates = []
    paradox = verify_paradox(standard_f2_paradox(), 4)
    certificates.append({"check": "paradox_radius_4", "ok": isinstance(paradox, ParadoxCertificate)})
    mutated = verify_paradox(standard_f2_paradox(shift_powers=False), 4)
    certificates.append({"check": "unshifted_paradox_rejected", "ok": not isinstance(mutated, ParadoxCertificate)})
    bundle = build_counterexample()
    window = verify_window(bundle, "ball(2)", ball(bundle.sym_graph.group, 2))
    certificates.append({"check": "counterexample_window_radius_2", "ok": window.ok})

    failures = sum(r.failures for r in results) + sum(1 for c in certificates if not c["ok"])
    return {
        "seed": seed,
        "count": count,
        "properties": [r.to_json() for r in results],
        "certificates": certificates,
        "failures": failures,
    }
