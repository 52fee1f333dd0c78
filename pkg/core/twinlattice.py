"""
Bounded-displacement matchings between Z^2 and a rotated, translated copy.

Rational rotations (p, q, c) with p^2 + q^2 = c^2 are periodic under the
sublattice L spanned by (p, q) and (-q, p); the problem reduces to a finite
Z^2-symmetric quotient with exact squared distances. Irrational angles are
handled on finite discs in floating point with FLOAT_TOLERANCE.
"""
import math
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from utils.logger import log
from .bigraph import FiniteBigraph, Side, bottleneck_matching
from .config import DEFAULT_GRID_CEILING, DEFAULT_GRID_STEP, FLOAT_TOLERANCE, MAX_WORKERS
from .errors import InfeasibleError, InputError
from .groups import Family, GroupDescriptor, GroupElem, box, compose
from .symmetry import SymGraph, SymMatching, lift, restricted_hall_check

Z2 = GroupDescriptor(Family.ZD, 2)
Point = Tuple[Fraction, Fraction]
Real = Union[int, float, Fraction]


@dataclass(frozen=True)
class RationalRotation:
    """Rotation by the angle with cosine p/c and sine q/c, followed by translation t."""
    p: int
    q: int
    c: int
    t: Point = (Fraction(0), Fraction(0))

    def __post_init__(self):
        if self.c < 1:
            raise InputError(f"c must be >= 1, got {self.c}")
        if self.p * self.p + self.q * self.q != self.c * self.c:
            raise InputError(f"{self.p}^2 + {self.q}^2 != {self.c}^2")
        g = math.gcd(math.gcd(self.p, self.q), self.c)
        object.__setattr__(self, "p", self.p // g)
        object.__setattr__(self, "q", self.q // g)
        object.__setattr__(self, "c", self.c // g)
        object.__setattr__(self, "t", (Fraction(self.t[0]), Fraction(self.t[1])))

    @property
    def angle(self) -> float:
        return math.atan2(self.q, self.p)

    def rotate(self, v: Tuple[int, int]) -> Point:
        x, y = v
        return (Fraction(self.p * x - self.q * y, self.c), Fraction(self.q * x + self.p * y, self.c))

    def image(self, v: Tuple[int, int]) -> Point:
        """R v + t, a point of the second lattice."""
        x, y = self.rotate(v)
        return (x + self.t[0], y + self.t[1])


@dataclass(frozen=True)
class Sublattice:
    basis: Tuple[Tuple[int, int], Tuple[int, int]]
    index: int

    def point(self, g: Tuple[int, int]) -> Tuple[int, int]:
        (a, b), (c, d) = self.basis
        return (g[0] * a + g[1] * c, g[0] * b + g[1] * d)

    def coordinates(self, point: Point) -> Point:
        """Coordinates of a point in the basis, exact."""
        (a, b), (c, d) = self.basis
        x, y = Fraction(point[0]), Fraction(point[1])
        return ((d * x - c * y) / self.index, (-b * x + a * y) / self.index)

    def reduce(self, point: Point) -> Point:
        """Representative with basis coordinates in [0, 1)^2."""
        s, u = self.coordinates(point)
        shift = self.point((math.floor(s), math.floor(u)))
        return (point[0] - shift[0], point[1] - shift[1])


def common_sublattice(rot: RationalRotation) -> Sublattice:
    """L = span{(p, q), (-q, p)}, contained in Z^2 and in R Z^2, index c^2."""
    basis = ((rot.p, rot.q), (-rot.q, rot.p))
    lattice = Sublattice(basis, rot.p * rot.p + rot.q * rot.q)
    # R (c, 0) and R (0, c) are the basis vectors: L is inside R Z^2
    for v, expected in (((rot.c, 0), basis[0]), ((0, rot.c), basis[1])):
        if rot.rotate(v) != (Fraction(expected[0]), Fraction(expected[1])):
            raise AssertionError(f"R{v} != {expected}")
    if lattice.index != rot.c * rot.c:
        raise AssertionError(f"Sublattice index {lattice.index} != {rot.c}^2")
    return lattice


def _squared(r: Real) -> Real:
    if isinstance(r, float):
        return Fraction(r) ** 2 if math.isfinite(r) else r
    return Fraction(r) ** 2


def period_cap(rot: RationalRotation) -> int:
    """Thresholds must stay below the basis length c."""
    return rot.c


@dataclass(frozen=True)
class TwinQuotient:
    rotation: RationalRotation
    lattice: Sublattice
    threshold_squared: Fraction
    a_reps: Tuple[Point, ...]
    b_reps: Tuple[Point, ...]
    sym_graph: SymGraph
    weights: Dict[Tuple[int, GroupElem, int], Fraction]

    def a_point(self, h: GroupElem, i: int) -> Point:
        shift = self.lattice.point(h.value)
        return (self.a_reps[i][0] + shift[0], self.a_reps[i][1] + shift[1])

    def b_point(self, h: GroupElem, j: int) -> Point:
        shift = self.lattice.point(h.value)
        return (self.b_reps[j][0] + shift[0], self.b_reps[j][1] + shift[1])

    def factor_weights(self) -> FiniteBigraph:
        """Factor graph weighted by the least squared distance over each orbit pair."""
        best: Dict[Tuple[int, int], Fraction] = {}
        for (i, _, j), w in self.weights.items():
            if (i, j) not in best or w < best[(i, j)]:
                best[(i, j)] = w
        return FiniteBigraph.build(self.sym_graph.a_orbits, self.sym_graph.b_orbits,
                                   best.keys(), best.values())

    def nearest_choice(self) -> Dict[Tuple[int, int], GroupElem]:
        """Per orbit pair, the g of least weight (ties to canonical order)."""
        choice: Dict[Tuple[int, int], Tuple[Fraction, GroupElem]] = {}
        for (i, g, j), w in sorted(self.weights.items(), key=lambda kv: (kv[0][0], kv[0][1].sort_key, kv[0][2])):
            if (i, j) not in choice or w < choice[(i, j)][0]:
                choice[(i, j)] = (w, g)
        return {pair: g for pair, (_, g) in choice.items()}


def _a_representatives(lattice: Sublattice) -> List[Point]:
    (a, b), (c, d) = lattice.basis
    xs = [0, a, c, a + c]
    ys = [0, b, d, b + d]
    reps = []
    for x in range(min(xs), max(xs) + 1):
        for y in range(min(ys), max(ys) + 1):
            s, u = lattice.coordinates((x, y))
            if 0 <= s < 1 and 0 <= u < 1:
                reps.append((Fraction(x), Fraction(y)))
    return sorted(reps)


def _b_representatives(rot: RationalRotation, lattice: Sublattice) -> List[Point]:
    reps = {lattice.reduce(rot.image((x, y))) for x in range(rot.c) for y in range(rot.c)}
    return sorted(reps)


def quotient_graph(rot: RationalRotation, r: Real) -> TwinQuotient:
    """
    Z^2-symmetric presentation of the distance-<= r graph between Z^2 and
    R Z^2 + t, the group acting through L. Triple (i, g, j) joins A-rep i to
    B-rep j translated by g in L-coordinates; weights are squared distances.
    """
    if r < 0:
        raise InputError(f"Threshold must be >= 0, got {r}")
    cap = period_cap(rot)
    if r >= cap:
        raise InputError(f"Threshold {float(r):.6f} exceeds the single-period cap (must be < {cap})")
    r_squared = _squared(r)
    lattice = common_sublattice(rot)
    a_reps = _a_representatives(lattice)
    b_reps = _b_representatives(rot, lattice)
    if len(a_reps) != lattice.index or len(b_reps) != lattice.index:
        raise AssertionError(f"expected {lattice.index} representatives, got {len(a_reps)} and {len(b_reps)}")

    # |L v| = c |v| and r < c: a translate within r has L-coordinates within 1 of a - b
    r_float = float(r)
    triples = []
    weights = {}
    for i, (ax, ay) in enumerate(a_reps):
        for j, (bx, by) in enumerate(b_reps):
            s, u = lattice.coordinates((ax - bx, ay - by))
            for gx in range(math.floor(s) - 1, math.floor(s) + 3):
                for gy in range(math.floor(u) - 1, math.floor(u) + 3):
                    sx, sy = lattice.point((gx, gy))
                    dx, dy = bx + sx - ax, by + sy - ay
                    if math.hypot(dx, dy) > r_float + 1e-6:
                        continue
                    dist2 = dx * dx + dy * dy
                    if dist2 <= r_squared:
                        g = Z2.elem((gx, gy))
                        triples.append((i, g, j))
                        weights[(i, g, j)] = dist2
    sg = SymGraph(Z2, len(a_reps), len(b_reps), tuple(triples))
    log.debug(f"Twin-lattice quotient ({rot.p},{rot.q},{rot.c}): {len(a_reps)} orbits per side, "
              f"{len(triples)} triples within r={float(r):.6f}")
    return TwinQuotient(rot, lattice, r_squared, tuple(a_reps), tuple(b_reps), sg, weights)


@dataclass(frozen=True)
class BottleneckBound:
    r_squared: Fraction
    quotient: TwinQuotient
    matching: SymMatching
    candidates: int

    @property
    def r(self) -> float:
        return math.sqrt(self.r_squared)


def bottleneck_bound(rot: RationalRotation, r_cap: Real) -> BottleneckBound:
    """
    Least r whose quotient admits a perfect (hence symmetric) matching, with
    the lifted matching. InfeasibleError when even r_cap does not suffice.
    """
    full = quotient_graph(rot, r_cap)
    weighted = full.factor_weights()
    result = bottleneck_matching(weighted)
    if result is None:
        raise InfeasibleError(f"No perfect matching within r <= {float(r_cap):.6f}",
                              largest_tested=r_cap)
    r_squared = Fraction(result.threshold)
    at_bound = _restrict(full, r_squared)
    sm = lift(at_bound.sym_graph, result.matching, at_bound.nearest_choice())
    log.debug(f"Bottleneck r^2 = {r_squared} among {len(set(weighted.weights))} candidate distances")
    return BottleneckBound(r_squared, at_bound, sm, len(set(weighted.weights)))


def _restrict(q: TwinQuotient, r_squared: Fraction) -> TwinQuotient:
    """Same quotient keeping only triples within squared distance r_squared."""
    kept = {t: w for t, w in q.weights.items() if w <= r_squared}
    sg = SymGraph(q.sym_graph.group, q.sym_graph.a_orbits, q.sym_graph.b_orbits, tuple(kept))
    return TwinQuotient(q.rotation, q.lattice, r_squared, q.a_reps, q.b_reps, sg, kept)


def default_rcap(rot: RationalRotation) -> Fraction:
    return Fraction(period_cap(rot)) - Fraction(1, 1000)


def emit_pairs(q: TwinQuotient, sm: SymMatching, periods: int = 1) -> List[str]:
    """'x y -> x2 y2' lines (6 decimals) for the matching over periods x periods translates."""
    lines = []
    for h in box(Z2, periods):
        for (i, j), g in sm.chosen:
            ax, ay = q.a_point(h, i)
            bx, by = q.b_point(compose(h, g), j)
            lines.append(f"{float(ax):.6f} {float(ay):.6f} -> {float(bx):.6f} {float(by):.6f}")
    return lines


def wraparound_distance2(q: TwinQuotient, i: int, j: int, span: int = 2) -> Fraction:
    """Least squared distance between A-rep i and the L-translates of B-rep j."""
    ax, ay = q.a_reps[i]
    bx, by = q.b_reps[j]
    best = None
    for gx in range(-span, span + 1):
        for gy in range(-span, span + 1):
            sx, sy = q.lattice.point((gx, gy))
            d = (bx + sx - ax) ** 2 + (by + sy - ay) ** 2
            if best is None or d < best:
                best = d
    return best


# =============================================================================
# IRRATIONAL MODE
# =============================================================================

@dataclass(frozen=True)
class WindowEstimate:
    angle: float
    translation: Tuple[float, float]
    window_radius: int
    a_points: int
    b_points: int
    lower_bound: float
    violation_found: bool
    upper_indication: Optional[float]
    grid_step: float

    def to_json(self) -> dict:
        return {
            "angle": f"{self.angle:.6f}",
            "t": [f"{self.translation[0]:.6f}", f"{self.translation[1]:.6f}"],
            "window_radius": self.window_radius,
            "a_points": self.a_points,
            "b_points": self.b_points,
            "lower_bound": f"{self.lower_bound:.6f}",
            "violation_found": self.violation_found,
            "upper_indication": None if self.upper_indication is None else f"{self.upper_indication:.6f}",
            "upper_is_heuristic": True,
            "grid_step": f"{self.grid_step:.6f}",
        }


class DiscWindow:
    """
    Z^2 and R_angle Z^2 + t restricted to the disc of radius N, with all
    candidate pairs up to the grid ceiling precomputed.
    """

    def __init__(self, angle: float, t: Tuple[float, float], radius: int, ceiling: float):
        self.radius = radius
        self.a = self._disc_points(radius)
        cos, sin = math.cos(angle), math.sin(angle)
        rotation = np.array([[cos, -sin], [sin, cos]])
        reach = radius + int(math.ceil(abs(t[0]) + abs(t[1]))) + 1
        raw = self._disc_points(reach) @ rotation.T + np.asarray(t, dtype=float)
        self.b = raw[np.linalg.norm(raw, axis=1) <= radius + FLOAT_TOLERANCE]
        self.a_norm = np.linalg.norm(self.a, axis=1)
        self.b_norm = np.linalg.norm(self.b, axis=1)
        self.pairs, self.dist = self._candidate_pairs(ceiling + FLOAT_TOLERANCE)

    @staticmethod
    def _disc_points(radius: int) -> np.ndarray:
        span = np.arange(-radius, radius + 1)
        xs, ys = np.meshgrid(span, span, indexing="ij")
        grid = np.stack([xs.ravel(), ys.ravel()], axis=1).astype(float)
        return grid[np.linalg.norm(grid, axis=1) <= radius + FLOAT_TOLERANCE]

    def _candidate_pairs(self, limit: float, chunk: int = 512):
        found_pairs, found_dist = [], []
        for start in range(0, len(self.a), chunk):
            block = self.a[start:start + chunk]
            d = np.linalg.norm(block[:, None, :] - self.b[None, :, :], axis=2)
            rows, cols = np.nonzero(d <= limit)
            found_pairs.append(np.stack([rows + start, cols], axis=1))
            found_dist.append(d[rows, cols])
        if not found_pairs:
            return np.zeros((0, 2), dtype=int), np.zeros(0)
        return np.concatenate(found_pairs), np.concatenate(found_dist)

    def graph(self, r: float) -> FiniteBigraph:
        keep = self.dist <= r + FLOAT_TOLERANCE
        edges = [(int(i), int(j)) for i, j in self.pairs[keep]]
        return FiniteBigraph(len(self.a), len(self.b), tuple(sorted(edges)))

    def interior(self, side: Side, r: float) -> List[int]:
        """Points whose whole r-neighborhood lies in the disc."""
        norms = self.a_norm if side is Side.LEFT else self.b_norm
        return [int(k) for k in np.nonzero(norms + r + FLOAT_TOLERANCE <= self.radius)[0]]

    def violated(self, r: float) -> bool:
        g = self.graph(r)
        return any(restricted_hall_check(g, side, self.interior(side, r)) is not None
                   for side in (Side.LEFT, Side.RIGHT))


def irrational_window_estimate(angle: float, t: Tuple[float, float], window_radius: int,
                               step: float = DEFAULT_GRID_STEP,
                               ceiling: float = DEFAULT_GRID_CEILING) -> WindowEstimate:
    """
    On the grid 0, step, ..., ceiling: the largest r with an interior Hall
    violation (certified lower bound; violations persist as r decreases, so
    it is found by bisection) and the next r whose window admits a matching
    covering all interior points (heuristic upper indication).
    """
    if window_radius < 1:
        raise InputError(f"Window radius must be >= 1, got {window_radius}")
    if step <= 0 or ceiling < 0:
        raise InputError("Grid step must be positive and the ceiling non-negative")
    window = DiscWindow(angle, t, window_radius, ceiling)
    top = int(round(ceiling / step))
    grid = [k * step for k in range(top + 1)]

    if not window.violated(grid[0]):
        lower_index, found = 0, False
    else:
        found = True
        lo, hi = 0, top + 1
        while hi - lo > 1:
            mid = (lo + hi) // 2
            if window.violated(grid[mid]):
                lo = mid
            else:
                hi = mid
        lower_index = lo

    upper = None
    start = lower_index + 1 if found else 0
    for k in range(start, top + 1):
        if not window.violated(grid[k]):
            upper = grid[k]
            break

    estimate = WindowEstimate(
        angle=angle, translation=(float(t[0]), float(t[1])), window_radius=window_radius,
        a_points=len(window.a), b_points=len(window.b),
        lower_bound=grid[lower_index], violation_found=found,
        upper_indication=upper, grid_step=step,
    )
    log.debug(f"Angle {angle:.6f}, N={window_radius}: lower {estimate.lower_bound:.6f}, upper {upper}")
    return estimate


def angle_sweep(angles: Sequence[float], t: Tuple[float, float], window_radius: int,
                step: float = DEFAULT_GRID_STEP, ceiling: float = DEFAULT_GRID_CEILING,
                max_workers: int = MAX_WORKERS) -> List[WindowEstimate]:
    """Window estimates for many angles, evaluated concurrently, sorted by angle."""
    results = []
    with ThreadPoolExecutor(max_workers=max_workers) as executor:
        futures = {executor.submit(irrational_window_estimate, a, t, window_radius, step, ceiling): a
                   for a in angles}
        for future in as_completed(futures):
            results.append(future.result())
    results.sort(key=lambda e: e.angle)
    return results
