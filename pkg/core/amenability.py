"""
Numerical Folner probes and the paradoxical decomposition of F_2.

Everything here is exact: set sizes are integers and ratios are Fractions.
"""
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

from utils.helpers import format_rational
from utils.logger import log
from .errors import InputError
from .groups import (
    Family, FiniteSubset, GroupDescriptor, GroupElem, ball, box, compose, inverse, product_set,
    right_translate,
)

Window = Tuple[str, FiniteSubset]

F2 = GroupDescriptor(Family.FREE, 2)


@dataclass(frozen=True)
class FolnerRow:
    window: str
    f_size: int
    fu_size: int
    ratio: Fraction

    def to_json(self) -> dict:
        return {"window": self.window, "F": self.f_size, "FU": self.fu_size,
                "ratio": format_rational(self.ratio)}


@dataclass(frozen=True)
class FolnerReport:
    rows: Tuple[FolnerRow, ...]
    infimum_so_far: Fraction


def _check_windows(desc: GroupDescriptor, windows: Sequence[Window], u: FiniteSubset):
    if not windows:
        raise InputError("At least one window is required")
    if len(u) == 0:
        raise InputError("U must be non-empty")
    if u.group != desc:
        raise InputError(f"U lives in {u.group.label}, expected {desc.label}")
    for label, window in windows:
        if window.group != desc:
            raise InputError(f"Window {label} lives in {window.group.label}, expected {desc.label}")
        if len(window) == 0:
            raise InputError(f"Window {label} is empty")


def folner_ratio(desc: GroupDescriptor, windows: Sequence[Window], u: FiniteSubset) -> FolnerReport:
    """|FU| / |F| for every window F; infimum near 1 is the Folner condition."""
    _check_windows(desc, windows, u)
    rows = []
    for label, window in windows:
        fu = product_set(window, u)
        rows.append(FolnerRow(label, len(window), len(fu), Fraction(len(fu), len(window))))
        log.debug(f"Folner window {label}: |F|={len(window)} |FU|={len(fu)}")
    return FolnerReport(tuple(rows), min(row.ratio for row in rows))


def folner_witness_translate(desc: GroupDescriptor, window: FiniteSubset, u: FiniteSubset) -> Fraction:
    """max over g in U of |F \\ Fg| / |F|."""
    _check_windows(desc, [("F", window)], u)
    worst = Fraction(0)
    for g in u:
        moved = right_translate(window, g)
        leaving = sum(1 for f in window if f not in moved)
        worst = max(worst, Fraction(leaving, len(window)))
    return worst


def ball_family(desc: GroupDescriptor, radii: Sequence[int]) -> List[Window]:
    return [(f"ball({r})", ball(desc, r)) for r in radii]


def box_family(desc: GroupDescriptor, sides: Sequence[int]) -> List[Window]:
    return [(f"box({n})", box(desc, n)) for n in sides]


# =============================================================================
# PARADOXICAL DECOMPOSITION
# =============================================================================

@dataclass(frozen=True)
class ParadoxDecomp:
    """
    Two partitions G = U A_g = U B_g indexed by F, with
    G = U A_g g  (disjoint union over both families).
    classify_a / classify_b return the index g of the piece holding a word.
    """
    index_set: FiniteSubset
    classify_a: Callable[[GroupElem], GroupElem]
    classify_b: Callable[[GroupElem], GroupElem]
    name: str = "custom"

    @property
    def group(self) -> GroupDescriptor:
        return self.index_set.group


@dataclass(frozen=True)
class ParadoxCertificate:
    radius: int
    words_checked: int
    images_checked: int


@dataclass(frozen=True)
class ParadoxViolation:
    word: GroupElem
    kind: str       # "unclassified", "overlap" or "uncovered"
    detail: str


def _ends_with(word: str, letter: str) -> bool:
    return bool(word) and word[-1] == letter


def standard_f2_paradox(shift_powers: bool = True) -> ParadoxDecomp:
    """
    F = {e, a^-1, b^-1} with T(x) the reduced words ending in x:
      A_e = T(a) minus {a^n : n >= 1},  A_{a^-1} = (G minus T(a)) plus {a^n : n >= 1},
      B_e = T(b),                       B_{b^-1} = G minus T(b).
    shift_powers=False drops the a^n shift (A_e = T(a)); the result then
    leaves e uncovered and is no longer a decomposition.
    """
    e, a_inv, b_inv = F2.identity(), F2.elem("A"), F2.elem("B")

    def classify_a(g: GroupElem) -> GroupElem:
        word = g.value
        if not _ends_with(word, "a"):
            return a_inv
        if shift_powers and set(word) == {"a"}:
            return a_inv
        return e

    def classify_b(g: GroupElem) -> GroupElem:
        return e if _ends_with(g.value, "b") else b_inv

    name = "standard" if shift_powers else "unshifted"
    return ParadoxDecomp(FiniteSubset.of(F2, [e, a_inv, b_inv]), classify_a, classify_b, name)


def _classify(p: ParadoxDecomp, family: str, word: GroupElem) -> Optional[GroupElem]:
    fn = p.classify_a if family == "A" else p.classify_b
    try:
        index = fn(word)
    except InputError as e:
        log.debug(f"classify_{family.lower()} failed on {word}: {e}")
        return None
    return index if index in p.index_set else None


def verify_paradox(p: ParadoxDecomp, radius: int) -> Union[ParadoxCertificate, ParadoxViolation]:
    """
    Exact check on ball(radius):
      every word gets one A-index and one B-index;
      translated images w * classify(w), over all words of length
      <= radius + max index length, never collide;
      every word of length <= radius is hit exactly once (all its possible
      preimages are enumerated).
    """
    if radius < 0:
        raise InputError(f"Radius must be >= 0, got {radius}")
    reach = max((g.length for g in p.index_set), default=0)
    outer = ball(p.group, radius + reach)

    hits: Dict[GroupElem, Tuple[str, GroupElem]] = {}
    for word in outer:
        for family in ("A", "B"):
            index = _classify(p, family, word)
            if index is None:
                if word.length <= radius:
                    return ParadoxViolation(word, "unclassified",
                                            f"classify_{family.lower()} gives no index in F")
                continue
            image = compose(word, index)
            if image in hits:
                other_family, other_word = hits[image]
                return ParadoxViolation(image, "overlap",
                                        f"covered by {other_family}-translate of {other_word} "
                                        f"and {family}-translate of {word}")
            hits[image] = (family, word)

    inner = ball(p.group, radius)
    for word in inner:
        if word not in hits:
            return ParadoxViolation(word, "uncovered", "no translated piece covers this word")
    log.debug(f"Paradox {p.name} verified on ball({radius}): {len(inner)} words, {len(hits)} images")
    return ParadoxCertificate(radius, len(inner), len(hits))


def classification_table(p: ParadoxDecomp, radius: int) -> List[dict]:
    """Per-word A- and B-indices over ball(radius), in canonical order."""
    rows = []
    for word in ball(p.group, radius):
        a_index, b_index = _classify(p, "A", word), _classify(p, "B", word)
        rows.append({
            "word": word.serialize(),
            "A": a_index.serialize() if a_index is not None else None,
            "B": b_index.serialize() if b_index is not None else None,
        })
    return rows


def preimage(p: ParadoxDecomp, word: GroupElem) -> List[Tuple[str, GroupElem]]:
    """All (family, w) with w * classify(w) == word."""
    found = []
    for g in p.index_set:
        candidate = compose(word, inverse(g))
        for family in ("A", "B"):
            if _classify(p, family, candidate) == g:
                found.append((family, candidate))
    return found
