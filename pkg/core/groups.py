"""
Group elements and finite subsets for the three supported families:
Z^d (integer vectors), Z_n (residues) and free groups F_k (reduced words).

Free-group words are strings over a, b, c, ... with uppercase letters for
inverses; the identity serializes as "e", so the alphabet skips that letter.
"""
import itertools
from dataclasses import dataclass
from enum import Enum
from functools import cached_property
from typing import FrozenSet, Iterable, Iterator, List, Tuple, Union

from .errors import InputError

GENERATOR_LETTERS = "abcdfghijklmnopqrstuvwxyz"
IDENTITY_TEXT = "e"

ElemValue = Union[Tuple[int, ...], int, str]


class Family(str, Enum):
    ZD = "zd"
    CYCLIC = "cyclic"
    FREE = "free"


@dataclass(frozen=True)
class GroupDescriptor:
    """A group from one of the supported families, e.g. zd/2, cyclic/5, free/2."""
    family: Family
    param: int

    def __post_init__(self):
        try:
            family = Family(self.family)
        except ValueError:
            raise InputError(f"Unknown group family: {self.family!r}")
        object.__setattr__(self, "family", family)
        if isinstance(self.param, bool) or not isinstance(self.param, int):
            raise InputError(f"Group parameter must be an integer, got {self.param!r}")
        if self.param < 1:
            raise InputError(f"Group parameter must be >= 1, got {self.param}")
        if family is Family.FREE and self.param > len(GENERATOR_LETTERS):
            raise InputError(f"Free group rank is limited to {len(GENERATOR_LETTERS)}")

    @property
    def label(self) -> str:
        if self.family is Family.ZD:
            return f"Z^{self.param}"
        if self.family is Family.CYCLIC:
            return f"Z_{self.param}"
        return f"F_{self.param}"

    @property
    def letters(self) -> str:
        """Free-group alphabet (generators and their inverses)."""
        gens = GENERATOR_LETTERS[:self.param]
        return gens + gens.upper()

    def identity(self) -> "GroupElem":
        if self.family is Family.ZD:
            return GroupElem(self, (0,) * self.param)
        if self.family is Family.CYCLIC:
            return GroupElem(self, 0)
        return GroupElem(self, "")

    def generators(self) -> List["GroupElem"]:
        """Symmetric generating set: +-e_i, +-1, or every letter and its inverse."""
        if self.family is Family.ZD:
            gens = []
            for axis in range(self.param):
                for sign in (1, -1):
                    vec = [0] * self.param
                    vec[axis] = sign
                    gens.append(GroupElem(self, tuple(vec)))
            return sorted(set(gens))
        if self.family is Family.CYCLIC:
            return sorted({self.elem(1), self.elem(-1)})
        return sorted(GroupElem(self, letter) for letter in self.letters)

    def elem(self, value) -> "GroupElem":
        """Build an element from a raw value, normalizing residues and reducing words."""
        if self.family is Family.ZD:
            if isinstance(value, int) and self.param == 1:
                value = (value,)
            try:
                vec = tuple(int(v) for v in value)
            except (TypeError, ValueError):
                raise InputError(f"Not an element of {self.label}: {value!r}")
            if len(vec) != self.param:
                raise InputError(f"Expected a vector of length {self.param}, got {value!r}")
            return GroupElem(self, vec)
        if self.family is Family.CYCLIC:
            if isinstance(value, bool) or not isinstance(value, int):
                raise InputError(f"Not an element of {self.label}: {value!r}")
            return GroupElem(self, value % self.param)
        if not isinstance(value, str):
            raise InputError(f"Not an element of {self.label}: {value!r}")
        word = "" if value == IDENTITY_TEXT else value
        for letter in word:
            if letter not in self.letters:
                raise InputError(f"Letter {letter!r} is not a generator of {self.label}")
        return GroupElem(self, _reduce(word))

    def parse(self, text: str) -> "GroupElem":
        """Inverse of GroupElem.serialize; accepts '[1,-2]' and '(1,-2)' for vectors."""
        text = str(text).strip()
        if self.family is Family.ZD:
            body = text.strip("[]()")
            try:
                return self.elem(tuple(int(part) for part in body.split(",")))
            except ValueError:
                raise InputError(f"Not an element of {self.label}: {text!r}")
        if self.family is Family.CYCLIC:
            try:
                return self.elem(int(text))
            except ValueError:
                raise InputError(f"Not an element of {self.label}: {text!r}")
        return self.elem(text)

    def to_json(self) -> dict:
        return {"family": self.family.value, "param": self.param}

    @classmethod
    def from_json(cls, data) -> "GroupDescriptor":
        if not isinstance(data, dict) or "family" not in data or "param" not in data:
            raise InputError("Group must be an object with 'family' and 'param'")
        return cls(data["family"], data["param"])


@dataclass(frozen=True)
class GroupElem:
    """Element of a GroupDescriptor's group; use GroupDescriptor.elem to build one."""
    group: GroupDescriptor
    value: ElemValue

    def __mul__(self, other: "GroupElem") -> "GroupElem":
        return compose(self, other)

    def __lt__(self, other: "GroupElem") -> bool:
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        return self.serialize()

    def inverse(self) -> "GroupElem":
        return inverse(self)

    @property
    def is_identity(self) -> bool:
        return self == self.group.identity()

    @property
    def length(self) -> int:
        """L-infinity norm, distance to 0 in Z_n, or word length."""
        family = self.group.family
        if family is Family.ZD:
            return max((abs(v) for v in self.value), default=0)
        if family is Family.CYCLIC:
            return min(self.value, self.group.param - self.value)
        return len(self.value)

    @cached_property
    def sort_key(self) -> str:
        return self.serialize()

    def serialize(self) -> str:
        family = self.group.family
        if family is Family.ZD:
            return ",".join(str(v) for v in self.value)
        if family is Family.CYCLIC:
            return str(self.value)
        return self.value or IDENTITY_TEXT


def _reduce(word: str) -> str:
    out: List[str] = []
    for letter in word:
        if out and out[-1] == letter.swapcase():
            out.pop()
        else:
            out.append(letter)
    return "".join(out)


def _check_same(g1: GroupDescriptor, g2: GroupDescriptor):
    if g1 != g2:
        raise InputError(f"Group mismatch: {g1.label} vs {g2.label}")


def compose(g1: GroupElem, g2: GroupElem) -> GroupElem:
    """Group product g1 * g2; free-group results are fully reduced."""
    _check_same(g1.group, g2.group)
    group = g1.group
    if group.family is Family.ZD:
        return GroupElem(group, tuple(a + b for a, b in zip(g1.value, g2.value)))
    if group.family is Family.CYCLIC:
        return GroupElem(group, (g1.value + g2.value) % group.param)

    left, right = g1.value, g2.value
    cancel = 0
    limit = min(len(left), len(right))
    while cancel < limit and left[len(left) - 1 - cancel] == right[cancel].swapcase():
        cancel += 1
    return GroupElem(group, left[:len(left) - cancel] + right[cancel:])


def inverse(g: GroupElem) -> GroupElem:
    group = g.group
    if group.family is Family.ZD:
        return GroupElem(group, tuple(-v for v in g.value))
    if group.family is Family.CYCLIC:
        return GroupElem(group, (-g.value) % group.param)
    return GroupElem(group, g.value[::-1].swapcase())


@dataclass(frozen=True)
class FiniteSubset:
    """Finite set of elements of one group, kept in canonical (serialization) order."""
    group: GroupDescriptor
    elements: Tuple[GroupElem, ...]

    @classmethod
    def of(cls, group: GroupDescriptor, items: Iterable[GroupElem]) -> "FiniteSubset":
        unique = set()
        for item in items:
            if not isinstance(item, GroupElem) or item.group != group:
                raise InputError(f"{item!r} is not an element of {group.label}")
            unique.add(item)
        return cls(group, tuple(sorted(unique)))

    @classmethod
    def parse(cls, group: GroupDescriptor, texts: Iterable[str]) -> "FiniteSubset":
        return cls.of(group, (group.parse(t) for t in texts))

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElem]:
        return iter(self.elements)

    def __contains__(self, item) -> bool:
        return item in self.members

    @cached_property
    def members(self) -> FrozenSet[GroupElem]:
        return frozenset(self.elements)

    def serialize(self) -> List[str]:
        return [g.serialize() for g in self.elements]


def identity(desc: GroupDescriptor) -> GroupElem:
    return desc.identity()


def _free_words(desc: GroupDescriptor, radius: int) -> Iterator[str]:
    shell = [""]
    yield ""
    for _ in range(radius):
        next_shell = []
        for word in shell:
            for letter in desc.letters:
                if word and word[-1] == letter.swapcase():
                    continue
                next_shell.append(word + letter)
        yield from next_shell
        shell = next_shell


def ball(desc: GroupDescriptor, radius: int) -> FiniteSubset:
    """
    Ball of the given radius around the identity:
    the L-infinity box [-r, r]^d, reduced words of length <= r, or residues
    with representative of absolute value <= r (the whole group once 2r+1 >= n).
    """
    if radius < 0:
        raise InputError(f"Radius must be >= 0, got {radius}")
    if desc.family is Family.ZD:
        span = range(-radius, radius + 1)
        items = (GroupElem(desc, vec) for vec in itertools.product(span, repeat=desc.param))
    elif desc.family is Family.CYCLIC:
        n = desc.param
        if 2 * radius + 1 >= n:
            items = (GroupElem(desc, v) for v in range(n))
        else:
            items = (GroupElem(desc, v % n) for v in range(-radius, radius + 1))
    else:
        items = (GroupElem(desc, word) for word in _free_words(desc, radius))
    return FiniteSubset(desc, tuple(sorted(set(items))))


def box(desc: GroupDescriptor, side: int) -> FiniteSubset:
    """The box {0, ..., side-1}^d in Z^d (a Folner window)."""
    if desc.family is not Family.ZD:
        raise InputError(f"Boxes are only defined for Z^d, not {desc.label}")
    if side < 1:
        raise InputError(f"Box side must be >= 1, got {side}")
    items = (GroupElem(desc, vec) for vec in itertools.product(range(side), repeat=desc.param))
    return FiniteSubset(desc, tuple(sorted(items)))


def right_translate(subset: FiniteSubset, g: GroupElem) -> FiniteSubset:
    """S g = {s g | s in S}."""
    _check_same(subset.group, g.group)
    return FiniteSubset(subset.group, tuple(sorted(compose(s, g) for s in subset)))


def product_set(left: FiniteSubset, right: FiniteSubset) -> FiniteSubset:
    """F U = {f u | f in F, u in U}, duplicates removed."""
    _check_same(left.group, right.group)
    products = {compose(f, u) for f in left for u in right}
    return FiniteSubset(left.group, tuple(sorted(products)))
