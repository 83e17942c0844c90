"""Letters, words, and eventually periodic points of one-sided shift spaces.

Alphabets may mix plain symbols with N-indexed families of symbols (so
countably infinite alphabets stay finitely describable).  A point is stored
as a (preperiod, period) pair of words in a canonical form chosen so that
two points are equal iff their stored forms are identical.  Everything is
immutable and all arithmetic is exact.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Optional, Union


@dataclass(frozen=True)
class Param:
    """A symbolic index ranging over a tail of the natural numbers."""

    name: str = "j"

    def __str__(self):
        return self.name


#: The canonical symbolic index used throughout the package.  A template may
#: mention at most one parameter, so a single shared symbol suffices.
PARAM = Param("j")

#: A second symbol, used only while matching one parametric object against
#: another (the match then binds PARAM2 to PARAM or to a concrete index).
PARAM2 = Param("j'")

Index = Union[int, Param]

_LETTER_RE = re.compile(r"^([A-Za-z0-9_]+)(?:\[([A-Za-z0-9_']+)\])?$")


@dataclass(frozen=True)
class Letter:
    """A symbol of the alphabet.

    ``Letter("c")`` is a plain symbol; ``Letter("a", 3)`` is member 3 of the
    letter family ``a``; ``Letter("a", PARAM)`` is the generic member.  Two
    letters are equal iff base and index agree exactly.
    """

    base: str
    index: Optional[Index] = None

    @property
    def is_family(self) -> bool:
        return self.index is not None

    @property
    def has_param(self) -> bool:
        return isinstance(self.index, Param)

    def subst(self, value: int) -> "Letter":
        if self.has_param:
            return Letter(self.base, value)
        return self

    def key(self):
        if self.index is None:
            return (0, self.base, 0, "")
        if isinstance(self.index, Param):
            return (1, self.base, 1, self.index.name)
        return (1, self.base, 0, self.index)

    def __str__(self):
        if self.index is None:
            return self.base
        return f"{self.base}[{self.index}]"

    @staticmethod
    def parse(text: str) -> "Letter":
        m = _LETTER_RE.match(text.strip())
        if m is None:
            raise ValueError(f"cannot parse letter {text!r}")
        base, idx = m.group(1), m.group(2)
        if idx is None:
            return Letter(base)
        if idx.isdigit():
            return Letter(base, int(idx))
        if idx == PARAM.name:
            return Letter(base, PARAM)
        raise ValueError(f"unknown index symbol {idx!r} in letter {text!r}")


@dataclass(frozen=True)
class Word:
    """A finite word; concatenation is ``+`` and the empty word is ``EPSILON``."""

    letters: tuple[Letter, ...] = ()

    def __post_init__(self):
        if not isinstance(self.letters, tuple):
            object.__setattr__(self, "letters", tuple(self.letters))

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __getitem__(self, i):
        got = self.letters[i]
        return Word(got) if isinstance(i, slice) else got

    def __add__(self, other: "Word") -> "Word":
        return Word(self.letters + other.letters)

    def __bool__(self):
        return bool(self.letters)

    @property
    def has_param(self) -> bool:
        return any(l.has_param for l in self.letters)

    def subst(self, value: int) -> "Word":
        return Word(tuple(l.subst(value) for l in self.letters))

    def concrete_indices(self) -> set[int]:
        return {l.index for l in self.letters if isinstance(l.index, int)}

    def key(self):
        return tuple(l.key() for l in self.letters)

    def __str__(self):
        if not self.letters:
            return "_"
        return ".".join(str(l) for l in self.letters)

    @staticmethod
    def parse(text: str) -> "Word":
        text = text.strip()
        if text in ("", "_"):
            return EPSILON
        return Word(tuple(Letter.parse(part) for part in text.split(".")))

    @staticmethod
    def of(*letters: Letter) -> "Word":
        return Word(tuple(letters))


EPSILON = Word(())


def _primitive_root(per: tuple[Letter, ...]) -> tuple[Letter, ...]:
    n = len(per)
    for d in range(1, n + 1):
        if n % d == 0 and per == per[:d] * (n // d):
            return per[:d]
    return per


def _canonical(pre: tuple[Letter, ...], per: tuple[Letter, ...]):
    """Shortest-preperiod, primitive-period form of ``pre . per^inf``.

    Absorbing a trailing preperiod letter into the period rotates the period
    one step to the right, which preserves primitivity.
    """
    per = _primitive_root(per)
    pre = tuple(pre)
    while pre and pre[-1] == per[-1]:
        pre = pre[:-1]
        per = (per[-1],) + per[:-1]
    return pre, per


@dataclass(frozen=True)
class PointTemplate:
    """An eventually periodic right-infinite sequence ``preperiod . period^inf``.

    Stored canonically (primitive period, minimal preperiod), so syntactic
    equality of templates coincides with equality of the sequences they
    denote.  A template may contain the symbolic index ``PARAM``, in which
    case it denotes a family of points, one per admissible index value.

    >>> p = PointTemplate.parse("0.1", "1.0")   # 01(10)^inf == (01)^inf
    >>> str(p)
    '(0.1)^inf'
    """

    preperiod: Word
    period: Word

    def __post_init__(self):
        if len(self.period) == 0:
            raise ValueError("period must be nonempty")
        pre, per = _canonical(self.preperiod.letters, self.period.letters)
        object.__setattr__(self, "preperiod", Word(pre))
        object.__setattr__(self, "period", Word(per))

    @staticmethod
    def parse(pre: str, per: str) -> "PointTemplate":
        return PointTemplate(Word.parse(pre), Word.parse(per))

    @property
    def has_param(self) -> bool:
        return self.preperiod.has_param or self.period.has_param

    @property
    def is_periodic(self) -> bool:
        return len(self.preperiod) == 0

    def concrete_indices(self) -> set[int]:
        return self.preperiod.concrete_indices() | self.period.concrete_indices()

    def subst(self, value: int) -> "PointTemplate":
        # Re-canonicalized by the constructor; substitution may create new
        # letter coincidences that shorten the stored form.
        return PointTemplate(self.preperiod.subst(value), self.period.subst(value))

    def letter(self, i: int) -> Letter:
        pre, per = self.preperiod.letters, self.period.letters
        if i < len(pre):
            return pre[i]
        return per[(i - len(pre)) % len(per)]

    def expand(self, n: int) -> tuple[Letter, ...]:
        return tuple(self.letter(i) for i in range(n))

    def starts_with(self, w: Word) -> bool:
        return self.expand(len(w)) == w.letters

    def shift(self) -> "PointTemplate":
        if self.preperiod:
            return PointTemplate(self.preperiod[1:], self.period)
        per = self.period.letters
        return PointTemplate(EPSILON, Word(per[1:] + per[:1]))

    def drop(self, k: int) -> "PointTemplate":
        p = self
        for _ in range(k):
            p = p.shift()
        return p

    def prepend(self, w: Word) -> "PointTemplate":
        return PointTemplate(w + self.preperiod, self.period)

    def key(self):
        return (self.preperiod.key(), self.period.key())

    def __str__(self):
        head = f"{self.preperiod}." if self.preperiod else ""
        return f"{head}({self.period})^inf"


def shift_point(p: PointTemplate) -> PointTemplate:
    """One application of the shift map: drop the first symbol."""
    return p.shift()


def expansion_equal(x: PointTemplate, y: PointTemplate, n: int) -> bool:
    """Compare the first ``n`` symbols of two templates (test oracle)."""
    return x.expand(n) == y.expand(n)


def metric_distance(x: PointTemplate, y: PointTemplate) -> Fraction:
    """Product-metric distance ``1 / 2^k`` with ``k`` the first disagreement.

    Returns 0 exactly when the two templates denote the same point, which is
    decidable because stored forms are canonical.
    """
    if x.has_param or y.has_param:
        raise ValueError("metric_distance needs concrete points")
    if x == y:
        return Fraction(0)
    bound = max(len(x.preperiod), len(y.preperiod)) + lcm(len(x.period), len(y.period))
    for k in range(bound + 1):
        if x.letter(k) != y.letter(k):
            return Fraction(1, 2**k)
    raise AssertionError("distinct canonical templates must disagree within the bound")


@dataclass(frozen=True)
class GroupElementWord:
    """A reduced two-word group element ``numerator . denominator^-1``.

    Reduction strips the common trailing letters of the two words; the free
    group itself is never materialized.
    """

    numerator: Word
    denominator: Word

    def __post_init__(self):
        num, den = self.numerator.letters, self.denominator.letters
        while num and den and num[-1] == den[-1]:
            num, den = num[:-1], den[:-1]
        object.__setattr__(self, "numerator", Word(num))
        object.__setattr__(self, "denominator", Word(den))

    def inverse(self) -> "GroupElementWord":
        return GroupElementWord(self.denominator, self.numerator)

    def __str__(self):
        return f"{self.numerator}*({self.denominator})^-1"


def partial_action_apply(presentation, t: GroupElementWord, x: PointTemplate):
    """Point-level partial action: ``beta alpha^-1`` maps ``alpha y`` to ``beta y``.

    Returns the image point, or None when ``x`` is outside the domain of the
    element (which is an answer, not an error).  ``presentation`` must offer
    a ``contains`` membership oracle.
    """
    contains = getattr(presentation, "contains", None)
    if contains is None:
        raise TypeError("presentation backend offers no membership oracle")
    alpha, beta = t.denominator, t.numerator
    if not x.starts_with(alpha):
        return None
    candidate = x.drop(len(alpha)).prepend(beta)
    if contains(candidate):
        return candidate
    return None


def parse_letters(items: Iterable[str]) -> tuple[Letter, ...]:
    return tuple(Letter.parse(s) for s in items)


def word_from_strs(items: Iterable[str]) -> Word:
    return Word(parse_letters(items))
