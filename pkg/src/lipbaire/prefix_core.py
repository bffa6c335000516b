"""Eventually constant points of X^omega with the prefix ultrametric, plus word trees.

A point is stored as a finite stem followed by a tail letter repeated forever.
Distances are kept on a log scale: ``distance(x, y) == k`` means the two
points first differ at index ``k`` (so the real distance is ``2**-k``), and
``INFINITE`` means the points are equal.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence, Union

Word = tuple[int, ...]
LogDistance = Union[int, float]

INFINITE: float = math.inf


@dataclass(frozen=True)
class Alphabet:
    """Either ``Finite(size)`` (letters ``0..size-1``) or countable (``size is None``)."""

    size: Optional[int] = None

    def __post_init__(self):
        if self.size is not None and self.size < 1:
            raise ValueError(f"finite alphabet needs a positive size, got {self.size}")

    @classmethod
    def finite(cls, size: int) -> "Alphabet":
        return cls(size)

    @classmethod
    def countable(cls) -> "Alphabet":
        return cls(None)

    @property
    def is_finite(self) -> bool:
        return self.size is not None

    def valid(self, letter) -> bool:
        if not isinstance(letter, int) or isinstance(letter, bool) or letter < 0:
            return False
        return self.size is None or letter < self.size

    def letters(self) -> range:
        if self.size is None:
            raise ValueError("cannot list the letters of a countable alphabet")
        return range(self.size)

    def words(self, length: int) -> Iterator[Word]:
        """All words of the given length, in lexicographic order (finite alphabets only)."""
        return product(self.letters(), repeat=length)

    def words_upto(self, depth: int) -> Iterator[Word]:
        for n in range(depth + 1):
            yield from self.words(n)

    def check_word(self, w: Sequence[int]) -> Word:
        w = tuple(w)
        for letter in w:
            if not self.valid(letter):
                raise ValueError(f"letter {letter!r} not in {self}")
        return w

    def check_point(self, x: "Point") -> "Point":
        self.check_word(x.stem)
        if not self.valid(x.tail):
            raise ValueError(f"tail letter {x.tail!r} not in {self}")
        return x

    def to_json(self) -> dict:
        return {"countable": True} if self.size is None else {"finite": self.size}

    @classmethod
    def from_json(cls, obj) -> "Alphabet":
        if isinstance(obj, dict):
            if obj.get("countable") is True:
                return cls.countable()
            if "finite" in obj:
                return cls.finite(int(obj["finite"]))
        raise ValueError(f"not an alphabet: {obj!r}")

    @classmethod
    def parse(cls, text: str) -> "Alphabet":
        """Parse the command-line spelling: ``omega`` or a positive integer."""
        if text in ("omega", "w", "countable"):
            return cls.countable()
        return cls.finite(int(text))

    def __str__(self):
        return "omega" if self.size is None else str(self.size)


BINARY = Alphabet.finite(2)
OMEGA = Alphabet.countable()


@dataclass(frozen=True)
class Point:
    """The sequence ``stem + (tail, tail, ...)``, kept in canonical form.

    The stem never ends with the tail letter, so two points are equal as
    sequences exactly when their fields are equal.
    """

    stem: Word = ()
    tail: int = 0

    def __post_init__(self):
        stem = tuple(self.stem)
        if self.tail < 0 or any(letter < 0 for letter in stem):
            raise ValueError("letters must be nonnegative integers")
        end = len(stem)
        while end and stem[end - 1] == self.tail:
            end -= 1
        object.__setattr__(self, "stem", stem[:end])

    def __getitem__(self, k: int) -> int:
        if k < 0:
            raise IndexError("points are indexed from 0")
        return self.stem[k] if k < len(self.stem) else self.tail

    def prefix(self, n: int) -> Word:
        """``x | n``: the first ``n`` letters."""
        stem = self.stem
        if n <= len(stem):
            return stem[:n]
        return stem + (self.tail,) * (n - len(stem))

    def to_json(self) -> dict:
        return {"stem": list(self.stem), "tail": self.tail}

    @classmethod
    def from_json(cls, obj) -> "Point":
        if not isinstance(obj, dict) or "stem" not in obj or "tail" not in obj:
            raise ValueError(f"not a point: {obj!r}")
        stem, tail = obj["stem"], obj["tail"]
        if not isinstance(stem, list) or not all(_is_letter(v) for v in stem) or not _is_letter(tail):
            raise ValueError(f"not a point: {obj!r}")
        return cls(tuple(stem), tail)

    def __repr__(self):
        body = ",".join(map(str, self.stem))
        return f"Point([{body}]+{self.tail}^w)"


def _is_letter(v) -> bool:
    return isinstance(v, int) and not isinstance(v, bool) and v >= 0


def word_from_json(obj) -> Word:
    if not isinstance(obj, list) or not all(_is_letter(v) for v in obj):
        raise ValueError(f"not a word: {obj!r}")
    return tuple(obj)


def word_meet(u: Sequence[int], v: Sequence[int]) -> Word:
    """Longest common prefix."""
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return tuple(u[:n])


def is_prefix(s: Sequence[int], t: Sequence[int]) -> bool:
    """``s ◁ t`` (non-strict)."""
    return len(s) <= len(t) and tuple(t[: len(s)]) == tuple(s)


def comparable(s: Sequence[int], t: Sequence[int]) -> bool:
    return is_prefix(s, t) or is_prefix(t, s)


def distance(x: Point, y: Point) -> LogDistance:
    """Index of the first disagreement of ``x`` and ``y``; ``INFINITE`` when equal."""
    xs, ys = x.stem, y.stem
    lx, ly = len(xs), len(ys)
    xt, yt = x.tail, y.tail
    for i in range(max(lx, ly)):
        a = xs[i] if i < lx else xt
        b = ys[i] if i < ly else yt
        if a != b:
            return i
    return INFINITE if xt == yt else max(lx, ly)


def real_distance(x: Point, y: Point) -> float:
    """``2**-k`` as a float, for display only."""
    k = distance(x, y)
    return 0.0 if k == INFINITE else 2.0 ** -k


def in_basic_open(s: Sequence[int], x: Point) -> bool:
    """Whether ``x`` lies in ``[s]``."""
    return x.prefix(len(s)) == tuple(s)


def agreement_depth(points: Iterable[Point]) -> int:
    """A length past which distinct points from the collection never agree.

    Two distinct eventually constant points whose stems have length at most
    ``m`` already differ somewhere below ``m + 1``.
    """
    return max((len(p.stem) for p in points), default=0) + 1


@dataclass(frozen=True)
class WordTree:
    """A finite downward closed set of words."""

    nodes: frozenset = field(default_factory=frozenset)

    def __post_init__(self):
        nodes = frozenset(tuple(w) for w in self.nodes)
        for w in nodes:
            if w and w[:-1] not in nodes:
                raise ValueError(f"not downward closed: {w!r} lacks its parent")
        object.__setattr__(self, "nodes", nodes)

    def __contains__(self, w) -> bool:
        return tuple(w) in self.nodes

    def __iter__(self):
        return iter(sorted(self.nodes, key=length_lex_key))

    def __len__(self):
        return len(self.nodes)

    @property
    def height(self) -> int:
        """Length of the longest member; -1 for the empty tree."""
        return max((len(w) for w in self.nodes), default=-1)

    def level(self, n: int) -> list[Word]:
        return sorted(w for w in self.nodes if len(w) == n)

    def children(self, w: Sequence[int]) -> list[Word]:
        w = tuple(w)
        return sorted(u for u in self.nodes if len(u) == len(w) + 1 and u[:-1] == w)

    def to_json(self) -> list:
        return [list(w) for w in self]

    @classmethod
    def from_json(cls, obj) -> "WordTree":
        if not isinstance(obj, list):
            raise ValueError(f"not a word tree: {obj!r}")
        return tree_from_words(word_from_json(w) for w in obj)


def length_lex_key(w: Sequence[int]):
    return (len(w), tuple(w))


def tree_from_words(ws: Iterable[Sequence[int]]) -> WordTree:
    """Downward closure of ``ws``."""
    nodes = set()
    for w in ws:
        w = tuple(w)
        for n in range(len(w) + 1):
            nodes.add(w[:n])
    return WordTree(frozenset(nodes))


def full_tree(alphabet: Alphabet, depth: int) -> WordTree:
    return WordTree(frozenset(alphabet.words_upto(depth)))


def branches_to_depth(tree: WordTree, n: int) -> set[Word]:
    """Level-``n`` words of ``tree`` after pruning the dead ends shorter than ``n``.

    Pruning a leaf shorter than ``n`` never removes a length-``n`` word, since
    every such word keeps all of its prefixes alive.
    """
    return {w for w in tree.nodes if len(w) == n}


class PrefixIndex:
    """Finds the points of a growing collection that agree longest with a query.

    Every point is filed under each of its prefixes up to a common depth that
    exceeds every stem seen so far, which makes the lookup exact.
    """

    def __init__(self, points: Iterable[Point] = ()):
        self._depth = 0
        self._points: list[Point] = []
        self._buckets: dict[Word, list[Point]] = {(): []}
        for p in points:
            self.add(p)

    def __len__(self):
        return len(self._points)

    def __contains__(self, p: Point) -> bool:
        self._grow(len(p.stem) + 1)
        return p in self._buckets.get(p.prefix(self._depth), ())

    def _grow(self, depth: int):
        if depth <= self._depth:
            return
        for p in self._points:
            for n in range(self._depth + 1, depth + 1):
                self._buckets.setdefault(p.prefix(n), []).append(p)
        self._depth = depth

    def add(self, p: Point):
        self._grow(len(p.stem) + 1)
        self._points.append(p)
        for n in range(self._depth + 1):
            self._buckets.setdefault(p.prefix(n), []).append(p)

    def best_agreement(self, x: Point) -> tuple[int, list[Point]]:
        """``(k, matches)``: the longest agreement ``k`` of ``x`` with a stored
        point other than ``x`` itself, and every stored point agreeing with ``x``
        on its first ``k`` letters.
        """
        if not self._points:
            raise ValueError("empty index")
        self._grow(len(x.stem) + 1)
        k = 0
        while k < self._depth:
            bucket = self._buckets.get(x.prefix(k + 1))
            if not bucket or bucket == [x]:
                break
            k += 1
        matches = [p for p in self._buckets[x.prefix(k)] if p != x]
        return k, matches
