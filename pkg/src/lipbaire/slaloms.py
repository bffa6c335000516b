"""Slaloms and width-bounded trees.

A slalom assigns a finite set of letters to each index below its depth. The
slalom built from a Lipschitz homomorphism and a sample whose points are
0/1-valued past a common stem ``s`` is narrow: at index ``n`` it holds at
most ``2 ** (n + 1 - len(s))`` letters, because that bounds the number of
distinct length ``n + 1`` prefixes in the sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Optional, Sequence, Union

from .lipschitz_maps import TreeHom
from .prefix_core import Point, WordTree, Word, length_lex_key, tree_from_words, word_from_json

TOTAL = "total"
EVENTUAL = "eventual"


@dataclass(frozen=True)
class Slalom:
    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(frozenset(v) for v in self.values))

    @property
    def depth(self) -> int:
        return len(self.values)

    def __getitem__(self, n: int) -> frozenset:
        return self.values[n]

    def widths(self) -> list[int]:
        return [len(v) for v in self.values]

    def to_json(self) -> list:
        return [sorted(v) for v in self.values]

    @classmethod
    def from_json(cls, obj) -> "Slalom":
        if not isinstance(obj, list):
            raise ValueError("a slalom is an array of arrays of letters")
        return cls(tuple(word_from_json(v) for v in obj))


@dataclass(frozen=True)
class WidthProfile:
    """A bound ``n -> h(n)``.

    ``pow2plus1`` is ``2**(n+1)`` (the width of each single-stem slalom),
    ``npow2`` is ``n * 2**(n+1)`` (the width of a merged slalom) and ``table``
    reads an explicit list, repeating its last entry.
    """

    kind: str
    table: tuple = ()

    def __post_init__(self):
        if self.kind not in ("pow2plus1", "npow2", "table"):
            raise ValueError(f"unknown width profile {self.kind!r}")
        if self.kind == "table" and not self.table:
            raise ValueError("table profile needs at least one entry")
        object.__setattr__(self, "table", tuple(self.table))

    def __call__(self, n: int) -> int:
        if self.kind == "pow2plus1":
            return 2 ** (n + 1)
        if self.kind == "npow2":
            return n * 2 ** (n + 1)
        return self.table[min(n, len(self.table) - 1)]

    @classmethod
    def from_function(cls, f: Callable[[int], int], depth: int) -> "WidthProfile":
        return cls("table", tuple(f(n) for n in range(depth + 1)))

    def is_corset(self, depth: int) -> bool:
        """Positive and nondecreasing on ``0..depth`` (unboundedness is not finitely checkable)."""
        vals = [self(n) for n in range(depth + 1)]
        return all(v >= 1 for v in vals) and all(a <= b for a, b in zip(vals, vals[1:]))

    def to_json(self):
        out = {"kind": self.kind}
        if self.kind == "table":
            out["table"] = list(self.table)
        return out

    @classmethod
    def from_json(cls, obj) -> "WidthProfile":
        if not isinstance(obj, dict) or "kind" not in obj:
            raise ValueError(f"not a width profile: {obj!r}")
        return cls(obj["kind"], tuple(int(v) for v in obj.get("table", ())))


POW2 = WidthProfile("pow2plus1")
NPOW2 = WidthProfile("npow2")


def log_corset(n: int) -> int:
    """``max(1, ceil(log2(n + 2)))`` in exact integer arithmetic."""
    return max(1, (n + 1).bit_length())


@dataclass(frozen=True)
class BoundedDenseSample:
    """Points extending ``s`` whose letters from index ``len(s)`` on are below ``bound``."""

    s: Word
    points: tuple
    bound: int = 2

    def __post_init__(self):
        s = tuple(self.s)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "points", tuple(self.points))
        for x in self.points:
            if x.prefix(len(s)) != s:
                raise ValueError(f"{x!r} does not extend {list(s)}")
            if x.tail >= self.bound or any(c >= self.bound for c in x.stem[len(s):]):
                raise ValueError(f"{x!r} has a letter >= {self.bound} past the stem")

    def to_json(self):
        return {"s": list(self.s), "points": [p.to_json() for p in self.points], "bound": self.bound}

    @classmethod
    def from_json(cls, obj) -> "BoundedDenseSample":
        if not isinstance(obj, dict) or "s" not in obj or "points" not in obj:
            raise ValueError("a sample needs 's' and 'points'")
        return cls(word_from_json(obj["s"]), tuple(Point.from_json(p) for p in obj["points"]), int(obj.get("bound", 2)))


def random_bounded_sample(s: Sequence[int], size: int, depth: int, rng, bound: int = 2) -> BoundedDenseSample:
    """Up to ``size`` distinct points ``s + (random letters < bound)``, eventually constant past ``depth``."""
    s = tuple(s)
    free = max(depth - len(s), 0)
    size = min(size, bound ** (free + 1))
    pts: set = set()
    while len(pts) < size:
        word = tuple(rng.randrange(bound) for _ in range(free))
        pts.add(Point(s + word, rng.randrange(bound)))
    return BoundedDenseSample(s, tuple(sorted(pts, key=lambda p: p.prefix(depth + 1))), bound)


def slalom_width_ok(phi: Slalom, h: Callable[[int], int]) -> bool:
    return all(len(v) <= h(n) for n, v in enumerate(phi.values))


def captures(phi: Slalom, x: Point, mode: str = TOTAL, n0: Optional[int] = None) -> bool:
    """Whether ``x(n) in phi(n)`` for every ``n < depth`` (total) or every
    ``n`` in ``[n0, depth)`` (eventual).

    With ``n0=None`` the eventual mode asks for some ``n0 < depth``, which at
    finite depth comes down to the last level.
    """
    if mode == TOTAL:
        start = 0
    elif mode == EVENTUAL:
        start = phi.depth - 1 if n0 is None else n0
        if phi.depth and not 0 <= start < phi.depth:
            raise ValueError(f"n0 must lie in [0, {phi.depth})")
    else:
        raise ValueError(f"unknown capture mode {mode!r}")
    return all(x[n] in phi.values[n] for n in range(max(start, 0), phi.depth))


def capture_start(phi: Slalom, x: Point) -> Optional[int]:
    """Least ``n0`` from which ``phi`` captures ``x`` up to its depth; ``None`` if even the last level misses."""
    n0 = phi.depth
    while n0 > 0 and x[n0 - 1] in phi.values[n0 - 1]:
        n0 -= 1
    return n0 if n0 < phi.depth else None


def sample_width_bound(stem_length: int, n: int, bound: int = 2) -> int:
    """Largest possible ``|phi_s(n)|`` for a bound-``bound`` sample over a stem of the given length."""
    return bound ** max(0, n + 1 - stem_length)


def slalom_from_hom(h: TreeHom, sample: BoundedDenseSample, depth: int) -> Slalom:
    """``phi(n) = {h(x|depth)[n] : x in sample}`` for ``n < depth``."""
    if h.shift:
        raise ValueError("slaloms are read off level preserving homomorphisms")
    values = [set() for _ in range(depth)]
    for x in sample.points:
        image = h.apply(x.prefix(depth))
        for n, letter in enumerate(image):
            values[n].add(letter)
    return Slalom(tuple(values))


def merge_slaloms(slaloms: Union[Sequence[Slalom], Mapping[Word, Slalom]]) -> Slalom:
    """``phi(n)`` is the union of ``phi_i(n)`` over ``i < n``.

    A mapping keyed by words is ordered length-lexicographically first.
    """
    if isinstance(slaloms, Mapping):
        ordered = [slaloms[w] for w in sorted(slaloms, key=length_lex_key)]
    else:
        ordered = list(slaloms)
    if not ordered:
        return Slalom(())
    depth = ordered[0].depth
    if any(phi.depth != depth for phi in ordered):
        raise ValueError("slaloms to merge must share a depth")
    values = []
    for n in range(depth):
        level = set()
        for phi in ordered[:n]:
            level |= phi.values[n]
        values.append(level)
    return Slalom(tuple(values))


def tree_width(tree: WordTree) -> list[int]:
    """Number of nodes on each level ``0..height``."""
    counts = [0] * (tree.height + 1)
    for w in tree.nodes:
        counts[len(w)] += 1
    return counts


def width_check(tree: WordTree, c: Callable[[int], int]) -> list[bool]:
    return [n <= c(level) for level, n in enumerate(tree_width(tree))]


def has_width(tree: WordTree, c: Callable[[int], int]) -> bool:
    return all(width_check(tree, c))


def hom_image_tree(h: TreeHom, tree: WordTree) -> WordTree:
    if h.shift:
        raise ValueError("image trees need a level preserving homomorphism")
    return WordTree(frozenset(h.apply(w) for w in tree.nodes))


def covered_by(x: Point, trees: Iterable[WordTree], depth: int) -> bool:
    """Whether some tree contains ``x|n`` for every ``n <= depth``."""
    prefixes = [x.prefix(n) for n in range(depth + 1)]
    return any(all(p in t for p in prefixes) for t in trees)


def random_width_tree(c: Callable[[int], int], depth: int, rng, letters: int = 2) -> WordTree:
    """A random tree of height <= depth whose level ``n`` has at most ``c(n)`` nodes."""
    level = [()]
    nodes = [()]
    for n in range(1, depth + 1):
        children = [w + (b,) for w in level for b in range(letters)]
        keep = rng.randint(1, min(c(n), len(children)))
        level = sorted(rng.sample(children, keep))
        nodes.extend(level)
    return tree_from_words(nodes)
