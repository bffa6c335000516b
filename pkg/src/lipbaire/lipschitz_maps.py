"""Tree homomorphisms and finite partial maps between point sets.

A Lipschitz map (constant 1) of X^omega is the same thing as a level and
order preserving map of X^<omega>; ``TreeHom`` is a small closed algebra of
such maps (finite tables plus a few combinators) so they can be enumerated,
serialized and inspected level by level.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Iterator, Optional, Sequence

from .prefix_core import (
    INFINITE,
    OMEGA,
    Alphabet,
    Point,
    Word,
    agreement_depth,
    distance,
    word_from_json,
)


class NotLipschitz(ValueError):
    pass


class OutOfTable(KeyError):
    """A table homomorphism was evaluated on a word it has no entry for."""


class NotInClosure(ValueError):
    pass


class AlphabetMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Verdict:
    """Outcome of a property check; falsy when a counterwitness was found.

    ``witness`` is ``(a, a2, k)``: two domain points and the least index at
    which the checked property breaks for them.
    """

    ok: bool
    witness: Optional[tuple] = None
    reason: str = ""

    def __bool__(self):
        return self.ok

    def to_json(self) -> dict:
        out = {"ok": self.ok}
        if not self.ok:
            out["reason"] = self.reason
            if self.witness is not None:
                a, a2, k = self.witness
                out["witness"] = {"a": a.to_json(), "a2": a2.to_json(), "k": k}
        return out


OK = Verdict(True)


# --------------------------------------------------------------------------
# Tree homomorphisms


class TreeHom:
    """Base class; subclasses implement ``apply`` on finite words.

    ``shift`` is the amount ``apply`` lengthens every word by. It is zero for
    every form except ``Prepend``, which maps ``w`` to ``s + w``.
    """

    alphabet_in: Alphabet
    alphabet_out: Alphabet
    shift = 0

    def apply(self, s: Sequence[int]) -> Word:
        raise NotImplementedError

    def apply_point(self, x: Point) -> Point:
        """Image of an eventually constant point, for the combinator forms."""
        raise NotImplementedError(f"{type(self).__name__} has no point evaluation")

    def to_json(self) -> dict:
        raise NotImplementedError

    def _check_input(self, s) -> Word:
        return self.alphabet_in.check_word(s)


@dataclass(frozen=True)
class Table(TreeHom):
    """A homomorphism given by an explicit table on words of length <= depth.

    Tables may be partial (only a downward closed set of words has entries);
    evaluating off the table raises ``OutOfTable``.
    """

    alphabet_in: Alphabet
    alphabet_out: Alphabet
    depth: int
    entries: dict = field(hash=False, compare=True)

    def __post_init__(self):
        entries = {tuple(k): tuple(v) for k, v in self.entries.items()}
        object.__setattr__(self, "entries", entries)
        for s, t in entries.items():
            if len(s) > self.depth:
                raise ValueError(f"entry {s!r} deeper than table depth {self.depth}")
            if len(s) != len(t):
                raise ValueError(f"entry {s!r} -> {t!r} is not level preserving")
            self.alphabet_in.check_word(s)
            self.alphabet_out.check_word(t)
            if s:
                parent = entries.get(s[:-1])
                if parent is None:
                    raise ValueError(f"table not downward closed at {s!r}")
                if t[:-1] != parent:
                    raise ValueError(f"entry {s!r} -> {t!r} is not order preserving")

    def apply(self, s):
        s = tuple(s)
        try:
            return self.entries[s]
        except KeyError:
            raise OutOfTable(s) from None

    def is_total(self) -> bool:
        if not self.alphabet_in.is_finite:
            return False
        count = sum(self.alphabet_in.size ** n for n in range(self.depth + 1))
        return len(self.entries) == count

    def to_json(self):
        return {
            "kind": "table",
            "alphabet_in": self.alphabet_in.to_json(),
            "alphabet_out": self.alphabet_out.to_json(),
            "depth": self.depth,
            "entries": {",".join(map(str, s)): list(t) for s, t in sorted(self.entries.items())},
        }


@dataclass(frozen=True)
class Identity(TreeHom):
    alphabet: Alphabet = OMEGA

    @property
    def alphabet_in(self):
        return self.alphabet

    @property
    def alphabet_out(self):
        return self.alphabet

    def apply(self, s):
        return self._check_input(s)

    def apply_point(self, x):
        return self.alphabet.check_point(x)

    def to_json(self):
        return {"kind": "identity", "alphabet": self.alphabet.to_json()}


@dataclass(frozen=True)
class Parity(TreeHom):
    """Letterwise reduction mod 2 into Cantor space."""

    alphabet_in: Alphabet = OMEGA

    @property
    def alphabet_out(self):
        return Alphabet.finite(2)

    def apply(self, s):
        return tuple(letter % 2 for letter in self._check_input(s))

    def apply_point(self, x):
        self.alphabet_in.check_point(x)
        return Point(tuple(letter % 2 for letter in x.stem), x.tail % 2)

    def to_json(self):
        return {"kind": "parity", "alphabet_in": self.alphabet_in.to_json()}


@dataclass(frozen=True)
class Prepend(TreeHom):
    """``w -> s + w``. On points this pushes every disagreement ``len(s)`` places later."""

    s: Word = ()
    alphabet: Alphabet = OMEGA

    def __post_init__(self):
        object.__setattr__(self, "s", self.alphabet.check_word(self.s))

    @property
    def alphabet_in(self):
        return self.alphabet

    @property
    def alphabet_out(self):
        return self.alphabet

    @property
    def shift(self):
        return len(self.s)

    def apply(self, w):
        return self.s + self._check_input(w)

    def apply_point(self, x):
        self.alphabet.check_point(x)
        return Point(self.s + x.stem, x.tail)

    def to_json(self):
        return {"kind": "prepend", "s": list(self.s), "alphabet": self.alphabet.to_json()}


@dataclass(frozen=True)
class LetterwiseRelabel(TreeHom):
    """Applies ``maps[i]`` to the letter at index ``i``.

    Indices past the end of ``maps`` reuse the last map; letters a map does not
    mention are left unchanged.
    """

    maps: tuple = ({},)
    alphabet_in: Alphabet = OMEGA
    alphabet_out: Alphabet = OMEGA

    def __post_init__(self):
        maps = tuple({int(k): int(v) for k, v in m.items()} for m in self.maps)
        if not maps:
            raise ValueError("relabel needs at least one letter map")
        object.__setattr__(self, "maps", maps)

    def __hash__(self):
        return hash(tuple(tuple(sorted(m.items())) for m in self.maps))

    def _map_at(self, i: int) -> dict:
        return self.maps[min(i, len(self.maps) - 1)]

    def apply(self, s):
        s = self._check_input(s)
        return self.alphabet_out.check_word(self._map_at(i).get(c, c) for i, c in enumerate(s))

    def apply_point(self, x):
        self.alphabet_in.check_point(x)
        horizon = max(len(x.stem), len(self.maps))
        last = self.maps[-1]
        return Point(self.apply(x.prefix(horizon)), last.get(x.tail, x.tail))

    def to_json(self):
        return {
            "kind": "relabel",
            "alphabet_in": self.alphabet_in.to_json(),
            "alphabet_out": self.alphabet_out.to_json(),
            "maps": [{str(k): v for k, v in sorted(m.items())} for m in self.maps],
        }


@dataclass(frozen=True)
class Compose(TreeHom):
    outer: TreeHom
    inner: TreeHom

    @property
    def alphabet_in(self):
        return self.inner.alphabet_in

    @property
    def alphabet_out(self):
        return self.outer.alphabet_out

    @property
    def shift(self):
        return self.outer.shift + self.inner.shift

    def apply(self, s):
        return self.outer.apply(self.inner.apply(s))

    def apply_point(self, x):
        return self.outer.apply_point(self.inner.apply_point(x))

    def to_json(self):
        return {"kind": "compose", "outer": self.outer.to_json(), "inner": self.inner.to_json()}


def apply_hom(h: TreeHom, s: Sequence[int]) -> Word:
    return h.apply(s)


def compose_homs(outer: TreeHom, inner: TreeHom) -> Compose:
    if inner.alphabet_out != outer.alphabet_in:
        raise AlphabetMismatch(f"inner maps into {inner.alphabet_out}, outer reads {outer.alphabet_in}")
    return Compose(outer, inner)


def tabulate(h: TreeHom, depth: int) -> Table:
    """Explicit table of ``h`` on every word of length <= depth (finite input alphabet)."""
    if h.shift:
        raise ValueError("only level preserving homomorphisms can be tabulated")
    entries = {s: h.apply(s) for s in h.alphabet_in.words_upto(depth)}
    return Table(h.alphabet_in, h.alphabet_out, depth, entries)


def hom_from_json(obj) -> TreeHom:
    if not isinstance(obj, dict) or "kind" not in obj:
        raise ValueError(f"not a tree homomorphism: {obj!r}")
    kind = obj["kind"]
    if kind == "table":
        entries = {}
        for key, value in obj["entries"].items():
            s = tuple(int(c) for c in key.split(",")) if key else ()
            entries[s] = word_from_json(value)
        return Table(
            Alphabet.from_json(obj["alphabet_in"]),
            Alphabet.from_json(obj["alphabet_out"]),
            int(obj["depth"]),
            entries,
        )
    if kind == "identity":
        return Identity(Alphabet.from_json(obj.get("alphabet", {"countable": True})))
    if kind == "parity":
        return Parity(Alphabet.from_json(obj.get("alphabet_in", {"countable": True})))
    if kind == "prepend":
        return Prepend(word_from_json(obj["s"]), Alphabet.from_json(obj.get("alphabet", {"countable": True})))
    if kind == "relabel":
        return LetterwiseRelabel(
            tuple(obj["maps"]),
            Alphabet.from_json(obj.get("alphabet_in", {"countable": True})),
            Alphabet.from_json(obj.get("alphabet_out", {"countable": True})),
        )
    if kind == "compose":
        return compose_homs(hom_from_json(obj["outer"]), hom_from_json(obj["inner"]))
    raise ValueError(f"unknown homomorphism kind {kind!r}")


def enumerate_table_homs(alphabet: Alphabet, depth: int) -> Iterator[Table]:
    """Every total homomorphism of ``alphabet^{<=depth}`` into itself.

    A homomorphism is fixed by the last letter it assigns to each nonempty
    word, so there are ``k ** (number of nonempty words)`` of them.
    """
    words = [w for w in alphabet.words_upto(depth) if w]
    for choice in product(alphabet.letters(), repeat=len(words)):
        entries = {(): ()}
        for w, letter in zip(words, choice):
            entries[w] = entries[w[:-1]] + (letter,)
        yield Table(alphabet, alphabet, depth, entries)


# --------------------------------------------------------------------------
# Partial maps


@dataclass(frozen=True)
class PartialMap:
    """A finite partial function on points, as an ordered tuple of pairs."""

    pairs: tuple = ()

    def __post_init__(self):
        pairs = tuple((a, b) for a, b in self.pairs)
        object.__setattr__(self, "pairs", pairs)
        lookup = {}
        for a, b in pairs:
            if not isinstance(a, Point) or not isinstance(b, Point):
                raise TypeError("partial maps pair Points with Points")
            if a in lookup:
                raise ValueError(f"{a!r} assigned twice")
            lookup[a] = b
        object.__setattr__(self, "_lookup", lookup)

    def __len__(self):
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    def __contains__(self, a: Point) -> bool:
        return a in self._lookup

    def __call__(self, a: Point) -> Point:
        return self._lookup[a]

    def get(self, a: Point, default=None):
        return self._lookup.get(a, default)

    @property
    def domain(self) -> tuple:
        return tuple(a for a, _ in self.pairs)

    @property
    def range(self) -> tuple:
        return tuple(b for _, b in self.pairs)

    def extend(self, a: Point, b: Point) -> "PartialMap":
        return PartialMap(self.pairs + ((a, b),))

    def inverse(self) -> "PartialMap":
        return PartialMap(tuple((b, a) for a, b in self.pairs))

    def is_injective(self) -> bool:
        return len(set(self.range)) == len(self.pairs)

    def to_json(self) -> list:
        return [[a.to_json(), b.to_json()] for a, b in self.pairs]

    @classmethod
    def from_json(cls, obj) -> "PartialMap":
        if not isinstance(obj, list):
            raise ValueError("a partial map is an array of [point, point] pairs")
        pairs = []
        for item in obj:
            if not isinstance(item, list) or len(item) != 2:
                raise ValueError(f"not a pair: {item!r}")
            pairs.append((Point.from_json(item[0]), Point.from_json(item[1])))
        return cls(tuple(pairs))

    @classmethod
    def identity(cls, points: Iterable[Point]) -> "PartialMap":
        return cls(tuple((p, p) for p in points))


def _level_scan(m: PartialMap, injective: bool) -> Verdict:
    """Checks level by level that ``a|n -> m(a)|n`` is a function (and injective).

    The first level ``n`` where it fails pins the least violating index
    ``n - 1``; no pair can first break later than ``agreement_depth``.
    """
    if len(m) < 2:
        return OK
    horizon = agreement_depth(m.domain + m.range)
    for n in range(1, horizon + 1):
        forward: dict = {}
        backward: dict = {}
        for a, b in m.pairs:
            sa, sb = a.prefix(n), b.prefix(n)
            prev = forward.setdefault(sa, (a, sb))
            if prev[1] != sb:
                return Verdict(False, (prev[0], a, n - 1), "images split before the arguments do")
            if injective:
                prev = backward.setdefault(sb, (a, sa))
                if prev[1] != sa:
                    return Verdict(False, (prev[0], a, n - 1), "images agree longer than the arguments do")
    return OK


def check_lipschitz(m: PartialMap) -> Verdict:
    """``ok`` iff images never agree less than their arguments."""
    return _level_scan(m, injective=False)


def check_isometry(m: PartialMap) -> Verdict:
    """``ok`` iff images agree exactly as long as their arguments."""
    return _level_scan(m, injective=True)


def check_lipschitz_pairwise(m: PartialMap) -> Verdict:
    """Quadratic reference check straight from the definition."""
    worst = None
    for i, (a, b) in enumerate(m.pairs):
        for a2, b2 in m.pairs[i + 1:]:
            kd, kr = distance(a, a2), distance(b, b2)
            if kr < kd and (worst is None or kr < worst[2]):
                worst = (a, a2, kr)
    return OK if worst is None else Verdict(False, worst, "images split before the arguments do")


def check_isometry_pairwise(m: PartialMap) -> Verdict:
    worst = None
    for i, (a, b) in enumerate(m.pairs):
        for a2, b2 in m.pairs[i + 1:]:
            kd, kr = distance(a, a2), distance(b, b2)
            if kd != kr:
                k = min(kd, kr)
                if worst is None or k < worst[2]:
                    worst = (a, a2, k)
    return OK if worst is None else Verdict(False, worst, "distance not preserved")


def induced_hom(
    m: PartialMap,
    depth: int,
    alphabet_in: Alphabet = OMEGA,
    alphabet_out: Alphabet = OMEGA,
) -> Table:
    """The partial table ``a|j -> m(a)|j`` for ``a`` in the domain and ``j <= depth``."""
    verdict = check_lipschitz(m)
    if not verdict:
        raise NotLipschitz(verdict.to_json())
    entries = {(): ()}
    for a, b in m.pairs:
        for j in range(1, depth + 1):
            entries[a.prefix(j)] = b.prefix(j)
    return Table(alphabet_in, alphabet_out, depth, entries)


def lift_to_closure(m: PartialMap, targets: Iterable[Sequence[int]]) -> list[tuple[Word, Word]]:
    """Values of the unique Lipschitz extension to the closure of the domain,
    read off at finite words: ``s -> m(a)|len(s)`` for any domain point ``a`` in ``[s]``.
    """
    verdict = check_lipschitz(m)
    if not verdict:
        raise NotLipschitz(verdict.to_json())
    out = []
    for s in targets:
        s = tuple(s)
        for a, b in m.pairs:
            if a.prefix(len(s)) == s:
                out.append((s, b.prefix(len(s))))
                break
        else:
            raise NotInClosure(f"no domain point extends {list(s)}")
    return out


@dataclass(frozen=True)
class LevelReport:
    level: int
    injective: bool
    surjective: bool

    def to_json(self):
        return {"level": self.level, "injective": self.injective, "surjective": self.surjective}


def level_analysis(h: TreeHom, depth: int) -> list[LevelReport]:
    """Injectivity and surjectivity of ``h`` restricted to each level ``j <= depth``.

    Surjectivity is onto ``alphabet_out^j``. Requires finite alphabets and a
    level preserving ``h`` defined on every word of length <= depth.
    """
    if not (h.alphabet_in.is_finite and h.alphabet_out.is_finite):
        raise ValueError("level analysis needs finite alphabets")
    if h.shift:
        raise ValueError("level analysis needs a level preserving homomorphism")
    reports = []
    for j in range(depth + 1):
        images = {h.apply(w) for w in h.alphabet_in.words(j)}
        reports.append(
            LevelReport(
                j,
                injective=len(images) == h.alphabet_in.size ** j,
                surjective=len(images) == h.alphabet_out.size ** j,
            )
        )
    return reports


def is_isometry_to_depth(h: TreeHom, depth: int) -> bool:
    """Whether ``h`` preserves the length of common prefixes among depth-``depth`` words."""
    words = list(h.alphabet_in.words(depth))
    images = [h.apply(w) for w in words]
    for i in range(len(words)):
        for j in range(i + 1, len(words)):
            if _meet_len(words[i], words[j]) != _meet_len(images[i], images[j]):
                return False
    return True


def _meet_len(u, v) -> int:
    n = 0
    for a, b in zip(u, v):
        if a != b:
            break
        n += 1
    return n


def homomorphism_violations(h: TreeHom, words: Iterable[Sequence[int]]) -> list[str]:
    """Words (and their parents) on which ``h`` breaks level or order preservation."""
    bad = []
    for w in words:
        w = tuple(w)
        img = h.apply(w)
        if len(img) != len(w) + h.shift:
            bad.append(f"level: {w!r} -> {img!r}")
        if w and not img[: len(img) - 1] == h.apply(w[:-1]):
            bad.append(f"order: {w[:-1]!r} -> {w!r}")
    return bad

