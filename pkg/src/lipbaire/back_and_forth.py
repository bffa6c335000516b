"""Step-by-step construction of a partial isometry between two countable dense sets.

Each dense set is presented by a ``DenseOracle``: an injective enumeration plus
a ``refine`` call that produces a member of a given basic open set. Oracles
backed by a finite list of points raise ``Exhausted`` when they run dry, which
is how failures of extendability show up at finite scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from itertools import count
from typing import Container, Iterator, Optional, Protocol, Sequence

from .lipschitz_maps import PartialMap
from .prefix_core import OMEGA, Alphabet, Point, PrefixIndex, Word, in_basic_open


class Exhausted(LookupError):
    """The oracle has no further point satisfying the request."""


class NoFreshLetter(ValueError):
    """Every letter is already used at the splitting level (finite alphabet)."""


class OracleError(ValueError):
    """The oracle broke its contract (e.g. enumerated a point twice)."""


class DenseOracle(Protocol):
    alphabet: Alphabet

    def enumerate(self, i: int) -> Point: ...

    def refine(self, s: Sequence[int], exclude: Container[Point]) -> Point: ...


def _stems_of_weight(alphabet: Alphabet, tail: int, weight: int) -> Iterator[Word]:
    """Canonical stems (not ending in ``tail``) with ``len + sum == weight``."""

    def build(prefix: Word, remaining: int):
        if remaining == 0:
            if not prefix or prefix[-1] != tail:
                yield prefix
            return
        top = remaining - 1
        if alphabet.size is not None:
            top = min(top, alphabet.size - 1)
        for letter in range(top + 1):
            yield from build(prefix + (letter,), remaining - 1 - letter)

    yield from build((), weight)


def _words_by_weight(alphabet: Alphabet) -> Iterator[Word]:
    for weight in count():
        yield from _stems_of_weight(alphabet, -1, weight)


class EventuallyConstantOracle:
    """All points over ``alphabet`` that are eventually equal to ``tail``.

    The enumeration lists stems by weight (length plus letter sum), so every
    point eventually appears; with a seed, each weight block is shuffled.
    """

    def __init__(self, alphabet: Alphabet = Alphabet.finite(2), tail: int = 0, seed: Optional[int] = None):
        if not alphabet.valid(tail):
            raise ValueError(f"tail letter {tail} not in {alphabet}")
        self.alphabet = alphabet
        self.tail = tail
        self.seed = seed
        self._rng = random.Random(seed) if seed is not None else None
        self._listed: list[Point] = []
        self._weight = 0

    def __contains__(self, x: Point) -> bool:
        return x.tail == self.tail and all(self.alphabet.valid(c) for c in x.stem)

    def enumerate(self, i: int) -> Point:
        while len(self._listed) <= i:
            block = [Point(s, self.tail) for s in _stems_of_weight(self.alphabet, self.tail, self._weight)]
            if self._rng is not None:
                self._rng.shuffle(block)
            self._listed.extend(block)
            self._weight += 1
        return self._listed[i]

    def refine(self, s, exclude=()):
        s = self.alphabet.check_word(s)
        for u in _words_by_weight(self.alphabet):
            x = Point(s + u, self.tail)
            if x not in exclude:
                return x
        raise AssertionError("unreachable: every basic open set holds infinitely many points")


class FiniteOracle:
    """A finite sample of points, enumerated in the given order."""

    def __init__(self, points: Sequence[Point], alphabet: Alphabet = OMEGA):
        self.points = tuple(points)
        self.alphabet = alphabet
        if len(set(self.points)) != len(self.points):
            raise OracleError("finite oracle lists a point twice")
        for p in self.points:
            alphabet.check_point(p)

    def __contains__(self, x: Point) -> bool:
        return x in self.points

    def enumerate(self, i: int) -> Point:
        if i >= len(self.points):
            raise Exhausted(f"sample has only {len(self.points)} points")
        return self.points[i]

    def refine(self, s, exclude=()):
        for x in self.points:
            if in_basic_open(s, x) and x not in exclude:
                return x
        raise Exhausted(f"no unused sample point in [{list(s)}]")


@dataclass
class BnfState:
    """The partial isometry built so far; mutated in place by each step."""

    A: DenseOracle
    B: DenseOracle
    step: int = 0
    pairs: list = field(default_factory=list)
    transcript: list = field(default_factory=list)
    forward: dict = field(default_factory=dict, repr=False)
    backward: dict = field(default_factory=dict, repr=False)
    dom_index: PrefixIndex = field(default_factory=PrefixIndex, repr=False)
    range_index: PrefixIndex = field(default_factory=PrefixIndex, repr=False)

    @property
    def current(self) -> PartialMap:
        return PartialMap(tuple(self.pairs))

    def _add(self, a: Point, b: Point):
        self.pairs.append((a, b))
        self.forward[a] = b
        self.backward[b] = a
        self.dom_index.add(a)
        self.range_index.add(b)

    def transcript_json(self) -> list:
        return [
            {"direction": d, "scheduled": x.to_json(), "partner": y.to_json(), "k": k}
            for d, x, y, k in self.transcript
        ]


def bnf_init(A: DenseOracle, B: DenseOracle) -> BnfState:
    state = BnfState(A, B)
    a0, b0 = A.enumerate(0), B.enumerate(0)
    state._add(a0, b0)
    state.transcript.append(("init", a0, b0, 0))
    return state


def _fresh_letter(alphabet: Alphabet, used: set) -> int:
    for letter in count():
        if alphabet.size is not None and letter >= alphabet.size:
            raise NoFreshLetter(f"all {alphabet.size} letters already used")
        if letter not in used:
            return letter


def _partner(x: Point, index: PrefixIndex, images: dict, target: DenseOracle, exclude) -> tuple[Point, int]:
    # k: longest agreement of x with the handled side; the maximally good points
    # all share one image prefix of length k, and the partner must continue it
    # with a letter none of their images use at index k.
    k, good = index.best_agreement(x)
    stem = images[good[0]].prefix(k)
    used = {images[g][k] for g in good}
    letter = _fresh_letter(target.alphabet, used)
    return target.refine(stem + (letter,), exclude), k


def bnf_forth(state: BnfState, a: Point) -> BnfState:
    """Add ``a`` to the domain, choosing its image by the maximally-good rule."""
    if a in state.forward:
        raise ValueError(f"{a!r} is already in the domain")
    b, k = _partner(a, state.dom_index, state.forward, state.B, state.backward)
    state._add(a, b)
    state.transcript.append(("forth", a, b, k))
    return state


def bnf_back(state: BnfState, b: Point) -> BnfState:
    """Add ``b`` to the range; mirror image of ``bnf_forth``."""
    if b in state.backward:
        raise ValueError(f"{b!r} is already in the range")
    a, k = _partner(b, state.range_index, state.backward, state.A, state.forward)
    state._add(a, b)
    state.transcript.append(("back", b, a, k))
    return state


def bnf_run(A: DenseOracle, B: DenseOracle, n: int, on_step=None) -> BnfState:
    """Run ``n`` forth/back rounds; after round ``i`` the first ``i + 1``
    points of each enumeration are covered.

    ``on_step(state)`` is called after the initial step and after every round.
    """
    seen_a: dict = {}
    seen_b: dict = {}

    def scheduled(oracle, seen, i):
        x = oracle.enumerate(i)
        if seen.setdefault(x, i) != i:
            raise OracleError(f"enumeration repeats {x!r} at indices {seen[x]} and {i}")
        return x

    scheduled(A, seen_a, 0)
    scheduled(B, seen_b, 0)
    state = bnf_init(A, B)
    if on_step:
        on_step(state)
    for i in range(1, n + 1):
        state.step = i
        a = scheduled(A, seen_a, i)
        if a not in state.forward:
            bnf_forth(state, a)
        b = scheduled(B, seen_b, i)
        if b not in state.backward:
            bnf_back(state, b)
        if on_step:
            on_step(state)
    return state
