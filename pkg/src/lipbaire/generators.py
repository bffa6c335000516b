"""Seeded random objects for property runs."""

from __future__ import annotations

from typing import Iterable, Sequence

from .lipschitz_maps import PartialMap, Table
from .prefix_core import OMEGA, Alphabet, Point, tree_from_words
from .forcing_lab import is_condition


def random_word(rng, length: int, letters: int) -> tuple:
    return tuple(rng.randrange(letters) for _ in range(length))


def random_point(rng, letters: int = 3, max_stem: int = 6) -> Point:
    return Point(random_word(rng, rng.randint(0, max_stem), letters), rng.randrange(letters))


def random_hom_on(rng, words: Iterable[Sequence[int]], letters: int, alphabet_in: Alphabet = OMEGA,
                  alphabet_out: Alphabet = OMEGA) -> Table:
    """Random homomorphism tabulated on the downward closure of ``words``."""
    nodes = sorted(tree_from_words(words).nodes, key=len)
    entries = {(): ()}
    for w in nodes:
        if w:
            entries[w] = entries[w[:-1]] + (rng.randrange(letters),)
    depth = max((len(w) for w in nodes), default=0)
    return Table(alphabet_in, alphabet_out, depth, entries)


def random_condition(rng, size: int, letters: int = 3, max_stem: int = 3, attempts: int = 200) -> PartialMap:
    """A random finite Lipschitz injection with ``size`` pairs, grown one pair at a time."""
    m = PartialMap()
    for _ in range(attempts):
        if len(m) == size:
            return m
        a, b = random_point(rng, letters, max_stem), random_point(rng, letters, max_stem)
        if a in m:
            continue
        grown = m.extend(a, b)
        if is_condition(grown):
            m = grown
    if len(m) == size:
        return m
    raise RuntimeError(f"no condition of size {size} found in {attempts} attempts")


def random_map(rng, size: int, letters: int = 3, max_stem: int = 3) -> PartialMap:
    """Random partial map; not necessarily Lipschitz or injective."""
    dom = {random_point(rng, letters, max_stem) for _ in range(size)}
    return PartialMap(tuple((a, random_point(rng, letters, max_stem)) for a in sorted(dom, key=_key)))


def _key(p: Point):
    return (p.stem, p.tail)
