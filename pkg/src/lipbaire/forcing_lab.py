"""Finite partial Lipschitz injections, treated as forcing conditions.

Conditions are ordered by extension; two conditions are compatible when
their union is again a condition. Separating sets are finite lists of
equal-length word pairs that put the pairs of a condition into pairwise
disjoint boxes ``[s] x [t]``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Callable, Mapping, Optional, Sequence

from .back_and_forth import DenseOracle
from .lipschitz_maps import OK, PartialMap, Verdict, check_lipschitz
from .prefix_core import Point, Word, comparable, distance, in_basic_open, word_from_json


def is_condition(m: PartialMap) -> Verdict:
    """Lipschitz and injective."""
    seen: dict = {}
    for a, b in m.pairs:
        if b in seen:
            return Verdict(False, (seen[b], a, None), "not injective")
        seen[b] = a
    return check_lipschitz(m)


def union(p: PartialMap, q: PartialMap) -> Optional[PartialMap]:
    """Union as relations; ``None`` when the two disagree at some point."""
    pairs = list(p.pairs)
    for a, b in q.pairs:
        other = p.get(a)
        if other is None:
            pairs.append((a, b))
        elif other != b:
            return None
    return PartialMap(tuple(pairs))


def compatibility(p: PartialMap, q: PartialMap) -> Verdict:
    u = union(p, q)
    if u is None:
        clash = next(a for a, b in q.pairs if a in p and p(a) != b)
        return Verdict(False, (clash, clash, None), "different images for one point")
    return is_condition(u)


def compatible(p: PartialMap, q: PartialMap) -> bool:
    return compatibility(p, q).ok


# --------------------------------------------------------------------------
# Separating sets


def is_separating(x: Sequence[tuple]) -> Verdict:
    """Pairs of equal length, first coordinates pairwise incomparable, second too."""
    for s, t in x:
        if len(s) != len(t):
            return Verdict(False, None, f"pair {list(s)}, {list(t)} has unequal lengths")
    for (s, t), (u, v) in combinations(x, 2):
        if comparable(s, u):
            return Verdict(False, None, f"{list(s)} and {list(u)} are comparable")
        if comparable(t, v):
            return Verdict(False, None, f"{list(t)} and {list(v)} are comparable")
    return OK


def separating_from_json(obj) -> list[tuple[Word, Word]]:
    if not isinstance(obj, list):
        raise ValueError("a separating set is an array of {s, t} objects")
    return [(word_from_json(item["s"]), word_from_json(item["t"])) for item in obj]


def separating_to_json(x) -> list:
    return [{"s": list(s), "t": list(t)} for s, t in x]


def box_assignment(p: PartialMap, x: Sequence[tuple]) -> Optional[list[int]]:
    """For each pair of ``p``, the index of the unique box containing it;
    ``None`` unless that is a bijection onto the boxes of ``x``."""
    if len(p) != len(x):
        return None
    assignment = []
    for a, b in p.pairs:
        hits = [i for i, (s, t) in enumerate(x) if in_basic_open(s, a) and in_basic_open(t, b)]
        if len(hits) != 1:
            return None
        assignment.append(hits[0])
    if len(set(assignment)) != len(assignment):
        return None
    return assignment


def in_Px(p: PartialMap, x: Sequence[tuple]) -> bool:
    return box_assignment(p, x) is not None


def _boxes_around(p: PartialMap, depth_bound: int):
    """Separating sets with words of length <= depth_bound that contain ``p``.

    Such a set has one box per pair of ``p``; the box for ``(a, b)`` is
    ``(a|l, b|l)`` for some ``l``, so the candidates are indexed by length vectors.
    """
    pairs = p.pairs
    for lengths in product(range(depth_bound + 1), repeat=len(pairs)):
        x = [(a.prefix(l), b.prefix(l)) for (a, b), l in zip(pairs, lengths)]
        if is_separating(x):
            yield x


def closure_member(p: PartialMap, d: Sequence[PartialMap], depth_bound: int) -> bool:
    """Whether every separating set (words of length <= depth_bound) around
    ``p`` also has some member of ``d`` inside it."""
    if any(len(q) != len(p) for q in d):
        raise ValueError("closure is taken among conditions of one size")
    for x in _boxes_around(p, depth_bound):
        if not any(in_Px(q, x) for q in d):
            return False
    return True


# --------------------------------------------------------------------------
# Density


def _least_unused(used) -> int:
    k = 0
    while k in used:
        k += 1
    return k


def extend_condition(
    p: PartialMap,
    a: Point,
    b: Point,
    A_oracle: DenseOracle,
    B_oracle: DenseOracle,
) -> PartialMap:
    """A condition extending ``p`` with ``a`` in its domain and ``b`` in its range.

    First ``b`` gets a preimage ``c`` whose first letter no domain point
    starts with, so the new pair constrains nothing. Then ``a`` is sent into
    the box that continues the image of its closest domain point with a
    letter no range point has at that index. Letters are chosen least first.
    """
    verdict = is_condition(p)
    if not verdict:
        raise ValueError(f"not a condition: {verdict.reason}")
    q = p
    if b not in q.range:
        k = _least_unused({x[0] for x in q.domain})
        c = A_oracle.refine((k,), exclude=set(q.domain) | {a})
        q = q.extend(c, b)
    if a not in q:
        if len(q):
            agreement = [(distance(a, x), x) for x in q.domain]
            l = max(n for n, _ in agreement)
            witness = next(x for n, x in agreement if n == l)
            stem = q(witness).prefix(l)
            j = _least_unused({y[l] for y in q.range})
        else:
            stem, j = (), 0
        d = B_oracle.refine(stem + (j,), exclude=set(q.range))
        q = q.extend(a, d)
    return q


# --------------------------------------------------------------------------
# Antichains


@dataclass
class AntichainReport:
    members: list
    exact: bool
    witnesses: dict = field(default_factory=dict)
    min_size: int = 0

    @property
    def meets_min(self) -> bool:
        return len(self.members) >= self.min_size

    def to_json(self):
        return {
            "members": self.members,
            "size": len(self.members),
            "exact": self.exact,
            "meets_min": self.meets_min,
            "witnesses": [
                {"pair": [i, j], **v.to_json()} for (i, j), v in sorted(self.witnesses.items())
            ],
        }


EXACT_LIMIT = 20


def incompatibility_masks(conds: Sequence[PartialMap]) -> tuple[list[int], dict]:
    n = len(conds)
    masks = [0] * n
    verdicts = {}
    for i, j in combinations(range(n), 2):
        v = compatibility(conds[i], conds[j])
        if not v:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
            verdicts[(i, j)] = v
    return masks, verdicts


def _max_clique(masks: list[int]) -> int:
    """Bron-Kerbosch with pivoting over bitmask adjacency; returns the best member mask."""
    best = 0

    def expand(r: int, p: int, x: int):
        nonlocal best
        if not p and not x:
            if bin(r).count("1") > bin(best).count("1"):
                best = r
            return
        if bin(r).count("1") + bin(p).count("1") <= bin(best).count("1"):
            return
        pivot_pool = p | x
        pivot = max(_bits(pivot_pool), key=lambda u: bin(masks[u] & p).count("1"))
        for v in _bits(p & ~masks[pivot]):
            expand(r | 1 << v, p & masks[v], x & masks[v])
            p &= ~(1 << v)
            x |= 1 << v

    expand(0, (1 << len(masks)) - 1, 0)
    return best


def _bits(mask: int):
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def find_antichain(conds: Sequence[PartialMap], min_size: int = 0) -> AntichainReport:
    """A largest set of pairwise incompatible conditions: exact up to
    ``EXACT_LIMIT`` conditions, greedy (by incompatibility degree) beyond."""
    masks, verdicts = incompatibility_masks(conds)
    if not conds:
        return AntichainReport([], True, {}, min_size)
    if len(conds) <= EXACT_LIMIT:
        members = list(_bits(_max_clique(masks)))
        exact = True
    else:
        order = sorted(range(len(conds)), key=lambda i: (-bin(masks[i]).count("1"), i))
        chosen = 0
        for i in order:
            if chosen & ~masks[i] == 0:
                chosen |= 1 << i
        members = list(_bits(chosen))
        exact = False
    witnesses = {(i, j): verdicts[(i, j)] for i, j in combinations(members, 2)}
    return AntichainReport(members, exact, witnesses, min_size)


# --------------------------------------------------------------------------
# Predicates relative to externally supplied partitions


def respects_partition(p: PartialMap, label_a: Mapping[Point, int], label_b: Mapping[Point, int]) -> bool:
    """Every pair of ``p`` maps a point of ``A_alpha`` into ``B_alpha``."""
    return all(label_a[a] == label_b[b] for a, b in p.pairs)


def last_constructed_element(
    p: PartialMap,
    label_a: Mapping[Point, int],
    label_b: Mapping[Point, int],
    index_a: Mapping[Point, int],
    index_b: Mapping[Point, int],
) -> Optional[tuple[Point, Point]]:
    """The pair living in the highest block, if it is alone there and its
    image was enumerated before its argument (``p(a_k) = b_l`` with ``l < k``)."""
    if not len(p):
        return None
    top = max(label_a[a] for a in p.domain)
    top_pairs = [(a, b) for a, b in p.pairs if label_a[a] == top]
    if len(top_pairs) != 1:
        return None
    a, b = top_pairs[0]
    if label_b[b] != top or not index_b[b] < index_a[a]:
        return None
    return a, b
