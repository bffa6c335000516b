"""Odd/even support families: dense samples that admit no isometry between them.

Inside a cell ``[s]`` an odd-family point is nonzero only at odd indices
``>= len(s)``, so two points of one odd cell first differ at an odd index.
Even cells are the same with "even". Any two-point map from an odd cell to
an even cell therefore changes a distance and cannot be an isometry.
"""

from __future__ import annotations

import random
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Sequence

from .lipschitz_maps import PartialMap, check_isometry
from .prefix_core import BINARY, INFINITE, Alphabet, Point, Word, distance, word_from_json

ODD = "odd"
EVEN = "even"


@dataclass(frozen=True)
class ParityFamily:
    kind: str
    cells: dict

    def __post_init__(self):
        if self.kind not in (ODD, EVEN):
            raise ValueError(f"kind must be 'odd' or 'even', got {self.kind!r}")

    def __hash__(self):
        return hash((self.kind, tuple(self.cells)))

    def points(self) -> list[Point]:
        return [p for pts in self.cells.values() for p in pts]

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "cells": [{"s": list(s), "points": [p.to_json() for p in pts]} for s, pts in self.cells.items()],
        }

    @classmethod
    def from_json(cls, obj) -> "ParityFamily":
        if not isinstance(obj, dict) or "kind" not in obj or "cells" not in obj:
            raise ValueError("a parity family needs 'kind' and 'cells'")
        cells = {}
        for cell in obj["cells"]:
            cells[word_from_json(cell["s"])] = tuple(Point.from_json(p) for p in cell["points"])
        return cls(obj["kind"], cells)


def _allowed(kind: str, k: int) -> bool:
    return k % 2 == (1 if kind == ODD else 0)


def support_positions(kind: str, s: Sequence[int], depth_budget: int) -> list[int]:
    """Indices in ``[len(s), depth_budget)`` where a cell point may be nonzero."""
    return [k for k in range(len(s), depth_budget) if _allowed(kind, k)]


def cell_capacity(kind: str, s: Sequence[int], depth_budget: int, letters: int) -> int:
    """How many distinct cell points exist with support below ``depth_budget``."""
    return letters ** len(support_positions(kind, s, depth_budget))


def gen_family(
    kind: str,
    cell_words: Iterable[Sequence[int]],
    per_cell: int,
    seed: int,
    alphabet: Alphabet = BINARY,
    depth_budget: int = 20,
    letter_cap: int = 3,
) -> ParityFamily:
    """Random family with ``per_cell`` distinct eventually-0 points in each cell.

    Free positions take letters ``0..k-1`` for a finite alphabet of size ``k``,
    or ``0..letter_cap`` for the countable one.
    """
    if kind not in (ODD, EVEN):
        raise ValueError(f"kind must be 'odd' or 'even', got {kind!r}")
    if per_cell < 1:
        raise ValueError("per_cell must be at least 1")
    letters = alphabet.size if alphabet.is_finite else letter_cap + 1
    rng = random.Random(seed)
    cells = {}
    for s in cell_words:
        s = alphabet.check_word(s)
        positions = support_positions(kind, s, depth_budget)
        capacity = letters ** len(positions)
        if per_cell > capacity:
            raise ValueError(f"cell {list(s)} holds only {capacity} points below depth {depth_budget}")
        pts = []
        for code in rng.sample(range(capacity), per_cell):
            tail = [0] * (depth_budget - len(s))
            for k in positions:
                code, digit = divmod(code, letters)
                tail[k - len(s)] = digit
            pts.append(Point(s + tuple(tail), 0))
        cells[s] = tuple(pts)
    return ParityFamily(kind, cells)


def parity_violations(family: ParityFamily) -> list[tuple[Word, Point, int]]:
    """Every ``(cell, point, index)`` where a point is nonzero at a forbidden index."""
    bad = []
    for s, pts in family.cells.items():
        for x in pts:
            if x.prefix(len(s)) != s:
                bad.append((s, x, -1))
            if x.tail != 0:
                bad.append((s, x, len(x.stem)))
            for k in range(len(s), len(x.stem)):
                if x[k] != 0 and not _allowed(family.kind, k):
                    bad.append((s, x, k))
    return bad


def first_diff_parity(x: Point, y: Point) -> str:
    k = distance(x, y)
    if k == INFINITE:
        raise ValueError("equal points have no first difference")
    return ODD if k % 2 else EVEN


@dataclass(frozen=True)
class Certificate:
    pairs_checked: int
    isometric_pairs: int
    witness: object = None

    def to_json(self):
        witness = None
        if self.witness is not None:
            witness = [[a.to_json(), b.to_json()] for a, b in self.witness]
        return {"pairs_checked": self.pairs_checked, "isometric_pairs": self.isometric_pairs, "witness": witness}


def _check_kinds(src: ParityFamily, dst: ParityFamily):
    if src.kind == dst.kind:
        raise ValueError("source and target families must have opposite kinds")
    for s, pts in src.cells.items():
        if len(pts) < 2:
            raise ValueError(f"source cell {list(s)} has fewer than 2 points")


def _within_cell_pairs(family: ParityFamily):
    for pts in family.cells.values():
        yield from combinations(pts, 2)


def certify_no_isometry(src: ParityFamily, dst: ParityFamily) -> Certificate:
    """Count the two-point maps ``{x->u, y->v}`` (``x, y`` in one source cell,
    ``u, v`` in one target cell) that are isometries.

    A two-point map is an isometry iff the two distances agree, so the count
    is the inner product of the two distance histograms; all combinations are
    covered without listing them.
    """
    _check_kinds(src, dst)
    src_hist = Counter(distance(x, y) for x, y in _within_cell_pairs(src))
    dst_hist = Counter(distance(u, v) for u, v in _within_cell_pairs(dst))
    total = sum(src_hist.values()) * sum(dst_hist.values())
    hits = sum(n * dst_hist[k] for k, n in src_hist.items())
    witness = None
    if hits:
        k = next(k for k in src_hist if dst_hist[k])
        x, y = next((x, y) for x, y in _within_cell_pairs(src) if distance(x, y) == k)
        u, v = next((u, v) for u, v in _within_cell_pairs(dst) if distance(u, v) == k)
        witness = ((x, u), (y, v))
    return Certificate(total, hits, witness)


def certify_no_isometry_brute(src: ParityFamily, dst: ParityFamily) -> Certificate:
    """Same count, one ``check_isometry`` call per combination."""
    _check_kinds(src, dst)
    dst_pairs = list(_within_cell_pairs(dst))
    total = hits = 0
    witness = None
    for x, y in _within_cell_pairs(src):
        for u, v in dst_pairs:
            total += 1
            if check_isometry(PartialMap(((x, u), (y, v)))):
                hits += 1
                witness = witness or ((x, u), (y, v))
    return Certificate(total, hits, witness)
