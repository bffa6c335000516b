"""Seeded invariant suites behind ``lipbaire selftest``.

Each suite returns a JSON-ready dict with the number of cases checked and
the violations found. Nothing time- or machine-dependent goes into the
report, so a fixed seed gives byte-identical output.
"""

from __future__ import annotations

from itertools import combinations

from . import back_and_forth as bnf
from . import counterexamples as cx
from . import forcing_lab as fl
from . import lipschitz_maps as lm
from . import slaloms as sl
from ._rng import substream, subseed
from .generators import random_condition, random_hom_on, random_map, random_point
from .prefix_core import BINARY, Alphabet, Point, distance


def _result(name, checked, violations, **extra):
    return {"suite": name, "checked": checked, "violations": violations, "passed": violations == 0, **extra}


def suite_metric(seed, trials, alphabet=BINARY):
    rng = substream(seed, "metric")
    letters = alphabet.size if alphabet.is_finite else 4
    bad = 0
    for _ in range(trials):
        x, y, z = (random_point(rng, letters, 6) for _ in range(3))
        if min(distance(x, y), distance(y, z)) > distance(x, z):
            bad += 1
        horizon = max(len(x.stem), len(y.stem)) + 1
        if (x == y) != (x.prefix(horizon) == y.prefix(horizon) and x.tail == y.tail):
            bad += 1
    return _result("metric", 2 * trials, bad)


def suite_level_analysis(depth):
    depth = min(depth, 3)
    checked = bad = 0
    for h in lm.enumerate_table_homs(BINARY, depth):
        reports = lm.level_analysis(h, depth)
        checked += 1
        if any(r.injective != r.surjective for r in reports):
            bad += 1
        if all(r.injective for r in reports) != lm.is_isometry_to_depth(h, depth):
            bad += 1
    return _result("level_analysis", checked, bad, depth=depth)


def suite_backforth(seed, steps, alphabet=BINARY):
    s = subseed(seed, "backforth")
    A = bnf.EventuallyConstantOracle(alphabet, 0, seed=s)
    B = bnf.EventuallyConstantOracle(alphabet, 1, seed=s + 1)
    state = bnf.bnf_run(A, B, steps)
    m = state.current
    bad = 0 if lm.check_isometry(m) else 1
    bad += sum(A.enumerate(i) not in m for i in range(steps + 1))
    rng_ = set(m.range)
    bad += sum(B.enumerate(i) not in rng_ for i in range(steps + 1))
    return _result("backforth", steps + 1, bad, size=len(m))


def suite_counterexample(seed, per_cell=10, cell_depth=2):
    cells = list(BINARY.words_upto(cell_depth))
    odd = cx.gen_family(cx.ODD, cells, per_cell, subseed(seed, "odd"))
    even = cx.gen_family(cx.EVEN, cells, per_cell, subseed(seed, "even"))
    bad = len(cx.parity_violations(odd)) + len(cx.parity_violations(even))
    for fam in (odd, even):
        for pts in fam.cells.values():
            bad += sum(cx.first_diff_parity(x, y) != fam.kind for x, y in combinations(pts, 2))
    c1 = cx.certify_no_isometry(odd, even)
    c2 = cx.certify_no_isometry(even, odd)
    bad += c1.isometric_pairs + c2.isometric_pairs
    return _result("counterexample", c1.pairs_checked + c2.pairs_checked, bad)


def suite_slaloms(seed, trials, depth=12, stems=4):
    rng = substream(seed, "slaloms")
    bad = 0
    for _ in range(trials):
        samples = []
        for _ in range(stems):
            s = tuple(rng.randrange(4) for _ in range(rng.randint(0, 3)))
            samples.append(sl.random_bounded_sample(s, rng.randint(1, 12), depth, rng))
        words = [x.prefix(depth) for smp in samples for x in smp.points]
        h = random_hom_on(rng, words, letters=6)
        phis = []
        for smp in samples:
            phi = sl.slalom_from_hom(h, smp, depth)
            phis.append(phi)
            for x in smp.points:
                if not sl.captures(phi, _image_point(h, x, depth)):
                    bad += 1
            for n, v in enumerate(phi.values):
                if len(v) > sl.sample_width_bound(len(smp.s), n):
                    bad += 1
        merged = sl.merge_slaloms(phis)
        if not sl.slalom_width_ok(merged, sl.NPOW2):
            bad += 1
    return _result("slaloms", trials, bad)


def _image_point(h, x: Point, depth: int) -> Point:
    """The image of ``x`` under ``h`` truncated to ``depth``, as a point (tail irrelevant below depth)."""
    return Point(h.apply(x.prefix(depth)), 0)


def suite_image_width(seed, trials, depth=10):
    rng = substream(seed, "image_width")
    bad = 0
    for _ in range(trials):
        tree = sl.random_width_tree(sl.log_corset, depth, rng)
        h = random_hom_on(rng, tree.nodes, letters=2, alphabet_in=BINARY, alphabet_out=BINARY)
        image = sl.hom_image_tree(h, tree)
        src, img = sl.tree_width(tree), sl.tree_width(image)
        bad += sum(i > s for s, i in zip(src, img)) + (len(img) != len(src))
        bad += not sl.has_width(image, sl.log_corset)
    return _result("image_width", trials, bad)


def suite_forcing(seed, trials):
    rng = substream(seed, "forcing")
    A = bnf.EventuallyConstantOracle(Alphabet.countable(), 0)
    B = bnf.EventuallyConstantOracle(Alphabet.countable(), 0)
    bad = 0
    for _ in range(trials):
        p = random_condition(rng, rng.randint(0, 4))
        a, b = random_point(rng, 3, 4), random_point(rng, 3, 4)
        q = fl.extend_condition(p, a, b, A, B)
        bad += not fl.is_condition(q) or a not in q or b not in q.range
        bad += any(q.get(x) != y for x, y in p.pairs)
    for _ in range(trials):
        p, q = random_map(rng, rng.randint(1, 3)), random_map(rng, rng.randint(1, 3))
        if fl.is_condition(p) and fl.is_condition(q):
            bad += fl.compatible(p, q) != _union_is_condition(p, q)
    return _result("forcing", 2 * trials, bad)


def _union_is_condition(p, q) -> bool:
    pairs = set(p.pairs) | set(q.pairs)
    for (a, b), (a2, b2) in combinations(pairs, 2):
        if a == a2 or b == b2:
            return False
        if distance(b, b2) < distance(a, a2):
            return False
    return True


def run_selftest(seed: int = 0, trials: int = 100, depth: int = 3, alphabet: Alphabet = BINARY) -> dict:
    suites = [
        suite_metric(seed, trials, alphabet),
        suite_level_analysis(depth),
        suite_backforth(seed, trials, alphabet if alphabet.size != 1 else BINARY),
        suite_counterexample(seed),
        suite_slaloms(seed, trials),
        suite_image_width(seed, trials),
        suite_forcing(seed, trials),
    ]
    return {
        "seed": seed,
        "trials": trials,
        "depth": depth,
        "alphabet": str(alphabet),
        "suites": suites,
        "passed": all(s["passed"] for s in suites),
    }
