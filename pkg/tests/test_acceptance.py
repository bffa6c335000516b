"""Acceptance gate: eight criteria, each at its stated size and time limit.

Every criterion records one PASS/FAIL line; the lines are printed in the
pytest terminal summary, or directly when this file is run as a script.
"""

import json
import subprocess
import sys
import time
from itertools import combinations

import pytest

from lipbaire._rng import substream, subseed
from lipbaire.back_and_forth import EventuallyConstantOracle, bnf_run
from lipbaire.counterexamples import (
    EVEN,
    ODD,
    certify_no_isometry,
    certify_no_isometry_brute,
    first_diff_parity,
    gen_family,
    parity_violations,
)
from lipbaire.forcing_lab import compatible, extend_condition, find_antichain, is_condition
from lipbaire.generators import random_condition, random_hom_on, random_point
from lipbaire.lipschitz_maps import check_isometry, enumerate_table_homs, is_isometry_to_depth, level_analysis
from lipbaire.prefix_core import BINARY, INFINITE, OMEGA, Point, distance
from lipbaire.slaloms import (
    NPOW2,
    captures,
    hom_image_tree,
    log_corset,
    merge_slaloms,
    random_bounded_sample,
    random_width_tree,
    sample_width_bound,
    slalom_from_hom,
    slalom_width_ok,
    tree_width,
)

from oracles import expand, level_sets, max_antichain_exhaustive, naive_distance, naive_union_is_condition

SEED = 20261016
RESULTS: list[str] = []


def record(number, name, ok, detail, elapsed, limit):
    within = limit is None or elapsed < limit
    verdict = "PASS" if ok and within else "FAIL"
    budget = f"{elapsed:.2f}s" + ("" if limit is None else f" (limit {limit}s)")
    RESULTS.append(f"[{verdict}] criterion {number} {name}: {detail}; {budget}")
    return ok and within


def test_criterion_1_injective_iff_surjective():
    start = time.perf_counter()
    homs = bad = isometry_mismatch = 0
    for h in enumerate_table_homs(BINARY, 3):
        homs += 1
        reports = level_analysis(h, 3)
        bad += sum(r.injective != r.surjective for r in reports)
        isometry_mismatch += all(r.injective for r in reports) != is_isometry_to_depth(h, 3)
    elapsed = time.perf_counter() - start
    # second route: per-level image counts straight from the table entries
    oracle_bad = sum(
        any(inj != sur for inj, sur in level_sets(h.entries, 2, 3)) for h in enumerate_table_homs(BINARY, 3)
    )
    ok = homs == 2**14 and bad == isometry_mismatch == oracle_bad == 0
    detail = f"{homs} homs, {bad} level mismatches, {isometry_mismatch} isometry mismatches, oracle {oracle_bad}"
    assert record(1, "injective-iff-surjective", ok, detail, elapsed, 5)


def test_criterion_2_back_and_forth():
    start = time.perf_counter()
    failures = []
    for run in range(10):
        s = subseed(SEED, f"bnf/{run}")
        A = EventuallyConstantOracle(BINARY, 0, seed=s)
        B = EventuallyConstantOracle(BINARY, 1, seed=s ^ 1)
        m = bnf_run(A, B, 500).current
        dom, rng = set(m.domain), set(m.range)
        covered = all(A.enumerate(i) in dom and B.enumerate(i) in rng for i in range(501))
        if not (check_isometry(m) and covered):
            failures.append(run)
    elapsed = time.perf_counter() - start
    assert record(2, "back-and-forth", not failures, f"10 seeds x 500 steps, failing seeds {failures}", elapsed, 10)


def test_criterion_3_parity_families():
    start = time.perf_counter()
    cells = list(BINARY.words_upto(3))
    odd = gen_family(ODD, cells, 50, subseed(SEED, "odd"))
    even = gen_family(EVEN, cells, 50, subseed(SEED, "even"))
    parity_bad = len(parity_violations(odd)) + len(parity_violations(even))
    for fam in (odd, even):
        for pts in fam.cells.values():
            parity_bad += sum(first_diff_parity(x, y) != fam.kind for x, y in combinations(pts, 2))
    forward, backward = certify_no_isometry(odd, even), certify_no_isometry(even, odd)
    elapsed = time.perf_counter() - start
    # second route on a slice: one check_isometry call per two-point map
    few = cells[:3]
    sub_odd = gen_family(ODD, few, 12, subseed(SEED, "odd/brute"))
    sub_even = gen_family(EVEN, few, 12, subseed(SEED, "even/brute"))
    brute = certify_no_isometry_brute(sub_odd, sub_even).isometric_pairs
    brute += certify_no_isometry_brute(sub_even, sub_odd).isometric_pairs
    hits = forward.isometric_pairs + backward.isometric_pairs
    ok = parity_bad == 0 and hits == 0 and brute == 0
    detail = (f"{len(cells)} cells x 50 points, parity violations {parity_bad}, "
              f"isometric maps {hits} of {forward.pairs_checked + backward.pairs_checked}, brute slice {brute}")
    assert record(3, "parity-counterexample", ok, detail, elapsed, 30)


def test_criterion_4_slalom_bounds():
    rng = substream(SEED, "slaloms")
    depth = 12
    start = time.perf_counter()
    capture_bad = width_bad = merged_bad = 0
    for _ in range(1000):
        samples = []
        for _ in range(4):
            s = tuple(rng.randrange(4) for _ in range(rng.randint(0, 3)))
            samples.append(random_bounded_sample(s, rng.randint(1, 16), depth, rng))
        h = random_hom_on(rng, [x.prefix(depth) for smp in samples for x in smp.points], letters=8)
        phis = []
        for smp in samples:
            phi = slalom_from_hom(h, smp, depth)
            phis.append(phi)
            capture_bad += sum(not captures(phi, Point(h.apply(x.prefix(depth)), 0)) for x in smp.points)
            width_bad += sum(len(v) > sample_width_bound(len(smp.s), n) for n, v in enumerate(phi.values))
        merged_bad += not slalom_width_ok(merge_slaloms(phis), NPOW2)
    elapsed = time.perf_counter() - start
    ok = capture_bad == width_bad == merged_bad == 0
    detail = f"1000 trials, capture misses {capture_bad}, width violations {width_bad}, merged {merged_bad}"
    assert record(4, "slalom-bounds", ok, detail, elapsed, 20)


def test_criterion_5_image_width():
    rng = substream(SEED, "image-width")
    start = time.perf_counter()
    bad = 0
    for _ in range(1000):
        tree = random_width_tree(log_corset, 10, rng)
        h = random_hom_on(rng, tree.nodes, letters=2, alphabet_in=BINARY, alphabet_out=BINARY)
        src, img = tree_width(tree), tree_width(hom_image_tree(h, tree))
        # counts recomputed by hand, independent of tree_width
        by_hand = [len({h.apply(w) for w in tree.nodes if len(w) == n}) for n in range(11)]
        bad += img != by_hand or any(i > s for s, i in zip(src, img))
    elapsed = time.perf_counter() - start
    assert record(5, "image-width", bad == 0, f"1000 trees of depth 10, {bad} violations", elapsed, 10)


def test_criterion_6_forcing():
    rng = substream(SEED, "forcing")
    A, B = EventuallyConstantOracle(OMEGA, 0), EventuallyConstantOracle(OMEGA, 0)
    start = time.perf_counter()
    extend_bad = 0
    for _ in range(1000):
        p = random_condition(rng, rng.randint(0, 5))
        a, b = random_point(rng, 3, 4), random_point(rng, 3, 4)
        q = extend_condition(p, a, b, A, B)
        extend_bad += not (is_condition(q) and a in q and b in q.range and q.pairs[: len(p)] == p.pairs)
    compat_bad = incompatible = 0
    for _ in range(10_000):
        p = random_condition(rng, rng.randint(1, 3), letters=2, max_stem=3)
        q = random_condition(rng, rng.randint(1, 3), letters=2, max_stem=3)
        verdict = compatible(p, q)
        incompatible += not verdict
        compat_bad += verdict != naive_union_is_condition(p.pairs, q.pairs)
    anti_bad = 0
    for size in range(1, 16):
        for _ in range(3):
            conds = [random_condition(rng, rng.randint(1, 2), letters=2, max_stem=2) for _ in range(size)]
            table = [[i != j and not naive_union_is_condition(conds[i].pairs, conds[j].pairs) for j in range(size)]
                     for i in range(size)]
            report = find_antichain(conds)
            anti_bad += not report.exact or len(report.members) != max_antichain_exhaustive(table, size)
            anti_bad += any(not table[i][j] for i, j in combinations(report.members, 2))
    elapsed = time.perf_counter() - start
    ok = extend_bad == compat_bad == anti_bad == 0
    detail = (f"extend failures {extend_bad}/1000, compatibility disagreements {compat_bad}/10000 "
              f"({incompatible} incompatible), antichain mismatches {anti_bad}/45")
    assert record(6, "forcing-combinatorics", ok, detail, elapsed, 30)


def test_criterion_7_metric_core():
    rng = substream(SEED, "metric")
    start = time.perf_counter()
    ultra_bad = canon_bad = 0
    for _ in range(10_000):
        x, y, z = (random_point(rng, 3, 6) for _ in range(3))
        ultra_bad += distance(x, z) < min(distance(x, y), distance(y, z))
        # the same sequence written with a padded stem must canonicalize identically
        padded = Point(x.stem + (x.tail,) * rng.randint(0, 3), x.tail)
        canon_bad += padded != x or padded.stem != x.stem
        horizon = max(len(x.stem), len(y.stem)) + 1
        same = expand(x, horizon) == expand(y, horizon)
        canon_bad += same != ((x.stem, x.tail) == (y.stem, y.tail))
        nd = naive_distance(x, y)
        canon_bad += distance(x, y) != (INFINITE if nd is None else nd)
    elapsed = time.perf_counter() - start
    ok = ultra_bad == canon_bad == 0
    detail = f"10000 triples, ultrametric violations {ultra_bad}, canonical-form violations {canon_bad}"
    assert record(7, "metric-core", ok, detail, elapsed, 2)


def test_criterion_8_determinism():
    cmd = [sys.executable, "-m", "lipbaire", "selftest", "--seed", str(SEED)]
    start = time.perf_counter()
    first = subprocess.run(cmd, capture_output=True, check=True).stdout
    second = subprocess.run(cmd, capture_output=True, check=True).stdout
    elapsed = time.perf_counter() - start
    ok = first == second and json.loads(first)["passed"]
    detail = f"two selftest runs with seed {SEED}: {len(first)} bytes, identical={first == second}"
    assert record(8, "determinism", ok, detail, elapsed, None)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q"]))
