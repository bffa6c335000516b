import pytest

from lipbaire.back_and_forth import (
    EventuallyConstantOracle,
    Exhausted,
    FiniteOracle,
    NoFreshLetter,
    OracleError,
    bnf_back,
    bnf_forth,
    bnf_init,
    bnf_run,
)
from lipbaire.counterexamples import EVEN, ODD, gen_family
from lipbaire.lipschitz_maps import check_isometry
from lipbaire.prefix_core import BINARY, Alphabet, Point, distance, in_basic_open

from oracles import naive_isometry

P = Point
TERNARY = Alphabet.finite(3)


def binary_oracles(seed=None):
    return EventuallyConstantOracle(BINARY, 0, seed=seed), EventuallyConstantOracle(BINARY, 1, seed=seed)


class TestOracles:
    def test_enumeration_is_injective_and_eventually_constant(self):
        A = EventuallyConstantOracle(BINARY, 1, seed=7)
        pts = [A.enumerate(i) for i in range(2000)]
        assert len(set(pts)) == len(pts)
        assert all(p.tail == 1 for p in pts)

    def test_unseeded_starts_with_constant(self):
        assert EventuallyConstantOracle(BINARY, 0).enumerate(0) == P((), 0)

    def test_seeded_is_reproducible(self):
        a, b = EventuallyConstantOracle(TERNARY, 2, seed=5), EventuallyConstantOracle(TERNARY, 2, seed=5)
        assert [a.enumerate(i) for i in range(300)] == [b.enumerate(i) for i in range(300)]

    def test_refine_lands_in_box_and_avoids_exclusions(self):
        A = EventuallyConstantOracle(BINARY, 0)
        s = (1, 0, 1)
        taken = set()
        for _ in range(20):
            x = A.refine(s, taken)
            assert in_basic_open(s, x) and x not in taken and x in A
            taken.add(x)

    def test_finite_oracle_duplicates(self):
        with pytest.raises(OracleError):
            FiniteOracle([P((1,), 0), P((1, 0), 0)])

    def test_finite_oracle_exhausts(self):
        F = FiniteOracle([P((1,), 0)])
        with pytest.raises(Exhausted):
            F.enumerate(1)
        with pytest.raises(Exhausted):
            F.refine((0,), set())


class TestInit:
    def test_first_pair(self):
        A, B = binary_oracles(seed=3)
        state = bnf_init(A, B)
        assert state.current.pairs == ((A.enumerate(0), B.enumerate(0)),)

    def test_same_oracle(self):
        A = EventuallyConstantOracle(BINARY, 0)
        assert bnf_init(A, A).current.pairs == ((A.enumerate(0), A.enumerate(0)),)

    def test_repeating_enumeration_is_rejected(self):
        class Repeating(EventuallyConstantOracle):
            def enumerate(self, i):
                return super().enumerate(min(i, 2))

        with pytest.raises(OracleError):
            bnf_run(Repeating(BINARY, 0), EventuallyConstantOracle(BINARY, 1), 5)


class TestForthAndBack:
    def test_forth_matches_distance(self):
        A, B = binary_oracles()
        state = bnf_init(A, B)
        a0, b0 = state.pairs[0]
        a = P(a0.prefix(2) + (1 - a0[2],), a0.tail)
        assert distance(a, a0) == 2
        bnf_forth(state, a)
        assert distance(state.current(a), b0) == 2
        assert check_isometry(state.current)

    def test_back_matches_distance(self):
        A, B = binary_oracles()
        state = bnf_init(A, B)
        a0, b0 = state.pairs[0]
        b = P(b0.prefix(2) + (1 - b0[2],), b0.tail)
        bnf_back(state, b)
        assert distance(state.current.inverse()(b), a0) == 2
        assert check_isometry(state.current)

    def test_fresh_letter_avoids_both_good_images(self):
        x1, x2, a = P((0, 0), 0), P((0, 1), 0), P((0, 2), 0)
        y1, y2, target = P((1, 0), 0), P((1, 1), 0), P((1, 2), 0)
        A = FiniteOracle([x1, x2, a], TERNARY)
        B = FiniteOracle([y1, y2, target, P((1, 0, 1), 0)], TERNARY)
        state = bnf_init(A, B)
        bnf_forth(state, x2)
        assert state.current(x2) == y2
        bnf_forth(state, a)
        assert state.current(a) == target and state.current(a)[1] == 2
        assert state.transcript[-1][3] == 1
        assert check_isometry(state.current)

    def test_binary_pigeonhole_has_no_fresh_letter(self):
        # three ternary points split at index 0, but the binary target has only two letters there
        A = FiniteOracle([P((0,), 0), P((1,), 0), P((2,), 0)], TERNARY)
        B = FiniteOracle([P((0,), 0), P((1,), 0)], BINARY)
        state = bnf_init(A, B)
        bnf_forth(state, P((1,), 0))
        with pytest.raises(NoFreshLetter):
            bnf_forth(state, P((2,), 0))

    def test_already_handled(self):
        A, B = binary_oracles()
        state = bnf_init(A, B)
        with pytest.raises(ValueError):
            bnf_forth(state, A.enumerate(0))
        with pytest.raises(ValueError):
            bnf_back(state, B.enumerate(0))


class TestRun:
    def test_zero_steps(self):
        A, B = binary_oracles()
        assert bnf_run(A, B, 0).current.pairs == ((A.enumerate(0), B.enumerate(0)),)

    @pytest.mark.parametrize("seed", [None, 1, 2])
    def test_invariants_after_every_step(self, seed):
        A, B = binary_oracles(seed)
        history = []

        def observe(state):
            m = state.current
            assert check_isometry(m)
            for i in range(state.step + 1):
                assert A.enumerate(i) in m
                assert B.enumerate(i) in set(m.range)
            assert state.step + 1 <= len(m) <= 2 * (state.step + 1)
            history.append(m)

        bnf_run(A, B, 60, on_step=observe)
        for earlier, later in zip(history, history[1:]):
            assert later.pairs[: len(earlier)] == earlier.pairs

    def test_same_set_hundred_steps(self):
        A = EventuallyConstantOracle(BINARY, 0)
        m = bnf_run(A, A, 100).current
        assert check_isometry(m)
        assert {A.enumerate(i) for i in range(101)} <= set(m.domain)
        assert {A.enumerate(i) for i in range(101)} <= set(m.range)

    def test_isometry_matches_brute_force(self):
        A, B = binary_oracles(9)
        m = bnf_run(A, B, 40).current
        assert naive_isometry(m.pairs)

    def test_ternary(self):
        A, B = EventuallyConstantOracle(TERNARY, 0, seed=4), EventuallyConstantOracle(TERNARY, 2, seed=4)
        assert check_isometry(bnf_run(A, B, 150).current)

    def test_skip_rule(self):
        A = EventuallyConstantOracle(BINARY, 0)
        state = bnf_run(A, A, 30)
        scheduled = [e for e in state.transcript if e[0] != "init"]
        assert len(scheduled) == len(state.pairs) - 1 <= 60

    def test_transcript_json(self):
        A, B = binary_oracles()
        rows = bnf_run(A, B, 3).transcript_json()
        assert rows[0]["direction"] == "init"
        assert {r["direction"] for r in rows[1:]} <= {"forth", "back"}
        assert all(set(r) == {"direction", "scheduled", "partner", "k"} for r in rows)

    def test_parity_families_cannot_be_matched(self):
        cells = list(BINARY.words_upto(1))
        even = gen_family(EVEN, cells, 6, seed=1)
        odd = gen_family(ODD, cells, 6, seed=2)
        A = FiniteOracle(even.points(), BINARY)
        B = FiniteOracle(odd.points(), BINARY)
        with pytest.raises((Exhausted, NoFreshLetter)):
            bnf_run(A, B, len(even.points()) - 1)
