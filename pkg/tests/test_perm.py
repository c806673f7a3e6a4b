import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from kinterchange import (
    DuplicateElement,
    IndexOutOfRange,
    InvalidK,
    InvalidPermutation,
    Permutation,
    WindowMove,
    WindowOutOfBounds,
    apply_move,
    classify_neighbors,
    inversion_count,
    k_neighborhood,
    lex_rank,
    lex_unrank,
    make_permutation,
    move_between,
    parse_permutation,
)
from kinterchange.perm import all_permutations, bfs_distances, window_moves

from conftest import P, oracle_neighbors

perms = st.integers(2, 8).flatmap(lambda n: st.permutations(list(range(1, n + 1)))).map(
    lambda xs: Permutation(tuple(xs))
)


class TestMakePermutation:
    def test_identity(self):
        assert make_permutation((1, 2, 3, 4)).n == 4

    def test_worked_example_start(self):
        assert make_permutation((4, 3, 1, 2)).elements == (4, 3, 1, 2)

    def test_duplicate(self):
        with pytest.raises(DuplicateElement):
            make_permutation((1, 1, 3))

    @pytest.mark.parametrize("seq", [(0, 1), (1, 3), (2, 3, 4), ()])
    def test_not_bijection(self, seq):
        with pytest.raises(InvalidPermutation):
            make_permutation(seq)

    def test_max_n(self):
        with pytest.raises(InvalidPermutation):
            make_permutation(range(1, 11), max_n=9)

    def test_value_equality(self):
        assert make_permutation([2, 1]) == Permutation((2, 1))
        assert hash(make_permutation([2, 1])) == hash(Permutation((2, 1)))


@pytest.mark.parametrize("text", ["(4,3,1,2)", "4,3,1,2", "4312", " (4, 3, 1, 2) "])
def test_parse_formats(text):
    assert parse_permutation(text) == P("4312")


def test_parse_rejects_garbage():
    with pytest.raises(InvalidPermutation):
        parse_permutation("43a2")
    with pytest.raises(InvalidPermutation):
        parse_permutation("123", n=4)


def test_text_forms():
    s = P("4312")
    assert str(s) == "(4,3,1,2)"
    assert s.compact() == "4312"


class TestApplyMove:
    def test_window_reorder(self):
        s = P("4312")
        m = WindowMove(2, 3, (2, 3, 1))
        # index-map composition: new[i] = old[start-1 + arrangement[i-start+1]-1]
        old = s.elements
        expected = tuple(
            old[1 + m.arrangement[i - 1] - 1] if 1 <= i <= 3 else old[i] for i in range(4)
        )
        assert apply_move(s, m) == Permutation(expected) == P("4123")

    @given(perms, st.data())
    def test_identity_move(self, s, data):
        k = data.draw(st.integers(2, s.n))
        start = data.draw(st.integers(1, s.n - k + 1))
        assert apply_move(s, WindowMove(start, k, tuple(range(1, k + 1)))) == s

    def test_out_of_bounds(self):
        with pytest.raises(WindowOutOfBounds):
            apply_move(P("1234"), WindowMove(3, 3, (1, 2, 3)))

    def test_bad_arrangement(self):
        with pytest.raises(InvalidPermutation):
            WindowMove(1, 3, (1, 2))
        with pytest.raises(InvalidK):
            WindowMove(1, 1, (1,))

    @given(perms, st.data())
    def test_inverse(self, s, data):
        k = data.draw(st.integers(2, s.n))
        start = data.draw(st.integers(1, s.n - k + 1))
        arr = tuple(data.draw(st.permutations(list(range(1, k + 1)))))
        m = WindowMove(start, k, arr)
        assert apply_move(apply_move(s, m), m.inverse()) == s

    @given(perms, st.data())
    def test_move_between_roundtrip(self, s, data):
        k = data.draw(st.integers(2, s.n))
        start = data.draw(st.integers(1, s.n - k + 1))
        arr = tuple(data.draw(st.permutations(list(range(1, k + 1)))))
        t = apply_move(s, WindowMove(start, k, arr))
        assert apply_move(s, move_between(s, t, k)) == t

    def test_move_between_rejects_far(self):
        with pytest.raises(InvalidPermutation):
            move_between(P("1234"), P("4231"), 2)


class TestNeighborhood:
    def test_k2_adjacent_transpositions(self):
        assert k_neighborhood(P("1234"), 2) == {P("2134"), P("1324"), P("1243")}

    def test_k3_from_identity(self):
        got = {p.compact() for p in k_neighborhood(P("1234"), 3)}
        assert got == {"1324", "2134", "3214", "2314", "3124", "1243", "1432", "1342", "1423"}

    def test_k3_duplicate_counted_once(self):
        # 2 windows x 5 non-identity arrangements = 10 results, 1324 produced by both
        raw = [apply_move(P("1234"), m) for m in window_moves(4, 3)]
        assert len(raw) == 10 and raw.count(P("1324")) == 2
        assert len(k_neighborhood(P("1234"), 3)) == 9

    def test_k_equals_n_everything(self):
        assert k_neighborhood(P("123"), 3) == set(all_permutations(3)) - {P("123")}

    @pytest.mark.parametrize("k", [1, 5, 0])
    def test_invalid_k(self, k):
        with pytest.raises(InvalidK):
            k_neighborhood(P("1234"), k)

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_against_oracle(self, n):
        for s in all_permutations(n):
            for k in range(2, n + 1):
                assert {x.elements for x in k_neighborhood(s, k)} == oracle_neighbors(s, k)

    @pytest.mark.parametrize("n", [3, 4, 5, 6])
    def test_nested_in_k(self, n):
        for s in all_permutations(n):
            for k in range(3, n + 1):
                assert k_neighborhood(s, k - 1) <= k_neighborhood(s, k)

    @given(perms, st.data())
    def test_size_bound_and_self_exclusion(self, s, data):
        k = data.draw(st.integers(2, min(s.n, 6)))
        nb = k_neighborhood(s, k)
        assert s not in nb
        assert len(nb) <= (s.n - k + 1) * (math.factorial(k) - 1)

    @pytest.mark.parametrize("n", [2, 3, 4, 5])
    def test_symmetry(self, n):
        ps = all_permutations(n)
        for k in range(2, n + 1):
            nb = {s: k_neighborhood(s, k) for s in ps}
            for s in ps:
                for x in nb[s]:
                    assert s in nb[x]


class TestClassify:
    def test_counterexample_point(self, table1):
        part = classify_neighbors(P("4312"), 2, table1)
        assert part.improving == set()
        assert part.equal == {P("3412"), P("4132")}
        assert part.worsening == {P("4321")}

    def test_1243(self, table1):
        # worked-example table: f(1243)=1; neighbors f(2143)=2, f(1423)=1, f(1234)=0
        part = classify_neighbors(P("1243"), 2, table1)
        assert part.improving == {P("1234")}
        assert part.equal == {P("1423")}
        assert part.worsening == {P("2143")}
        assert part.weak == {P("1234"), P("1423")}

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_global_optimum_has_no_improving(self, table1, k):
        assert classify_neighbors(P("1234"), k, table1).improving == set()

    def test_partition_is_exact(self, table1):
        for s in all_permutations(4):
            part = classify_neighbors(s, 2, table1)
            assert part.improving | part.equal | part.worsening == k_neighborhood(s, 2)
            assert not (part.improving & part.equal or part.equal & part.worsening)


class TestRank:
    def test_extremes(self):
        assert lex_rank(P("1234")) == 0
        assert lex_unrank(4, 23) == P("4321")

    def test_enumerated_position(self):
        order = list(itertools.permutations((1, 2, 3, 4)))
        assert order.index((3, 1, 2, 4)) == 12
        assert lex_rank(P("3124")) == 12

    @pytest.mark.parametrize("n", range(1, 7))
    def test_roundtrip(self, n):
        for i, t in enumerate(itertools.permutations(range(1, n + 1))):
            assert lex_rank(t) == i
            assert lex_unrank(n, i).elements == t

    @pytest.mark.parametrize("idx", [-1, 24, 100])
    def test_out_of_range(self, idx):
        with pytest.raises(IndexOutOfRange):
            lex_unrank(4, idx)


class TestInversions:
    def test_values(self):
        assert inversion_count(P("1234")) == 0
        assert inversion_count(P("4321")) == 6

    def test_enumerated_pairs(self):
        s = (2, 1, 4, 3)
        pairs = [(i, j) for i in range(4) for j in range(i + 1, 4) if s[i] > s[j]]
        assert pairs == [(0, 1), (2, 3)]
        assert inversion_count(s) == 2

    @pytest.mark.parametrize("n", range(2, 7))
    def test_equals_bfs_distance(self, n):
        dist = bfs_distances([tuple(range(1, n + 1))], 2)
        assert all(d == inversion_count(t) for t, d in dist.items())
        assert len(dist) == math.factorial(n)

    @settings(max_examples=50)
    @given(perms)
    def test_max(self, s):
        assert 0 <= inversion_count(s) <= s.n * (s.n - 1) // 2
