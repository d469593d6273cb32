import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import closure_count, distributive_by_loops, glb, join_irreducible_by_loops, lub
from persilat import diagram as dg
from persilat.errors import BudgetExceeded, InputError, UnknownElement
from persilat.lattice import (FinitePoset, Lattice, Provenance, chain_poset, dm_completion,
                              hasse_dot, infinite_distributivity_check, is_distributive, join,
                              join_irreducibles, join_irreducibles_bruteforce, meet,
                              order_isomorphism, transitive_closure)
from persilat.shapes import ZigzagModule, grid_lattice, zigzag_lattice
from strategies import SHAPES


@st.composite
def posets(draw, max_size=7):
    n = draw(st.integers(1, max_size))
    rel = np.eye(n, dtype=bool)
    for i, j in itertools.combinations(range(n), 2):
        rel[i, j] = draw(st.booleans())
    return FinitePoset(tuple(f"v{i}" for i in range(n)), transitive_closure(rel))


def crown(k):
    """Standard example: a_i < b_j iff i != j; its completion has 2^k cuts."""
    ids = [f"a{i}" for i in range(k)] + [f"b{i}" for i in range(k)]
    pairs = [(f"a{i}", f"b{j}") for i in range(k) for j in range(k) if i != j]
    return FinitePoset.from_relations(ids, pairs)


def check_lattice_axioms(l: Lattice):
    M, J = l.meet_table, l.join_table
    a = np.arange(len(l))
    x, y = np.meshgrid(a, a, indexing="ij")
    assert np.array_equal(M, M.T) and np.array_equal(J, J.T)
    assert np.array_equal(M[J[y, x], x], x) and np.array_equal(J[M[y, x], x], x)
    assert np.array_equal(M[a, a], a) and np.array_equal(J[a, a], a)
    X, Y, Z = np.meshgrid(a, a, a, indexing="ij")
    assert np.array_equal(M[M[X, Y], Z], M[X, M[Y, Z]])
    assert np.array_equal(J[J[X, Y], Z], J[X, J[Y, Z]])
    # a <= b iff a∧b = a iff a∨b = b
    assert np.array_equal(l.leq, M[x, y] == x)
    assert np.array_equal(l.leq, J[x, y] == y)
    assert l.leq[l.bottom].all() and l.leq[:, l.top].all()


class TestPoset:
    def test_rejects_non_orders(self):
        with pytest.raises(InputError):
            FinitePoset(("a", "b"), np.array([[1, 1], [1, 1]], dtype=bool))
        with pytest.raises(InputError):
            FinitePoset.from_relations(["a"], [("a", "zz")])


class TestCompletion:
    def test_chain_is_already_complete(self):
        l = dm_completion(chain_poset(4))
        assert l.ids == ("X0", "X1", "X2", "X3")
        assert l.provenance_counts()["original"] == 4

    def test_bottom_and_top_are_adjoined(self):
        l = dm_completion(FinitePoset.from_relations(["a", "b"], []), saturate_limits=False)
        assert set(l.ids) == {"a", "b", "bot", "top"}
        assert l.ids[l.bottom] == "bot" and l.ids[l.top] == "top"

    def test_grid_poset_gains_nothing(self):
        g = grid_lattice(3, 3)
        l = dm_completion(FinitePoset(g.ids, g.leq))
        assert len(l) == 16 and l.provenance_counts()["original"] == 16

    def test_zigzag_three(self):
        l = dg.complete(ZigzagModule.generic(3).to_diagram())
        assert len(l) == 16
        assert l.provenance_counts() == {"original": 7, "limit": 6, "colimit": 3, "cut": 0}
        assert meet(l, "X0", "X1") == "P{X0,X1}"
        assert join(l, "X0", "X1") == "X01"
        pins = {x: x for x, p in zip(l.ids, l.provenance) if p is Provenance.ORIGINAL}
        assert order_isomorphism(l, zigzag_lattice(3), pins) is not None

    def test_plain_completion_of_zigzag_is_smaller(self):
        d = ZigzagModule.generic(3).to_diagram()
        assert len(dg.complete(d, saturate_limits=False)) == 9

    def test_budget(self):
        with pytest.raises(BudgetExceeded):
            dm_completion(crown(13), saturate_limits=False)
        assert len(dm_completion(crown(6), saturate_limits=False)) == 2 ** 6
        with pytest.raises(BudgetExceeded):
            dm_completion(crown(6), element_budget=20)

    @given(posets())
    def test_plain_completion_matches_cut_oracle(self, p):
        l = dm_completion(p, saturate_limits=False)
        assert len(l) == closure_count(p.leq)
        check_lattice_axioms(l)

    @given(posets())
    def test_originals_embed(self, p):
        for sat in (False, True):
            l = dm_completion(p, saturate_limits=sat)
            idx = [l.index(x) for x in p.ids]
            assert np.array_equal(l.leq[np.ix_(idx, idx)], p.leq)
            assert [l.provenance[i] for i in idx] == [Provenance.ORIGINAL] * len(p)
            check_lattice_axioms(l)

    @given(posets())
    def test_plain_elements_are_joins_and_meets_of_originals(self, p):
        l = dm_completion(p, saturate_limits=False)
        orig = np.array([l.index(x) for x in p.ids])
        for e in range(len(l)):
            assert l.join_all(orig[l.leq[orig, e]]) == e
            assert l.meet_all(orig[l.leq[e, orig]]) == e

    @given(posets(max_size=6))
    def test_saturated_keeps_existing_meets_and_joins(self, p):
        l = dm_completion(p, saturate_limits=True)
        for a, b in itertools.combinations(range(len(p)), 2):
            for op, table in ((glb, l.meet_table), (lub, l.join_table)):
                g = op(p.leq, a, b)
                if g is not None:
                    assert l.ids[table[l.index(p.ids[a]), l.index(p.ids[b])]] == p.ids[g]


class TestOperations:
    def test_neutral_elements(self):
        for l in SHAPES.values():
            top, bot = l.ids[l.top], l.ids[l.bottom]
            for a in l.ids:
                assert meet(l, a, top) == a and join(l, a, bot) == a

    def test_grid_meet_join(self):
        g = grid_lattice(3, 3)
        assert meet(g, "X02", "X11") == "X01"
        assert join(g, "X02", "X11") == "X12"

    def test_unknown(self):
        with pytest.raises(UnknownElement):
            meet(grid_lattice(1, 1), "X00", "X99")

    @pytest.mark.parametrize("name", sorted(SHAPES))
    def test_axioms_on_shapes(self, name):
        check_lattice_axioms(SHAPES[name])

    def test_relabel(self):
        l = grid_lattice(1, 1).relabel({"X00": "bottom"})
        assert l.ids[l.bottom] == "bottom"
        with pytest.raises(InputError):
            grid_lattice(1, 1).relabel({"X00": "X11"})


class TestDistributivity:
    def test_chains_and_grids(self):
        for l in SHAPES.values():
            assert is_distributive(l) == (True, None)

    def test_m3(self, m3):
        ok, w = is_distributive(m3)
        assert not ok
        x, y, z = (m3.index(v) for v in w)
        M, J = m3.meet_table, m3.join_table
        assert M[x, J[y, z]] != J[M[x, y], M[x, z]]

    @given(posets(max_size=6))
    def test_matches_oracle(self, p):
        l = dm_completion(p, saturate_limits=False)
        assert is_distributive(l)[0] == distributive_by_loops(l.leq)

    def test_infinite_law(self, m3):
        assert infinite_distributivity_check(SHAPES["chain5"])
        assert not infinite_distributivity_check(m3)
        assert infinite_distributivity_check(zigzag_lattice(3))
        # sampled branch
        assert infinite_distributivity_check(zigzag_lattice(5), subset_budget=4, samples=200)

    @given(posets(max_size=6))
    def test_finite_distributive_implies_infinite(self, p):
        l = dm_completion(p)
        if is_distributive(l)[0]:
            assert infinite_distributivity_check(l)


class TestJoinIrreducibles:
    def test_chain(self):
        l = SHAPES["chain5"]
        assert join_irreducibles(l) == set(l.ids) - {"X0"}

    def test_grids(self):
        for m, n in itertools.product(range(1, 4), repeat=2):
            l = grid_lattice(m, n)
            axes = {x for x in l.ids if "0" in (x[1], x[2])} - {"X00"}
            assert join_irreducibles(l) == axes
        assert "X11" not in join_irreducibles(grid_lattice(1, 1))

    @pytest.mark.parametrize("name", sorted(SHAPES))
    def test_three_ways_agree(self, name):
        l = SHAPES[name]
        brute = {l.ids[i] for i in join_irreducible_by_loops(l.leq)}
        assert join_irreducibles(l) == join_irreducibles_bruteforce(l) == brute


class TestHasse:
    def test_two_chain(self):
        dot = hasse_dot(SHAPES["chain2"])
        assert dot.count("->") == 1 and '"X0" -> "X1"' in dot

    def test_square(self):
        dot = hasse_dot(grid_lattice(1, 1))
        assert dot.count("->") == 4 and dot.count("[label=") == 4

    def test_zigzag_edges(self):
        l = zigzag_lattice(3)
        dot = hasse_dot(l)
        assert dot.count("[label=") == 16
        # the interval lattice is the 4x4 grid: 2 * 4 * 3 covers
        assert dot.count("->") == 24
        assert '"P01" -> "X0"' in dot and '"Q13" -> "Q03"' in dot
        assert dot == hasse_dot(l)
