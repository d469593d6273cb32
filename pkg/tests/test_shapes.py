import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import implication_by_loops
from persilat import diagram as dg
from persilat.errors import InputError, UnknownElement
from persilat.heyting import eval_formula, heyting, implication
from persilat.lattice import (Provenance, infinite_distributivity_check, is_distributive,
                              join_irreducibles, meet, join, order_isomorphism)
from persilat.linalg import PrimeFieldMatrix
from persilat.shapes import (P, Q, X, XX, ZIGZAG_WHITELIST, GridIndex, RawZigzag, ZigzagElement,
                             ZigzagModule, ZigzagSpace, chain_implies, chain_lattice, grid_diagram,
                             grid_id, grid_implies, grid_index, grid_lattice, grid_negation,
                             grid_nonzero_negation_elements, grid_slice, grid_square_defects,
                             implication_filtration, is_chain, most_persistent_query,
                             zigzag_closed_form, zigzag_diagnostics, zigzag_element,
                             zigzag_elements, zigzag_implies, zigzag_implies_via_grid,
                             zigzag_lattice, zigzag_normalize)

GRIDS = list(itertools.product(range(1, 5), repeat=2))


class TestChains:
    def test_small(self):
        one = chain_lattice(1)
        assert one.bottom == one.top
        with pytest.raises(InputError):
            chain_lattice(0)

    @pytest.mark.parametrize("n", range(1, 9))
    def test_closed_form_matches_oracle(self, n):
        l = chain_lattice(n)
        for i, j in itertools.product(range(n), repeat=2):
            assert chain_implies(n, i, j) == implication_by_loops(l.leq, i, j)

    def test_out_of_range(self):
        with pytest.raises(UnknownElement):
            chain_implies(3, 0, 3)

    def test_distributive(self):
        l = chain_lattice(5)
        assert is_distributive(l)[0] and infinite_distributivity_check(l)


class TestMostPersistent:
    def test_verdicts(self):
        h = heyting(chain_lattice(5))
        assert most_persistent_query(h, "X1", "X4").kind == "BIsTop"
        assert most_persistent_query(h, "X1", "X3").kind == "TopReached"
        v = most_persistent_query(h, "X3", "X1")
        assert v.kind == "OrderIs" and v.element == "X1"
        assert str(v) == "OrderIs(b <= a): X1"

    def test_needs_chain(self):
        with pytest.raises(InputError):
            most_persistent_query(heyting(grid_lattice(2, 2)), "X01", "X10")

    def test_grid_slice_route(self):
        s = grid_slice(3, 3, 0, 1)
        assert s.ids == ("X10", "X11", "X12", "X13") and is_chain(s)
        assert grid_slice(3, 2, 1, 2).ids == ("X02", "X12", "X22", "X32")
        assert most_persistent_query(heyting(s), "X12", "X11").element == "X11"
        with pytest.raises(UnknownElement):
            grid_slice(3, 3, 0, 4)
        with pytest.raises(InputError):
            grid_slice(3, 3, 2, 0)


class TestGrid:
    def test_ids(self):
        assert grid_id(1, 2, 3, 3) == "X12"
        assert grid_id(1, 2, 10, 3) == "X1_2"
        assert grid_index(None, None, "X1_12") == (1, 12)
        assert grid_index(None, None, "X31") == (3, 1)

    def test_examples(self):
        assert len(grid_lattice(3, 3)) == 16
        g = GridIndex
        assert grid_implies(3, 3, g(0, 1), g(3, 1)) == (3, 3)
        # X03 ∧ X31 = X01, so the implication is at least X03 (not X01)
        assert grid_implies(3, 3, g(3, 1), g(0, 1)) == (0, 3)
        assert grid_implies(3, 3, g(0, 2), g(1, 1)) == (3, 1)
        assert grid_implies(3, 3, g(1, 1), g(0, 2)) == (0, 3)
        assert grid_negation(3, 3, g(0, 3)) == (3, 0)
        assert grid_negation(3, 3, g(3, 0)) == (0, 3)
        assert grid_negation(3, 3, g(2, 0)) == (0, 3)
        assert grid_negation(3, 3, g(1, 1)) == (0, 0)
        with pytest.raises(UnknownElement):
            grid_implies(3, 3, g(4, 0), g(0, 0))

    def test_one_by_one(self):
        h = heyting(grid_lattice(1, 1))
        assert h.ids[h.neg(h.lattice.index("X01"))] == "X10"
        assert h.neg(h.lattice.index("X11")) == h.bottom

    @pytest.mark.parametrize("m,n", GRIDS)
    def test_closed_form_matches_oracle(self, m, n):
        l = grid_lattice(m, n)
        h = heyting(l)
        for a, b in itertools.product(range(len(l)), repeat=2):
            ga, gb = grid_index(l, n, l.ids[a]), grid_index(l, n, l.ids[b])
            r = grid_implies(m, n, ga, gb)
            assert l.ids[h.imp(a, b)] == grid_id(*r, m, n)

    @pytest.mark.parametrize("m,n", GRIDS)
    def test_nonzero_negations_are_the_axes(self, m, n):
        l = grid_lattice(m, n)
        h = heyting(l)
        brute = {grid_index(l, n, l.ids[a]) for a in range(len(l)) if h.neg(a) != h.bottom}
        axes = grid_nonzero_negation_elements(m, n)
        assert brute == axes
        ji = {grid_index(l, n, x) for x in join_irreducibles(l)}
        assert axes == ji | {GridIndex(0, 0)}

    def test_diagram_and_defects(self):
        d = grid_diagram(2, 2)
        assert grid_square_defects(d, 2, 2) == []
        l = dg.complete(d)
        assert len(l) == 9
        # zero out one corner: the square X00..X11 stops being a pullback
        nodes = tuple(dg.Node(x.id, 0 if x.id == "X00" else 1) for x in d.nodes)
        edges = tuple(dg.Edge(e.id, e.source, e.target,
                              PrimeFieldMatrix.zeros(1, 0) if e.source == "X00" else e.matrix)
                      for e in d.edges)
        bad = dg.Diagram(nodes, edges, 2, "grid", {"m": 2, "n": 2})
        assert grid_square_defects(bad, 2, 2) == ["X00..X11"]

    def test_meet_join(self):
        g = grid_lattice(3, 3)
        assert meet(g, "X02", "X11") == "X01" and join(g, "X02", "X11") == "X12"


class TestZigzagElements:
    def test_canonical_singletons(self):
        assert P(2, 2) == Q(2, 2) == X(2)
        assert X(1).id(3) == "X1" and XX(1).id(3) == "X12"
        assert P(0, 3).id(3) == "P03" and Q(0, 2).id(3) == "Q02"
        assert Q(1, 12).id(12) == "Q1_12"
        with pytest.raises(InputError):
            ZigzagElement("R", 0, 1)
        with pytest.raises(InputError):
            Q(2, 1)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_grid_coordinates_are_a_bijection(self, n):
        elems = zigzag_elements(n)
        coords = {e.grid_coords(n) for e in elems}
        assert len(elems) == len(coords) == (n + 1) ** 2
        assert all(ZigzagElement.from_grid(n, *e.grid_coords(n)) == e for e in elems)

    def test_three(self):
        l = zigzag_lattice(3)
        assert len(l) == 16
        assert l.ids[l.bottom] == "P03" and l.ids[l.top] == "Q03"
        assert meet(l, "X0", "X1") == "P01" and join(l, "X0", "X1") == "X01"
        assert l.provenance_counts() == {"original": 7, "limit": 6, "colimit": 3, "cut": 0}
        assert zigzag_element(3, "Q13") == Q(1, 3)
        with pytest.raises(UnknownElement):
            zigzag_element(3, "Q14")

    @pytest.mark.parametrize("n", range(1, 6))
    def test_distributive(self, n):
        l = zigzag_lattice(n)
        assert is_distributive(l)[0] and infinite_distributivity_check(l)


class TestZigzagCompletion:
    @pytest.mark.parametrize("n", range(1, 6))
    def test_matches_dm_completion(self, n):
        d = ZigzagModule.generic(n).to_diagram()
        completed = dg.complete(d)
        target = zigzag_lattice(n)
        pins = {x: x for x, p in zip(completed.ids, completed.provenance)
                if p is Provenance.ORIGINAL}
        iso = order_isomorphism(completed, target, pins)
        assert iso is not None
        for x, y in iso.items():
            assert completed.provenance[completed.index(x)] is target.provenance[target.index(y)]

    def test_higher_dimension(self):
        d = ZigzagModule.generic(2, dim=2, prime=3).to_diagram()
        assert len(dg.complete(d)) == 9


class TestZigzagImplication:
    def test_examples(self):
        assert [zigzag_implies(3, X(i), X(i + 1)) for i in range(3)] == [Q(1, 3), XX(2), X(3)]
        for n in range(1, 6):
            assert zigzag_implies(n, X(0), X(n)) == X(n)
            assert zigzag_implies(n, X(n), X(0)) == X(0)

    def test_worked_simplifications(self):
        h = heyting(zigzag_lattice(3))
        env = {"a": "X0", "b": "X1", "c": "X2", "d": "X3", "p": "P01"}
        assert eval_formula(h, "a -> (c & d)", env) == "X3"
        assert eval_formula(h, "p -> d", env) == "X3"
        assert eval_formula(h, "(a -> d) -> ((b -> d) -> ((a | b) -> d))", env) == "Q03"

    @pytest.mark.parametrize("n", range(1, 6))
    def test_grid_route_matches_oracle(self, n):
        h = heyting(zigzag_lattice(n))
        for a, b in itertools.product(zigzag_elements(n), repeat=2):
            assert zigzag_implies_via_grid(n, a, b) == zigzag_implies(n, a, b, h)

    @pytest.mark.parametrize("n", range(1, 6))
    def test_consistent_closed_form_entries(self, n):
        h = heyting(zigzag_lattice(n))
        seen = set()
        for a, b in itertools.product(zigzag_elements(n), repeat=2):
            cf = zigzag_closed_form(n, a, b)
            if cf is None:
                continue
            seen.add(cf.clause)
            if cf.clause != "Xik=>Xi":
                assert cf.value == zigzag_implies(n, a, b, h), (a, b, cf)
        assert "Xi=>Xj" in seen and "Xj=>Xi" in seen

    def test_closed_form_only_on_originals(self):
        assert zigzag_closed_form(3, P(0, 1), X(3)) is None

    @pytest.mark.parametrize("n", range(1, 6))
    def test_diagnostics_stay_in_whitelist(self, n):
        keys = {d.key for d in zigzag_diagnostics(n)}
        assert keys <= set(ZIGZAG_WHITELIST)
        assert "Q0n-equals-X0" in keys and "Xik-implies-Xi" in keys
        assert ("worked-example-X1-for-X2" in keys) == (n >= 3)

    def test_whitelist_is_exactly_the_open_cases(self):
        assert set(ZIGZAG_WHITELIST) == {"Q0n-equals-X0", "Xik-implies-Xi",
                                         "worked-example-X1-for-X2", "grid-needs-bicartesian"}

    def test_xik_entry_is_flagged(self):
        # the table says X01 => X0 is X01; the definition gives X0
        assert zigzag_closed_form(3, XX(0), X(0)).value == XX(0)
        assert zigzag_implies(3, XX(0), X(0)) == X(0)


class TestImplicationFiltration:
    def test_length_three(self):
        assert implication_filtration(3, X(0), X(1)) == [P(0, 1), X(1), XX(1), Q(1, 3)]

    @pytest.mark.parametrize("n", range(2, 7))
    def test_general_length(self, n):
        chain = implication_filtration(n, X(0), X(1))
        assert chain == [P(0, 1), X(1), XX(1)] + [Q(1, k) for k in range(3, n + 1)]

    @pytest.mark.parametrize("n", range(1, 5))
    def test_chains_are_maximal_cover_chains(self, n):
        l = zigzag_lattice(n)
        h = heyting(l)
        cov = l.covers()
        for a, b in itertools.product(zigzag_elements(n), repeat=2):
            chain = implication_filtration(n, a, b, h)
            c = zigzag_implies(n, a, b, h)
            assert chain[0].id(n) == meet(l, a.id(n), b.id(n)) == meet(l, a.id(n), c.id(n))
            assert chain[-1] == c
            for x, y in zip(chain, chain[1:]):
                assert cov[l.index(x.id(n)), l.index(y.id(n))]

    def test_degenerate(self):
        assert implication_filtration(3, X(1), X(1))[0] == X(1)
        assert implication_filtration(3, X(1), X(1))[-1] == Q(0, 3)


class TestNormalize:
    def test_two_forward_arrows(self):
        i = PrimeFieldMatrix.identity(1)
        z = zigzag_normalize(RawZigzag((("A", 1), ("B", 1), ("C", 1)), ((">", i), (">", i))))
        assert [s.name for s in z.spaces] == ["A", "B", "B'", "C", "C'"]
        assert [s.is_copy for s in z.spaces] == [False, False, True, False, True]
        assert [a for a, _ in z.arrows()] == [">", "<", ">", "<"]

    def test_single_space(self):
        z = zigzag_normalize(RawZigzag((("A", 2),)))
        assert z.length == 0 and z.spaces == (ZigzagSpace("A", 2),)

    def test_errors(self):
        with pytest.raises(InputError):
            zigzag_normalize(RawZigzag(()))
        i = PrimeFieldMatrix.identity(1)
        with pytest.raises(InputError):
            zigzag_normalize(RawZigzag((("A", 1), ("B", 1)), (("^", i),)))
        with pytest.raises(InputError):
            zigzag_normalize(RawZigzag((("A", 1), ("B", 1)), ()))
        with pytest.raises(InputError):
            ZigzagModule((ZigzagSpace("A", 1), ZigzagSpace("B", 1)), (i,))
        with pytest.raises(InputError):
            ZigzagModule((ZigzagSpace("A", 1), ZigzagSpace("B", 2), ZigzagSpace("C", 1)), (i, i))

    @given(st.data())
    def test_idempotent_and_keeps_originals(self, data):
        k = data.draw(st.integers(1, 6))
        dims = data.draw(st.lists(st.integers(0, 2), min_size=k, max_size=k))
        arrows = []
        for a, b in zip(dims, dims[1:]):
            d = data.draw(st.sampled_from("><"))
            shape = (b, a) if d == ">" else (a, b)
            arrows.append((d, PrimeFieldMatrix.zeros(*shape)))
        raw = RawZigzag(tuple((f"V{i}", x) for i, x in enumerate(dims)), tuple(arrows))
        z = zigzag_normalize(raw)
        assert [a for a, _ in z.arrows()] == [">" if i % 2 == 0 else "<" for i in range(len(z.maps))]
        assert [s.name for s in z.spaces if not s.is_copy] == [f"V{i}" for i in range(k)]
        again = zigzag_normalize(z.to_raw())
        # raw descriptions carry no copy flags, so compare the shape only
        assert again.to_raw() == z.to_raw()
        assert len(again.spaces) == len(z.spaces)
