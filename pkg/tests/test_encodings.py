"""Tests for Church encodings and fixed points."""
from __future__ import annotations

import pytest

from calculi.encodings import (
    FALSE,
    NIL,
    THETA,
    TRUE,
    Y,
    NotANumeral,
    addlist,
    arith_ops,
    bool_ops,
    church_bool,
    church_numeral,
    cons,
    data_builders,
    decode_bool,
    decode_numeral,
    factorial,
    fibonacci,
    fixpoint_combinators,
    leaf,
    list_term,
    node,
    pair_term,
    proj,
    recursive_term,
    represents,
    tuple_term,
)
from calculi.untyped import (
    Abs,
    App,
    Var,
    alpha_eq,
    ap,
    canonical,
    free_vars,
    lam,
    normalize,
    reduction_graph,
)


def nf(t):
    out = normalize(t, "beta", fuel=20000)
    assert not hasattr(out, "steps"), f"no normal form within fuel: {t}"
    return out


class TestBooleans:
    def test_literals(self):
        assert church_bool(True) == lam("x", "y", Var("x"))
        assert church_bool(False) == lam("x", "y", Var("y"))

    def test_round_trip(self):
        for b in (True, False):
            assert decode_bool(church_bool(b)) is b

    @pytest.mark.parametrize("a", [True, False])
    @pytest.mark.parametrize("b", [True, False])
    def test_truth_tables(self, a, b):
        ops = bool_ops()
        ea, eb = church_bool(a), church_bool(b)
        assert decode_bool(ap(ops["and"], ea, eb)) is (a and b)
        assert decode_bool(ap(ops["or"], ea, eb)) is (a or b)
        assert decode_bool(App(ops["not"], ea)) is (not a)

    def test_if_then_else_selects(self):
        ite = bool_ops()["if_then_else"]
        m, n = lam("u", Var("u")), lam("u", "v", Var("u"))
        assert alpha_eq(nf(ap(ite, TRUE, m, n)), m)
        assert alpha_eq(nf(ap(ite, FALSE, m, n)), n)


class TestNumerals:
    def test_zero_and_two(self):
        assert church_numeral(0) == lam("f", "x", Var("x"))
        assert church_numeral(2) == lam("f", "x", App(Var("f"), App(Var("f"), Var("x"))))

    def test_zero_is_false(self):
        assert alpha_eq(church_numeral(0), church_bool(False))

    @pytest.mark.parametrize("n", list(range(10)) + [25, 50])
    def test_decode_round_trip(self, n):
        assert decode_numeral(church_numeral(n)) == n

    def test_decode_rejects_wrong_shape(self):
        assert decode_numeral(lam("x", Var("x"))) == NotANumeral()

    def test_decode_flags_fuel(self):
        omega = App(Abs("x", App(Var("x"), Var("x"))), Abs("x", App(Var("x"), Var("x"))))
        got = decode_numeral(omega, fuel=50)
        assert got == NotANumeral(fuel_exhausted=True)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            church_numeral(-1)


class TestArithmetic:
    def test_succ_chain(self):
        succ = arith_ops()["succ"]
        for n in range(21):
            assert decode_numeral(App(succ, church_numeral(n))) == n + 1

    def test_add(self):
        add = arith_ops()["add"]
        assert decode_numeral(ap(add, church_numeral(2), church_numeral(3))) == 5

    def test_mult(self):
        mult = arith_ops()["mult"]
        assert decode_numeral(ap(mult, church_numeral(2), church_numeral(3))) == 6

    def test_iszero(self):
        iszero = arith_ops()["iszero"]
        assert alpha_eq(nf(App(iszero, church_numeral(0))), TRUE)
        assert alpha_eq(nf(App(iszero, church_numeral(3))), FALSE)

    def test_pred(self):
        pred = arith_ops()["pred"]
        for n in range(6):
            assert decode_numeral(App(pred, church_numeral(n))) == max(n - 1, 0)

    def test_exp_handles_zero_exponent(self):
        exp = arith_ops()["exp"]
        assert decode_numeral(ap(exp, church_numeral(3), church_numeral(0))) == 1
        assert decode_numeral(ap(exp, church_numeral(2), church_numeral(3))) == 8

    def test_all_closed(self):
        for term in arith_ops().values():
            assert free_vars(term) == frozenset()
        for term in bool_ops().values():
            assert free_vars(term) == frozenset()


class TestRepresents:
    def test_add_passes(self):
        pairs = [(n, m) for n in range(5) for m in range(5)]
        report = represents(arith_ops()["add"], lambda n, m: n + m, 2, pairs)
        assert report.ok
        assert report.checked == 25

    def test_pred_passes(self):
        report = represents(
            arith_ops()["pred"], lambda n: max(n - 1, 0), 1, [(n,) for n in range(6)]
        )
        assert report.ok

    def test_wrong_oracle_fails(self):
        report = represents(arith_ops()["mult"], lambda n, m: n + m, 2, [(2, 3)])
        assert not report.ok
        assert report.failures[0].inputs == (2, 3)
        assert report.failures[0].expected == 5
        assert report.failures[0].got == 6


class TestFixpoints:
    def test_theta_unfolds_by_reduction(self):
        f = Var("f")
        target = App(f, App(THETA, f))
        g = reduction_graph(App(THETA, f), max_vertices=20, max_depth=6)
        assert any(alpha_eq(v, target) for v in g.vertices)

    def test_y_converts_but_does_not_reduce(self):
        f = Var("f")
        target = App(f, App(Y, f))
        g = reduction_graph(App(Y, f), max_vertices=60, max_depth=8)
        assert not any(alpha_eq(v, target) for v in g.vertices)
        # both sides reach f applied to the shared unfolding, so they convert
        left = {canonical(v) for v in g.vertices}
        h = reduction_graph(target, max_vertices=60, max_depth=8)
        right = {canonical(v) for v in h.vertices}
        assert left & right

    def test_table(self):
        table = fixpoint_combinators()
        assert alpha_eq(table["theta"], THETA)
        assert alpha_eq(table["y"], Y)
        assert free_vars(THETA) == frozenset()
        assert free_vars(Y) == frozenset()


class TestData:
    def test_pair_projections(self):
        b = data_builders()
        m, n = lam("u", Var("u")), lam("u", "v", Var("v"))
        assert alpha_eq(nf(App(b["pi1"], pair_term(m, n))), m)
        assert alpha_eq(nf(App(b["pi2"], pair_term(m, n))), n)

    def test_tuple_projection(self):
        parts = [church_numeral(i) for i in (4, 7, 9)]
        t = tuple_term(parts)
        for i in (1, 2, 3):
            assert decode_numeral(App(proj(3, i), t)) == [4, 7, 9][i - 1]

    def test_projection_bounds(self):
        with pytest.raises(ValueError):
            proj(3, 4)
        with pytest.raises(ValueError):
            proj(3, 0)

    def test_addlist(self):
        numbers = list_term([church_numeral(n) for n in (1, 2, 3)])
        assert decode_numeral(App(addlist(), numbers)) == 6

    def test_empty_list_sums_to_zero(self):
        assert decode_numeral(App(addlist(), NIL)) == 0

    def test_tree_constructors_take_both_branches(self):
        t = node(leaf(church_numeral(1)), leaf(church_numeral(2)))
        left_of = lam("l", "r", Var("l"))
        picked = ap(t, lam("v", Var("v")), left_of)
        assert alpha_eq(nf(App(picked, Var("q"))), nf(App(leaf(church_numeral(1)), Var("q"))))


class TestRecursion:
    def test_factorial(self):
        fact = factorial()
        assert decode_numeral(App(fact, church_numeral(2))) == 2
        assert decode_numeral(App(fact, church_numeral(3))) == 6

    def test_fibonacci(self):
        fib = fibonacci()
        expected = {0: 1, 1: 1, 2: 2, 3: 3, 4: 5, 5: 8}
        for n, want in expected.items():
            assert decode_numeral(App(fib, church_numeral(n)), fuel=200000) == want

    def test_recursive_term_unfolds(self):
        # self is called on nothing: the loop body just returns a constant
        body = church_numeral(7)
        t = recursive_term(body)
        assert decode_numeral(t) == 7

    def test_cons_is_not_nil(self):
        assert not alpha_eq(nf(cons(Var("h"), NIL)), NIL)
