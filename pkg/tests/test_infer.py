"""Tests for unification and principal type inference."""
from __future__ import annotations

import itertools

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from corpus import untyped_corpus
from calculi import untyped
from calculi.infer import (
    IDENTITY,
    InferFailure,
    MguStep,
    NoMatch,
    TVar,
    TypeSubstitution,
    UnifyFailure,
    Untypable,
    annotate_binders,
    apply_subst,
    apply_subst_term,
    compose,
    mgu,
    more_general,
    principal_type,
    rename_for_display,
    substitution_str,
    template_str,
    template_vars,
    typeinfer,
    validate_template,
)
from calculi.stlc import (
    Abs,
    App,
    Arrow,
    Base,
    Case,
    Context,
    In1,
    Pair,
    Product,
    Proj1,
    Proj2,
    Star,
    Sum,
    TypeFailure,
    Unit,
    Var,
    typecheck,
)

X, Y, Z, W = TVar("X"), TVar("Y"), TVar("Z"), TVar("W")
IOTA = Base("iota")
A = Base("a")


def lam(name, body):
    return Abs(name, None, body)


def subst(*pairs):
    return TypeSubstitution.of(*pairs)


# ------------------------------------------------------------- strategies

TEMPLATE_LEAVES = st.sampled_from([X, Y, Z, W, A, Unit()])


def templates(max_leaves=6):
    return st.recursive(
        TEMPLATE_LEAVES,
        lambda kids: st.builds(Arrow, kids, kids) | st.builds(Product, kids, kids),
        max_leaves=max_leaves,
    )


def substitutions():
    return st.dictionaries(
        st.sampled_from(["X", "Y", "Z", "W"]), templates(4), max_size=3
    ).map(lambda d: TypeSubstitution.of(*d.items()))


# ---------------------------------------------------- apply and composition

def test_apply_ground_instance():
    assert apply_subst(subst(("X", IOTA)), Arrow(X, X)) == Arrow(IOTA, IOTA)


def test_apply_identity_is_noop():
    a = Arrow(Product(X, Unit()), Y)
    assert apply_subst(IDENTITY, a) == a


def test_apply_solution_solves_the_sample_equation():
    s = subst(("X", Arrow(Y, Z)), ("W", Arrow(Arrow(Y, Z), Y)))
    lhs = Arrow(X, Arrow(X, Y))
    rhs = Arrow(Arrow(Y, Z), W)
    assert apply_subst(s, lhs) == apply_subst(s, rhs)


def test_apply_rejects_sum_types():
    with pytest.raises(ValueError):
        apply_subst(IDENTITY, Sum(A, A))


def test_compose_with_identity():
    s = subst(("X", Arrow(Y, Z)))
    assert compose(IDENTITY, s) == s
    assert compose(s, IDENTITY) == s


def test_compose_chains_bindings():
    r = compose(subst(("Y", IOTA)), subst(("X", Y)))
    assert r.get("X") == IOTA
    assert r.get("Y") == IOTA
    assert r.domain == {"X", "Y"}


@given(substitutions(), substitutions(), templates())
def test_compose_is_pointwise_composition(t, s, a):
    assert apply_subst(compose(t, s), a) == apply_subst(t, apply_subst(s, a))


def test_substitution_drops_identity_bindings():
    s = subst(("X", TVar("X")), ("Y", IOTA))
    assert s.domain == {"Y"}
    assert s.get("X") == X


def test_substitution_conflicting_bindings_rejected():
    with pytest.raises(ValueError):
        subst(("X", IOTA), ("X", Unit()))


def test_substitution_str_sorted_by_name():
    s = subst(("X", Arrow(Y, Z)), ("W", IOTA))
    assert substitution_str(s) == "[W |-> iota, X |-> Y -> Z]"


# ------------------------------------------------------------- unification

def test_mgu_same_variable_is_identity():
    assert mgu(X, X) == IDENTITY


def test_mgu_binds_left_variable():
    assert mgu(X, Arrow(IOTA, IOTA)) == subst(("X", Arrow(IOTA, IOTA)))


def test_mgu_binds_right_variable():
    assert mgu(IOTA, Y) == subst(("Y", IOTA))


def test_mgu_base_and_unit_reflexive():
    assert mgu(IOTA, IOTA) == IDENTITY
    assert mgu(Unit(), Unit()) == IDENTITY


def test_mgu_occurs_check_fails():
    out = mgu(X, Arrow(X, Y))
    assert isinstance(out, UnifyFailure)
    assert out.kind == "occurs"


@pytest.mark.parametrize(
    "left,right",
    [
        (Base("a"), Base("b")),
        (Arrow(X, Y), Product(X, Y)),
        (Arrow(X, Y), IOTA),
        (Unit(), IOTA),
    ],
)
def test_mgu_constructor_clashes(left, right):
    out = mgu(left, right)
    assert isinstance(out, UnifyFailure)
    assert out.kind == "clash"


def test_mgu_sample_equation_exact_result():
    out = mgu(Arrow(X, Arrow(X, Y)), Arrow(Arrow(Y, Z), W))
    assert out == subst(("X", Arrow(Y, Z)), ("W", Arrow(Arrow(Y, Z), Y)))


def test_mgu_sample_occurs_failure():
    out = mgu(Product(X, Arrow(X, Z)), Product(Arrow(Z, Y), Y))
    assert isinstance(out, UnifyFailure)
    assert out.kind == "occurs"


def test_mgu_empty_lists_give_identity():
    assert mgu([], []) == IDENTITY


def test_mgu_length_mismatch_is_an_error():
    with pytest.raises(ValueError):
        mgu([X], [X, Y])


def test_mgu_failure_reports_equation_position():
    out = mgu([X, IOTA], [IOTA, Unit()])
    assert isinstance(out, UnifyFailure)
    assert out.kind == "clash"
    assert out.position == 1
    out = mgu([X, IOTA], [Arrow(X, X), IOTA])
    assert isinstance(out, UnifyFailure)
    assert out.kind == "occurs"
    assert out.position == 0


def test_mgu_trace_records_fired_clauses():
    trace = []
    mgu(Arrow(X, Arrow(X, Y)), Arrow(Arrow(Y, Z), W), trace)
    assert [e.clause for e in trace] == [7, 4, 11, 2]
    eleven = [e for e in trace if e.clause == 11][0]
    assert eleven.rho_identity is False
    assert eleven.sub_live < eleven.live


@given(templates(), templates())
def test_mgu_success_means_equal_images(a, b):
    out = mgu(a, b)
    if isinstance(out, TypeSubstitution):
        assert apply_subst(out, a) == apply_subst(out, b)


@given(templates(), templates())
def test_mgu_result_is_idempotent(a, b):
    out = mgu(a, b)
    if isinstance(out, TypeSubstitution):
        image = apply_subst(out, a)
        assert apply_subst(out, image) == image


@given(templates(), templates())
def test_mgu_live_variable_counts_shrink(a, b):
    total = len(set(template_vars(a)) | set(template_vars(b)))
    trace = []
    mgu(a, b, trace)
    for e in trace:
        assert e.live <= total
        if e.clause == 11:
            assert e.sub_live <= e.live
            if not e.rho_identity:
                assert e.sub_live < e.live


GROUND_POOL = [A, Arrow(A, A), Product(A, A), Unit()]


@settings(deadline=None)
@given(templates(4), templates(4))
def test_mgu_is_most_general_among_enumerated_unifiers(a, b):
    names = sorted(set(template_vars(a)) | set(template_vars(b)))
    assume(len(names) <= 3)
    out = mgu(a, b)
    for images in itertools.product(GROUND_POOL, repeat=len(names)):
        tau = TypeSubstitution.of(*zip(names, images))
        if apply_subst(tau, a) != apply_subst(tau, b):
            continue
        # every ground unifier must factor through the computed one
        assert isinstance(out, TypeSubstitution)
        assert isinstance(
            more_general(apply_subst(out, a), apply_subst(tau, a)),
            TypeSubstitution,
        )


# ---------------------------------------------------------------- typeinfer

def test_typeinfer_variable_unifies_context_and_goal():
    out = typeinfer(Context.of(("x", X)), Var("x"), Y)
    assert isinstance(out, TypeSubstitution)
    assert apply_subst(out, X) == apply_subst(out, Y)


def test_typeinfer_annotated_binder_is_used():
    out = typeinfer(Context(), Abs("x", IOTA, Var("x")), Y)
    assert isinstance(out, TypeSubstitution)
    assert out.get("Y") == Arrow(IOTA, IOTA)


def test_typeinfer_annotation_conflict_fails_at_the_binder():
    out = typeinfer(Context(), Abs("x", IOTA, Var("x")), Product(Unit(), Unit()))
    assert isinstance(out, InferFailure)
    assert out.path == ()
    assert out.cause.kind == "clash"


def test_typeinfer_self_application_cubed_fails():
    term = lam("x", App(App(Var("x"), Var("x")), Var("x")))
    out = typeinfer(Context(), term, TVar("G"))
    assert isinstance(out, InferFailure)
    assert out.cause.kind == "occurs"
    assert out.path == (0, 0, 1)


def test_typeinfer_unbound_variable_raises():
    with pytest.raises(ValueError):
        typeinfer(Context(), Var("q"), Y)


def test_typeinfer_rejects_sum_terms_and_annotations():
    with pytest.raises(ValueError):
        typeinfer(Context(), In1(Star(), Sum(Unit(), Unit())), Y)
    with pytest.raises(ValueError):
        typeinfer(Context(), Abs("x", Sum(A, A), Var("x")), Y)
    with pytest.raises(ValueError):
        principal_type(
            Case(Var("s"), "l", None, Var("l"), "r", None, Var("r"))
        )


def test_typeinfer_is_deterministic():
    term = lam("f", lam("x", App(Var("f"), App(Var("f"), Var("x")))))
    first = typeinfer(Context(), term, TVar("G"))
    second = typeinfer(Context(), term, TVar("G"))
    assert first == second


def test_typeinfer_records_a_clause_trace():
    trace = []
    typeinfer(Context(), lam("x", Var("x")), Y, trace)
    assert trace
    assert all(isinstance(e, MguStep) for e in trace)
    assert all(1 <= e.clause <= 11 for e in trace)


def test_validate_template_rejects_nested_sum():
    with pytest.raises(ValueError):
        validate_template(Arrow(Sum(A, A), A))


# ----------------------------------------------------------- principal types

def test_principal_identity():
    ty, assigns = principal_type(lam("x", Var("x")))
    assert ty == Arrow(TVar("A"), TVar("A"))
    assert assigns == ()


def test_principal_flipped_application():
    ty, assigns = principal_type(lam("x", lam("y", App(Var("y"), Var("x")))))
    a, b = TVar("A"), TVar("B")
    assert ty == Arrow(a, Arrow(Arrow(a, b), b))
    assert assigns == ()


def test_principal_twice():
    ty, _ = principal_type(
        lam("f", lam("x", App(Var("f"), App(Var("f"), Var("x")))))
    )
    a = TVar("A")
    assert ty == Arrow(Arrow(a, a), Arrow(a, a))


def test_principal_open_application():
    ty, assigns = principal_type(App(Var("f"), Var("x")))
    a, b = TVar("A"), TVar("B")
    assert ty == a
    assert assigns == (("f", Arrow(b, a)), ("x", b))


def test_principal_star_pair():
    ty, assigns = principal_type(Pair(Star(), lam("x", Var("x"))))
    assert ty == Product(Unit(), Arrow(TVar("A"), TVar("A")))
    assert assigns == ()


def test_principal_projections():
    ty, _ = principal_type(lam("p", Pair(Proj2(Var("p")), Proj1(Var("p")))))
    a, b = TVar("A"), TVar("B")
    assert ty == Arrow(Product(a, b), Product(b, a))


@pytest.mark.parametrize(
    "term",
    [
        lam("x", App(Var("x"), Var("x"))),
        lam("x", App(App(Var("x"), Var("x")), Var("x"))),
        Proj1(lam("x", Var("x"))),
        App(Star(), Star()),
    ],
)
def test_principal_untypable_terms(term):
    assert isinstance(principal_type(term), Untypable)


def test_untypable_carries_the_failure():
    out = principal_type(lam("x", App(Var("x"), Var("x"))))
    assert isinstance(out.cause, InferFailure)
    assert out.cause.cause.kind == "occurs"


# ------------------------------------------------- soundness and principality

def to_typed(t):
    match t:
        case untyped.Var(name):
            return Var(name)
        case untyped.App(fun, arg):
            return App(to_typed(fun), to_typed(arg))
        case untyped.Abs(binder, body):
            return Abs(binder, None, to_typed(body))
    raise AssertionError(t)


def test_typeinfer_soundness_on_corpus():
    """Whenever inference succeeds, instantiating the judgment and running
    the checker reproduces the instantiated goal type."""
    typable = 0
    for term in untyped_corpus(seed=9, count=150, max_size=10):
        annotated = annotate_binders(to_typed(term))
        names = sorted(untyped.free_vars(term))
        ctx = Context.of(*((n, TVar(f"V{i}")) for i, n in enumerate(names)))
        goal = TVar("G")
        out = typeinfer(ctx, annotated, goal)
        if isinstance(out, InferFailure):
            continue
        typable += 1
        ictx = Context(tuple((n, apply_subst(out, a)) for n, a in ctx.entries))
        iterm = apply_subst_term(out, annotated)
        assert typecheck(ictx, iterm) == apply_subst(out, goal)
    assert typable >= 25


def count_binders(t) -> int:
    match t:
        case untyped.Var(_):
            return 0
        case untyped.App(fun, arg):
            return count_binders(fun) + count_binders(arg)
        case untyped.Abs(_, body):
            return 1 + count_binders(body)
    raise AssertionError(t)


def ground_types(depth: int) -> list:
    pool = [A]
    for _ in range(depth):
        for left, right in itertools.product(list(pool), repeat=2):
            for build in (Arrow, Product):
                t = build(left, right)
                if t not in pool:
                    pool.append(t)
    return pool


def annotate_in_order(t, types):
    feed = iter(types)

    def walk(u):
        match u:
            case Var(_):
                return u
            case App(fun, arg):
                return App(walk(fun), walk(arg))
            case Abs(binder, _, body):
                return Abs(binder, next(feed), walk(body))
        raise AssertionError(u)

    return walk(t)


def fold_product(types):
    out = types[0]
    for t in types[1:]:
        out = Product(out, t)
    return out


def test_principal_type_covers_enumerated_ground_typings():
    """Brute force: every ground typing over one base type (depth <= 2,
    binders and free variables both enumerated) must be an instance of the
    inferred principal judgment; untypable verdicts must find nothing."""
    pool = ground_types(2)
    checked = 0
    for term in untyped_corpus(seed=5, count=60, max_size=9):
        typed = to_typed(term)
        free = sorted(untyped.free_vars(term))
        slots = count_binders(term) + len(free)
        if not 1 <= slots <= 2:
            continue
        checked += 1
        verdict = principal_type(typed)
        if isinstance(verdict, Untypable):
            principal = None
            assigns = ()
        else:
            ty, assigns = verdict
            principal = fold_product([ty] + [a for _, a in assigns])
        for picks in itertools.product(pool, repeat=slots):
            fv_types = dict(zip(free, picks[: len(free)]))
            annotated = annotate_in_order(typed, picks[len(free):])
            got = typecheck(Context.of(*fv_types.items()), annotated)
            if isinstance(got, TypeFailure):
                continue
            assert principal is not None, (
                f"enumeration typed a term reported untypable: {term}"
            )
            ground = fold_product([got] + [fv_types[n] for n, _ in assigns])
            assert isinstance(more_general(principal, ground), TypeSubstitution)
    assert checked >= 8


# ------------------------------------------------------------------ matching

def test_more_general_binds_only_left_variables():
    out = more_general(Arrow(X, Y), Arrow(X, X))
    assert isinstance(out, TypeSubstitution)
    assert apply_subst(out, Arrow(X, Y)) == Arrow(X, X)


def test_more_general_on_ground_instance():
    out = more_general(Arrow(X, X), Arrow(IOTA, IOTA))
    assert out == subst(("X", IOTA))


def test_more_general_fails_backwards():
    assert isinstance(more_general(Arrow(IOTA, IOTA), Arrow(X, X)), NoMatch)


def test_incomparable_types():
    dbl = Arrow(Arrow(IOTA, IOTA), Arrow(IOTA, IOTA))
    assert isinstance(more_general(Arrow(IOTA, IOTA), dbl), NoMatch)
    assert isinstance(more_general(dbl, Arrow(IOTA, IOTA)), NoMatch)


def test_equally_general_templates_match_both_ways():
    left = Arrow(X, Y)
    right = Arrow(W, Z)
    assert isinstance(more_general(left, right), TypeSubstitution)
    assert isinstance(more_general(right, left), TypeSubstitution)


def test_more_general_respects_earlier_bindings():
    out = more_general(Arrow(X, X), Arrow(IOTA, Unit()))
    assert isinstance(out, NoMatch)


@given(substitutions(), templates())
def test_any_substitution_image_is_an_instance(s, a):
    out = more_general(a, apply_subst(s, a))
    assert isinstance(out, TypeSubstitution)


# ------------------------------------------------------------------- display

def test_rename_for_display_first_use_order():
    t5, t4 = TVar("T5"), TVar("T4")
    renamed = rename_for_display([Arrow(t5, Arrow(Arrow(t5, t4), t4))])
    a, b = TVar("A"), TVar("B")
    assert renamed == [Arrow(a, Arrow(Arrow(a, b), b))]


def test_rename_for_display_shares_names_across_templates():
    t9, t2 = TVar("T9"), TVar("T2")
    renamed = rename_for_display([t9, Arrow(t9, t2)])
    assert renamed == [TVar("A"), Arrow(TVar("A"), TVar("B"))]


@pytest.mark.parametrize(
    "template,text",
    [
        (Arrow(X, Arrow(Y, Z)), "X -> Y -> Z"),
        (Arrow(Arrow(X, Y), Z), "(X -> Y) -> Z"),
        (Arrow(Product(X, Y), Z), "X * Y -> Z"),
        (Product(X, Arrow(Y, Z)), "X * (Y -> Z)"),
        (Product(Product(X, Y), Z), "(X * Y) * Z"),
        (Product(Unit(), A), "1 * a"),
    ],
)
def test_template_str_precedence(template, text):
    assert template_str(template) == text


def test_template_str_unicode():
    assert template_str(Arrow(Product(X, Y), Z), unicode=True) == "X × Y → Z"


def test_annotate_binders_fills_only_missing():
    term = lam("x", Abs("y", IOTA, Var("x")))
    out = annotate_binders(term)
    assert out.annot == TVar("T0")
    assert out.body.annot == IOTA


def test_template_vars_first_use_order():
    assert template_vars(Arrow(Product(Y, X), Y)) == ("Y", "X")
