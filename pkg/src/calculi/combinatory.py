"""Combinatory logic over S and K: reduction, bracket abstraction, and the
translations to and from lambda terms, including the term-model check of the
nine lambda-algebra axioms.
"""
from __future__ import annotations

from dataclasses import dataclass

from . import untyped
from .untyped import FuelExhausted, Term, alpha_eq, lam, normalize


@dataclass(frozen=True)
class CVar:
    name: str


@dataclass(frozen=True)
class Prim:
    tag: str  # "S" or "K"


@dataclass(frozen=True)
class CApp:
    fun: "CTerm"
    arg: "CTerm"


CTerm = object  # CVar | Prim | CApp

S = Prim("S")
K = Prim("K")
I = CApp(CApp(S, K), K)
ONE = CApp(S, CApp(K, I))


def capp(*terms) -> CTerm:
    head, *rest = terms
    for t in rest:
        head = CApp(head, t)
    return head


def cvars(a: CTerm) -> frozenset:
    match a:
        case CVar(name):
            return frozenset((name,))
        case Prim(_):
            return frozenset()
        case CApp(fun, arg):
            return cvars(fun) | cvars(arg)
    raise TypeError(f"not a combinatory term: {a!r}")


def csubst(a: CTerm, b: CTerm, x: str) -> CTerm:
    """Plain replacement; there are no binders to avoid."""
    match a:
        case CVar(name):
            return b if name == x else a
        case Prim(_):
            return a
        case CApp(fun, arg):
            return CApp(csubst(fun, b, x), csubst(arg, b, x))
    raise TypeError(f"not a combinatory term: {a!r}")


def _spine(a: CTerm):
    """Head and argument list of a left-nested application."""
    args = []
    while isinstance(a, CApp):
        args.append(a.arg)
        a = a.fun
    return a, args[::-1]


def _root_contraction(a: CTerm):
    head, args = _spine(a)
    if head == S and len(args) >= 3:
        x, y, z, rest = args[0], args[1], args[2], args[3:]
        return capp(CApp(CApp(x, z), CApp(y, z)), *rest) if rest else CApp(CApp(x, z), CApp(y, z))
    if head == K and len(args) >= 2:
        x, rest = args[0], args[2:]
        return capp(x, *rest) if rest else x
    return None


def creduce_step(a: CTerm) -> list:
    """All single-step reducts, outermost-leftmost first."""
    out = []
    root = _root_contraction(a)
    if root is not None:
        out.append(root)
    if isinstance(a, CApp):
        out.extend(CApp(r, a.arg) for r in creduce_step(a.fun))
        out.extend(CApp(a.fun, r) for r in creduce_step(a.arg))
    return out


def _cfirst(a: CTerm):
    root = _root_contraction(a)
    if root is not None:
        return root
    if isinstance(a, CApp):
        r = _cfirst(a.fun)
        if r is not None:
            return CApp(r, a.arg)
        r = _cfirst(a.arg)
        if r is not None:
            return CApp(a.fun, r)
    return None


def cnormalize(a: CTerm, fuel: int = 1000):
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    current = a
    for _ in range(fuel):
        nxt = _cfirst(current)
        if nxt is None:
            return current
        current = nxt
    if _cfirst(current) is None:
        return current
    return FuelExhausted(current, fuel)


def bracket_abstract(x: str, a: CTerm) -> CTerm:
    """lambda-star: build a combinatory term that behaves like binding x in a.

    A subterm in which x does not occur is wrapped whole with K, the way a
    coefficient is; only applications containing x are split with S. There
    is deliberately no eta-style shortcut collapsing (x applied last) to the
    bare function: the soundness-failure demonstration needs s(ki)i and i
    to stay distinct.
    """
    match a:
        case CVar(name) if name == x:
            return I
        case _ if x not in cvars(a):
            return CApp(K, a)
        case CApp(fun, arg):
            return CApp(CApp(S, bracket_abstract(x, fun)), bracket_abstract(x, arg))
    raise TypeError(f"not a combinatory term: {a!r}")


def to_combinatory(m: Term) -> CTerm:
    match m:
        case untyped.Var(name):
            return CVar(name)
        case untyped.App(fun, arg):
            return CApp(to_combinatory(fun), to_combinatory(arg))
        case untyped.Abs(binder, body):
            return bracket_abstract(binder, to_combinatory(body))
    raise TypeError(f"not a lambda term: {m!r}")


S_LAMBDA = lam(
    "x",
    "y",
    "z",
    untyped.App(
        untyped.App(untyped.Var("x"), untyped.Var("z")),
        untyped.App(untyped.Var("y"), untyped.Var("z")),
    ),
)
K_LAMBDA = lam("x", "y", untyped.Var("x"))


def to_lambda(a: CTerm) -> Term:
    match a:
        case CVar(name):
            return untyped.Var(name)
        case Prim("S"):
            return S_LAMBDA
        case Prim("K"):
            return K_LAMBDA
        case CApp(fun, arg):
            return untyped.App(to_lambda(fun), to_lambda(arg))
    raise TypeError(f"not a combinatory term: {a!r}")


def roundtrip_check(m: Term, fuel: int = 4000):
    """Does translating to combinators and back preserve the normal form?"""
    direct = normalize(m, "beta", fuel)
    if isinstance(direct, FuelExhausted):
        return direct
    back = normalize(to_lambda(to_combinatory(m)), "beta", fuel)
    if isinstance(back, FuelExhausted):
        return back
    return alpha_eq(direct, back)


@dataclass(frozen=True)
class AxiomCheck:
    name: str
    lhs: CTerm
    rhs: CTerm
    passed: bool


@dataclass(frozen=True)
class AxiomReport:
    checks: tuple
    control_distinct: bool

    @property
    def all_passed(self) -> bool:
        return self.control_distinct and all(c.passed for c in self.checks)


def _x(n: str) -> CTerm:
    return CVar(n)


def _axioms():
    x, y, z = _x("x"), _x("y"), _x("z")
    return [
        ("a", CApp(ONE, K), K),
        ("b", CApp(ONE, S), S),
        ("c", CApp(ONE, CApp(K, x)), CApp(K, x)),
        ("d", CApp(ONE, CApp(S, x)), CApp(S, x)),
        ("e", CApp(ONE, capp(S, x, y)), capp(S, x, y)),
        ("f", capp(S, capp(S, CApp(K, K), x), y), CApp(ONE, x)),
        ("g", capp(S, capp(S, capp(S, CApp(K, S), x), y), z), capp(S, capp(S, x, z), capp(S, y, z))),
        ("h", CApp(K, CApp(x, y)), capp(S, CApp(K, x), CApp(K, y))),
        ("i", capp(S, CApp(K, x), I), CApp(ONE, x)),
    ]


def _first_occurrence_order(a: CTerm, seen, order):
    match a:
        case CVar(name):
            if name not in seen:
                seen.add(name)
                order.append(name)
        case CApp(fun, arg):
            _first_occurrence_order(fun, seen, order)
            _first_occurrence_order(arg, seen, order)
        case Prim(_):
            pass


def verify_lambda_algebra_axioms(fuel: int = 20000) -> AxiomReport:
    """Close each axiom over its own variables, translate to lambda terms,
    and compare beta-normal forms. Also confirms the classic counterexample:
    the i = s(ki)i equation fails for the raw (unclosed) terms.
    """
    checks = []
    for name, lhs, rhs in _axioms():
        seen, order = set(), []
        _first_occurrence_order(lhs, seen, order)
        _first_occurrence_order(rhs, seen, order)
        closed_l, closed_r = lhs, rhs
        for v in reversed(order):
            closed_l = bracket_abstract(v, closed_l)
            closed_r = bracket_abstract(v, closed_r)
        nf_l = normalize(to_lambda(closed_l), "beta", fuel)
        nf_r = normalize(to_lambda(closed_r), "beta", fuel)
        passed = (
            not isinstance(nf_l, FuelExhausted)
            and not isinstance(nf_r, FuelExhausted)
            and alpha_eq(nf_l, nf_r)
        )
        checks.append(AxiomCheck(name, lhs, rhs, passed))
    control_l = cnormalize(I, fuel)
    control_r = cnormalize(capp(S, CApp(K, I), I), fuel)
    control_distinct = (
        not isinstance(control_l, FuelExhausted)
        and not isinstance(control_r, FuelExhausted)
        and control_l != control_r
    )
    return AxiomReport(tuple(checks), control_distinct)
