"""Polymorphic lambda calculus: universal types, type abstraction and type
application layered over the plain function core.

New machinery compared to the simply typed module: types themselves have a
binder now, so the module carries type-level substitution and
alpha-equality, and the typing rule for type abstraction enforces the
"binder not fixed by the context" side condition. Long normal forms
eta-expand a beta-normal term until every application spine has a type
variable as its type; closed inhabitants of the bool/nat/tree encodings can
then be read off the syntax, which is how the classifiers and the tree
codec work.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .stlc import Context, TypeFailure
from .untyped import FuelExhausted, fresh_name


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class TVar:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: object
    cod: object


@dataclass(frozen=True)
class Forall:
    binder: str
    body: object


FType = object


def ftv(a: FType) -> frozenset:
    """Free type variables of a type."""
    match a:
        case TVar(name):
            return frozenset((name,))
        case Arrow(dom, cod):
            return ftv(dom) | ftv(cod)
        case Forall(binder, body):
            return ftv(body) - {binder}
    raise TypeError(f"not a System F type: {a!r}")


def ftype_str(a: FType, unicode: bool = False) -> str:
    """Render a type: -> associates right, forall extends right."""
    arrow = " → " if unicode else " -> "
    quant = "∀" if unicode else "forall "

    def go(t, prec):
        match t:
            case TVar(name):
                return name
            case Arrow(dom, cod):
                s = go(dom, 2) + arrow + go(cod, 1)
                return f"({s})" if prec > 1 else s
            case Forall(binder, body):
                s = f"{quant}{binder}. {go(body, 0)}"
                return f"({s})" if prec > 0 else s
        raise TypeError(f"not a System F type: {t!r}")

    return go(a, 0)


def _least_fresh(base: str, avoid) -> str:
    return base if base not in avoid else fresh_name(base, avoid)


def ftype_subst(a: FType, b: FType, alpha: str) -> FType:
    """a with b substituted for free occurrences of alpha, renaming bound
    variables of a away from the free variables of b."""
    match a:
        case TVar(name):
            return b if name == alpha else a
        case Arrow(dom, cod):
            return Arrow(ftype_subst(dom, b, alpha), ftype_subst(cod, b, alpha))
        case Forall(binder, body):
            if binder == alpha:
                return a
            if binder in ftv(b) and alpha in ftv(body):
                new = fresh_name(binder, ftv(body) | ftv(b) | {alpha})
                body = ftype_subst(body, TVar(new), binder)
                binder = new
            return Forall(binder, ftype_subst(body, b, alpha))
    raise TypeError(f"not a System F type: {a!r}")


def ftype_alpha_eq(a: FType, b: FType) -> bool:
    """Equality up to renaming of forall-bound variables, the ambient
    notion of equality on these types."""
    fresh = itertools.count()

    def go(a, b, ea, eb):
        match a, b:
            case (TVar(x), TVar(y)):
                return ea.get(x, x) == eb.get(y, y)
            case (Arrow(d1, c1), Arrow(d2, c2)):
                return go(d1, d2, ea, eb) and go(c1, c2, ea, eb)
            case (Forall(x, s), Forall(y, t)):
                i = next(fresh)
                return go(s, t, {**ea, x: i}, {**eb, y: i})
        return False

    return go(a, b, {}, {})


# ---------------------------------------------------------------- terms

@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fun: object
    arg: object


@dataclass(frozen=True)
class Abs:
    binder: str
    annot: object  # FType
    body: object


@dataclass(frozen=True)
class TyApp:
    fun: object
    arg: object  # FType


@dataclass(frozen=True)
class TyAbs:
    binder: str  # type-variable name
    body: object


FTerm = object


def free_fvars(t: FTerm) -> frozenset:
    """Free term variables."""
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return free_fvars(fun) | free_fvars(arg)
        case Abs(binder, _, body):
            return free_fvars(body) - {binder}
        case TyApp(fun, _):
            return free_fvars(fun)
        case TyAbs(_, body):
            return free_fvars(body)
    raise TypeError(f"not a System F term: {t!r}")


def ftv_term(t: FTerm) -> frozenset:
    """Free type variables of a term: annotations and type arguments,
    minus what the type abstractions bind."""
    match t:
        case Var(_):
            return frozenset()
        case App(fun, arg):
            return ftv_term(fun) | ftv_term(arg)
        case Abs(_, annot, body):
            return ftv(annot) | ftv_term(body)
        case TyApp(fun, arg):
            return ftv_term(fun) | ftv(arg)
        case TyAbs(binder, body):
            return ftv_term(body) - {binder}
    raise TypeError(f"not a System F term: {t!r}")


def fterm_str(t: FTerm, unicode: bool = False) -> str:
    lam = "λ" if unicode else "\\"
    cap = "Λ" if unicode else "/\\"

    def atom(u):
        return go(u) if isinstance(u, Var) else f"({go(u)})"

    def go(u):
        match u:
            case Var(name):
                return name
            case App(fun, arg):
                fs = go(fun) if isinstance(fun, (Var, App, TyApp)) else f"({go(fun)})"
                return f"{fs} {atom(arg)}"
            case TyApp(fun, arg):
                fs = go(fun) if isinstance(fun, (Var, App, TyApp)) else f"({go(fun)})"
                return f"{fs} [{ftype_str(arg, unicode)}]"
            case Abs(binder, annot, body):
                ann = "" if annot is None else f":{ftype_str(annot, unicode)}"
                return f"{lam}{binder}{ann}. {go(body)}"
            case TyAbs(binder, body):
                return f"{cap}{binder}. {go(body)}"
        raise TypeError(f"not a System F term: {u!r}")

    return go(t)


def fsubst(t: FTerm, n: FTerm, x: str) -> FTerm:
    """Capture-avoiding substitution of the term n for the term variable x.

    Both binder kinds can capture: a lambda binder may capture a free term
    variable of n, and a type binder may capture a free type variable of n
    (n's annotations mention type variables too).
    """
    match t:
        case Var(name):
            return n if name == x else t
        case App(fun, arg):
            return App(fsubst(fun, n, x), fsubst(arg, n, x))
        case Abs(binder, annot, body):
            if binder == x:
                return t
            if binder in free_fvars(n) and x in free_fvars(body):
                new = fresh_name(binder, free_fvars(body) | free_fvars(n) | {x})
                body = fsubst(body, Var(new), binder)
                binder = new
            return Abs(binder, annot, fsubst(body, n, x))
        case TyApp(fun, arg):
            return TyApp(fsubst(fun, n, x), arg)
        case TyAbs(binder, body):
            if x not in free_fvars(body):
                return t
            if binder in ftv_term(n):
                new = fresh_name(binder, ftv_term(body) | ftv_term(n))
                body = tysubst_term(body, TVar(new), binder)
                binder = new
            return TyAbs(binder, fsubst(body, n, x))
    raise TypeError(f"not a System F term: {t!r}")


def tysubst_term(t: FTerm, b: FType, alpha: str) -> FTerm:
    """Capture-avoiding substitution of the type b for the type variable
    alpha throughout a term."""
    match t:
        case Var(_):
            return t
        case App(fun, arg):
            return App(tysubst_term(fun, b, alpha), tysubst_term(arg, b, alpha))
        case Abs(binder, annot, body):
            return Abs(binder, ftype_subst(annot, b, alpha), tysubst_term(body, b, alpha))
        case TyApp(fun, arg):
            return TyApp(tysubst_term(fun, b, alpha), ftype_subst(arg, b, alpha))
        case TyAbs(binder, body):
            if binder == alpha:
                return t
            if binder in ftv(b) and alpha in ftv_term(body):
                new = fresh_name(binder, ftv_term(body) | ftv(b) | {alpha})
                body = tysubst_term(body, TVar(new), binder)
                binder = new
            return TyAbs(binder, tysubst_term(body, b, alpha))
    raise TypeError(f"not a System F term: {t!r}")


def falpha_eq(m: FTerm, n: FTerm) -> bool:
    """Alpha-equality with term and type binders renamable independently."""
    fresh = itertools.count()

    def teq(a, b, ta, tb):
        match a, b:
            case (TVar(x), TVar(y)):
                return ta.get(x, x) == tb.get(y, y)
            case (Arrow(d1, c1), Arrow(d2, c2)):
                return teq(d1, d2, ta, tb) and teq(c1, c2, ta, tb)
            case (Forall(x, s), Forall(y, t)):
                i = next(fresh)
                return teq(s, t, {**ta, x: i}, {**tb, y: i})
        return False

    def go(m, n, em, en, ta, tb):
        match m, n:
            case (Var(x), Var(y)):
                return em.get(x, x) == en.get(y, y)
            case (App(f1, a1), App(f2, a2)):
                return go(f1, f2, em, en, ta, tb) and go(a1, a2, em, en, ta, tb)
            case (Abs(x, ax, bx), Abs(y, ay, by)):
                if not teq(ax, ay, ta, tb):
                    return False
                i = next(fresh)
                return go(bx, by, {**em, x: i}, {**en, y: i}, ta, tb)
            case (TyApp(f1, a1), TyApp(f2, a2)):
                return go(f1, f2, em, en, ta, tb) and teq(a1, a2, ta, tb)
            case (TyAbs(x, bx), TyAbs(y, by)):
                i = next(fresh)
                return go(bx, by, em, en, {**ta, x: i}, {**tb, y: i})
        return False

    return go(m, n, {}, {}, {}, {})


# ---------------------------------------------------------------- typing

def _ctx_ftv(ctx: Context) -> frozenset:
    out = frozenset()
    for _, a in ctx.entries:
        out |= ftv(a)
    return out


def ftypecheck(ctx: Context, t: FTerm, path: tuple = ()):
    """The unique type of t under ctx, or a TypeFailure locating the bad
    subterm and the typing rule it violates. The side condition on type
    abstraction is checked against the binder name as written."""
    return _check(ctx, t, path, strict=True)


def _synth(ctx: Context, t: FTerm, path: tuple = ()):
    """Typing up to renaming: a type binder that shadows a context variable
    is freshened instead of rejected. Beta-reduction creates such terms
    (a closed type abstraction substituted under another one), and the
    long-normal-form machinery has to type them."""
    return _check(ctx, t, path, strict=False)


def _check(ctx: Context, t: FTerm, path: tuple, strict: bool):
    match t:
        case Var(name):
            a = ctx.lookup(name)
            if a is None:
                return TypeFailure(f"unbound variable {name}", path, "var")
            return a
        case App(fun, arg):
            fa = _check(ctx, fun, path + (0,), strict)
            if isinstance(fa, TypeFailure):
                return fa
            if not isinstance(fa, Arrow):
                return TypeFailure(
                    f"applied a non-function of type {ftype_str(fa)}", path, "app"
                )
            aa = _check(ctx, arg, path + (1,), strict)
            if isinstance(aa, TypeFailure):
                return aa
            if not ftype_alpha_eq(aa, fa.dom):
                return TypeFailure(
                    f"argument has type {ftype_str(aa)}, expected {ftype_str(fa.dom)}",
                    path,
                    "app",
                )
            return fa.cod
        case Abs(binder, annot, body):
            if annot is None:
                return TypeFailure(
                    f"binder {binder} lacks a type annotation", path, "abs"
                )
            ba = _check(ctx.extend(binder, annot), body, path + (0,), strict)
            if isinstance(ba, TypeFailure):
                return ba
            return Arrow(annot, ba)
        case TyApp(fun, arg):
            fa = _check(ctx, fun, path + (0,), strict)
            if isinstance(fa, TypeFailure):
                return fa
            if not isinstance(fa, Forall):
                return TypeFailure(
                    f"type-applied a non-universal of type {ftype_str(fa)}",
                    path,
                    "typeapp",
                )
            return ftype_subst(fa.body, arg, fa.binder)
        case TyAbs(binder, body):
            if binder in _ctx_ftv(ctx):
                if strict:
                    return TypeFailure(
                        f"type variable {binder} is fixed by the context",
                        path,
                        "typeabs",
                    )
                new = fresh_name(binder, ftv_term(body) | _ctx_ftv(ctx))
                body = tysubst_term(body, TVar(new), binder)
                binder = new
            ba = _check(ctx, body, path + (0,), strict)
            if isinstance(ba, TypeFailure):
                return ba
            return Forall(binder, ba)
    raise TypeError(f"not a System F term: {t!r}")


# ---------------------------------------------------------------- reduction

def fstep(t: FTerm, include_eta: bool = False) -> list:
    """All single-step reducts, the root redex first: beta for term and
    type application, plus (behind include_eta) eta for both binder kinds."""
    out = []
    match t:
        case App(Abs(binder, _, body), arg):
            out.append(fsubst(body, arg, binder))
        case TyApp(TyAbs(binder, body), arg):
            out.append(tysubst_term(body, arg, binder))
    if include_eta:
        match t:
            case Abs(binder, _, App(fun, Var(name))) if (
                name == binder and binder not in free_fvars(fun)
            ):
                out.append(fun)
            case TyAbs(binder, TyApp(fun, TVar(name))) if (
                name == binder and binder not in ftv_term(fun)
            ):
                out.append(fun)
    match t:
        case App(fun, arg):
            out += [App(r, arg) for r in fstep(fun, include_eta)]
            out += [App(fun, r) for r in fstep(arg, include_eta)]
        case Abs(binder, annot, body):
            out += [Abs(binder, annot, r) for r in fstep(body, include_eta)]
        case TyApp(fun, arg):
            out += [TyApp(r, arg) for r in fstep(fun, include_eta)]
        case TyAbs(binder, body):
            out += [TyAbs(binder, r) for r in fstep(body, include_eta)]
    return out


def _leftmost_beta(t: FTerm):
    match t:
        case App(Abs(binder, _, body), arg):
            return fsubst(body, arg, binder)
        case TyApp(TyAbs(binder, body), arg):
            return tysubst_term(body, arg, binder)
    match t:
        case App(fun, arg):
            r = _leftmost_beta(fun)
            if r is not None:
                return App(r, arg)
            r = _leftmost_beta(arg)
            if r is not None:
                return App(fun, r)
        case TyApp(fun, arg):
            r = _leftmost_beta(fun)
            if r is not None:
                return TyApp(r, arg)
        case Abs(binder, annot, body):
            r = _leftmost_beta(body)
            if r is not None:
                return Abs(binder, annot, r)
        case TyAbs(binder, body):
            r = _leftmost_beta(body)
            if r is not None:
                return TyAbs(binder, r)
    return None


def fnormalize(t: FTerm, fuel: int = 1000):
    """Normal-order beta-normalization. Every well-typed term gets there;
    the fuel is a stopgap for ill-typed inputs, which may loop."""
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    current = t
    for _ in range(fuel):
        nxt = _leftmost_beta(current)
        if nxt is None:
            return current
        current = nxt
    return FuelExhausted(current, fuel)


# ---------------------------------------------------- long normal forms

def long_normal_form(t: FTerm, ctx: Context = Context(), fuel: int = 10000) -> FTerm:
    """Beta-normalize, then eta-expand until every application spine has a
    type variable as its type. The expansion is type-directed: a body of
    arrow type gains a lambda and a trailing argument, a body of universal
    type gains a type abstraction and a trailing type argument."""
    a = _synth(ctx, t)
    if isinstance(a, TypeFailure):
        raise TypeError(str(a))
    nf = fnormalize(t, fuel)
    if isinstance(nf, FuelExhausted):
        raise RuntimeError(f"no beta-normal form within {fuel} steps")
    return _expand(nf, ctx)


def _expand(m: FTerm, ctx: Context) -> FTerm:
    a = _synth(ctx, m)
    match a:
        case Arrow(dom, _):
            match m:
                case Abs(binder, annot, body):
                    return Abs(binder, annot, _expand(body, ctx.extend(binder, annot)))
            w = fresh_name("w", free_fvars(m) | {n for n, _ in ctx.entries})
            return Abs(w, dom, _expand(App(m, Var(w)), ctx.extend(w, dom)))
        case Forall(_, _):
            match m:
                case TyAbs(binder, body):
                    return TyAbs(binder, _expand(body, ctx))
            g = fresh_name("t", ftv_term(m) | _ctx_ftv(ctx))
            return TyAbs(g, _expand(TyApp(m, TVar(g)), ctx))
    return _expand_spine(m, ctx)


def _expand_spine(m: FTerm, ctx: Context) -> FTerm:
    match m:
        case Var(_):
            return m
        case App(fun, arg):
            return App(_expand_spine(fun, ctx), _expand(arg, ctx))
        case TyApp(fun, arg):
            return TyApp(_expand_spine(fun, ctx), arg)
    raise AssertionError("a normal form of atomic type starts with a variable")


@dataclass(frozen=True)
class NotLong:
    path: tuple
    reason: str

    def __bool__(self) -> bool:
        return False

    def __str__(self) -> str:
        where = "".join(f".{i}" for i in self.path) or " at the root"
        return f"{self.reason} (position{where})"


def is_long_normal(t: FTerm, ctx: Context = Context()):
    """True, or a falsy NotLong naming the first offending position."""
    a = _synth(ctx, t)
    if isinstance(a, TypeFailure):
        return NotLong(a.path, f"ill-typed: {a.message}")
    return _check_long(t, ctx, ())


def _check_long(t: FTerm, ctx: Context, path: tuple):
    body, here = t, path
    while True:
        match body:
            case Abs(binder, annot, inner):
                ctx = ctx.extend(binder, annot)
                body, here = inner, here + (0,)
            case TyAbs(_, inner):
                body, here = inner, here + (0,)
            case _:
                break
    if not isinstance(_synth(ctx, body), TVar):
        return NotLong(here, "the body does not have atomic type")
    spine, args = body, []
    while True:
        match spine:
            case App(fun, arg):
                args.append((arg, here + (1,)))
                spine, here = fun, here + (0,)
            case TyApp(fun, _):
                spine, here = fun, here + (0,)
            case _:
                break
    if not isinstance(spine, Var):
        return NotLong(here, "the head is not a variable")
    for arg, where in args:
        verdict = _check_long(arg, ctx, where)
        if not verdict:
            return verdict
    return True


# ---------------------------------------------------------------- encodings

def _tv(name):
    return TVar(name)


BOOL = Forall("a", Arrow(_tv("a"), Arrow(_tv("a"), _tv("a"))))
T = TyAbs("a", Abs("x", _tv("a"), Abs("y", _tv("a"), Var("x"))))
F = TyAbs("a", Abs("x", _tv("a"), Abs("y", _tv("a"), Var("y"))))
IF_THEN_ELSE = TyAbs("b", Abs("z", BOOL, TyApp(Var("z"), _tv("b"))))


def apps(fun, *args):
    """Left-nested application spine; each argument is a term or a type,
    and types become type applications."""
    for a in args:
        fun = TyApp(fun, a) if isinstance(a, (TVar, Arrow, Forall)) else App(fun, a)
    return fun


AND = Abs("a", BOOL, Abs("b", BOOL, apps(IF_THEN_ELSE, BOOL, Var("a"), Var("b"), F)))
OR = Abs("a", BOOL, Abs("b", BOOL, apps(IF_THEN_ELSE, BOOL, Var("a"), T, Var("b"))))
NOT = Abs("a", BOOL, apps(IF_THEN_ELSE, BOOL, Var("a"), F, T))

NAT = Forall("a", Arrow(Arrow(_tv("a"), _tv("a")), Arrow(_tv("a"), _tv("a"))))


def numeral(n: int) -> FTerm:
    if n < 0:
        raise ValueError("numerals start at zero")
    body = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return TyAbs("a", Abs("f", Arrow(_tv("a"), _tv("a")), Abs("x", _tv("a"), body)))


SUCC = Abs(
    "n", NAT,
    TyAbs("a", Abs("f", Arrow(_tv("a"), _tv("a")), Abs("x", _tv("a"),
        App(Var("f"), apps(Var("n"), _tv("a"), Var("f"), Var("x")))))),
)
ADD = Abs(
    "n", NAT, Abs("m", NAT,
    TyAbs("a", Abs("f", Arrow(_tv("a"), _tv("a")), Abs("x", _tv("a"),
        apps(Var("n"), _tv("a"), Var("f"),
              apps(Var("m"), _tv("a"), Var("f"), Var("x"))))))),
)
MULT = Abs(
    "n", NAT, Abs("m", NAT,
    TyAbs("a", Abs("f", Arrow(_tv("a"), _tv("a")),
        apps(Var("n"), _tv("a"), apps(Var("m"), _tv("a"), Var("f")))))),
)


def product_type(a: FType, b: FType) -> FType:
    g = _least_fresh("g", ftv(a) | ftv(b))
    return Forall(g, Arrow(Arrow(a, Arrow(b, TVar(g))), TVar(g)))


PAIR = TyAbs("a", TyAbs("b", Abs("x", _tv("a"), Abs("y", _tv("b"),
    TyAbs("g", Abs("f", Arrow(_tv("a"), Arrow(_tv("b"), _tv("g"))),
        App(App(Var("f"), Var("x")), Var("y"))))))))
PROJ1 = TyAbs("a", TyAbs("b", Abs("p", product_type(_tv("a"), _tv("b")),
    App(TyApp(Var("p"), _tv("a")), Abs("x", _tv("a"), Abs("y", _tv("b"), Var("x")))))))
PROJ2 = TyAbs("a", TyAbs("b", Abs("p", product_type(_tv("a"), _tv("b")),
    App(TyApp(Var("p"), _tv("b")), Abs("x", _tv("a"), Abs("y", _tv("b"), Var("y")))))))

UNIT = Forall("a", Arrow(_tv("a"), _tv("a")))
STAR = TyAbs("a", Abs("x", _tv("a"), Var("x")))


def sum_type(a: FType, b: FType) -> FType:
    g = _least_fresh("g", ftv(a) | ftv(b))
    return Forall(g, Arrow(Arrow(a, TVar(g)), Arrow(Arrow(b, TVar(g)), TVar(g))))


INJ1 = TyAbs("a", TyAbs("b", Abs("x", _tv("a"),
    TyAbs("g", Abs("f", Arrow(_tv("a"), _tv("g")), Abs("h", Arrow(_tv("b"), _tv("g")),
        App(Var("f"), Var("x"))))))))
INJ2 = TyAbs("a", TyAbs("b", Abs("x", _tv("b"),
    TyAbs("g", Abs("f", Arrow(_tv("a"), _tv("g")), Abs("h", Arrow(_tv("b"), _tv("g")),
        App(Var("h"), Var("x"))))))))
CASE = TyAbs("a", TyAbs("b", TyAbs("g",
    Abs("s", sum_type(_tv("a"), _tv("b")),
        Abs("f", Arrow(_tv("a"), _tv("g")), Abs("h", Arrow(_tv("b"), _tv("g")),
            apps(Var("s"), _tv("g"), Var("f"), Var("h"))))))))

VOID = Forall("a", _tv("a"))
ABORT = TyAbs("a", Abs("v", VOID, TyApp(Var("v"), _tv("a"))))

TREE = Forall("a", Arrow(Arrow(NAT, _tv("a")),
                         Arrow(Arrow(_tv("a"), Arrow(_tv("a"), _tv("a"))), _tv("a"))))
LEAF = Abs("n", NAT,
    TyAbs("a", Abs("l", Arrow(NAT, _tv("a")),
        Abs("b", Arrow(_tv("a"), Arrow(_tv("a"), _tv("a"))),
            App(Var("l"), Var("n"))))))
BRANCH = Abs("s", TREE, Abs("t", TREE,
    TyAbs("a", Abs("l", Arrow(NAT, _tv("a")),
        Abs("b", Arrow(_tv("a"), Arrow(_tv("a"), _tv("a"))),
            App(App(Var("b"), apps(Var("s"), _tv("a"), Var("l"), Var("b"))),
                apps(Var("t"), _tv("a"), Var("l"), Var("b"))))))))


def f_encodings() -> dict:
    """Every encoding in one table; product, sum, and numeral are the
    parameterized entries."""
    return {
        "bool": BOOL, "T": T, "F": F, "if_then_else": IF_THEN_ELSE,
        "and": AND, "or": OR, "not": NOT,
        "nat": NAT, "numeral": numeral, "succ": SUCC, "add": ADD, "mult": MULT,
        "product": product_type, "pair": PAIR, "proj1": PROJ1, "proj2": PROJ2,
        "unit": UNIT, "star": STAR,
        "sum": sum_type, "inj1": INJ1, "inj2": INJ2, "case": CASE,
        "void": VOID, "abort": ABORT,
        "tree": TREE, "leaf": LEAF, "branch": BRANCH,
    }


# ---------------------------------------------------------- classification

@dataclass(frozen=True)
class NotBool:
    reason: str


@dataclass(frozen=True)
class NotNat:
    reason: str


def classify_bool(t: FTerm):
    """True or False for a closed term of the boolean type; NotBool when
    the preconditions fail."""
    if free_fvars(t):
        return NotBool("the term is not closed")
    a = _synth(Context(), t)
    if isinstance(a, TypeFailure):
        return NotBool(str(a))
    if not ftype_alpha_eq(a, BOOL):
        return NotBool(f"the term has type {ftype_str(a)}")
    canon = long_normal_form(t)
    if falpha_eq(canon, T):
        return True
    if falpha_eq(canon, F):
        return False
    raise RuntimeError(
        "a closed boolean term must match one of the two canonical forms"
    )


def classify_nat(t: FTerm):
    """The numeral a closed term of the numeral type normalizes to;
    NotNat when the preconditions fail."""
    if free_fvars(t):
        return NotNat("the term is not closed")
    a = _synth(Context(), t)
    if isinstance(a, TypeFailure):
        return NotNat(str(a))
    if not ftype_alpha_eq(a, NAT):
        return NotNat(f"the term has type {ftype_str(a)}")
    n = _read_numeral(long_normal_form(t))
    if n is None:
        raise RuntimeError(
            "a closed numeral-typed term must spell out a numeral"
        )
    return n


def _read_numeral(t: FTerm):
    match t:
        case TyAbs(_, Abs(f, _, Abs(x, _, body))):
            n = 0
            while True:
                match body:
                    case Var(name) if name == x:
                        return n
                    case App(Var(name), rest) if name == f and f != x:
                        n += 1
                        body = rest
                    case _:
                        return None
    return None


# ---------------------------------------------------------------- trees

@dataclass(frozen=True)
class Leaf:
    label: int


@dataclass(frozen=True)
class Branch:
    left: object
    right: object


@dataclass(frozen=True)
class NotTree:
    reason: str


def encode_tree(tree) -> FTerm:
    """A leaf-labelled binary tree as the closed term whose long normal
    form spells the tree out: leaves become applications of the first
    abstracted function, branches of the second."""

    def go(t):
        match t:
            case Leaf(n):
                return App(Var("l"), numeral(n))
            case Branch(left, right):
                return App(App(Var("b"), go(left)), go(right))
        raise TypeError(f"not a leaf-labelled binary tree: {t!r}")

    # the binder must differ from the numerals' type binder, or the strict
    # checker would reject the shadowing
    return TyAbs("c", Abs("l", Arrow(NAT, _tv("c")),
        Abs("b", Arrow(_tv("c"), Arrow(_tv("c"), _tv("c"))), go(tree))))


class _Unreadable(Exception):
    pass


def decode_tree(t: FTerm):
    """Read a leaf-labelled binary tree back off a closed term of the tree
    type; NotTree when the preconditions fail."""
    if free_fvars(t):
        return NotTree("the term is not closed")
    a = _synth(Context(), t)
    if isinstance(a, TypeFailure):
        return NotTree(str(a))
    if not ftype_alpha_eq(a, TREE):
        return NotTree(f"the term has type {ftype_str(a)}")
    canon = long_normal_form(t)
    match canon:
        case TyAbs(_, Abs(lname, _, Abs(bname, _, body))):
            pass
        case _:
            raise RuntimeError("a long normal form of the tree type has"
                               " three leading binders")

    def walk(q):
        match q:
            case App(App(Var(name), left), right) if name == bname:
                return Branch(walk(left), walk(right))
            case App(Var(name), num) if name == lname and lname != bname:
                n = _read_numeral(num)
                if n is None:
                    raise _Unreadable
                return Leaf(n)
        raise _Unreadable

    try:
        return walk(body)
    except _Unreadable:
        raise RuntimeError(
            "a closed tree-typed term must spell out a tree"
        ) from None
