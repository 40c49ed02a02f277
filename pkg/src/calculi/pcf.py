"""A small typed language with booleans, numbers, pairs, and general
recursion, evaluated under a fixed deterministic strategy.

The term grammar extends the typed core (minus sums) with boolean and
numeric constants, their primitive operations, a conditional, a fixed
point operator, and (for the parallel dialect) a parallel-or primitive.
Three semantics live here side by side: a deterministic small-step
relation, a big-step evaluator, and an axiomatic rewriter that also
equates terms under binders. The small-step and big-step routes are
kept independent so they can be checked against each other.
"""
from __future__ import annotations

from dataclasses import dataclass

from .stlc import Abs, App, Arrow, Context, Pair, Product, Proj1, Proj2
from .stlc import Star, TypeFailure, Unit, Var
from .untyped import FuelExhausted, fresh_name


# ------------------------------------------------------------------ types

@dataclass(frozen=True)
class Bool:
    pass


@dataclass(frozen=True)
class Nat:
    pass


PCFType = object  # Bool | Nat | Arrow | Product | Unit


def ptype_str(a: PCFType, unicode: bool = False) -> str:
    """Render a type: x binds tighter than ->, -> associates right."""
    arrow = " → " if unicode else " -> "
    times = " × " if unicode else " * "

    def go(t, prec):
        match t:
            case Bool():
                return "bool"
            case Nat():
                return "nat"
            case Unit():
                return "1"
            case Arrow(dom, cod):
                s = go(dom, 1) + arrow + go(cod, 0)
                return f"({s})" if prec > 0 else s
            case Product(left, right):
                s = go(left, 2) + times + go(right, 2)
                return f"({s})" if prec > 1 else s
        raise TypeError(f"not a PCF type: {t!r}")

    return go(a, 0)


# ------------------------------------------------------------------ terms

@dataclass(frozen=True)
class TrueC:
    pass


@dataclass(frozen=True)
class FalseC:
    pass


@dataclass(frozen=True)
class Zero:
    pass


@dataclass(frozen=True)
class Succ:
    arg: object


@dataclass(frozen=True)
class Pred:
    arg: object


@dataclass(frozen=True)
class IsZero:
    arg: object


@dataclass(frozen=True)
class If:
    cond: object
    then_branch: object
    else_branch: object


@dataclass(frozen=True)
class Fix:
    fun: object


@dataclass(frozen=True)
class Por:
    left: object
    right: object


PCFTerm = object


def numeral_term(n: int) -> PCFTerm:
    """The numeral for n: zero under n successors."""
    if n < 0:
        raise ValueError("numerals denote naturals; negative input")
    t: PCFTerm = Zero()
    for _ in range(n):
        t = Succ(t)
    return t


def is_numeral(t: PCFTerm) -> bool:
    while isinstance(t, Succ):
        t = t.arg
    return isinstance(t, Zero)


def numeral_value(t: PCFTerm) -> int:
    """Read n back off the numeral for n."""
    n = 0
    while isinstance(t, Succ):
        n += 1
        t = t.arg
    if not isinstance(t, Zero):
        raise ValueError(f"not a numeral: {pcf_term_str(t)}")
    return n


def pcf_term_str(t: PCFTerm, unicode: bool = False) -> str:
    lam = "λ" if unicode else "\\"
    star = "∗" if unicode else "*"

    def atom(u):
        s = go(u)
        if isinstance(u, (Var, Star, Pair, Proj1, Proj2, TrueC, FalseC,
                          Zero, Succ, Pred, IsZero, Fix)):
            return s
        return f"({s})"

    def go(u):
        match u:
            case Var(name):
                return name
            case App(fun, arg):
                fs = go(fun) if isinstance(fun, (Var, App, Proj1, Proj2)) else f"({go(fun)})"
                return f"{fs} {atom(arg)}"
            case Abs(binder, annot, body):
                ann = "" if annot is None else f":{ptype_str(annot, unicode)}"
                return f"{lam}{binder}{ann}. {go(body)}"
            case Pair(left, right):
                return f"<{go(left)}, {go(right)}>"
            case Proj1(target):
                return f"pi1 {atom(target)}"
            case Proj2(target):
                return f"pi2 {atom(target)}"
            case Star():
                return star
            case TrueC():
                return "T"
            case FalseC():
                return "F"
            case Zero():
                return "zero"
            case Succ(arg):
                return f"succ({go(arg)})"
            case Pred(arg):
                return f"pred({go(arg)})"
            case IsZero(arg):
                return f"iszero({go(arg)})"
            case If(cond, thenb, elseb):
                return f"if {go(cond)} then {go(thenb)} else {go(elseb)}"
            case Fix(fun):
                return f"Y({go(fun)})"
            case Por(left, right):
                return f"por {atom(left)} {atom(right)}"
        raise TypeError(f"not a PCF term: {u!r}")

    return go(t)


def free_pvars(t: PCFTerm) -> frozenset:
    match t:
        case Var(name):
            return frozenset((name,))
        case App(f, a) | Pair(f, a) | Por(f, a):
            return free_pvars(f) | free_pvars(a)
        case Abs(binder, _, body):
            return free_pvars(body) - {binder}
        case Proj1(u) | Proj2(u) | Succ(u) | Pred(u) | IsZero(u) | Fix(u):
            return free_pvars(u)
        case Star() | TrueC() | FalseC() | Zero():
            return frozenset()
        case If(c, n, p):
            return free_pvars(c) | free_pvars(n) | free_pvars(p)
    raise TypeError(f"not a PCF term: {t!r}")


def _all_pvars(t: PCFTerm) -> frozenset:
    match t:
        case Var(name):
            return frozenset((name,))
        case App(f, a) | Pair(f, a) | Por(f, a):
            return _all_pvars(f) | _all_pvars(a)
        case Abs(binder, _, body):
            return _all_pvars(body) | {binder}
        case Proj1(u) | Proj2(u) | Succ(u) | Pred(u) | IsZero(u) | Fix(u):
            return _all_pvars(u)
        case Star() | TrueC() | FalseC() | Zero():
            return frozenset()
        case If(c, n, p):
            return _all_pvars(c) | _all_pvars(n) | _all_pvars(p)
    raise TypeError(f"not a PCF term: {t!r}")


def psubst(t: PCFTerm, n: PCFTerm, x: str) -> PCFTerm:
    """Capture-avoiding substitution of n for x in t."""
    match t:
        case Var(name):
            return n if name == x else t
        case App(f, a):
            return App(psubst(f, n, x), psubst(a, n, x))
        case Pair(f, a):
            return Pair(psubst(f, n, x), psubst(a, n, x))
        case Por(f, a):
            return Por(psubst(f, n, x), psubst(a, n, x))
        case Abs(binder, annot, body):
            if binder == x:
                return t
            if binder in free_pvars(n) and x in free_pvars(body):
                renamed = fresh_name(binder, _all_pvars(body) | _all_pvars(n) | {x})
                body = psubst(body, Var(renamed), binder)
                binder = renamed
            return Abs(binder, annot, psubst(body, n, x))
        case Proj1(u):
            return Proj1(psubst(u, n, x))
        case Proj2(u):
            return Proj2(psubst(u, n, x))
        case Succ(u):
            return Succ(psubst(u, n, x))
        case Pred(u):
            return Pred(psubst(u, n, x))
        case IsZero(u):
            return IsZero(psubst(u, n, x))
        case Fix(u):
            return Fix(psubst(u, n, x))
        case Star() | TrueC() | FalseC() | Zero():
            return t
        case If(c, b1, b2):
            return If(psubst(c, n, x), psubst(b1, n, x), psubst(b2, n, x))
    raise TypeError(f"not a PCF term: {t!r}")


# ----------------------------------------------------------------- typing

def pcf_typecheck(ctx: Context, t: PCFTerm, path: tuple = ()):
    """The unique type of t under ctx, or a TypeFailure locating the bad
    subterm and the typing rule it violates."""
    match t:
        case Var(name):
            a = ctx.lookup(name)
            if a is None:
                return TypeFailure(f"unbound variable {name}", path, "var")
            return a
        case App(fun, arg):
            fa = pcf_typecheck(ctx, fun, path + (0,))
            if isinstance(fa, TypeFailure):
                return fa
            if not isinstance(fa, Arrow):
                return TypeFailure(
                    f"applied a non-function of type {ptype_str(fa)}", path, "app"
                )
            aa = pcf_typecheck(ctx, arg, path + (1,))
            if isinstance(aa, TypeFailure):
                return aa
            if aa != fa.dom:
                return TypeFailure(
                    f"argument has type {ptype_str(aa)}, expected {ptype_str(fa.dom)}",
                    path,
                    "app",
                )
            return fa.cod
        case Abs(binder, annot, body):
            if annot is None:
                return TypeFailure(
                    f"binder {binder} lacks a type annotation", path, "abs"
                )
            ba = pcf_typecheck(ctx.extend(binder, annot), body, path + (0,))
            if isinstance(ba, TypeFailure):
                return ba
            return Arrow(annot, ba)
        case Pair(left, right):
            la = pcf_typecheck(ctx, left, path + (0,))
            if isinstance(la, TypeFailure):
                return la
            ra = pcf_typecheck(ctx, right, path + (1,))
            if isinstance(ra, TypeFailure):
                return ra
            return Product(la, ra)
        case Proj1(target):
            ta = pcf_typecheck(ctx, target, path + (0,))
            if isinstance(ta, TypeFailure):
                return ta
            if not isinstance(ta, Product):
                return TypeFailure(
                    f"projection from a non-pair of type {ptype_str(ta)}", path, "proj1"
                )
            return ta.left
        case Proj2(target):
            ta = pcf_typecheck(ctx, target, path + (0,))
            if isinstance(ta, TypeFailure):
                return ta
            if not isinstance(ta, Product):
                return TypeFailure(
                    f"projection from a non-pair of type {ptype_str(ta)}", path, "proj2"
                )
            return ta.right
        case Star():
            return Unit()
        case TrueC() | FalseC():
            return Bool()
        case Zero():
            return Nat()
        case Succ(arg) | Pred(arg) | IsZero(arg):
            rule = {Succ: "succ", Pred: "pred", IsZero: "iszero"}[type(t)]
            aa = pcf_typecheck(ctx, arg, path + (0,))
            if isinstance(aa, TypeFailure):
                return aa
            if aa != Nat():
                return TypeFailure(
                    f"argument has type {ptype_str(aa)}, expected nat", path, rule
                )
            return Bool() if isinstance(t, IsZero) else Nat()
        case If(cond, thenb, elseb):
            ca = pcf_typecheck(ctx, cond, path + (0,))
            if isinstance(ca, TypeFailure):
                return ca
            if ca != Bool():
                return TypeFailure(
                    f"condition has type {ptype_str(ca)}, expected bool", path, "if"
                )
            na = pcf_typecheck(ctx, thenb, path + (1,))
            if isinstance(na, TypeFailure):
                return na
            pa = pcf_typecheck(ctx, elseb, path + (2,))
            if isinstance(pa, TypeFailure):
                return pa
            if na != pa:
                return TypeFailure(
                    f"branches disagree: {ptype_str(na)} vs {ptype_str(pa)}",
                    path,
                    "if",
                )
            return na
        case Fix(fun):
            fa = pcf_typecheck(ctx, fun, path + (0,))
            if isinstance(fa, TypeFailure):
                return fa
            if not isinstance(fa, Arrow) or fa.dom != fa.cod:
                return TypeFailure(
                    f"recursion needs a function from a type to itself, got {ptype_str(fa)}",
                    path,
                    "fix",
                )
            return fa.dom
        case Por(left, right):
            la = pcf_typecheck(ctx, left, path + (0,))
            if isinstance(la, TypeFailure):
                return la
            if la != Bool():
                return TypeFailure(
                    f"por operand has type {ptype_str(la)}, expected bool", path, "por"
                )
            ra = pcf_typecheck(ctx, right, path + (1,))
            if isinstance(ra, TypeFailure):
                return ra
            if ra != Bool():
                return TypeFailure(
                    f"por operand has type {ptype_str(ra)}, expected bool", path, "por"
                )
            return Bool()
    raise TypeError(f"not a PCF term: {t!r}")


# ------------------------------------------------------------- evaluation

def is_value(t: PCFTerm) -> bool:
    """The result grammar: constants, successor chains of values, the
    point, pairs (with arbitrary components), and abstractions."""
    match t:
        case TrueC() | FalseC() | Zero() | Star() | Pair(_, _) | Abs(_, _, _):
            return True
        case Succ(arg):
            return is_value(arg)
    return False


@dataclass(frozen=True)
class Stuck:
    """A non-value with no applicable rule: the run-time error verdict."""
    term: object


@dataclass(frozen=True)
class IsValue:
    pass


@dataclass(frozen=True)
class NoRule:
    """Big-step verdict: a premise demanded a value shape that did not
    come out (for instance applying a non-abstraction)."""
    term: object


def _step(t: PCFTerm, por: bool):
    """The unique reduct of t, or None when no rule fires. Values are
    never stepped into; axioms come before congruences so the selection
    is single-valued by construction."""
    match t:
        case App(Abs(x, _, body), arg):
            return psubst(body, arg, x)
        case App(fun, arg):
            r = _step(fun, por)
            return None if r is None else App(r, arg)
        case Succ(m):
            r = _step(m, por)
            return None if r is None else Succ(r)
        case Pred(Zero()):
            return Zero()
        case Pred(Succ(v)) if is_value(v):
            return v
        case Pred(m):
            r = _step(m, por)
            return None if r is None else Pred(r)
        case IsZero(Zero()):
            return TrueC()
        case IsZero(Succ(v)) if is_value(v):
            return FalseC()
        case IsZero(m):
            r = _step(m, por)
            return None if r is None else IsZero(r)
        case Proj1(Pair(m, _)):
            return m
        case Proj2(Pair(_, n)):
            return n
        case Proj1(m):
            r = _step(m, por)
            return None if r is None else Proj1(r)
        case Proj2(m):
            r = _step(m, por)
            return None if r is None else Proj2(r)
        case If(TrueC(), n, _):
            return n
        case If(FalseC(), _, p):
            return p
        case If(m, n, p):
            r = _step(m, por)
            return None if r is None else If(r, n, p)
        case Fix(m):
            return App(m, Fix(m))
        case Por(left, right) if por:
            match left, right:
                case (TrueC(), _) | (_, TrueC()):
                    return TrueC()
                case (FalseC(), FalseC()):
                    return FalseC()
            ls = _step(left, por)
            rs = _step(right, por)
            if ls is None and rs is None:
                return None
            # both sides advance in lockstep; a lone mover goes alone
            return Por(left if ls is None else ls, right if rs is None else rs)
    return None


def small_step(t: PCFTerm, por: bool = False):
    """The next term under the deterministic strategy, IsValue for
    values, Stuck for run-time errors. The unit-typed escape (a closed
    non-point term of the unit type steps to the point) ranks below
    every structural rule and is checked lazily."""
    if is_value(t):
        return IsValue()
    r = _step(t, por)
    if r is not None:
        return r
    if pcf_typecheck(Context(), t) == Unit() and t != Star():
        return Star()
    return Stuck(t)


def eval_small(t: PCFTerm, fuel: int = 1000, por: bool = False):
    """Iterate small_step; (value, steps) on success, Stuck or
    FuelExhausted otherwise."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    for steps in range(fuel):
        if is_value(t):
            return t, steps
        r = small_step(t, por=por)
        if isinstance(r, Stuck):
            return r
        t = r
    if is_value(t):
        return t, fuel
    return FuelExhausted(t, fuel)


def por_eval(t: PCFTerm, fuel: int = 1000):
    """eval_small with the parallel-or rules switched on."""
    return eval_small(t, fuel, por=True)


def eval_big(t: PCFTerm, fuel: int = 1000):
    """Evaluate by the big-step rules, with an explicit continuation
    stack so deep derivations cannot overflow. Fuel bounds the number of
    rule applications. Returns the value, FuelExhausted, or NoRule."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    budget = fuel
    stack = []
    mode, item = "eval", t
    while True:
        if mode == "eval":
            if budget <= 0:
                return FuelExhausted(item, fuel)
            budget -= 1
            m = item
            match m:
                case TrueC() | FalseC() | Zero() | Pair(_, _) | Abs(_, _, _):
                    mode, item = "return", m
                case Star():
                    # the sole closed value of the unit type evaluates to
                    # itself by the type-directed rule
                    mode, item = "return", m
                case Succ(inner):
                    stack.append(("succ",))
                    item = inner
                case Pred(inner):
                    stack.append(("pred", m))
                    item = inner
                case IsZero(inner):
                    stack.append(("iszero", m))
                    item = inner
                case App(fun, arg):
                    stack.append(("app", arg, m))
                    item = fun
                case Proj1(inner):
                    stack.append(("proj1", m))
                    item = inner
                case Proj2(inner):
                    stack.append(("proj2", m))
                    item = inner
                case If(cond, thenb, elseb):
                    stack.append(("if", thenb, elseb, m))
                    item = cond
                case Fix(fun):
                    item = App(fun, Fix(fun))
                case _:
                    return NoRule(m)
        else:
            if not stack:
                return item
            v = item
            frame = stack.pop()
            match frame:
                case ("succ",):
                    item = Succ(v)
                case ("pred", m):
                    if v == Zero():
                        item = Zero()
                    elif isinstance(v, Succ):
                        item = v.arg
                    else:
                        return NoRule(m)
                case ("iszero", m):
                    if v == Zero():
                        item = TrueC()
                    elif isinstance(v, Succ):
                        item = FalseC()
                    else:
                        return NoRule(m)
                case ("app", arg, m):
                    if not isinstance(v, Abs):
                        return NoRule(m)
                    mode, item = "eval", psubst(v.body, arg, v.binder)
                case ("proj1", m):
                    if not isinstance(v, Pair):
                        return NoRule(m)
                    mode, item = "eval", v.left
                case ("proj2", m):
                    if not isinstance(v, Pair):
                        return NoRule(m)
                    mode, item = "eval", v.right
                case ("if", thenb, elseb, m):
                    if v == TrueC():
                        mode, item = "eval", thenb
                    elif v == FalseC():
                        mode, item = "eval", elseb
                    else:
                        return NoRule(m)


# ------------------------------------------------------------- rewriting

def _ax_step(t: PCFTerm, y_cell: list):
    """One leftmost-outermost rewrite by the oriented equations plus
    beta; None at a normal form. Y-unfolding draws from its own budget
    so the rewriter stays a semi-decision tool."""
    match t:
        case App(Abs(x, _, body), arg):
            return psubst(body, arg, x)
        case Proj1(Pair(m, _)):
            return m
        case Proj2(Pair(_, n)):
            return n
        case Pred(Zero()):
            return Zero()
        case Pred(Succ(k)) if is_numeral(k):
            return k
        case IsZero(Zero()):
            return TrueC()
        case IsZero(Succ(k)) if is_numeral(k):
            return FalseC()
        case If(TrueC(), n, _):
            return n
        case If(FalseC(), _, p):
            return p
        case Fix(m) if y_cell[0] > 0:
            y_cell[0] -= 1
            return App(m, Fix(m))

    def first(*pairs):
        for build, sub in pairs:
            r = _ax_step(sub, y_cell)
            if r is not None:
                return build(r)
        return None

    match t:
        case App(fun, arg):
            return first((lambda r: App(r, arg), fun), (lambda r: App(fun, r), arg))
        case Abs(binder, annot, body):
            return first((lambda r: Abs(binder, annot, r), body))
        case Pair(left, right):
            return first((lambda r: Pair(r, right), left), (lambda r: Pair(left, r), right))
        case Proj1(m):
            return first((Proj1, m))
        case Proj2(m):
            return first((Proj2, m))
        case Succ(m):
            return first((Succ, m))
        case Pred(m):
            return first((Pred, m))
        case IsZero(m):
            return first((IsZero, m))
        case If(c, n, p):
            return first((lambda r: If(r, n, p), c),
                         (lambda r: If(c, r, p), n),
                         (lambda r: If(c, n, r), p))
        case Fix(m):
            return first((Fix, m))
        case Por(left, right):
            return first((lambda r: Por(r, right), left), (lambda r: Por(left, r), right))
    return None


def ax_rewrite_with_unfolds(t: PCFTerm, fuel: int = 1000, y_limit: int = 32):
    """Like ax_rewrite, but paired with the number of Y-unfoldings the
    run actually spent, whether or not it reached a normal form."""
    if fuel < 1:
        raise ValueError("fuel must be positive")
    y_cell = [y_limit]
    for _ in range(fuel):
        r = _ax_step(t, y_cell)
        if r is None:
            return t, y_limit - y_cell[0]
        t = r
    return FuelExhausted(t, fuel), y_limit - y_cell[0]


def ax_rewrite(t: PCFTerm, fuel: int = 1000, y_limit: int = 32):
    """Normalize by the oriented equational axioms (beta included, eta
    not), rewriting under binders, unfolding Y at most y_limit times."""
    result, _ = ax_rewrite_with_unfolds(t, fuel, y_limit)
    return result


# ------------------------------------------------------------ parallel or

def por_test_term() -> PCFTerm:
    """The tester that converges (to T) exactly on implementations of
    parallel or: it demands T from x T Omega and x Omega T, then F from
    x F F, diverging on every failure."""
    omega = Fix(Abs("z", Bool(), Var("z")))
    x = Var("x")
    body = If(
        App(App(x, TrueC()), omega),
        If(
            App(App(x, omega), TrueC()),
            If(App(App(x, FalseC()), FalseC()), omega, TrueC()),
            omega,
        ),
        omega,
    )
    return Abs("x", Arrow(Bool(), Arrow(Bool(), Bool())), body)
