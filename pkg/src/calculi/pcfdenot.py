"""Flat-domain denotational side of the recursive language.

Ground types denote flat orders: bottom sits underneath every defined
value and defined values are pairwise incomparable. Function types
denote closures rather than tables (the number domain is unbounded), so
values are only ever compared at ground type. The fixed point operator
is approximated: each denote call carries a budget of unfoldings, every
unfolding spends one unit, and once the budget is gone the recursion
denotes bottom. Raising the budget can only move a ground answer up the
flat order, never sideways, so budgeted answers approach the exact
semantics from below.

Independently of the evaluator, small explicit posets carry the order
reasoning: enumeration of the monotone maps between two of them, and
least fixed points of monotone endomaps found by iterating up from the
bottom element.

Two harnesses tie the routes together: adequacy_check compares the
machine answer of a program with its denotation, and soundness_spot
checks that terms the rewriter identifies receive the same denotation
once each side is credited for the unfoldings its rewrite spent.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

from .pcf import Bool, FalseC, Fix, If, IsZero, Nat, Por, Pred, Stuck, Succ
from .pcf import TrueC, Zero, ax_rewrite_with_unfolds, eval_small, free_pvars
from .pcf import is_numeral, numeral_value, pcf_term_str, pcf_typecheck, ptype_str
from .stlc import Abs, App, Context, Pair, Proj1, Proj2, Star, TypeFailure, Var
from .untyped import FuelExhausted


# ------------------------------------------------------------ domain values

class Thunk:
    """A deferred domain value, computed at most once."""

    __slots__ = ("_compute", "_value")

    def __init__(self, compute):
        self._compute = compute
        self._value = None

    @staticmethod
    def ready(value) -> Thunk:
        t = Thunk(None)
        t._value = value
        return t

    def force(self):
        if self._value is None:
            self._value = self._compute()
            self._compute = None
        return self._value


@dataclass(frozen=True)
class Bottom:
    pass


@dataclass(frozen=True)
class BoolV:
    value: bool


@dataclass(frozen=True)
class NatV:
    value: int


@dataclass(frozen=True)
class UnitV:
    pass


class PairV:
    """A pair whose components stay unevaluated until projected."""

    __slots__ = ("left", "right")

    def __init__(self, left: Thunk, right: Thunk):
        self.left = left
        self.right = right


class FunV:
    """A function element: a closure from an argument thunk to a value."""

    __slots__ = ("run",)

    def __init__(self, run):
        self.run = run


DomValue = Bottom | BoolV | NatV | PairV | FunV | UnitV


def dom_str(v: DomValue, unicode: bool = False) -> str:
    """Render a domain value; pair components get forced for display."""
    match v:
        case Bottom():
            return "⊥" if unicode else "_|_"
        case BoolV(b):
            return "T" if b else "F"
        case NatV(n):
            return str(n)
        case UnitV():
            return "*"
        case PairV():
            left = dom_str(v.left.force(), unicode)
            right = dom_str(v.right.force(), unicode)
            return f"<{left}, {right}>"
        case FunV():
            return "<fun>"
    raise TypeError(f"not a domain value: {v!r}")


# ------------------------------------------------------------ the evaluator

class _Budget:
    __slots__ = ("left",)

    def __init__(self, left: int):
        self.left = left


def _checked_type(ctx: Context, term):
    ty = pcf_typecheck(ctx, term)
    if isinstance(ty, TypeFailure):
        raise TypeError(f"ill-typed term: {ty}")
    return ty


def _apply(fun: DomValue, arg: Thunk) -> DomValue:
    # the bottom of a function domain is the constant-bottom map
    if isinstance(fun, Bottom):
        return Bottom()
    return fun.run(arg)


def _den(t, env: dict, cell: _Budget) -> DomValue:
    match t:
        case Var(x):
            return env[x].force()
        case Abs(x, _, body):
            return FunV(lambda arg: _den(body, {**env, x: arg}, cell))
        case App(fun, arg):
            fv = _den(fun, env, cell)
            return _apply(fv, Thunk(lambda: _den(arg, env, cell)))
        case Pair(left, right):
            return PairV(Thunk(lambda: _den(left, env, cell)),
                         Thunk(lambda: _den(right, env, cell)))
        case Proj1(m):
            v = _den(m, env, cell)
            return v if isinstance(v, Bottom) else v.left.force()
        case Proj2(m):
            v = _den(m, env, cell)
            return v if isinstance(v, Bottom) else v.right.force()
        case Star():
            return UnitV()
        case TrueC():
            return BoolV(True)
        case FalseC():
            return BoolV(False)
        case Zero():
            return NatV(0)
        case Succ(m):
            v = _den(m, env, cell)
            return v if isinstance(v, Bottom) else NatV(v.value + 1)
        case Pred(m):
            v = _den(m, env, cell)
            return v if isinstance(v, Bottom) else NatV(max(v.value - 1, 0))
        case IsZero(m):
            v = _den(m, env, cell)
            return v if isinstance(v, Bottom) else BoolV(v.value == 0)
        case If(cond, thenb, elseb):
            v = _den(cond, env, cell)
            if isinstance(v, Bottom):
                return v
            return _den(thenb if v.value else elseb, env, cell)
        case Fix(m):
            if cell.left == 0:
                return Bottom()
            cell.left -= 1
            fv = _den(m, env, cell)
            return _apply(fv, Thunk(lambda: _den(t, env, cell)))
        case Por(left, right):
            # a true side answers alone; both sides must be false for F
            lv = _den(left, env, cell)
            if lv == BoolV(True):
                return lv
            rv = _den(right, env, cell)
            if rv == BoolV(True):
                return rv
            if lv == BoolV(False) and rv == BoolV(False):
                return lv
            return Bottom()
    raise TypeError(f"no denotation clause for {t!r}")


def denote(ctx: Context, term, env: dict, fuel: int) -> DomValue:
    """The value of a well-typed term over flat domains, with at most
    fuel unfoldings available to the whole call.

    env supplies a domain value for every variable the context types;
    bottom is a legitimate binding. Pair components and returned
    closures stay tied to the call's budget, so forcing them later
    spends whatever that budget has left. The evaluator recurses on
    both term structure and unfoldings; it is meant for the small
    budgets where the approximation is interesting, not for budgets in
    the thousands.
    """
    if fuel < 0:
        raise ValueError("fuel must be nonnegative")
    _checked_type(ctx, term)
    for name, _ in ctx.entries:
        if name not in env:
            raise ValueError(f"the environment lacks a value for {name}")
    bound = {name: Thunk.ready(env[name]) for name, _ in ctx.entries}
    return _den(term, bound, _Budget(fuel))


def result_value(v) -> DomValue:
    """The domain element a machine result stands for."""
    match v:
        case TrueC():
            return BoolV(True)
        case FalseC():
            return BoolV(False)
        case _ if is_numeral(v):
            return NatV(numeral_value(v))
    raise TypeError(f"not a ground result: {v!r}")


# ------------------------------------------------------------ finite posets

class FinitePoset:
    """A finite carrier with an explicit order matrix, checked for the
    order laws on construction. order[i][j] says element i is below
    element j."""

    def __init__(self, elements, order):
        self.elements = list(elements)
        n = len(self.elements)
        if len(set(self.elements)) != n:
            raise ValueError("the elements are not pairwise distinct")
        if len(order) != n or any(len(row) != n for row in order):
            raise ValueError("the order matrix does not match the elements")
        self.order = [[bool(entry) for entry in row] for row in order]
        self._index = {e: i for i, e in enumerate(self.elements)}
        for i, e in enumerate(self.elements):
            if not self.order[i][i]:
                raise ValueError(f"the order is not reflexive at {e!r}")
        for i in range(n):
            for j in range(n):
                if i != j and self.order[i][j] and self.order[j][i]:
                    raise ValueError(
                        "the order is not antisymmetric on "
                        f"{self.elements[i]!r} and {self.elements[j]!r}")
                if self.order[i][j]:
                    for k in range(n):
                        if self.order[j][k] and not self.order[i][k]:
                            raise ValueError(
                                "the order is not transitive through "
                                f"{self.elements[j]!r}")

    def leq(self, a, b) -> bool:
        return self.order[self._index[a]][self._index[b]]

    def bottom(self):
        """The least element, or None when there is none."""
        n = len(self.elements)
        for i, e in enumerate(self.elements):
            if all(self.order[i][j] for j in range(n)):
                return e
        return None


def _flat(values) -> FinitePoset:
    elements = ["bot", *values]
    n = len(elements)
    order = [[i == j or i == 0 for j in range(n)] for i in range(n)]
    return FinitePoset(elements, order)


def flat_bool() -> FinitePoset:
    """Lifted booleans: bot below T and F, which are incomparable."""
    return _flat(["T", "F"])


def flat_nat(limit: int) -> FinitePoset:
    """Lifted numbers cut off below limit: bot under 0 .. limit-1."""
    return _flat(list(range(limit)))


def monotone_maps(P: FinitePoset, Q: FinitePoset) -> list:
    """Every monotone total map from P to Q, one dict per map, ordered
    lexicographically by where the source elements land. On finite
    posets these are exactly the maps that preserve all existing
    limits, since every ascending chain is eventually constant."""
    np_, nq = len(P.elements), len(Q.elements)
    if np_ > 6 or nq > 6:
        raise ValueError(
            f"map enumeration is capped at 6 elements per side, got {np_} and {nq}")
    pairs = [(i, j) for i in range(np_) for j in range(np_) if P.order[i][j]]
    out = []
    for assign in itertools.product(range(nq), repeat=np_):
        if all(Q.order[assign[i]][assign[j]] for i, j in pairs):
            out.append({P.elements[i]: Q.elements[assign[i]]
                        for i in range(np_)})
    return out


def least_fixed_point(P: FinitePoset, table: dict):
    """The least fixed point of a monotone endomap, found by iterating
    from the bottom element; fixedness and minimality are verified
    against every fixed point before returning."""
    elems = set(P.elements)
    if set(table) != elems:
        raise ValueError("the table is not a total map on the poset")
    for target in table.values():
        if target not in elems:
            raise ValueError(f"the table maps outside the poset: {target!r}")
    for a in P.elements:
        for b in P.elements:
            if P.leq(a, b) and not P.leq(table[a], table[b]):
                raise ValueError(
                    f"the table is not monotone: {a!r} is below {b!r} "
                    "but their images are not ordered")
    x = P.bottom()
    if x is None:
        raise ValueError("the poset has no bottom element")
    for _ in range(len(P.elements)):
        nxt = table[x]
        if nxt == x:
            break
        x = nxt
    if table[x] != x:
        raise RuntimeError("iteration from bottom failed to stabilize")
    for e in P.elements:
        if table[e] == e and not P.leq(x, e):
            raise RuntimeError(f"a fixed point sits below the iterate: {e!r}")
    return x


# ---------------------------------------------------------------- harnesses

@dataclass(frozen=True)
class Agree:
    """Machine answer and denotation name the same result."""
    result: DomValue
    steps: int


@dataclass(frozen=True)
class BelowThreshold:
    """The machine converged but the denotation is still bottom at the
    budget that was tried; result records what a larger budget owes."""
    result: DomValue


@dataclass(frozen=True)
class NoClaim:
    """The machine ran out of fuel, so nothing is asserted; denotation
    records what the tried budget yields."""
    denotation: DomValue


def adequacy_check(term, fuel_op: int = 1000, fuel_den: int = 16):
    """Compare the machine answer of a program (closed, bool or nat)
    with its denotation. A convergent run whose result the denotation
    names yields Agree; a convergent run whose denotation is still
    bottom yields BelowThreshold; a run that exhausts its fuel yields
    NoClaim. A convergent run with a different defined denotation is an
    adequacy violation and raises."""
    if free_pvars(term):
        raise ValueError("the term is not closed")
    ty = _checked_type(Context(), term)
    if ty not in (Bool(), Nat()):
        raise ValueError(
            f"the type {ptype_str(ty)} is not observable; use bool or nat")
    out = eval_small(term, fuel=fuel_op)
    den = denote(Context(), term, {}, fuel_den)
    if isinstance(out, FuelExhausted):
        return NoClaim(den)
    if isinstance(out, Stuck):
        raise RuntimeError(f"evaluation got stuck at {pcf_term_str(out.term)}")
    value, steps = out
    expected = result_value(value)
    if den == expected:
        return Agree(den, steps)
    if den == Bottom():
        return BelowThreshold(expected)
    raise RuntimeError(
        f"adequacy violated: {pcf_term_str(term)} runs to "
        f"{pcf_term_str(value)} but denotes {dom_str(den)} at fuel {fuel_den}")


@dataclass(frozen=True)
class Joined:
    """Both terms rewrote to the same normal form; the unfold counts
    are what each side's rewrite spent."""
    normal_form: object
    unfolds_left: int
    unfolds_right: int


@dataclass(frozen=True)
class NotJoined:
    """The rewrites did not meet, so nothing is asserted; the fields
    hold each side's outcome."""
    left: object
    right: object


def soundness_spot(left, right, rewrite_fuel: int = 2000,
                   fuels=(0, 1, 2, 4)):
    """Rewrite two closed ground-typed terms; if they reach one normal
    form, their denotations must agree at every listed budget once each
    side is credited for the unfoldings its own rewrite spent (an
    unfolding shifts the approximation index by one). Disagreement
    after a join raises; failing to join asserts nothing."""
    for t in (left, right):
        if free_pvars(t):
            raise ValueError("both terms must be closed")
    lty = _checked_type(Context(), left)
    rty = _checked_type(Context(), right)
    if lty != rty:
        raise ValueError(
            f"type mismatch: {ptype_str(lty)} vs {ptype_str(rty)}")
    if lty not in (Bool(), Nat()):
        raise ValueError(
            f"the type {ptype_str(lty)} is not ground; use bool or nat")
    lnf, lu = ax_rewrite_with_unfolds(left, fuel=rewrite_fuel)
    rnf, ru = ax_rewrite_with_unfolds(right, fuel=rewrite_fuel)
    if isinstance(lnf, FuelExhausted) or isinstance(rnf, FuelExhausted) \
            or lnf != rnf:
        return NotJoined(lnf, rnf)
    for f in fuels:
        dl = denote(Context(), left, {}, f + lu)
        dr = denote(Context(), right, {}, f + ru)
        if dl != dr:
            raise RuntimeError(
                f"soundness violated at fuel {f}: "
                f"{dom_str(dl)} vs {dom_str(dr)}")
    return Joined(lnf, lu, ru)
