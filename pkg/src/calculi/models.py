"""Finite set-theoretic models of the simply typed calculus.

Types become finite sets (base types get a chosen size, arrows become
exhaustive function tables, products become pairs, unit a single point)
and typing judgments become total tables from environment tuples to
values.  Everything is enumerated in a fixed deterministic order, so
extensional equality of denotations is plain structural equality.

Sums and the empty type are outside this semantics and are rejected.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .stlc import (
    Abs,
    App,
    Arrow,
    Base,
    Context,
    Pair,
    Product,
    Proj1,
    Proj2,
    Star,
    TypeFailure,
    Unit,
    Var,
    alpha_eq_typed,
    normalize_typed,
    type_str,
    typecheck,
)
from .untyped import FuelExhausted

DEFAULT_BOUND = 10 ** 6


class ModelTooLarge(Exception):
    """The requested interpretation would enumerate more elements than the
    configured bound allows."""


# ---------------------------------------------------------------- values

@dataclass(frozen=True)
class Atom:
    """Element number `index` of a base set of size `size`."""

    index: int
    size: int


@dataclass(frozen=True)
class Tuple:
    left: object
    right: object


@dataclass(frozen=True)
class Table:
    """A total function as ordered (argument, result) pairs; the order is
    the canonical enumeration of the domain, so equal functions are equal
    tuples."""

    entries: tuple

    def apply(self, v):
        for a, b in self.entries:
            if a == v:
                return b
        raise KeyError(f"value outside the table's domain: {v!r}")


@dataclass(frozen=True)
class UnitPoint:
    pass


def value_str(v) -> str:
    match v:
        case Atom(index, _):
            return str(index)
        case UnitPoint():
            return "*"
        case Tuple(left, right):
            return f"({value_str(left)}, {value_str(right)})"
        case Table(entries):
            inner = ", ".join(
                f"{value_str(a)}=>{value_str(b)}" for a, b in entries
            )
            return "{" + inner + "}"
    raise TypeError(f"not a semantic value: {v!r}")


# ------------------------------------------------------------------ sizes

def _size_of(base, name: str) -> int:
    if isinstance(base, int):
        k = base
    else:
        try:
            k = base[name]
        except KeyError:
            raise ValueError(f"no size assigned to base type {name}") from None
    if k < 1:
        raise ValueError(f"base type {name} needs a non-empty set, got {k}")
    return k


def interp_size(a, base, bound: int | None = DEFAULT_BOUND) -> int:
    """How many elements the interpretation of a has; raises ModelTooLarge
    beyond the bound (computed without materializing huge powers)."""

    def go(t) -> int:
        match t:
            case Base(name):
                return check(_size_of(base, name))
            case Unit():
                return 1
            case Product(left, right):
                return check(go(left) * go(right))
            case Arrow(dom, cod):
                n, m = go(dom), go(cod)
                if bound is not None and m > 1:
                    if n * math.log(m) > math.log(bound) + 1e-9:
                        raise ModelTooLarge(
                            f"|{type_str(t)}| = {m}^{n} exceeds {bound}"
                        )
                return check(m ** n)
        raise ValueError(f"no finite interpretation for {type_str(t)}")

    def check(n: int) -> int:
        if bound is not None and n > bound:
            raise ModelTooLarge(f"{n} elements exceed the bound {bound}")
        return n

    return go(a)


def interp_type(a, base, bound: int | None = DEFAULT_BOUND) -> list:
    """The complete element list of the interpretation of a, in canonical
    order: atoms by index, pairs left-major, tables by codomain choices with
    the rightmost argument varying fastest."""
    interp_size(a, base, bound)
    match a:
        case Base(name):
            k = _size_of(base, name)
            return [Atom(i, k) for i in range(k)]
        case Unit():
            return [UnitPoint()]
        case Product(left, right):
            return [
                Tuple(x, y)
                for x in interp_type(left, base, bound)
                for y in interp_type(right, base, bound)
            ]
        case Arrow(dom, cod):
            ins = interp_type(dom, base, bound)
            outs = interp_type(cod, base, bound)
            return [
                Table(tuple(zip(ins, picks)))
                for picks in itertools.product(outs, repeat=len(ins))
            ]
    raise ValueError(f"no finite interpretation for {type_str(a)}")


# ----------------------------------------------------------- judgments

@dataclass(frozen=True)
class JudgmentTable:
    """The denotation of a typing judgment: for every tuple of environment
    values (one per context entry, in context order) the resulting value."""

    names: tuple
    entries: tuple

    def apply(self, env: tuple):
        for e, out in self.entries:
            if e == env:
                return out
        raise KeyError(f"environment outside the judgment's domain: {env!r}")


def _eval(t, scope: tuple, base, bound):
    match t:
        case Var(name):
            for n, v in reversed(scope):
                if n == name:
                    return v
            raise ValueError(f"unbound variable {name}")
        case App(fun, arg):
            return _eval(fun, scope, base, bound).apply(_eval(arg, scope, base, bound))
        case Abs(binder, annot, body):
            return Table(
                tuple(
                    (v, _eval(body, scope + ((binder, v),), base, bound))
                    for v in interp_type(annot, base, bound)
                )
            )
        case Pair(left, right):
            return Tuple(_eval(left, scope, base, bound), _eval(right, scope, base, bound))
        case Proj1(target):
            return _eval(target, scope, base, bound).left
        case Proj2(target):
            return _eval(target, scope, base, bound).right
        case Star():
            return UnitPoint()
    raise ValueError(f"term outside the interpreted fragment: {t!r}")


def interp_term(ctx: Context, t, a, base, bound: int | None = DEFAULT_BOUND) -> JudgmentTable:
    """The exhaustive table of the judgment ctx |- t : a over every tuple of
    environment values.  The term must typecheck at exactly that type."""
    got = typecheck(ctx, t)
    if isinstance(got, TypeFailure):
        raise ValueError(f"term does not typecheck: {got}")
    if got != a:
        raise ValueError(
            f"judgment type mismatch: checked {type_str(got)}, asked {type_str(a)}"
        )
    domains = [interp_type(b, base, bound) for _, b in ctx.entries]
    total = math.prod(len(d) for d in domains)
    if bound is not None and total > bound:
        raise ModelTooLarge(f"{total} environments exceed the bound {bound}")
    names = tuple(n for n, _ in ctx.entries)
    entries = []
    for env in itertools.product(*domains):
        scope = tuple(zip(names, env))
        entries.append((env, _eval(t, scope, base, bound)))
    return JudgmentTable(names, tuple(entries))


# ----------------------------------------------------------- soundness

def check_soundness(m, n, ctx: Context, a, base, fuel: int = 2000,
                    bound: int | None = DEFAULT_BOUND):
    """Compare the denotations of m and n entrywise and return the verdict.

    Both terms are also jointly normalized (beta-eta) within fuel: if they
    reach the same normal form, equal denotations are mandatory, so a
    mismatch in that situation raises instead of returning.  If either
    normalization runs out of fuel the FuelExhausted value is returned.
    """
    nm = normalize_typed(m, mode="beta-eta", fuel=fuel, ctx=ctx)
    if isinstance(nm, FuelExhausted):
        return nm
    nn = normalize_typed(n, mode="beta-eta", fuel=fuel, ctx=ctx)
    if isinstance(nn, FuelExhausted):
        return nn
    same = interp_term(ctx, m, a, base, bound) == interp_term(ctx, n, a, base, bound)
    if alpha_eq_typed(nm, nn) and not same:
        raise RuntimeError(
            "terms share a normal form but their denotations differ"
        )
    return same


# ---------------------------------------------------------- separation

@dataclass(frozen=True)
class NotSeparated:
    """No base assignment up to the tried size told the two terms apart.
    This is not evidence of equality: the separating size may just be
    larger."""

    max_base: int


def _type_base_names(a, out: set) -> None:
    match a:
        case Base(name):
            out.add(name)
        case Arrow(left, right) | Product(left, right):
            _type_base_names(left, out)
            _type_base_names(right, out)
        case _:
            pass


def _term_base_names(t, out: set) -> None:
    match t:
        case App(fun, arg) | Pair(fun, arg):
            _term_base_names(fun, out)
            _term_base_names(arg, out)
        case Abs(_, annot, body):
            if annot is not None:
                _type_base_names(annot, out)
            _term_base_names(body, out)
        case Proj1(target) | Proj2(target):
            _term_base_names(target, out)
        case _:
            pass


def separate(m, n, ctx: Context, a, max_base: int,
             bound: int | None = DEFAULT_BOUND):
    """Search uniform base sizes 1..max_base for an assignment whose model
    tells m and n apart; the found assignment, or NotSeparated."""
    names: set[str] = set()
    _type_base_names(a, names)
    for _, b in ctx.entries:
        _type_base_names(b, names)
    _term_base_names(m, names)
    _term_base_names(n, names)
    sizes = range(1, max_base + 1) if names else [1]
    for k in sizes:
        assignment = {name: k for name in names}
        if interp_term(ctx, m, a, assignment, bound) != interp_term(
            ctx, n, a, assignment, bound
        ):
            return assignment
    return NotSeparated(max_base)


# ------------------------------------------------------------- export

def table_json(ctx: Context, t, a, base, bound: int | None = DEFAULT_BOUND) -> dict:
    """The judgment's table as index pairs: entry [i, j] says environment
    number i (in enumeration order) maps to element number j of the result
    type's enumeration."""
    jt = interp_term(ctx, t, a, base, bound)
    codomain = interp_type(a, base, bound)
    entries = [[i, codomain.index(out)] for i, (_, out) in enumerate(jt.entries)]
    return {
        "context": list(jt.names),
        "inputs": len(jt.entries),
        "outputs": len(codomain),
        "entries": entries,
    }
