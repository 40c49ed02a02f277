"""Simply typed lambda calculus with products, unit, sums, and the empty
type: type checking, derivation trees with natural-deduction labels, and
typed beta/eta reduction.

Reduction rules implemented: beta for application, both projections, and
both case branches; eta for functions and pairs behind include_eta; the
unit eta rule (anything of type 1 collapses to the star) behind its own
flag because it destroys confluence.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

from .untyped import FuelExhausted, fresh_name


# ---------------------------------------------------------------- types

@dataclass(frozen=True)
class Base:
    name: str


@dataclass(frozen=True)
class Arrow:
    dom: object
    cod: object


@dataclass(frozen=True)
class Product:
    left: object
    right: object


@dataclass(frozen=True)
class Unit:
    pass


@dataclass(frozen=True)
class Sum:
    left: object
    right: object


@dataclass(frozen=True)
class Void:
    pass


SimpleType = object


def type_str(a: SimpleType, unicode: bool = False) -> str:
    """Render a type: x and + bind tighter than ->, -> associates right."""
    arrow = " → " if unicode else " -> "
    times = " × " if unicode else " * "
    plus = " + "

    def go(t, prec):
        match t:
            case Base(name):
                return name
            case Unit():
                return "1"
            case Void():
                return "0"
            case Arrow(dom, cod):
                s = go(dom, 1) + arrow + go(cod, 0)
                return f"({s})" if prec > 0 else s
            case Product(left, right):
                s = go(left, 2) + times + go(right, 2)
                return f"({s})" if prec > 1 else s
            case Sum(left, right):
                s = go(left, 2) + plus + go(right, 2)
                return f"({s})" if prec > 1 else s
        raise TypeError(f"not a simple type: {t!r}")

    return go(a, 0)


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
    annot: object  # SimpleType, or None before inference fills it in
    body: object


@dataclass(frozen=True)
class Pair:
    left: object
    right: object


@dataclass(frozen=True)
class Proj1:
    target: object


@dataclass(frozen=True)
class Proj2:
    target: object


@dataclass(frozen=True)
class Star:
    pass


@dataclass(frozen=True)
class In1:
    value: object
    full: object = None  # the whole sum type A + B


@dataclass(frozen=True)
class In2:
    value: object
    full: object = None


@dataclass(frozen=True)
class Case:
    scrut: object
    lvar: str
    lannot: object
    lbranch: object
    rvar: str
    rannot: object
    rbranch: object


@dataclass(frozen=True)
class Abort:
    target: object  # the type the aborted computation pretends to have
    value: object


TypedTerm = object


def term_str(t: TypedTerm, unicode: bool = False) -> str:
    lam = "λ" if unicode else "\\"
    star = "∗" if unicode else "*"

    def atom(u):
        s = go(u)
        if isinstance(u, (Var, Star, Pair, Proj1, Proj2, In1, In2, Abort)):
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
                ann = "" if annot is None else f":{type_str(annot, unicode)}"
                return f"{lam}{binder}{ann}. {go(body)}"
            case Pair(left, right):
                return f"<{go(left)}, {go(right)}>"
            case Proj1(target):
                return f"pi1 {atom(target)}"
            case Proj2(target):
                return f"pi2 {atom(target)}"
            case Star():
                return star
            case In1(value, full):
                ann = "" if full is None else f"[{type_str(full, unicode)}]"
                return f"in1{ann} {atom(value)}"
            case In2(value, full):
                ann = "" if full is None else f"[{type_str(full, unicode)}]"
                return f"in2{ann} {atom(value)}"
            case Case(scrut, lv, _, lb, rv, _, rb):
                arrow = "⇒" if unicode else "=>"
                return (
                    f"case {go(scrut)} of {lv} {arrow} {go(lb)} | {rv} {arrow} {go(rb)}"
                )
            case Abort(target, value):
                return f"abort[{type_str(target, unicode)}] {atom(value)}"
        raise TypeError(f"not a typed term: {u!r}")

    return go(t)


# ---------------------------------------------------------------- contexts

@dataclass(frozen=True)
class Context:
    entries: tuple = ()

    @staticmethod
    def of(*pairs) -> "Context":
        names = [n for n, _ in pairs]
        if len(names) != len(set(names)):
            raise ValueError("a context binds each variable at most once")
        return Context(tuple(pairs))

    def lookup(self, name: str):
        for n, a in self.entries:
            if n == name:
                return a
        return None

    def extend(self, name: str, a) -> "Context":
        kept = tuple((n, b) for n, b in self.entries if n != name)
        return Context(kept + ((name, a),))

    def __str__(self) -> str:
        return ", ".join(f"{n}:{type_str(a)}" for n, a in self.entries)


@dataclass(frozen=True)
class TypeFailure:
    message: str
    path: tuple
    rule: str

    def __str__(self) -> str:
        where = "".join(f".{i}" for i in self.path) or " at the root"
        return f"{self.message} (rule {self.rule}, position{where})"


# ---------------------------------------------------------------- checking

def typecheck(ctx: Context, t: TypedTerm, path: tuple = ()):
    """The unique type of t under ctx, or a TypeFailure locating the bad
    subterm and the typing rule it violates."""
    match t:
        case Var(name):
            a = ctx.lookup(name)
            if a is None:
                return TypeFailure(f"unbound variable {name}", path, "var")
            return a
        case App(fun, arg):
            fa = typecheck(ctx, fun, path + (0,))
            if isinstance(fa, TypeFailure):
                return fa
            if not isinstance(fa, Arrow):
                return TypeFailure(
                    f"applied a non-function of type {type_str(fa)}", path, "app"
                )
            aa = typecheck(ctx, arg, path + (1,))
            if isinstance(aa, TypeFailure):
                return aa
            if aa != fa.dom:
                return TypeFailure(
                    f"argument has type {type_str(aa)}, expected {type_str(fa.dom)}",
                    path,
                    "app",
                )
            return fa.cod
        case Abs(binder, annot, body):
            if annot is None:
                return TypeFailure(
                    f"binder {binder} lacks a type annotation", path, "abs"
                )
            ba = typecheck(ctx.extend(binder, annot), body, path + (0,))
            if isinstance(ba, TypeFailure):
                return ba
            return Arrow(annot, ba)
        case Pair(left, right):
            la = typecheck(ctx, left, path + (0,))
            if isinstance(la, TypeFailure):
                return la
            ra = typecheck(ctx, right, path + (1,))
            if isinstance(ra, TypeFailure):
                return ra
            return Product(la, ra)
        case Proj1(target):
            ta = typecheck(ctx, target, path + (0,))
            if isinstance(ta, TypeFailure):
                return ta
            if not isinstance(ta, Product):
                return TypeFailure(
                    f"projection from a non-pair of type {type_str(ta)}", path, "proj1"
                )
            return ta.left
        case Proj2(target):
            ta = typecheck(ctx, target, path + (0,))
            if isinstance(ta, TypeFailure):
                return ta
            if not isinstance(ta, Product):
                return TypeFailure(
                    f"projection from a non-pair of type {type_str(ta)}", path, "proj2"
                )
            return ta.right
        case Star():
            return Unit()
        case In1(value, full):
            if not isinstance(full, Sum):
                return TypeFailure("in1 needs a sum-type annotation", path, "in1")
            va = typecheck(ctx, value, path + (0,))
            if isinstance(va, TypeFailure):
                return va
            if va != full.left:
                return TypeFailure(
                    f"in1 payload has type {type_str(va)}, annotation wants {type_str(full.left)}",
                    path,
                    "in1",
                )
            return full
        case In2(value, full):
            if not isinstance(full, Sum):
                return TypeFailure("in2 needs a sum-type annotation", path, "in2")
            va = typecheck(ctx, value, path + (0,))
            if isinstance(va, TypeFailure):
                return va
            if va != full.right:
                return TypeFailure(
                    f"in2 payload has type {type_str(va)}, annotation wants {type_str(full.right)}",
                    path,
                    "in2",
                )
            return full
        case Case(scrut, lv, lannot, lbranch, rv, rannot, rbranch):
            sa = typecheck(ctx, scrut, path + (0,))
            if isinstance(sa, TypeFailure):
                return sa
            if not isinstance(sa, Sum):
                return TypeFailure(
                    f"case scrutinee has non-sum type {type_str(sa)}", path, "case"
                )
            if lannot is not None and lannot != sa.left:
                return TypeFailure(
                    f"left branch annotation {type_str(lannot)} disagrees with "
                    f"scrutinee component {type_str(sa.left)}",
                    path,
                    "case",
                )
            if rannot is not None and rannot != sa.right:
                return TypeFailure(
                    f"right branch annotation {type_str(rannot)} disagrees with "
                    f"scrutinee component {type_str(sa.right)}",
                    path,
                    "case",
                )
            la = typecheck(ctx.extend(lv, sa.left), lbranch, path + (1,))
            if isinstance(la, TypeFailure):
                return la
            ra = typecheck(ctx.extend(rv, sa.right), rbranch, path + (2,))
            if isinstance(ra, TypeFailure):
                return ra
            if la != ra:
                return TypeFailure(
                    f"case branches disagree: {type_str(la)} vs {type_str(ra)}",
                    path,
                    "case",
                )
            return la
        case Abort(target, value):
            va = typecheck(ctx, value, path + (0,))
            if isinstance(va, TypeFailure):
                return va
            if va != Void():
                return TypeFailure(
                    f"abort expects an empty-type argument, got {type_str(va)}",
                    path,
                    "abort",
                )
            return target
    raise TypeError(f"not a typed term: {t!r}")


def annotate_cases(ctx: Context, t: TypedTerm):
    """Fill missing case-branch annotations from the scrutinee's type.

    Returns the annotated term, or a TypeFailure if annotation requires a
    type the term does not have.
    """
    match t:
        case Var(_) | Star():
            return t
        case App(fun, arg):
            f2 = annotate_cases(ctx, fun)
            if isinstance(f2, TypeFailure):
                return f2
            a2 = annotate_cases(ctx, arg)
            if isinstance(a2, TypeFailure):
                return a2
            return App(f2, a2)
        case Abs(binder, annot, body):
            b2 = annotate_cases(ctx.extend(binder, annot), body)
            if isinstance(b2, TypeFailure):
                return b2
            return Abs(binder, annot, b2)
        case Pair(left, right):
            l2 = annotate_cases(ctx, left)
            if isinstance(l2, TypeFailure):
                return l2
            r2 = annotate_cases(ctx, right)
            if isinstance(r2, TypeFailure):
                return r2
            return Pair(l2, r2)
        case Proj1(target):
            t2 = annotate_cases(ctx, target)
            return t2 if isinstance(t2, TypeFailure) else Proj1(t2)
        case Proj2(target):
            t2 = annotate_cases(ctx, target)
            return t2 if isinstance(t2, TypeFailure) else Proj2(t2)
        case In1(value, full):
            v2 = annotate_cases(ctx, value)
            return v2 if isinstance(v2, TypeFailure) else In1(v2, full)
        case In2(value, full):
            v2 = annotate_cases(ctx, value)
            return v2 if isinstance(v2, TypeFailure) else In2(v2, full)
        case Case(scrut, lv, lannot, lbranch, rv, rannot, rbranch):
            s2 = annotate_cases(ctx, scrut)
            if isinstance(s2, TypeFailure):
                return s2
            sa = typecheck(ctx, s2)
            if isinstance(sa, TypeFailure):
                return sa
            if not isinstance(sa, Sum):
                return TypeFailure(
                    f"case scrutinee has non-sum type {type_str(sa)}", (), "case"
                )
            la, ra = lannot or sa.left, rannot or sa.right
            l2 = annotate_cases(ctx.extend(lv, la), lbranch)
            if isinstance(l2, TypeFailure):
                return l2
            r2 = annotate_cases(ctx.extend(rv, ra), rbranch)
            if isinstance(r2, TypeFailure):
                return r2
            return Case(s2, lv, la, l2, rv, ra, r2)
        case Abort(target, value):
            v2 = annotate_cases(ctx, value)
            return v2 if isinstance(v2, TypeFailure) else Abort(target, v2)
    raise TypeError(f"not a typed term: {t!r}")


# ---------------------------------------------------------------- derivations

@dataclass(frozen=True)
class Derivation:
    rule: str
    ctx: Context
    term: TypedTerm
    type: SimpleType
    premises: tuple

    def count(self) -> int:
        return 1 + sum(p.count() for p in self.premises)


_RULE_LABELS = {
    "var": ("ax", "ax"),
    "app": ("->E", "→-E"),
    "abs": ("->I", "→-I"),
    "pair": ("/\\I", "∧-I"),
    "proj1": ("/\\E1", "∧-E₁"),
    "proj2": ("/\\E2", "∧-E₂"),
    "star": ("TI", "⊤-I"),
    "in1": ("\\/I1", "∨-I₁"),
    "in2": ("\\/I2", "∨-I₂"),
    "case": ("\\/E", "∨-E"),
    "abort": ("_|_E", "⊥-E"),
}


def derivation(ctx: Context, t: TypedTerm):
    """The full typing derivation, or the TypeFailure from checking."""
    a = typecheck(ctx, t)
    if isinstance(a, TypeFailure):
        return a
    return _derive(ctx, t)


def _derive(ctx: Context, t: TypedTerm) -> Derivation:
    match t:
        case Var(_):
            return Derivation("var", ctx, t, typecheck(ctx, t), ())
        case App(fun, arg):
            p1, p2 = _derive(ctx, fun), _derive(ctx, arg)
            return Derivation("app", ctx, t, p1.type.cod, (p1, p2))
        case Abs(binder, annot, body):
            p = _derive(ctx.extend(binder, annot), body)
            return Derivation("abs", ctx, t, Arrow(annot, p.type), (p,))
        case Pair(left, right):
            p1, p2 = _derive(ctx, left), _derive(ctx, right)
            return Derivation("pair", ctx, t, Product(p1.type, p2.type), (p1, p2))
        case Proj1(target):
            p = _derive(ctx, target)
            return Derivation("proj1", ctx, t, p.type.left, (p,))
        case Proj2(target):
            p = _derive(ctx, target)
            return Derivation("proj2", ctx, t, p.type.right, (p,))
        case Star():
            return Derivation("star", ctx, t, Unit(), ())
        case In1(value, full):
            p = _derive(ctx, value)
            return Derivation("in1", ctx, t, full, (p,))
        case In2(value, full):
            p = _derive(ctx, value)
            return Derivation("in2", ctx, t, full, (p,))
        case Case(scrut, lv, lannot, lbranch, rv, rannot, rbranch):
            sa = typecheck(ctx, scrut)
            p0 = _derive(ctx, scrut)
            p1 = _derive(ctx.extend(lv, sa.left), lbranch)
            p2 = _derive(ctx.extend(rv, sa.right), rbranch)
            return Derivation("case", ctx, t, p1.type, (p0, p1, p2))
        case Abort(target, value):
            p = _derive(ctx, value)
            return Derivation("abort", ctx, t, target, (p,))
    raise TypeError(f"not a typed term: {t!r}")


def derivation_term(d: Derivation) -> TypedTerm:
    """Rebuild the subject term from the rule structure alone."""
    ps = [derivation_term(p) for p in d.premises]
    match d.rule:
        case "var" | "star":
            return d.term
        case "app":
            return App(ps[0], ps[1])
        case "abs":
            return Abs(d.term.binder, d.term.annot, ps[0])
        case "pair":
            return Pair(ps[0], ps[1])
        case "proj1":
            return Proj1(ps[0])
        case "proj2":
            return Proj2(ps[0])
        case "in1":
            return In1(ps[0], d.type)
        case "in2":
            return In2(ps[0], d.type)
        case "case":
            t = d.term
            return Case(ps[0], t.lvar, t.lannot, ps[1], t.rvar, t.rannot, ps[2])
        case "abort":
            return Abort(d.type, ps[0])
    raise ValueError(f"unknown rule {d.rule}")


def render_derivation(d: Derivation, unicode: bool = False) -> str:
    """Indented one-judgment-per-line proof tree, conclusion first."""
    turnstile = "⊢" if unicode else "|-"
    lines = []

    def walk(node, depth):
        lbl = _RULE_LABELS[node.rule][1 if unicode else 0]
        ctx_part = str(node.ctx)
        ctx_part = ctx_part + " " if ctx_part else ""
        lines.append(
            "  " * depth
            + f"({lbl}) {ctx_part}{turnstile} {term_str(node.term, unicode)}"
            f" : {type_str(node.type, unicode)}"
        )
        for p in node.premises:
            walk(p, depth + 1)

    walk(d, 0)
    return "\n".join(lines)


def derivation_json(d: Derivation, unicode: bool = False) -> dict:
    ctx_part = str(d.ctx)
    judgment = (
        (ctx_part + " " if ctx_part else "")
        + ("⊢" if unicode else "|-")
        + f" {term_str(d.term, unicode)} : {type_str(d.type, unicode)}"
    )
    return {
        "rule": _RULE_LABELS[d.rule][1 if unicode else 0],
        "judgment": judgment,
        "children": [derivation_json(p, unicode) for p in d.premises],
    }


def derivation_json_str(d: Derivation, unicode: bool = False) -> str:
    return json.dumps(derivation_json(d, unicode), indent=2, ensure_ascii=not unicode)


# ---------------------------------------------------------------- reduction

def free_typed_vars(t: TypedTerm) -> frozenset:
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return free_typed_vars(fun) | free_typed_vars(arg)
        case Abs(binder, _, body):
            return free_typed_vars(body) - {binder}
        case Pair(left, right):
            return free_typed_vars(left) | free_typed_vars(right)
        case Proj1(target) | Proj2(target):
            return free_typed_vars(target)
        case Star():
            return frozenset()
        case In1(value, _) | In2(value, _) | Abort(_, value):
            return free_typed_vars(value)
        case Case(scrut, lv, _, lbranch, rv, _, rbranch):
            return (
                free_typed_vars(scrut)
                | (free_typed_vars(lbranch) - {lv})
                | (free_typed_vars(rbranch) - {rv})
            )
    raise TypeError(f"not a typed term: {t!r}")


def _all_typed_vars(t: TypedTerm) -> frozenset:
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return _all_typed_vars(fun) | _all_typed_vars(arg)
        case Abs(binder, _, body):
            return _all_typed_vars(body) | {binder}
        case Pair(left, right):
            return _all_typed_vars(left) | _all_typed_vars(right)
        case Proj1(target) | Proj2(target):
            return _all_typed_vars(target)
        case Star():
            return frozenset()
        case In1(value, _) | In2(value, _) | Abort(_, value):
            return _all_typed_vars(value)
        case Case(scrut, lv, _, lbranch, rv, _, rbranch):
            return _all_typed_vars(scrut) | _all_typed_vars(lbranch) | _all_typed_vars(rbranch) | {lv, rv}
    raise TypeError(f"not a typed term: {t!r}")


def _trename(t: TypedTerm, y: str, x: str) -> TypedTerm:
    match t:
        case Var(name):
            return Var(y) if name == x else t
        case App(fun, arg):
            return App(_trename(fun, y, x), _trename(arg, y, x))
        case Abs(binder, annot, body):
            return Abs(y if binder == x else binder, annot, _trename(body, y, x))
        case Pair(left, right):
            return Pair(_trename(left, y, x), _trename(right, y, x))
        case Proj1(target):
            return Proj1(_trename(target, y, x))
        case Proj2(target):
            return Proj2(_trename(target, y, x))
        case Star():
            return t
        case In1(value, full):
            return In1(_trename(value, y, x), full)
        case In2(value, full):
            return In2(_trename(value, y, x), full)
        case Case(scrut, lv, la, lb, rv, ra, rb):
            return Case(
                _trename(scrut, y, x),
                y if lv == x else lv,
                la,
                _trename(lb, y, x),
                y if rv == x else rv,
                ra,
                _trename(rb, y, x),
            )
        case Abort(target, value):
            return Abort(target, _trename(value, y, x))
    raise TypeError(f"not a typed term: {t!r}")


def tsubst(t: TypedTerm, n: TypedTerm, x: str) -> TypedTerm:
    """Capture-avoiding substitution on typed terms."""

    def under(binder, body):
        """Substitute inside one binder, renaming it when it would capture."""
        if binder == x:
            return binder, body
        if binder not in free_typed_vars(n) or x not in free_typed_vars(body):
            return binder, tsubst(body, n, x)
        avoid = _all_typed_vars(body) | _all_typed_vars(n) | {x}
        renamed = fresh_name(binder, avoid)
        return renamed, tsubst(_trename(body, renamed, binder), n, x)

    match t:
        case Var(name):
            return n if name == x else t
        case App(fun, arg):
            return App(tsubst(fun, n, x), tsubst(arg, n, x))
        case Abs(binder, annot, body):
            b2, t2 = under(binder, body)
            return Abs(b2, annot, t2)
        case Pair(left, right):
            return Pair(tsubst(left, n, x), tsubst(right, n, x))
        case Proj1(target):
            return Proj1(tsubst(target, n, x))
        case Proj2(target):
            return Proj2(tsubst(target, n, x))
        case Star():
            return t
        case In1(value, full):
            return In1(tsubst(value, n, x), full)
        case In2(value, full):
            return In2(tsubst(value, n, x), full)
        case Case(scrut, lv, la, lb, rv, ra, rb):
            lv2, lb2 = under(lv, lb)
            rv2, rb2 = under(rv, rb)
            return Case(tsubst(scrut, n, x), lv2, la, lb2, rv2, ra, rb2)
        case Abort(target, value):
            return Abort(target, tsubst(value, n, x))
    raise TypeError(f"not a typed term: {t!r}")


def canonical_typed(t: TypedTerm, bound: tuple = ()):
    match t:
        case Var(name):
            for depth, b in enumerate(reversed(bound)):
                if b == name:
                    return ("b", depth)
            return ("f", name)
        case App(fun, arg):
            return ("a", canonical_typed(fun, bound), canonical_typed(arg, bound))
        case Abs(binder, annot, body):
            return ("l", annot, canonical_typed(body, bound + (binder,)))
        case Pair(left, right):
            return ("p", canonical_typed(left, bound), canonical_typed(right, bound))
        case Proj1(target):
            return ("p1", canonical_typed(target, bound))
        case Proj2(target):
            return ("p2", canonical_typed(target, bound))
        case Star():
            return ("s",)
        case In1(value, full):
            return ("i1", full, canonical_typed(value, bound))
        case In2(value, full):
            return ("i2", full, canonical_typed(value, bound))
        case Case(scrut, lv, la, lb, rv, ra, rb):
            return (
                "c",
                la,
                ra,
                canonical_typed(scrut, bound),
                canonical_typed(lb, bound + (lv,)),
                canonical_typed(rb, bound + (rv,)),
            )
        case Abort(target, value):
            return ("ab", target, canonical_typed(value, bound))
    raise TypeError(f"not a typed term: {t!r}")


def alpha_eq_typed(m: TypedTerm, n: TypedTerm) -> bool:
    return canonical_typed(m) == canonical_typed(n)


def _root_beta(t: TypedTerm):
    match t:
        case App(Abs(binder, _, body), arg):
            return tsubst(body, arg, binder)
        case Proj1(Pair(left, _)):
            return left
        case Proj2(Pair(_, right)):
            return right
        case Case(In1(value, _), lv, _, lbranch, _, _, _):
            return tsubst(lbranch, value, lv)
        case Case(In2(value, _), _, _, _, rv, _, rbranch):
            return tsubst(rbranch, value, rv)
    return None


def _root_eta(t: TypedTerm):
    match t:
        case Abs(binder, _, App(fun, Var(name))) if (
            name == binder and binder not in free_typed_vars(fun)
        ):
            return fun
        case Pair(Proj1(a), Proj2(b)) if alpha_eq_typed(a, b):
            return a
    return None


def _children(t: TypedTerm, ctx: Context):
    """Child subterms with their local contexts, in reduction order."""
    match t:
        case Var(_) | Star():
            return []
        case App(fun, arg):
            return [(fun, ctx, lambda r: App(r, arg)), (arg, ctx, lambda r: App(fun, r))]
        case Abs(binder, annot, body):
            return [(body, ctx.extend(binder, annot), lambda r: Abs(binder, annot, r))]
        case Pair(left, right):
            return [
                (left, ctx, lambda r: Pair(r, right)),
                (right, ctx, lambda r: Pair(left, r)),
            ]
        case Proj1(target):
            return [(target, ctx, Proj1)]
        case Proj2(target):
            return [(target, ctx, Proj2)]
        case In1(value, full):
            return [(value, ctx, lambda r: In1(r, full))]
        case In2(value, full):
            return [(value, ctx, lambda r: In2(r, full))]
        case Case(scrut, lv, la, lb, rv, ra, rb):
            lctx = ctx.extend(lv, la) if la is not None else ctx
            rctx = ctx.extend(rv, ra) if ra is not None else ctx
            return [
                (scrut, ctx, lambda r: Case(r, lv, la, lb, rv, ra, rb)),
                (lb, lctx, lambda r: Case(scrut, lv, la, r, rv, ra, rb)),
                (rb, rctx, lambda r: Case(scrut, lv, la, lb, rv, ra, r)),
            ]
        case Abort(target, value):
            return [(value, ctx, lambda r: Abort(target, r))]
    raise TypeError(f"not a typed term: {t!r}")


def step_typed(
    t: TypedTerm,
    include_eta: bool = False,
    include_eta_unit: bool = False,
    ctx: Context = Context(),
) -> list:
    """All single-step reducts under the selected rules, outermost first.

    The unit eta rule is type-directed, so it consults the context; pass
    the same ctx the term typechecks under when enabling it.
    """
    out = []
    r = _root_beta(t)
    if r is not None:
        out.append(r)
    if include_eta:
        r = _root_eta(t)
        if r is not None:
            out.append(r)
    if include_eta_unit and not isinstance(t, Star):
        if typecheck(ctx, t) == Unit():
            out.append(Star())
    for child, cctx, rebuild in _children(t, ctx):
        for r in step_typed(child, include_eta, include_eta_unit, cctx):
            out.append(rebuild(r))
    return out


def _first_step_typed(t, include_eta, include_eta_unit, ctx):
    r = _root_beta(t)
    if r is not None:
        return r
    if include_eta:
        r = _root_eta(t)
        if r is not None:
            return r
    if include_eta_unit and not isinstance(t, Star) and typecheck(ctx, t) == Unit():
        return Star()
    for child, cctx, rebuild in _children(t, ctx):
        r = _first_step_typed(child, include_eta, include_eta_unit, cctx)
        if r is not None:
            return rebuild(r)
    return None


def _first_beta(t):
    r = _root_beta(t)
    if r is not None:
        return r
    for child, _, rebuild in _children(t, Context()):
        r = _first_beta(child)
        if r is not None:
            return rebuild(r)
    return None


def normalize_typed(
    t: TypedTerm,
    mode: str = "beta",
    fuel: int = 1000,
    ctx: Context = Context(),
    include_eta_unit: bool = False,
):
    """Beta-normalize (leftmost-outermost), then in beta-eta mode clean up
    with eta steps; the eta phase cannot reintroduce beta redexes."""
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    if mode not in ("beta", "beta-eta"):
        raise ValueError(f"unknown mode {mode!r}")
    current = t
    spent = 0
    while spent < fuel:
        nxt = _first_beta(current)
        if nxt is None:
            break
        current = nxt
        spent += 1
    else:
        if _first_beta(current) is not None:
            return FuelExhausted(current, fuel)
    if mode == "beta":
        return current
    while spent < fuel:
        nxt = _first_step_typed(current, True, include_eta_unit, ctx)
        if nxt is None:
            return current
        current = nxt
        spent += 1
    if _first_step_typed(current, True, include_eta_unit, ctx) is None:
        return current
    return FuelExhausted(current, fuel)
