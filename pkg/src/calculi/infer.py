"""Principal type inference for the arrow/product/unit fragment.

Type templates extend the simple types with template variables (TVar);
substitutions map template variables to templates.  mgu computes most
general unifiers by first-applicable-clause dispatch, typeinfer computes
the most general substitution making a judgment valid, and principal_type
packages the usual "fresh variables everywhere" query on top of it.

Sum and void types have no template syntax here, so terms that mention
them are rejected up front with a ValueError rather than an inference
failure.
"""
from __future__ import annotations

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
    Unit,
    Var,
)

_OUT_OF_SCOPE = "type inference does not cover sums or the empty type"


# ---------------------------------------------------------------- templates

@dataclass(frozen=True)
class TVar:
    """A template variable standing in for an unknown simple type."""

    name: str


def validate_template(a) -> None:
    """Raise ValueError unless a is built from TVar, base types, ->, x, 1."""
    match a:
        case TVar(_) | Base(_) | Unit():
            return
        case Arrow(dom, cod) | Product(dom, cod):
            validate_template(dom)
            validate_template(cod)
            return
    raise ValueError(f"not a type template ({_OUT_OF_SCOPE}): {a!r}")


def template_vars(a) -> tuple:
    """Template variable names in a, deduplicated, in first-use order."""
    seen: list[str] = []

    def walk(t):
        match t:
            case TVar(name):
                if name not in seen:
                    seen.append(name)
            case Arrow(dom, cod) | Product(dom, cod):
                walk(dom)
                walk(cod)
            case Base(_) | Unit():
                pass
            case _:
                raise ValueError(f"not a type template: {t!r}")

    walk(a)
    return tuple(seen)


def template_str(a, unicode: bool = False) -> str:
    """Render a template: x binds tighter than ->, -> associates right."""
    arrow = " → " if unicode else " -> "
    times = " × " if unicode else " * "

    def go(t, prec):
        match t:
            case TVar(name) | Base(name):
                return name
            case Unit():
                return "1"
            case Arrow(dom, cod):
                s = go(dom, 1) + arrow + go(cod, 0)
                return f"({s})" if prec > 0 else s
            case Product(left, right):
                s = go(left, 2) + times + go(right, 2)
                return f"({s})" if prec > 1 else s
        raise ValueError(f"not a type template: {t!r}")

    return go(a, 0)


# ------------------------------------------------------------ substitutions

@dataclass(frozen=True)
class TypeSubstitution:
    """A finite map from template variable names to templates, identity off
    its domain.  Bindings are kept sorted by name with X |-> X entries
    dropped, so equal substitutions compare equal."""

    entries: tuple = ()

    @staticmethod
    def of(*pairs) -> "TypeSubstitution":
        mapping: dict[str, object] = {}
        for name, a in pairs:
            validate_template(a)
            if name in mapping and mapping[name] != a:
                raise ValueError(f"conflicting bindings for {name}")
            mapping[name] = a
        kept = tuple(
            (n, a) for n, a in sorted(mapping.items()) if a != TVar(n)
        )
        return TypeSubstitution(kept)

    def get(self, name: str):
        for n, a in self.entries:
            if n == name:
                return a
        return TVar(name)

    @property
    def domain(self) -> frozenset:
        return frozenset(n for n, _ in self.entries)

    def is_identity(self) -> bool:
        return not self.entries

    def __str__(self) -> str:
        return substitution_str(self)


IDENTITY = TypeSubstitution()


def substitution_str(s: TypeSubstitution, unicode: bool = False) -> str:
    to = "↦" if unicode else "|->"
    inner = ", ".join(
        f"{n} {to} {template_str(a, unicode)}" for n, a in s.entries
    )
    return f"[{inner}]"


def apply_subst(s: TypeSubstitution, a):
    """The template a with every variable replaced by its binding in s."""
    match a:
        case TVar(name):
            return s.get(name)
        case Base(_) | Unit():
            return a
        case Arrow(dom, cod):
            return Arrow(apply_subst(s, dom), apply_subst(s, cod))
        case Product(left, right):
            return Product(apply_subst(s, left), apply_subst(s, right))
    raise ValueError(f"not a type template ({_OUT_OF_SCOPE}): {a!r}")


def compose(t: TypeSubstitution, s: TypeSubstitution) -> TypeSubstitution:
    """The substitution r with apply_subst(r, A) == apply_subst(t,
    apply_subst(s, A)) for every A.  Kept literal: bindings of s get t
    applied to their images, bindings of t outside s's domain ride along."""
    pairs = [(n, apply_subst(t, a)) for n, a in s.entries]
    pairs += [(n, a) for n, a in t.entries if n not in s.domain]
    return TypeSubstitution.of(*pairs)


# ---------------------------------------------------------------- unification

@dataclass(frozen=True)
class UnifyFailure:
    """Why two templates cannot be unified: a variable inside its own image
    (occurs) or two different constructors (clash), at equation index
    `position` of the original problem."""

    kind: str  # "occurs" or "clash"
    left: object
    right: object
    position: int

    def __str__(self) -> str:
        what = (
            "the variable would have to contain itself"
            if self.kind == "occurs"
            else "the shapes disagree"
        )
        return (
            f"cannot unify {template_str(self.left)} with "
            f"{template_str(self.right)} (equation {self.position}): {what}"
        )


@dataclass(frozen=True)
class MguStep:
    """One clause firing, for traces: the clause number, the equation it
    looked at, and how many distinct variables the subproblem had.  For the
    list clause (11), sub_live counts the variables left in the head pair
    after the tail unifier was applied, and rho_identity says whether that
    tail unifier was the identity."""

    clause: int
    left: object
    right: object
    live: int
    sub_live: int | None = None
    rho_identity: bool | None = None


def _occurs(name: str, a) -> bool:
    return name in template_vars(a)


def _live(templates) -> int:
    seen: set[str] = set()
    for a in templates:
        seen.update(template_vars(a))
    return len(seen)


def _mgu_pair(a, b, idx: int, trace):
    live = _live([a, b])

    def fired(n: int):
        if trace is not None:
            trace.append(MguStep(n, a, b, live))

    match (a, b):
        case (TVar(x), TVar(y)) if x == y:  # 1
            fired(1)
            return IDENTITY
        case (TVar(x), _) if not _occurs(x, b):  # 2
            fired(2)
            return TypeSubstitution.of((x, b))
        case (TVar(x), _):  # 3
            fired(3)
            return UnifyFailure("occurs", a, b, idx)
        case (_, TVar(y)) if not _occurs(y, a):  # 4
            fired(4)
            return TypeSubstitution.of((y, a))
        case (_, TVar(y)):  # 5
            fired(5)
            return UnifyFailure("occurs", a, b, idx)
        case (Base(x), Base(y)) if x == y:  # 6
            fired(6)
            return IDENTITY
        case (Arrow(a1, a2), Arrow(b1, b2)):  # 7
            fired(7)
            return _mgu_list([(a1, b1, idx), (a2, b2, idx)], trace)
        case (Product(a1, a2), Product(b1, b2)):  # 8
            fired(8)
            return _mgu_list([(a1, b1, idx), (a2, b2, idx)], trace)
        case (Unit(), Unit()):  # 9
            fired(9)
            return IDENTITY
    fired(10)  # 10: everything else is a constructor clash
    return UnifyFailure("clash", a, b, idx)


def _mgu_list(pairs, trace):
    if not pairs:
        return IDENTITY
    if len(pairs) == 1:
        a, b, idx = pairs[0]
        return _mgu_pair(a, b, idx, trace)
    # clause 11: unify the tail first, then the instantiated head
    (a, b, idx), tail = pairs[0], list(pairs[1:])
    rho = _mgu_list(tail, trace)
    if isinstance(rho, UnifyFailure):
        return rho
    ra, rb = apply_subst(rho, a), apply_subst(rho, b)
    if trace is not None:
        live = _live([t for p in pairs for t in p[:2]])
        trace.append(
            MguStep(
                11, a, b, live,
                sub_live=_live([ra, rb]),
                rho_identity=rho.is_identity(),
            )
        )
    tau = _mgu_pair(ra, rb, idx, trace)
    if isinstance(tau, UnifyFailure):
        return tau
    return compose(tau, rho)


def mgu(lhs, rhs, trace: list | None = None):
    """Most general unifier of two templates or two equal-length template
    lists: a TypeSubstitution equating them pointwise, or a UnifyFailure.
    Clauses fire first-match; pass a list as trace to record them."""
    left = list(lhs) if isinstance(lhs, (list, tuple)) else [lhs]
    right = list(rhs) if isinstance(rhs, (list, tuple)) else [rhs]
    if len(left) != len(right):
        raise ValueError("mgu needs the same number of templates on each side")
    for a in left + right:
        validate_template(a)
    return _mgu_list([(a, b, i) for i, (a, b) in enumerate(zip(left, right))], trace)


# ---------------------------------------------------------------- inference

@dataclass(frozen=True)
class InferFailure:
    """An inference dead end: the unification failure and the path of the
    subterm whose clause demanded it (child indices, as in typecheck)."""

    path: tuple
    cause: UnifyFailure

    def __str__(self) -> str:
        where = "".join(f".{i}" for i in self.path) or " at the root"
        return f"cannot infer a type (position{where}): {self.cause}"


class _FreshSource:
    """Hands out template variables T0, T1, ... skipping names in use, so
    each run of the algorithm is deterministic."""

    def __init__(self, used):
        self._used = set(used)
        self._next = 0

    def take(self) -> TVar:
        while f"T{self._next}" in self._used:
            self._next += 1
        name = f"T{self._next}"
        self._next += 1
        return TVar(name)


def _check_fragment(t) -> None:
    match t:
        case Var(_) | Star():
            return
        case App(fun, arg) | Pair(fun, arg):
            _check_fragment(fun)
            _check_fragment(arg)
            return
        case Abs(_, annot, body):
            if annot is not None:
                validate_template(annot)
            _check_fragment(body)
            return
        case Proj1(target) | Proj2(target):
            _check_fragment(target)
            return
    raise ValueError(f"{_OUT_OF_SCOPE}: {t!r}")


def _annotation_vars(t) -> set:
    out: set[str] = set()

    def walk(u):
        match u:
            case App(fun, arg) | Pair(fun, arg):
                walk(fun)
                walk(arg)
            case Abs(_, annot, body):
                if annot is not None:
                    out.update(template_vars(annot))
                walk(body)
            case Proj1(target) | Proj2(target):
                walk(target)
            case _:
                pass

    walk(t)
    return out


def _subst_ctx(s: TypeSubstitution, ctx: Context) -> Context:
    return Context(tuple((n, apply_subst(s, a)) for n, a in ctx.entries))


def _tag(out, path: tuple):
    if isinstance(out, UnifyFailure):
        return InferFailure(path, out)
    return out


def _infer(ctx, t, goal, path, fresh, trace):
    match t:
        case Var(name):
            a = ctx.lookup(name)
            if a is None:
                raise ValueError(f"unbound variable {name}")
            return _tag(mgu(a, goal, trace), path)
        case App(fun, arg):
            x = fresh.take()
            sigma = _infer(ctx, fun, Arrow(x, goal), path + (0,), fresh, trace)
            if isinstance(sigma, InferFailure):
                return sigma
            tau = _infer(
                _subst_ctx(sigma, ctx), arg, apply_subst(sigma, x),
                path + (1,), fresh, trace,
            )
            if isinstance(tau, InferFailure):
                return tau
            return compose(tau, sigma)
        case Abs(binder, annot, body):
            a = annot if annot is not None else fresh.take()
            x = fresh.take()
            sigma = mgu(goal, Arrow(a, x), trace)
            if isinstance(sigma, UnifyFailure):
                return InferFailure(path, sigma)
            inner = _subst_ctx(sigma, ctx).extend(binder, apply_subst(sigma, a))
            tau = _infer(
                inner, body, apply_subst(sigma, x), path + (0,), fresh, trace,
            )
            if isinstance(tau, InferFailure):
                return tau
            return compose(tau, sigma)
        case Pair(left, right):
            x, y = fresh.take(), fresh.take()
            sigma = mgu(goal, Product(x, y), trace)
            if isinstance(sigma, UnifyFailure):
                return InferFailure(path, sigma)
            tau = _infer(
                _subst_ctx(sigma, ctx), left, apply_subst(sigma, x),
                path + (0,), fresh, trace,
            )
            if isinstance(tau, InferFailure):
                return tau
            ts = compose(tau, sigma)
            rho = _infer(
                _subst_ctx(ts, ctx), right, apply_subst(ts, y),
                path + (1,), fresh, trace,
            )
            if isinstance(rho, InferFailure):
                return rho
            return compose(rho, ts)
        case Proj1(target):
            y = fresh.take()
            return _infer(ctx, target, Product(goal, y), path + (0,), fresh, trace)
        case Proj2(target):
            x = fresh.take()
            return _infer(ctx, target, Product(x, goal), path + (0,), fresh, trace)
        case Star():
            return _tag(mgu(goal, Unit(), trace), path)
    raise ValueError(f"{_OUT_OF_SCOPE}: {t!r}")


def typeinfer(ctx: Context, t, goal, trace: list | None = None):
    """Most general substitution s with apply(s, ctx) |- t : apply(s, goal)
    a valid judgment, or an InferFailure.  Binder annotations are used when
    present; missing ones get fresh variables.  Every free variable of t
    must be bound in ctx (ValueError otherwise)."""
    _check_fragment(t)
    validate_template(goal)
    used = set(template_vars(goal)) | _annotation_vars(t)
    for _, a in ctx.entries:
        validate_template(a)
        used.update(template_vars(a))
    return _infer(ctx, t, goal, (), _FreshSource(used), trace)


# ------------------------------------------------------------ principal types

@dataclass(frozen=True)
class Untypable:
    """Verdict of principal_type on a term with no type at all."""

    cause: InferFailure

    def __str__(self) -> str:
        return f"not typable: {self.cause}"


def _free_ordered(t) -> tuple:
    out: list[str] = []

    def walk(u, bound):
        match u:
            case Var(name):
                if name not in bound and name not in out:
                    out.append(name)
            case App(fun, arg) | Pair(fun, arg):
                walk(fun, bound)
                walk(arg, bound)
            case Abs(binder, _, body):
                walk(body, bound | {binder})
            case Proj1(target) | Proj2(target):
                walk(target, bound)
            case _:
                pass

    walk(t, frozenset())
    return tuple(out)


def _display_name(i: int) -> str:
    letter = chr(ord("A") + i % 26)
    return letter if i < 26 else f"{letter}{i // 26}"


def rename_for_display(templates):
    """The same templates with variables renamed to A, B, C, ... in first-use
    order across the whole list (simultaneously, so names never collide)."""
    order: list[str] = []
    for a in templates:
        for n in template_vars(a):
            if n not in order:
                order.append(n)
    names = {n: _display_name(i) for i, n in enumerate(order)}

    def remap(t):
        match t:
            case TVar(name):
                return TVar(names[name])
            case Arrow(dom, cod):
                return Arrow(remap(dom), remap(cod))
            case Product(left, right):
                return Product(remap(left), remap(right))
            case _:
                return t

    return [remap(a) for a in templates]


def principal_type(t):
    """The most general type of t together with the matching assignment of
    types to its free variables, template variables renamed to A, B, C, ...
    in first-use order; or Untypable."""
    _check_fragment(t)
    fresh = _FreshSource(_annotation_vars(t))
    names = _free_ordered(t)
    ctx = Context.of(*((n, fresh.take()) for n in names))
    goal = fresh.take()
    out = _infer(ctx, t, goal, (), fresh, None)
    if isinstance(out, InferFailure):
        return Untypable(out)
    templates = [apply_subst(out, goal)]
    templates += [apply_subst(out, ctx.lookup(n)) for n in names]
    renamed = rename_for_display(templates)
    return renamed[0], tuple(zip(names, renamed[1:]))


def apply_subst_term(s: TypeSubstitution, t):
    """The term t with s applied to every binder annotation (missing
    annotations stay missing)."""
    match t:
        case Var(_) | Star():
            return t
        case App(fun, arg):
            return App(apply_subst_term(s, fun), apply_subst_term(s, arg))
        case Abs(binder, annot, body):
            a = None if annot is None else apply_subst(s, annot)
            return Abs(binder, a, apply_subst_term(s, body))
        case Pair(left, right):
            return Pair(apply_subst_term(s, left), apply_subst_term(s, right))
        case Proj1(target):
            return Proj1(apply_subst_term(s, target))
        case Proj2(target):
            return Proj2(apply_subst_term(s, target))
    raise ValueError(f"{_OUT_OF_SCOPE}: {t!r}")


def annotate_binders(t):
    """A copy of t with every missing binder annotation filled in by a fresh
    template variable, left to right."""
    _check_fragment(t)
    fresh = _FreshSource(_annotation_vars(t))

    def walk(u):
        match u:
            case Var(_) | Star():
                return u
            case App(fun, arg):
                return App(walk(fun), walk(arg))
            case Abs(binder, annot, body):
                a = annot if annot is not None else fresh.take()
                return Abs(binder, a, walk(body))
            case Pair(left, right):
                return Pair(walk(left), walk(right))
            case Proj1(target):
                return Proj1(walk(target))
            case Proj2(target):
                return Proj2(walk(target))
        raise ValueError(f"{_OUT_OF_SCOPE}: {u!r}")

    return walk(t)


# ------------------------------------------------------------------ matching

@dataclass(frozen=True)
class NoMatch:
    """Verdict of more_general: the first pair of subtemplates that cannot
    be matched one-way."""

    left: object
    right: object

    def __str__(self) -> str:
        return (
            f"{template_str(self.left)} does not match "
            f"{template_str(self.right)}"
        )


def more_general(a, b):
    """A substitution s with apply_subst(s, a) == b, treating the variables
    of b as constants; NoMatch if none exists.  Success means a is at least
    as general as b."""
    validate_template(a)
    validate_template(b)
    bindings: dict[str, object] = {}
    bad: list = []

    def walk(x, y) -> bool:
        match (x, y):
            case (TVar(n), _):
                if n in bindings:
                    if bindings[n] == y:
                        return True
                else:
                    bindings[n] = y
                    return True
            case (Base(p), Base(q)) if p == q:
                return True
            case (Unit(), Unit()):
                return True
            case (Arrow(d1, c1), Arrow(d2, c2)):
                return walk(d1, d2) and walk(c1, c2)
            case (Product(l1, r1), Product(l2, r2)):
                return walk(l1, l2) and walk(r1, r2)
        if not bad:
            bad.extend([x, y])
        return False

    if walk(a, b):
        return TypeSubstitution.of(*bindings.items())
    return NoMatch(bad[0], bad[1])
