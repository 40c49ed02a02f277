"""Untyped lambda terms and their reduction theory.

Terms are immutable trees of Var / App / Abs. Equality of interest is
alpha-equivalence, decided through a canonical nameless view; the named
tree is the storage form. Reduction positions are paths: tuples of child
indices (App: fun = 0, arg = 1; Abs: body = 0).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Union

Path = tuple  # tuple[int, ...]


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Abs:
    binder: str
    body: "Term"


Term = Union[Var, App, Abs]


@dataclass(frozen=True)
class FuelExhausted:
    """Returned when a bounded loop ran out of steps. Not an error."""

    last: object
    steps: int


def lam(*parts) -> Term:
    """lam("x", "y", body) builds the curried abstraction over body."""
    *binders, body = parts
    for b in reversed(binders):
        body = Abs(b, body)
    return body


def ap(*terms) -> Term:
    """Left-associated application of two or more terms."""
    head, *rest = terms
    for t in rest:
        head = App(head, t)
    return head


def free_vars(t: Term) -> frozenset:
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return free_vars(fun) | free_vars(arg)
        case Abs(binder, body):
            return free_vars(body) - {binder}
    raise TypeError(f"not a term: {t!r}")


def all_vars(t: Term) -> frozenset:
    """Every name occurring in t, free, bound, or binding."""
    match t:
        case Var(name):
            return frozenset((name,))
        case App(fun, arg):
            return all_vars(fun) | all_vars(arg)
        case Abs(binder, body):
            return all_vars(body) | {binder}
    raise TypeError(f"not a term: {t!r}")


def rename(t: Term, y: str, x: str) -> Term:
    """Replace every occurrence of the name x (free, bound, and binding) by y.

    Usable only when y does not occur in t at all; that restriction is what
    keeps the operation a pure relabelling.
    """
    if y in all_vars(t):
        raise ValueError(f"target name {y!r} already occurs in the term")
    return _rename(t, y, x)


def _rename(t: Term, y: str, x: str) -> Term:
    match t:
        case Var(name):
            return Var(y) if name == x else t
        case App(fun, arg):
            return App(_rename(fun, y, x), _rename(arg, y, x))
        case Abs(binder, body):
            return Abs(y if binder == x else binder, _rename(body, y, x))
    raise TypeError(f"not a term: {t!r}")


def canonical(t: Term, bound: tuple = ()) -> tuple:
    """Nameless form: binders become indices, so alpha-equal terms collide."""
    match t:
        case Var(name):
            for depth, b in enumerate(reversed(bound)):
                if b == name:
                    return ("b", depth)
            return ("f", name)
        case App(fun, arg):
            return ("a", canonical(fun, bound), canonical(arg, bound))
        case Abs(binder, body):
            return ("l", canonical(body, bound + (binder,)))
    raise TypeError(f"not a term: {t!r}")


def alpha_eq(m: Term, n: Term) -> bool:
    return canonical(m) == canonical(n)


def fresh_name(base: str, avoid: frozenset) -> str:
    """base1, base2, ... - the first suffixed name not in avoid."""
    for i in itertools.count(1):
        candidate = f"{base}{i}"
        if candidate not in avoid:
            return candidate
    raise AssertionError("unreachable")


def subst(t: Term, n: Term, x: str) -> Term:
    """Capture-avoiding substitution of n for the free occurrences of x in t.

    When a binder would capture a free variable of n, the binder is renamed
    to the least fresh suffixed name not occurring in either term.
    """
    match t:
        case Var(name):
            return n if name == x else t
        case App(fun, arg):
            return App(subst(fun, n, x), subst(arg, n, x))
        case Abs(binder, body):
            if binder == x:
                return t
            if binder not in free_vars(n) or x not in free_vars(body):
                return Abs(binder, subst(body, n, x))
            avoid = all_vars(body) | all_vars(n) | {x}
            renamed = fresh_name(binder, avoid)
            return Abs(renamed, subst(_rename(body, renamed, binder), n, x))
    raise TypeError(f"not a term: {t!r}")


def is_beta_redex(t: Term) -> bool:
    return isinstance(t, App) and isinstance(t.fun, Abs)


def is_eta_redex(t: Term) -> bool:
    return (
        isinstance(t, Abs)
        and isinstance(t.body, App)
        and t.body.arg == Var(t.binder)
        and t.binder not in free_vars(t.body.fun)
    )


def _contract_beta(t: App) -> Term:
    return subst(t.fun.body, t.arg, t.fun.binder)


def step_reducts(t: Term, mode: str = "beta") -> list:
    """All single-step reducts with their redex paths, outermost-leftmost first.

    mode is one of "beta", "eta", "beta-eta".
    """
    if mode not in ("beta", "eta", "beta-eta"):
        raise ValueError(f"unknown mode {mode!r}")
    use_beta = mode in ("beta", "beta-eta")
    use_eta = mode in ("eta", "beta-eta")
    out = []
    if use_beta and is_beta_redex(t):
        out.append((_contract_beta(t), ()))
    if use_eta and is_eta_redex(t):
        out.append((t.body.fun, ()))
    match t:
        case App(fun, arg):
            for reduct, path in step_reducts(fun, mode):
                out.append((App(reduct, arg), (0,) + path))
            for reduct, path in step_reducts(arg, mode):
                out.append((App(fun, reduct), (1,) + path))
        case Abs(binder, body):
            for reduct, path in step_reducts(body, mode):
                out.append((Abs(binder, reduct), (0,) + path))
    return out


def _first_step(t: Term, use_beta: bool, use_eta: bool):
    if use_beta and is_beta_redex(t):
        return _contract_beta(t)
    if use_eta and is_eta_redex(t):
        return t.body.fun
    match t:
        case App(fun, arg):
            r = _first_step(fun, use_beta, use_eta)
            if r is not None:
                return App(r, arg)
            r = _first_step(arg, use_beta, use_eta)
            if r is not None:
                return App(fun, r)
        case Abs(binder, body):
            r = _first_step(body, use_beta, use_eta)
            if r is not None:
                return Abs(binder, r)
    return None


def normalize(t: Term, mode: str = "beta", fuel: int = 1000):
    """Normal-order normalization: contract the leftmost-outermost redex
    until none remains or fuel runs out. Returns the normal form, or a
    FuelExhausted record carrying the last term reached.
    """
    if fuel < 1:
        raise ValueError("fuel must be at least 1")
    if mode not in ("beta", "beta-eta"):
        raise ValueError(f"unknown mode {mode!r}")
    use_eta = mode == "beta-eta"
    current = t
    for step in range(fuel):
        nxt = _first_step(current, True, use_eta)
        if nxt is None:
            return current
        current = nxt
    if _first_step(current, True, use_eta) is None:
        return current
    return FuelExhausted(current, fuel)


def count_redex_sites(t: Term) -> int:
    own = int(is_beta_redex(t)) + int(is_eta_redex(t))
    match t:
        case Var(_):
            return own
        case App(fun, arg):
            return own + count_redex_sites(fun) + count_redex_sites(arg)
        case Abs(_, body):
            return own + count_redex_sites(body)
    raise TypeError(f"not a term: {t!r}")


def parallel_reducts(t: Term, max_redexes: int = 24) -> list:
    """Every term reachable by simultaneously contracting any subset of
    redexes (the parallel one-step relation), deduplicated up to alpha.

    The enumeration is exponential in the number of redex sites, so terms
    with more than max_redexes sites are refused.
    """
    sites = count_redex_sites(t)
    if sites > max_redexes:
        raise ValueError(f"term has {sites} redex sites, above the {max_redexes} cap")
    seen = {}
    for r in _par(t):
        key = canonical(r)
        if key not in seen:
            seen[key] = r
    return list(seen.values())


def _par(t: Term) -> list:
    match t:
        case Var(_):
            return [t]
        case App(fun, arg):
            arg_reducts = _par(arg)
            out = [App(f, a) for f in _par(fun) for a in arg_reducts]
            if isinstance(fun, Abs):
                out.extend(
                    subst(q, a, fun.binder)
                    for q in _par(fun.body)
                    for a in arg_reducts
                )
            return out
        case Abs(binder, body):
            out = [Abs(binder, b) for b in _par(body)]
            if (
                isinstance(body, App)
                and body.arg == Var(binder)
                and binder not in free_vars(body.fun)
            ):
                out.extend(_par(body.fun))
            return out
    raise TypeError(f"not a term: {t!r}")


def max_parallel_reduct(t: Term) -> Term:
    """Contract every redex at once: beta-redexes fire fully, eta-redexes
    collapse. The eta clause is checked before the generic abstraction one.
    """
    match t:
        case Var(_):
            return t
        case App(fun, arg):
            if isinstance(fun, Abs):
                return subst(
                    max_parallel_reduct(fun.body), max_parallel_reduct(arg), fun.binder
                )
            return App(max_parallel_reduct(fun), max_parallel_reduct(arg))
        case Abs(binder, body):
            if (
                isinstance(body, App)
                and body.arg == Var(binder)
                and binder not in free_vars(body.fun)
            ):
                return max_parallel_reduct(body.fun)
            return Abs(binder, max_parallel_reduct(body))
    raise TypeError(f"not a term: {t!r}")


@dataclass(frozen=True)
class ReductionGraph:
    """Beta-reduction graph: vertices in breadth-first discovery order,
    edges as (source index, target index, redex path); parallel edges with
    distinct paths are kept apart.
    """

    vertices: tuple
    edges: tuple
    truncated: bool

    def __len__(self) -> int:
        return len(self.vertices)

    def edge_count(self) -> int:
        return len(self.edges)

    def out_edges(self, i: int) -> list:
        return [e for e in self.edges if e[0] == i]


def reduction_graph(t: Term, max_vertices: int = 200, max_depth: int = 100) -> ReductionGraph:
    """Breadth-first closure of t under single beta steps.

    Vertices compare up to alpha; the stored representative is the first
    form discovered. The truncated flag is set when either budget stopped
    the search from recording part of the graph.
    """
    if max_vertices < 1 or max_depth < 1:
        raise ValueError("budgets must be at least 1")
    index = {canonical(t): 0}
    vertices = [t]
    edges = []
    queue = [(0, 0)]
    truncated = False
    qpos = 0
    while qpos < len(queue):
        i, depth = queue[qpos]
        qpos += 1
        reducts = step_reducts(vertices[i], "beta")
        if depth >= max_depth:
            if reducts:
                truncated = True
            continue
        for reduct, path in reducts:
            key = canonical(reduct)
            j = index.get(key)
            if j is None:
                if len(vertices) >= max_vertices:
                    truncated = True
                    continue
                j = len(vertices)
                index[key] = j
                vertices.append(reduct)
                queue.append((j, depth + 1))
            edges.append((i, j, path))
    return ReductionGraph(tuple(vertices), tuple(edges), truncated)
