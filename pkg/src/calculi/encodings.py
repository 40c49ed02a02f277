"""Church encodings: booleans, numerals, pairs, tuples, lists, binary trees,
and fixed-point combinators, plus a behavioral oracle for "this closed term
computes that numeric function".
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .untyped import (
    Abs,
    App,
    FuelExhausted,
    Term,
    Var,
    alpha_eq,
    ap,
    canonical,
    lam,
    normalize,
)

TRUE = lam("x", "y", Var("x"))
FALSE = lam("x", "y", Var("y"))

AND = lam("a", "b", ap(Var("a"), Var("b"), FALSE))
OR = lam("a", "b", ap(Var("a"), TRUE, Var("b")))
NOT = lam("a", ap(Var("a"), FALSE, TRUE))
IF_THEN_ELSE = lam("x", Var("x"))


def church_bool(b: bool) -> Term:
    return TRUE if b else FALSE


def bool_ops() -> dict:
    return {"and": AND, "or": OR, "not": NOT, "if_then_else": IF_THEN_ELSE}


def church_numeral(n: int) -> Term:
    if n < 0:
        raise ValueError("numerals encode naturals only")
    body: Term = Var("x")
    for _ in range(n):
        body = App(Var("f"), body)
    return lam("f", "x", body)


@dataclass(frozen=True)
class NotANumeral:
    """The term's normal form is not a numeral; fuel_exhausted records
    whether we even reached a normal form."""

    fuel_exhausted: bool = False


def decode_numeral(t: Term, fuel: int = 2000):
    """Normalize and read back n from anything alpha-equal to a numeral."""
    nf = normalize(t, "beta", fuel)
    if isinstance(nf, FuelExhausted):
        return NotANumeral(fuel_exhausted=True)
    shape = canonical(nf)
    # numerals look like ("l", ("l", f applied n times to the inner binder))
    if not (isinstance(shape, tuple) and shape[0] == "l" and shape[1][0] == "l"):
        return NotANumeral()
    body = shape[1][1]
    n = 0
    while body == ("b", 0) or (body[0] == "a" and body[1] == ("b", 1)):
        if body == ("b", 0):
            return n
        n += 1
        body = body[2]
    return NotANumeral()


def decode_bool(t: Term, fuel: int = 2000):
    """Normalize and read back a boolean, or None if the shape is wrong."""
    nf = normalize(t, "beta", fuel)
    if isinstance(nf, FuelExhausted):
        return None
    if alpha_eq(nf, TRUE):
        return True
    if alpha_eq(nf, FALSE):
        return False
    return None


SUCC = lam("n", "f", "x", App(Var("f"), ap(Var("n"), Var("f"), Var("x"))))
ADD = lam("n", "m", "f", "x", ap(Var("n"), Var("f"), ap(Var("m"), Var("f"), Var("x"))))
MULT = lam("n", "m", "f", ap(Var("n"), App(Var("m"), Var("f"))))
ISZERO = lam("n", "x", "y", ap(Var("n"), Abs("z", Var("y")), Var("x")))

# exp n m = m n would compute n^m already, but its value at m = 0 normalizes
# to a term one eta-step away from the numeral 1; the expanded form lands on
# the numeral exactly.
EXP = lam("n", "m", "f", "x", ap(Var("m"), Var("n"), Var("f"), Var("x")))


def pair_term(m: Term, n: Term) -> Term:
    return Abs("z", ap(Var("z"), m, n))


PI1 = Abs("p", App(Var("p"), TRUE))
PI2 = Abs("p", App(Var("p"), FALSE))

# pred walks n up from zero, carrying (i+1, i) pairs
_SHIFT = Abs("p", pair_term(App(SUCC, App(PI1, Var("p"))), App(PI1, Var("p"))))
PRED = Abs(
    "n",
    App(PI2, ap(Var("n"), _SHIFT, pair_term(church_numeral(0), church_numeral(0)))),
)


def arith_ops() -> dict:
    return {
        "succ": SUCC,
        "add": ADD,
        "mult": MULT,
        "iszero": ISZERO,
        "pred": PRED,
        "exp": EXP,
    }


# fixed points: THETA unfolds by reduction alone, Y only up to conversion
_A = lam("x", "y", App(Var("y"), ap(Var("x"), Var("x"), Var("y"))))
THETA = App(_A, _A)
Y = Abs(
    "f",
    App(
        Abs("x", App(Var("f"), App(Var("x"), Var("x")))),
        Abs("x", App(Var("f"), App(Var("x"), Var("x")))),
    ),
)


def fixpoint_combinators() -> dict:
    return {"theta": THETA, "y": Y}


def recursive_term(body: Term, self_name: str = "self") -> Term:
    """Close a recursive definition: the result unfolds to body with itself
    substituted for self_name, by reduction alone."""
    return App(THETA, Abs(self_name, body))


@dataclass(frozen=True)
class RepresentsFailure:
    inputs: tuple
    expected: int
    got: object  # an int, NotANumeral, or None


@dataclass(frozen=True)
class RepresentsReport:
    term: Term
    arity: int
    checked: int
    failures: tuple

    @property
    def ok(self) -> bool:
        return not self.failures


def represents(t: Term, f, arity: int, inputs, fuel: int = 20000) -> RepresentsReport:
    """Check that t computes f numeralwise on the given input tuples."""
    inputs = [tuple(i) if isinstance(i, (tuple, list)) else (i,) for i in inputs]
    if not inputs:
        raise ValueError("need at least one input tuple")
    failures = []
    for args in inputs:
        if len(args) != arity:
            raise ValueError(f"input {args} does not match arity {arity}")
        applied = ap(t, *[church_numeral(a) for a in args])
        got = decode_numeral(applied, fuel)
        expected = f(*args)
        if got != expected:
            failures.append(RepresentsFailure(args, expected, got))
    return RepresentsReport(t, arity, len(inputs), tuple(failures))


NIL = lam("x", "y", Var("y"))


def cons(head: Term, tail: Term) -> Term:
    return lam("x", "y", ap(Var("x"), head, tail))


def list_term(items) -> Term:
    out = NIL
    for item in reversed(list(items)):
        out = cons(item, out)
    return out


def tuple_term(items) -> Term:
    items = list(items)
    if not items:
        raise ValueError("tuples have at least one component")
    return Abs("z", ap(Var("z"), *items))


def proj(n: int, i: int) -> Term:
    """The i-th projection out of an n-tuple, 1-based."""
    if not 1 <= i <= n:
        raise ValueError(f"projection index {i} out of range for width {n}")
    binders = [f"x{k}" for k in range(1, n + 1)]
    return Abs("p", App(Var("p"), lam(*binders, Var(f"x{i}"))))


def leaf(value: Term) -> Term:
    return lam("x", "y", App(Var("x"), value))


def node(left: Term, right: Term) -> Term:
    return lam("x", "y", ap(Var("y"), left, right))


def data_builders() -> dict:
    return {
        "pair": pair_term,
        "pi1": PI1,
        "pi2": PI2,
        "tuple_n": tuple_term,
        "proj_n_i": proj,
        "nil": NIL,
        "cons": cons,
        "leaf": leaf,
        "node": node,
    }


def _if(c: Term, t: Term, e: Term) -> Term:
    return ap(IF_THEN_ELSE, c, t, e)


def factorial() -> Term:
    n = Var("n")
    body = lam(
        "n",
        _if(
            App(ISZERO, n),
            church_numeral(1),
            ap(MULT, n, App(Var("self"), App(PRED, n))),
        ),
    )
    return recursive_term(body)


def fibonacci() -> Term:
    """f(0) = f(1) = 1, then the usual sum of the two predecessors."""
    n = Var("n")
    body = lam(
        "n",
        _if(
            App(ISZERO, n),
            church_numeral(1),
            _if(
                App(ISZERO, App(PRED, n)),
                church_numeral(1),
                ap(
                    ADD,
                    App(Var("self"), App(PRED, n)),
                    App(Var("self"), App(PRED, App(PRED, n))),
                ),
            ),
        ),
    )
    return recursive_term(body)


def addlist() -> Term:
    """Sum a list of numerals by structural recursion through THETA."""
    body = lam(
        "l",
        ap(
            Var("l"),
            lam("h", "t", ap(ADD, Var("h"), App(Var("self"), Var("t")))),
            church_numeral(0),
        ),
    )
    return recursive_term(body)
