"""Concrete syntax and the command-line front end.

The library modules work on abstract syntax and say nothing about
notation. This module owns the other half: a lexer and recursive
descent parser for a shared surface grammar, printers that invert the
parser, DOT and JSON exporters, and the `calculi` entry point with its
subcommands.

One grammar serves every calculus, with constructs gated per lane, so
`case` introduces a sum eliminator in the stlc lane but is an ordinary
variable name in the untyped one. Lambda is written `\\` or the Greek
letter, type abstraction `/\\`, application is juxtaposition, and
binders may be grouped: `\\x y z. M` abbreviates three nested
abstractions. A bare numeral is PCF sugar for iterated succ, while
`#n` builds the untyped arithmetic encoding of n. Unicode arrows and
connectives are accepted on input everywhere; output is ASCII unless
asked otherwise.

One wrinkle is worth knowing: `*` is the unit value in term position
and the product connective in type position. The lexer emits a single
token for both and the parsers pick the reading by position.

Exit codes: 0 on success, 1 for user errors (syntax, typing, bad
data), 2 when a resource budget runs out (fuel, graph bounds, model
size caps).
"""

import argparse
import json
import sys
from dataclasses import dataclass

from . import combinatory, encodings, infer, models, pcf, pcfdenot, stlc, systemf, untyped


@dataclass(frozen=True)
class SourceSpan:
    """Half-open byte range [start, end), with the 1-based line and
    character column of its first position."""

    start: int
    end: int
    line: int
    column: int


@dataclass(frozen=True)
class ParseError:
    """Why a source string was rejected: where, what would have been
    acceptable at that point, and what was found instead."""

    span: SourceSpan
    expected: tuple
    found: str

    def __str__(self):
        want = " or ".join(self.expected)
        return (
            f"parse error at line {self.span.line}, column {self.span.column}: "
            f"expected {want}, found {self.found}"
        )


@dataclass(frozen=True)
class SpanNode:
    """Span tree mirroring a parse: the phrase kind, its extent, and
    the span trees of its immediate subphrases."""

    label: str
    span: SourceSpan
    children: tuple


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    span: SourceSpan


class _Abort(Exception):
    def __init__(self, error: ParseError):
        super().__init__(str(error))
        self.error = error


_SINGLE = {
    "(": "lparen",
    ")": "rparen",
    "<": "langle",
    ">": "rangle",
    ",": "comma",
    "*": "star",
    "×": "star",
    "∗": "star",
    "+": "plus",
    ":": "colon",
    "[": "lbrack",
    "]": "rbrack",
    "|": "bar",
    ".": "dot",
    "λ": "lambda",
    "Λ": "biglambda",
    "∀": "forall",
    "→": "arrow",
}


def _ident_start(ch):
    return ch.isalpha() and ch not in _SINGLE or ch == "_"


def _ident_rest(ch):
    return ch.isalnum() and ch not in _SINGLE or ch in ("_", "'")


def _found(tok):
    return "end of input" if tok.kind == "eof" else f"'{tok.text}'"


def _lex(text):
    """Token list for text, ending in an eof token. Spans track byte
    offsets even when the source holds multibyte characters."""
    boffs = [0]
    for ch in text:
        boffs.append(boffs[-1] + len(ch.encode("utf-8")))
    tokens = []
    i = 0
    line = 1
    line_start = 0

    def span(a, b):
        return SourceSpan(boffs[a], boffs[b], line, a - line_start + 1)

    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            i += 1
            line_start = i
            continue
        if ch.isspace():
            i += 1
            continue
        if text[i : i + 2] == "/\\":
            tokens.append(_Token("biglambda", "/\\", span(i, i + 2)))
            i += 2
            continue
        if text[i : i + 2] == "->":
            tokens.append(_Token("arrow", "->", span(i, i + 2)))
            i += 2
            continue
        if text[i : i + 2] == "=>":
            tokens.append(_Token("darrow", "=>", span(i, i + 2)))
            i += 2
            continue
        if ch == "\\":
            tokens.append(_Token("lambda", "\\", span(i, i + 1)))
            i += 1
            continue
        if ch in _SINGLE:
            tokens.append(_Token(_SINGLE[ch], ch, span(i, i + 1)))
            i += 1
            continue
        if ch == "#":
            j = i + 1
            while j < len(text) and text[j].isdigit():
                j += 1
            if j == i + 1:
                raise _Abort(ParseError(span(i, i + 1), ("digits after '#'",), f"'{ch}'"))
            tokens.append(_Token("church", text[i:j], span(i, j)))
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(_Token("number", text[i:j], span(i, j)))
            i = j
            continue
        if _ident_start(ch):
            j = i
            while j < len(text) and _ident_rest(text[j]):
                j += 1
            word = text[i:j]
            kind = "forall" if word == "forall" else "ident"
            tokens.append(_Token(kind, word, span(i, j)))
            i = j
            continue
        raise _Abort(ParseError(span(i, i + 1), ("a token",), f"'{ch}'"))
    tokens.append(_Token("eof", "", span(len(text), len(text))))
    return tokens


_KEYWORDS = {
    "untyped": frozenset(),
    "stlc": frozenset({"pi1", "pi2", "in1", "in2", "case", "of", "abort"}),
    "systemf": frozenset(),
    "pcf": frozenset(
        {"pi1", "pi2", "if", "then", "else", "succ", "pred", "iszero", "zero", "T", "F", "Y", "por"}
    ),
}

CALCULI = tuple(_KEYWORDS)


def _merge(a: SourceSpan, b: SourceSpan) -> SourceSpan:
    return SourceSpan(a.start, b.end, a.line, a.column)


class _Parser:
    def __init__(self, text, calculus):
        self.calculus = calculus
        self.keywords = _KEYWORDS[calculus]
        self.tokens = _lex(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def take(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def abort(self, tok, expected):
        raise _Abort(ParseError(tok.span, tuple(expected), _found(tok)))

    def expect(self, kind, want):
        tok = self.peek()
        if tok.kind != kind:
            self.abort(tok, (want,))
        return self.take()

    def expect_word(self, word):
        tok = self.peek()
        if tok.kind != "ident" or tok.text != word:
            self.abort(tok, (f"'{word}'",))
        return self.take()

    def at_word(self, word):
        tok = self.peek()
        return tok.kind == "ident" and tok.text == word

    def binder_name(self):
        tok = self.peek()
        if tok.kind != "ident" or tok.text in self.keywords:
            self.abort(tok, ("a binder name",))
        return self.take()

    # term construction per lane; stlc and pcf share their core classes

    def mk_var(self, name):
        if self.calculus == "untyped":
            return untyped.Var(name)
        if self.calculus == "systemf":
            return systemf.Var(name)
        return stlc.Var(name)

    def mk_app(self, fun, arg):
        if self.calculus == "untyped":
            return untyped.App(fun, arg)
        if self.calculus == "systemf":
            return systemf.App(fun, arg)
        return stlc.App(fun, arg)

    def mk_abs(self, name, annot, body):
        if self.calculus == "untyped":
            return untyped.Abs(name, body)
        if self.calculus == "systemf":
            return systemf.Abs(name, annot, body)
        return stlc.Abs(name, annot, body)

    # terms

    def term(self):
        tok = self.peek()
        if tok.kind in ("lambda", "biglambda"):
            return self.lam()
        if self.calculus == "pcf" and self.at_word("if"):
            return self.if_term()
        if self.calculus == "stlc" and self.at_word("case"):
            return self.case_term()
        return self.app()

    def lam(self):
        head = self.take()
        big = head.kind == "biglambda"
        if big and self.calculus != "systemf":
            self.abort(head, ("a term",))
        binders = []
        while self.peek().kind == "ident" and self.peek().text not in self.keywords:
            name = self.take()
            annot = None
            aspan = None
            if not big and self.calculus != "untyped" and self.peek().kind == "colon":
                self.take()
                annot, aspan = self.type_()
            binders.append((name.text, annot, aspan))
        if not binders:
            self.abort(self.peek(), ("a binder name",))
        self.expect("dot", "'.'")
        body, bspan = self.term()
        spans = [s for _, _, s in binders if s is not None] + [bspan]
        for name, annot, _ in reversed(binders):
            body = systemf.TyAbs(name, body) if big else self.mk_abs(name, annot, body)
        label = "tyabs" if big else "abs"
        return body, SpanNode(label, _merge(head.span, bspan.span), tuple(spans))

    def if_term(self):
        head = self.take()
        cond, cspan = self.term()
        self.expect_word("then")
        thenb, tspan = self.term()
        self.expect_word("else")
        elseb, espan = self.term()
        node = pcf.If(cond, thenb, elseb)
        return node, SpanNode("if", _merge(head.span, espan.span), (cspan, tspan, espan))

    def case_term(self):
        head = self.take()
        scrut, sspan = self.term()
        self.expect_word("of")
        lvar = self.binder_name()
        lannot = self.branch_annot()
        self.expect("darrow", "'=>'")
        lbranch, lspan = self.term()
        self.expect("bar", "'|'")
        rvar = self.binder_name()
        rannot = self.branch_annot()
        self.expect("darrow", "'=>'")
        rbranch, rspan = self.term()
        node = stlc.Case(scrut, lvar.text, lannot, lbranch, rvar.text, rannot, rbranch)
        return node, SpanNode("case", _merge(head.span, rspan.span), (sspan, lspan, rspan))

    def branch_annot(self):
        if self.peek().kind == "colon":
            self.take()
            annot, _ = self.type_()
            return annot
        return None

    def starts_atom(self, tok):
        if tok.kind == "ident":
            if tok.text not in self.keywords:
                return True
            return tok.text not in ("of", "case", "if", "then", "else")
        if tok.kind == "lparen":
            return True
        if tok.kind in ("langle", "star"):
            return self.calculus in ("stlc", "pcf")
        if tok.kind == "church":
            return self.calculus == "untyped"
        if tok.kind == "number":
            return self.calculus == "pcf"
        return False

    def app(self):
        node, span = self.atom()
        children = [span]
        while True:
            tok = self.peek()
            if self.starts_atom(tok):
                arg, aspan = self.atom()
            elif tok.kind in ("lambda", "biglambda"):
                arg, aspan = self.lam()
            else:
                break
            node = self.mk_app(node, arg)
            children.append(aspan)
            span = SpanNode("app", _merge(children[0].span, aspan.span), tuple(children))
            if aspan.label in ("abs", "tyabs"):
                break
        return node, span if len(children) > 1 else children[0]

    def atom(self):
        tok = self.peek()
        if tok.kind == "ident":
            if tok.text in self.keywords:
                return self.keyword_atom()
            self.take()
            node = self.mk_var(tok.text)
            return self.postfix(node, SpanNode("var", tok.span, ()))
        if tok.kind == "number" and self.calculus == "pcf":
            self.take()
            return pcf.numeral_term(int(tok.text)), SpanNode("numeral", tok.span, ())
        if tok.kind == "church" and self.calculus == "untyped":
            self.take()
            return encodings.church_numeral(int(tok.text[1:])), SpanNode("church", tok.span, ())
        if tok.kind == "lparen":
            self.take()
            node, inner = self.term()
            close = self.expect("rparen", "')'")
            span = SpanNode("paren", _merge(tok.span, close.span), (inner,))
            return self.postfix(node, span)
        if tok.kind == "langle" and self.calculus in ("stlc", "pcf"):
            self.take()
            left, lspan = self.term()
            self.expect("comma", "','")
            right, rspan = self.term()
            close = self.expect("rangle", "'>'")
            node = stlc.Pair(left, right)
            return node, SpanNode("pair", _merge(tok.span, close.span), (lspan, rspan))
        if tok.kind == "star" and self.calculus in ("stlc", "pcf"):
            self.take()
            return stlc.Star(), SpanNode("star", tok.span, ())
        self.abort(tok, ("a term",))

    def keyword_atom(self):
        tok = self.take()
        word = tok.text
        if word in ("pi1", "pi2"):
            operand, ospan = self.atom()
            node = stlc.Proj1(operand) if word == "pi1" else stlc.Proj2(operand)
            return node, SpanNode(word, _merge(tok.span, ospan.span), (ospan,))
        if word in ("in1", "in2"):
            self.expect("lbrack", "'['")
            full, _ = self.type_()
            self.expect("rbrack", "']'")
            operand, ospan = self.atom()
            node = stlc.In1(operand, full) if word == "in1" else stlc.In2(operand, full)
            return node, SpanNode(word, _merge(tok.span, ospan.span), (ospan,))
        if word == "abort":
            self.expect("lbrack", "'['")
            target, _ = self.type_()
            self.expect("rbrack", "']'")
            operand, ospan = self.atom()
            return stlc.Abort(target, operand), SpanNode(word, _merge(tok.span, ospan.span), (ospan,))
        if word in ("succ", "pred", "iszero"):
            operand, ospan = self.atom()
            cls = {"succ": pcf.Succ, "pred": pcf.Pred, "iszero": pcf.IsZero}[word]
            return cls(operand), SpanNode(word, _merge(tok.span, ospan.span), (ospan,))
        if word == "Y":
            operand, ospan = self.atom()
            return pcf.Fix(operand), SpanNode("fix", _merge(tok.span, ospan.span), (ospan,))
        if word == "por":
            left, lspan = self.atom()
            right, rspan = self.atom()
            return pcf.Por(left, right), SpanNode("por", _merge(tok.span, rspan.span), (lspan, rspan))
        if word == "zero":
            return pcf.Zero(), SpanNode("zero", tok.span, ())
        if word == "T":
            return pcf.TrueC(), SpanNode("true", tok.span, ())
        if word == "F":
            return pcf.FalseC(), SpanNode("false", tok.span, ())
        self.abort(tok, ("a term",))

    def postfix(self, node, span):
        while self.calculus == "systemf" and self.peek().kind == "lbrack":
            self.take()
            ty, tyspan = self.type_()
            close = self.expect("rbrack", "']'")
            node = systemf.TyApp(node, ty)
            span = SpanNode("tyapp", _merge(span.span, close.span), (span, tyspan))
        return node, span

    # types

    def type_(self):
        left, lspan = self.prodsum()
        if self.peek().kind == "arrow":
            self.take()
            right, rspan = self.type_()
            node = systemf.Arrow(left, right) if self.calculus == "systemf" else stlc.Arrow(left, right)
            return node, SpanNode("arrow", _merge(lspan.span, rspan.span), (lspan, rspan))
        return left, lspan

    def prodsum(self):
        node, span = self.type_atom()
        while True:
            tok = self.peek()
            if tok.kind == "star" and self.calculus in ("stlc", "pcf"):
                self.take()
                right, rspan = self.type_atom()
                node = stlc.Product(node, right)
                span = SpanNode("product", _merge(span.span, rspan.span), (span, rspan))
            elif tok.kind == "plus" and self.calculus == "stlc":
                self.take()
                right, rspan = self.type_atom()
                node = stlc.Sum(node, right)
                span = SpanNode("sum", _merge(span.span, rspan.span), (span, rspan))
            else:
                return node, span

    def type_atom(self):
        tok = self.peek()
        if tok.kind == "ident":
            self.take()
            if self.calculus == "systemf":
                return systemf.TVar(tok.text), SpanNode("tvar", tok.span, ())
            if self.calculus == "pcf":
                if tok.text == "bool":
                    return pcf.Bool(), SpanNode("bool", tok.span, ())
                if tok.text == "nat":
                    return pcf.Nat(), SpanNode("nat", tok.span, ())
                self.abort(tok, ("a type",))
            return stlc.Base(tok.text), SpanNode("base", tok.span, ())
        if tok.kind == "number" and self.calculus in ("stlc", "pcf"):
            if tok.text == "1":
                self.take()
                return stlc.Unit(), SpanNode("unit", tok.span, ())
            if tok.text == "0" and self.calculus == "stlc":
                self.take()
                return stlc.Void(), SpanNode("void", tok.span, ())
            self.abort(tok, ("a type",))
        if tok.kind == "lparen":
            self.take()
            node, inner = self.type_()
            close = self.expect("rparen", "')'")
            return node, SpanNode("paren", _merge(tok.span, close.span), (inner,))
        if tok.kind == "forall" and self.calculus == "systemf":
            self.take()
            name = self.binder_name()
            self.expect("dot", "'.'")
            body, bspan = self.type_()
            node = systemf.Forall(name.text, body)
            return node, SpanNode("forall", _merge(tok.span, bspan.span), (bspan,))
        self.abort(tok, ("a type",))


def parse_with_spans(text, calculus="untyped"):
    """Parse source text in the given calculus. Returns a (term, span
    tree) pair, or a ParseError describing the first offence."""
    if calculus not in _KEYWORDS:
        raise ValueError(f"unknown calculus: {calculus!r}")
    try:
        p = _Parser(text, calculus)
        term, span = p.term()
        tok = p.peek()
        if tok.kind != "eof":
            p.abort(tok, ("end of input",))
        return term, span
    except _Abort as e:
        return e.error


def parse(text, calculus="untyped"):
    """Parse source text in the given calculus. Returns the term, or a
    ParseError describing the first offence."""
    out = parse_with_spans(text, calculus)
    return out if isinstance(out, ParseError) else out[0]


def parse_cl(text):
    """Parse a combinatory term: S, K and I are primitives, any other
    name is a variable, application is juxtaposition."""
    try:
        p = _Parser(text, "untyped")

        def atom():
            tok = p.peek()
            if tok.kind == "ident":
                p.take()
                if tok.text in ("S", "K", "I"):
                    return combinatory.Prim(tok.text)
                return combinatory.CVar(tok.text)
            if tok.kind == "lparen":
                p.take()
                node = term()
                p.expect("rparen", "')'")
                return node
            p.abort(tok, ("a combinatory term",))

        def term():
            node = atom()
            while p.peek().kind in ("ident", "lparen"):
                node = combinatory.CApp(node, atom())
            return node

        node = term()
        tok = p.peek()
        if tok.kind != "eof":
            p.abort(tok, ("end of input",))
        return node
    except _Abort as e:
        return e.error


def parse_tree(text):
    """Parse a tree literal such as branch(leaf 5, leaf 7). Returns a
    systemf tree value or a ParseError."""
    try:
        p = _Parser(text, "untyped")

        def node():
            tok = p.peek()
            if tok.kind == "ident" and tok.text == "leaf":
                p.take()
                num = p.expect("number", "a leaf label")
                return systemf.Leaf(int(num.text))
            if tok.kind == "ident" and tok.text == "branch":
                p.take()
                p.expect("lparen", "'('")
                left = node()
                p.expect("comma", "','")
                right = node()
                p.expect("rparen", "')'")
                return systemf.Branch(left, right)
            p.abort(tok, ("'leaf' or 'branch'",))

        out = node()
        tok = p.peek()
        if tok.kind != "eof":
            p.abort(tok, ("end of input",))
        return out
    except _Abort as e:
        return e.error


# printers


def untyped_str(t, unicode=False):
    """Minimal-parenthesis rendering of an untyped term. Binders are
    grouped, application is left associative, and a lambda argument in
    final position is left bare, so printing then parsing gives back
    an identical term."""
    lam = "λ" if unicode else "\\"

    def go(t, where, tail):
        if isinstance(t, untyped.Var):
            return t.name
        if isinstance(t, untyped.Abs):
            names = []
            body = t
            while isinstance(body, untyped.Abs):
                names.append(body.binder)
                body = body.body
            s = lam + " ".join(names) + ". " + go(body, "top", True)
            if where == "top" or (where == "arg" and tail):
                return s
            return "(" + s + ")"
        fun = go(t.fun, "fun", False)
        arg = go(t.arg, "arg", tail)
        s = fun + " " + arg
        return "(" + s + ")" if where == "arg" else s

    return go(t, "top", True)


def _ends_open(t):
    if isinstance(t, stlc.Case):
        return True
    if isinstance(t, stlc.Abs):
        return _ends_open(t.body)
    return False


def stlc_str(t, unicode=False):
    """Rendering of an stlc term that parse() inverts. Follows the
    shape of stlc.term_str but keeps case-branch annotations, which
    the round trip would otherwise lose."""
    lam = "λ" if unicode else "\\"

    def ty(a):
        return stlc.type_str(a, unicode)

    def wrap(t, s):
        if isinstance(t, (stlc.Abs, stlc.App, stlc.Case)):
            return "(" + s + ")"
        return s

    def go(t):
        if isinstance(t, stlc.Var):
            return t.name
        if isinstance(t, stlc.Star):
            return "∗" if unicode else "*"
        if isinstance(t, stlc.Abs):
            head = t.binder if t.annot is None else f"{t.binder}:{ty(t.annot)}"
            return f"{lam}{head}. {go(t.body)}"
        if isinstance(t, stlc.App):
            fun = go(t.fun)
            if isinstance(t.fun, (stlc.Abs, stlc.Case)):
                fun = "(" + fun + ")"
            return f"{fun} {wrap(t.arg, go(t.arg))}"
        if isinstance(t, stlc.Pair):
            return f"<{go(t.left)}, {go(t.right)}>"
        if isinstance(t, stlc.Proj1):
            return f"pi1 {wrap(t.target, go(t.target))}"
        if isinstance(t, stlc.Proj2):
            return f"pi2 {wrap(t.target, go(t.target))}"
        if isinstance(t, stlc.In1):
            return f"in1[{ty(t.full)}] {wrap(t.value, go(t.value))}"
        if isinstance(t, stlc.In2):
            return f"in2[{ty(t.full)}] {wrap(t.value, go(t.value))}"
        if isinstance(t, stlc.Abort):
            return f"abort[{ty(t.target)}] {wrap(t.value, go(t.value))}"
        if isinstance(t, stlc.Case):
            left = go(t.lbranch)
            if _ends_open(t.lbranch):
                left = "(" + left + ")"
            lhead = t.lvar if t.lannot is None else f"{t.lvar}:{ty(t.lannot)}"
            rhead = t.rvar if t.rannot is None else f"{t.rvar}:{ty(t.rannot)}"
            return f"case {go(t.scrut)} of {lhead} => {left} | {rhead} => {go(t.rbranch)}"
        raise TypeError(f"not an stlc term: {t!r}")

    return go(t)


def show(term, calculus="untyped", unicode=False):
    """Render a term in the syntax parse() accepts for the calculus.
    Printing then parsing returns an identical term."""
    if calculus == "untyped":
        return untyped_str(term, unicode)
    if calculus == "stlc":
        return stlc_str(term, unicode)
    if calculus == "systemf":
        return systemf.fterm_str(term, unicode)
    if calculus == "pcf":
        return pcf.pcf_term_str(term, unicode)
    raise ValueError(f"unknown calculus: {calculus!r}")


def cl_str(a):
    """Combinatory term as text: primitives by their letter, variables
    by name, application by juxtaposition, left associative."""

    def go(t, arg_pos):
        if isinstance(t, combinatory.Prim):
            return t.tag
        if isinstance(t, combinatory.CVar):
            return t.name
        s = f"{go(t.fun, False)} {go(t.arg, True)}"
        return "(" + s + ")" if arg_pos else s

    return go(a, False)


def tree_str(tree):
    """Tree value as a literal: leaf 5, branch(leaf 5, leaf 7)."""
    if isinstance(tree, systemf.Leaf):
        return f"leaf {tree.label}"
    return f"branch({tree_str(tree.left)}, {tree_str(tree.right)})"


# exporters


def _dot_escape(s):
    return s.replace("\\", "\\\\").replace('"', '\\"')


def export_dot(g, unicode=False):
    """Reduction graph in DOT: one node per vertex in discovery order,
    labelled with the printed term; one edge per reduction, so a pair
    of distinct redexes with equal results shows up twice."""
    out = ["digraph reduction {"]
    for i, v in enumerate(g.vertices):
        out.append(f'  n{i} [label="{_dot_escape(untyped_str(v, unicode))}"];')
    for src, dst, _ in g.edges:
        out.append(f"  n{src} -> n{dst};")
    out.append("}")
    return "\n".join(out) + "\n"


def type_json(a):
    """JSON-ready tree for a type; every node carries its kind and the
    list of its child types."""
    if isinstance(a, stlc.Base):
        return {"kind": "base", "name": a.name, "children": []}
    if isinstance(a, pcf.Bool):
        return {"kind": "bool", "children": []}
    if isinstance(a, pcf.Nat):
        return {"kind": "nat", "children": []}
    if isinstance(a, stlc.Unit):
        return {"kind": "unit", "children": []}
    if isinstance(a, stlc.Void):
        return {"kind": "void", "children": []}
    if isinstance(a, stlc.Arrow):
        return {"kind": "arrow", "children": [type_json(a.dom), type_json(a.cod)]}
    if isinstance(a, stlc.Product):
        return {"kind": "product", "children": [type_json(a.left), type_json(a.right)]}
    if isinstance(a, stlc.Sum):
        return {"kind": "sum", "children": [type_json(a.left), type_json(a.right)]}
    if isinstance(a, infer.TVar):
        return {"kind": "tvar", "name": a.name, "children": []}
    if isinstance(a, systemf.TVar):
        return {"kind": "tvar", "name": a.name, "children": []}
    if isinstance(a, systemf.Arrow):
        return {"kind": "arrow", "children": [type_json(a.dom), type_json(a.cod)]}
    if isinstance(a, systemf.Forall):
        return {"kind": "forall", "binder": a.binder, "children": [type_json(a.body)]}
    raise TypeError(f"not a type: {a!r}")


def term_json(t):
    """JSON-ready tree for a term; every node carries its kind and the
    list of its child terms, with binders and annotations alongside."""
    if isinstance(t, untyped.Var):
        return {"kind": "var", "name": t.name, "children": []}
    if isinstance(t, untyped.Abs):
        return {"kind": "abs", "binder": t.binder, "children": [term_json(t.body)]}
    if isinstance(t, untyped.App):
        return {"kind": "app", "children": [term_json(t.fun), term_json(t.arg)]}
    if isinstance(t, stlc.Var):
        return {"kind": "var", "name": t.name, "children": []}
    if isinstance(t, stlc.Abs):
        annot = None if t.annot is None else type_json(t.annot)
        return {"kind": "abs", "binder": t.binder, "annotation": annot, "children": [term_json(t.body)]}
    if isinstance(t, stlc.App):
        return {"kind": "app", "children": [term_json(t.fun), term_json(t.arg)]}
    if isinstance(t, stlc.Pair):
        return {"kind": "pair", "children": [term_json(t.left), term_json(t.right)]}
    if isinstance(t, stlc.Proj1):
        return {"kind": "proj1", "children": [term_json(t.target)]}
    if isinstance(t, stlc.Proj2):
        return {"kind": "proj2", "children": [term_json(t.target)]}
    if isinstance(t, stlc.Star):
        return {"kind": "star", "children": []}
    if isinstance(t, stlc.In1):
        return {"kind": "in1", "sum": type_json(t.full), "children": [term_json(t.value)]}
    if isinstance(t, stlc.In2):
        return {"kind": "in2", "sum": type_json(t.full), "children": [term_json(t.value)]}
    if isinstance(t, stlc.Abort):
        return {"kind": "abort", "target": type_json(t.target), "children": [term_json(t.value)]}
    if isinstance(t, stlc.Case):
        return {
            "kind": "case",
            "left_binder": t.lvar,
            "left_annotation": None if t.lannot is None else type_json(t.lannot),
            "right_binder": t.rvar,
            "right_annotation": None if t.rannot is None else type_json(t.rannot),
            "children": [term_json(t.scrut), term_json(t.lbranch), term_json(t.rbranch)],
        }
    if isinstance(t, pcf.TrueC):
        return {"kind": "true", "children": []}
    if isinstance(t, pcf.FalseC):
        return {"kind": "false", "children": []}
    if isinstance(t, pcf.Zero):
        return {"kind": "zero", "children": []}
    if isinstance(t, pcf.Succ):
        return {"kind": "succ", "children": [term_json(t.arg)]}
    if isinstance(t, pcf.Pred):
        return {"kind": "pred", "children": [term_json(t.arg)]}
    if isinstance(t, pcf.IsZero):
        return {"kind": "iszero", "children": [term_json(t.arg)]}
    if isinstance(t, pcf.If):
        return {"kind": "if", "children": [term_json(t.cond), term_json(t.then_branch), term_json(t.else_branch)]}
    if isinstance(t, pcf.Fix):
        return {"kind": "fix", "children": [term_json(t.fun)]}
    if isinstance(t, pcf.Por):
        return {"kind": "por", "children": [term_json(t.left), term_json(t.right)]}
    if isinstance(t, systemf.Var):
        return {"kind": "var", "name": t.name, "children": []}
    if isinstance(t, systemf.Abs):
        annot = None if t.annot is None else type_json(t.annot)
        return {"kind": "abs", "binder": t.binder, "annotation": annot, "children": [term_json(t.body)]}
    if isinstance(t, systemf.App):
        return {"kind": "app", "children": [term_json(t.fun), term_json(t.arg)]}
    if isinstance(t, systemf.TyAbs):
        return {"kind": "tyabs", "binder": t.binder, "children": [term_json(t.body)]}
    if isinstance(t, systemf.TyApp):
        return {"kind": "tyapp", "type": type_json(t.arg), "children": [term_json(t.fun)]}
    raise TypeError(f"not a term: {t!r}")


# subcommands


def _fail(msg):
    print(msg, file=sys.stderr)
    return 1


def _exhausted(msg):
    print(msg, file=sys.stderr)
    return 2


def _parse_or_none(text, calculus):
    out = parse(text, calculus)
    if isinstance(out, ParseError):
        print(out, file=sys.stderr)
        return None
    return out


def _cmd_parse(a):
    t = _parse_or_none(a.term, a.calculus)
    if t is None:
        return 1
    if a.json:
        print(json.dumps(term_json(t), indent=2))
    else:
        print(show(t, a.calculus, a.unicode))
    return 0


def _cmd_reduce(a):
    t = _parse_or_none(a.term, "untyped")
    if t is None:
        return 1
    if not a.trace:
        r = untyped.normalize(t, a.mode, a.fuel)
        if isinstance(r, untyped.FuelExhausted):
            return _exhausted(
                f"fuel exhausted after {r.steps} steps; reached {untyped_str(r.last, a.unicode)}"
            )
        print(untyped_str(r, a.unicode))
        return 0
    cur = t
    print(untyped_str(cur, a.unicode))
    spent = 0
    while True:
        r = untyped.normalize(cur, a.mode, 1)
        if isinstance(r, untyped.FuelExhausted):
            spent += 1
            cur = r.last
            print(untyped_str(cur, a.unicode))
            if spent >= a.fuel:
                return _exhausted(f"fuel exhausted after {spent} steps")
            continue
        if r == cur:
            return 0
        print(untyped_str(r, a.unicode))
        return 0


def _cmd_graph(a):
    t = _parse_or_none(a.term, "untyped")
    if t is None:
        return 1
    g = untyped.reduction_graph(t, a.max_vertices, a.max_depth)
    dot = export_dot(g, a.unicode)
    if a.dot:
        with open(a.dot, "w") as fh:
            fh.write(dot)
        print(f"{len(g.vertices)} vertices, {len(g.edges)} edges")
    else:
        sys.stdout.write(dot)
    if g.truncated:
        return _exhausted(
            f"graph truncated at {a.max_vertices} vertices or depth {a.max_depth}"
        )
    return 0


def _cmd_check(a):
    t = _parse_or_none(a.term, a.calculus)
    if t is None:
        return 1
    ctx = stlc.Context()
    if a.calculus == "stlc":
        t = stlc.annotate_cases(ctx, t)
        if isinstance(t, stlc.TypeFailure):
            return _fail(f"type error: {t}")
        r = stlc.typecheck(ctx, t)
        if isinstance(r, stlc.TypeFailure):
            return _fail(f"type error: {r}")
        if a.derivation or a.json:
            d = stlc.derivation(ctx, t)
            if a.json:
                print(stlc.derivation_json_str(d, a.unicode))
            else:
                print(stlc.render_derivation(d, a.unicode))
        else:
            print(stlc.type_str(r, a.unicode))
        return 0
    if a.derivation or a.json:
        return _fail("derivations are only rendered in the stlc lane")
    if a.calculus == "systemf":
        r = systemf.ftypecheck(systemf.Context(), t)
        if isinstance(r, systemf.TypeFailure):
            return _fail(f"type error: {r}")
        print(systemf.ftype_str(r, a.unicode))
        return 0
    r = pcf.pcf_typecheck(ctx, t)
    if isinstance(r, stlc.TypeFailure):
        return _fail(f"type error: {r}")
    print(pcf.ptype_str(r, a.unicode))
    return 0


def _infer_fragment_ok(t):
    if isinstance(t, stlc.Var):
        return True
    if isinstance(t, stlc.Abs):
        return _infer_fragment_ok(t.body)
    if isinstance(t, stlc.App):
        return _infer_fragment_ok(t.fun) and _infer_fragment_ok(t.arg)
    if isinstance(t, stlc.Pair):
        return _infer_fragment_ok(t.left) and _infer_fragment_ok(t.right)
    if isinstance(t, (stlc.Proj1, stlc.Proj2)):
        return _infer_fragment_ok(t.target)
    return isinstance(t, stlc.Star)


def _free_in_order(t, bound=frozenset()):
    if isinstance(t, stlc.Var):
        return [] if t.name in bound else [t.name]
    if isinstance(t, stlc.Abs):
        return _free_in_order(t.body, bound | {t.binder})
    if isinstance(t, stlc.App):
        return _free_in_order(t.fun, bound) + _free_in_order(t.arg, bound)
    if isinstance(t, stlc.Pair):
        return _free_in_order(t.left, bound) + _free_in_order(t.right, bound)
    if isinstance(t, (stlc.Proj1, stlc.Proj2)):
        return _free_in_order(t.target, bound)
    return []


def _cmd_infer(a):
    t = _parse_or_none(a.term, "stlc")
    if t is None:
        return 1
    if not _infer_fragment_ok(t):
        return _fail("inference covers the arrow, product and unit fragment")
    if a.verbose:
        names = []
        for n in _free_in_order(t):
            if n not in names:
                names.append(n)
        ctx = infer.Context.of(*((n, infer.TVar(f"g{i}")) for i, n in enumerate(names)))
        goal = infer.TVar(f"g{len(names)}")
        trace = []
        out = infer.typeinfer(ctx, t, goal, trace=trace)
        for step in trace:
            left = infer.template_str(step.left, a.unicode)
            right = infer.template_str(step.right, a.unicode)
            print(f"clause {step.clause}: {left} ~ {right}")
        if isinstance(out, infer.InferFailure):
            return _fail(f"untypable: {out}")
        ty = infer.apply_subst(out, goal)
        print(infer.template_str(infer.rename_for_display([ty])[0], a.unicode))
        return 0
    r = infer.principal_type(t)
    if isinstance(r, infer.Untypable):
        return _fail(f"untypable: {r.cause}")
    ty, _assignment = r
    print(infer.template_str(ty, a.unicode))
    return 0


def _cmd_sk(a):
    t = _parse_or_none(a.term, "untyped")
    if t is None:
        return 1
    print(cl_str(combinatory.to_combinatory(t)))
    return 0


def _cmd_unsk(a):
    c = parse_cl(a.term)
    if isinstance(c, ParseError):
        return _fail(str(c))
    print(untyped_str(combinatory.to_lambda(c), a.unicode))
    return 0


def _cmd_encode(a):
    if a.kind == "numeral":
        try:
            n = int(a.value)
        except ValueError:
            return _fail(f"not a numeral: {a.value!r}")
        if n < 0:
            return _fail("numerals start at zero")
        if a.calculus == "systemf":
            print(systemf.fterm_str(systemf.numeral(n), a.unicode))
        else:
            print(untyped_str(encodings.church_numeral(n), a.unicode))
        return 0
    if a.kind == "bool":
        if a.value not in ("T", "F", "true", "false"):
            return _fail("booleans are written T or F")
        value = a.value in ("T", "true")
        if a.calculus == "systemf":
            print(systemf.fterm_str(systemf.f_encodings()["T" if value else "F"], a.unicode))
        else:
            print(untyped_str(encodings.church_bool(value), a.unicode))
        return 0
    if a.calculus != "systemf":
        return _fail("trees encode in the systemf calculus; pass --calculus systemf")
    tree = parse_tree(a.value)
    if isinstance(tree, ParseError):
        return _fail(str(tree))
    print(systemf.fterm_str(systemf.encode_tree(tree), a.unicode))
    return 0


def _cmd_decode(a):
    if a.calculus == "systemf":
        t = _parse_or_none(a.term, "systemf")
        if t is None:
            return 1
        if a.kind == "numeral":
            r = systemf.classify_nat(t)
            if isinstance(r, systemf.NotNat):
                return _fail(f"not a numeral: {r.reason}")
            print(r)
            return 0
        if a.kind == "bool":
            r = systemf.classify_bool(t)
            if isinstance(r, systemf.NotBool):
                return _fail(f"not a boolean: {r.reason}")
            print("T" if r else "F")
            return 0
        r = systemf.decode_tree(t)
        if isinstance(r, systemf.NotTree):
            return _fail(f"not a tree: {r.reason}")
        print(tree_str(r))
        return 0
    t = _parse_or_none(a.term, "untyped")
    if t is None:
        return 1
    if a.kind == "numeral":
        r = encodings.decode_numeral(t)
        if isinstance(r, encodings.NotANumeral):
            if r.fuel_exhausted:
                return _exhausted("fuel exhausted while decoding")
            return _fail("the term does not reduce to a numeral")
        print(r)
        return 0
    if a.kind == "bool":
        r = encodings.decode_bool(t)
        if r is None:
            return _fail("the term does not reduce to a boolean")
        print("T" if r else "F")
        return 0
    return _fail("trees decode in the systemf calculus; pass --calculus systemf")


def _cmd_eval(a):
    t = _parse_or_none(a.term, "pcf")
    if t is None:
        return 1
    ty = pcf.pcf_typecheck(stlc.Context(), t)
    if isinstance(ty, stlc.TypeFailure):
        return _fail(f"type error: {ty}")
    por = a.dialect == "parallel"
    fuel = a.fuel if a.fuel is not None else (16 if a.semantics == "denot" else 1000)
    if a.semantics == "denot":
        try:
            v = pcfdenot.denote(stlc.Context(), t, {}, fuel)
        except RecursionError:
            return _exhausted("the unfolding budget is too deep to evaluate; lower --fuel")
        print(pcfdenot.dom_str(v, a.unicode))
        return 0
    if a.semantics == "big":
        if a.trace:
            return _fail("--trace needs --semantics small")
        r = pcf.por_eval(t, fuel) if por else pcf.eval_big(t, fuel)
    elif a.trace:
        cur = t
        print(pcf.pcf_term_str(cur, a.unicode))
        for _ in range(fuel):
            r = pcf.small_step(cur, por)
            if isinstance(r, pcf.IsValue):
                return 0
            if isinstance(r, (pcf.Stuck, pcf.NoRule)):
                return _fail(f"stuck at {pcf.pcf_term_str(r.term, a.unicode)}")
            cur = r
            print(pcf.pcf_term_str(cur, a.unicode))
        return _exhausted(f"fuel exhausted after {fuel} steps")
    else:
        r = pcf.eval_small(t, fuel, por)
    if isinstance(r, pcf.FuelExhausted):
        return _exhausted(f"fuel exhausted after {r.steps} steps")
    if isinstance(r, (pcf.Stuck, pcf.NoRule)):
        return _fail(f"stuck at {pcf.pcf_term_str(r.term, a.unicode)}")
    value = r[0] if isinstance(r, tuple) else r
    print(pcf.pcf_term_str(value, a.unicode))
    return 0


def _flat_poset(name):
    if name == "bool":
        return pcfdenot.flat_bool()
    if name.startswith("nat") and name[3:].isdigit():
        return pcfdenot.flat_nat(int(name[3:]))
    return None


def _cmd_model(a):
    if a.poset:
        words = a.terms
        if len(words) == 2 and words[0] == "show":
            p = _flat_poset(words[1])
            if p is None:
                return _fail("posets are named bool or natN, as in nat3")
            print(f"elements: {', '.join(str(e) for e in p.elements)}")
            print(f"bottom: {p.bottom()}")
            return 0
        if len(words) == 3 and words[0] == "maps":
            p, q = _flat_poset(words[1]), _flat_poset(words[2])
            if p is None or q is None:
                return _fail("posets are named bool or natN, as in nat3")
            try:
                print(len(pcfdenot.monotone_maps(p, q)))
            except ValueError as e:
                return _fail(str(e))
            return 0
        return _fail("poset utilities: --poset show P, or --poset maps P Q")
    if not 1 <= len(a.terms) <= 2:
        return _fail("pass one term to tabulate or two terms to separate")
    ctx = stlc.Context()
    terms = []
    types = []
    for src in a.terms:
        t = _parse_or_none(src, "stlc")
        if t is None:
            return 1
        t = stlc.annotate_cases(ctx, t)
        if isinstance(t, stlc.TypeFailure):
            return _fail(f"type error: {t}")
        ty = stlc.typecheck(ctx, t)
        if isinstance(ty, stlc.TypeFailure):
            return _fail(f"type error: {ty}")
        terms.append(t)
        types.append(ty)
    try:
        if len(terms) == 1:
            ty = types[0]
            print(f"type: {stlc.type_str(ty, a.unicode)}")
            size = models.interp_size(ty, a.base_size)
            print(f"elements at base size {a.base_size}: {size}")
            if a.json:
                d = models.table_json(ctx, terms[0], ty, a.base_size)
                print(json.dumps(d, separators=(",", ":")))
            return 0
        if types[0] != types[1]:
            return _fail(
                f"the terms have different types: {stlc.type_str(types[0])} and {stlc.type_str(types[1])}"
            )
        out = models.separate(terms[0], terms[1], ctx, types[0], a.base_size)
        if isinstance(out, models.NotSeparated):
            print(f"not separated up to base size {out.max_base}")
        else:
            sizes = ", ".join(f"{k}={v}" for k, v in sorted(out.items()))
            print(f"separated at base sizes {sizes}")
        return 0
    except models.ModelTooLarge as e:
        return _exhausted(str(e))


def _substitute(calculus, t, name, replacement):
    if calculus == "untyped":
        return untyped.subst(t, replacement, name)
    if calculus == "systemf":
        return systemf.fsubst(t, replacement, name)
    if calculus == "pcf":
        return pcf.psubst(t, replacement, name)
    return stlc.tsubst(t, replacement, name)


def _repl_line(calculus, t, fuel, unicode):
    ctx = stlc.Context()
    if calculus == "untyped":
        r = untyped.normalize(t, "beta", fuel)
        if isinstance(r, untyped.FuelExhausted):
            return f"fuel exhausted after {r.steps} steps"
        return untyped_str(r, unicode)
    if calculus == "stlc":
        t = stlc.annotate_cases(ctx, t)
        if isinstance(t, stlc.TypeFailure):
            return f"type error: {t}"
        r = stlc.typecheck(ctx, t)
        if isinstance(r, stlc.TypeFailure):
            return f"type error: {r}"
        return stlc.type_str(r, unicode)
    if calculus == "systemf":
        r = systemf.ftypecheck(systemf.Context(), t)
        if isinstance(r, systemf.TypeFailure):
            return f"type error: {r}"
        return systemf.ftype_str(r, unicode)
    ty = pcf.pcf_typecheck(ctx, t)
    if isinstance(ty, stlc.TypeFailure):
        return f"type error: {ty}"
    r = pcf.eval_big(t, fuel)
    if isinstance(r, pcf.FuelExhausted):
        return f"fuel exhausted after {r.steps} steps"
    if isinstance(r, (pcf.Stuck, pcf.NoRule)):
        return f"stuck at {pcf.pcf_term_str(r.term, unicode)}"
    return pcf.pcf_term_str(r, unicode)


def _cmd_repl(a):
    calculus = a.calculus
    bindings = []
    interactive = sys.stdin.isatty()
    while True:
        if interactive:
            sys.stdout.write(f"{calculus}> ")
            sys.stdout.flush()
        line = sys.stdin.readline()
        if not line:
            return 0
        line = line.strip()
        if not line:
            continue
        if line in (":q", ":quit"):
            return 0
        if line.startswith(":calculus"):
            parts = line.split()
            if len(parts) == 2 and parts[1] in CALCULI:
                calculus = parts[1]
                bindings.clear()
                print(f"calculus set to {calculus}; bindings cleared")
            else:
                print(f"usage: :calculus {{{', '.join(CALCULI)}}}")
            continue
        if line.startswith(":"):
            print(f"unknown command {line.split()[0]}; try :q or :calculus NAME")
            continue
        if line.startswith("let "):
            name, eq, src = line[4:].partition("=")
            name = name.strip()
            if not eq or not name.isidentifier():
                print("usage: let NAME = TERM")
                continue
            t = parse(src.strip(), calculus)
            if isinstance(t, ParseError):
                print(t)
                continue
            for bname, bterm in bindings:
                t = _substitute(calculus, t, bname, bterm)
            bindings.append((name, t))
            print(f"{name} bound")
            continue
        t = parse(line, calculus)
        if isinstance(t, ParseError):
            print(t)
            continue
        for bname, bterm in bindings:
            t = _substitute(calculus, t, bname, bterm)
        print(_repl_line(calculus, t, a.fuel, a.unicode))


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits 2 on bad usage, which collides with the budget code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def build_arg_parser():
    ap = _ArgumentParser(prog="calculi", description="a lambda calculus workbench")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, help=help_)
        p.set_defaults(func=fn)
        p.add_argument("--unicode", action="store_true", help="print Greek letters and arrows")
        return p

    p = add("parse", _cmd_parse, "parse a term and print it back")
    p.add_argument("term")
    p.add_argument("--calculus", choices=CALCULI, default="untyped")
    p.add_argument("--json", action="store_true", help="print the tree as JSON")

    p = add("reduce", _cmd_reduce, "normalize an untyped term")
    p.add_argument("term")
    p.add_argument("--mode", choices=("beta", "beta-eta"), default="beta")
    p.add_argument("--fuel", type=int, default=1000)
    p.add_argument("--trace", action="store_true", help="print every step")

    p = add("graph", _cmd_graph, "the reduction graph of an untyped term")
    p.add_argument("term")
    p.add_argument("--max-vertices", type=int, default=200)
    p.add_argument("--max-depth", type=int, default=100)
    p.add_argument("--dot", metavar="FILE", help="write DOT here instead of stdout")

    p = add("check", _cmd_check, "typecheck a term")
    p.add_argument("term")
    p.add_argument("--calculus", choices=("stlc", "systemf", "pcf"), default="stlc")
    p.add_argument("--derivation", action="store_true", help="print the typing derivation")
    p.add_argument("--json", action="store_true", help="print the derivation as JSON")

    p = add("infer", _cmd_infer, "infer the principal type of a bare term")
    p.add_argument("term")
    p.add_argument("-v", "--verbose", action="store_true", help="print the unification trace")

    p = add("sk", _cmd_sk, "translate a lambda term to combinators")
    p.add_argument("term")

    p = add("unsk", _cmd_unsk, "translate a combinatory term to a lambda term")
    p.add_argument("term")

    p = add("encode", _cmd_encode, "build an encoded value")
    p.add_argument("kind", choices=("numeral", "bool", "tree"))
    p.add_argument("value")
    p.add_argument("--calculus", choices=("untyped", "systemf"), default="untyped")

    p = add("decode", _cmd_decode, "read a value back from an encoding")
    p.add_argument("kind", choices=("numeral", "bool", "tree"))
    p.add_argument("term")
    p.add_argument("--calculus", choices=("untyped", "systemf"), default="untyped")

    p = add("eval", _cmd_eval, "evaluate a PCF program")
    p.add_argument("term")
    p.add_argument("--semantics", choices=("small", "big", "denot"), default="small")
    p.add_argument("--fuel", type=int, default=None, help="step budget; 1000, or 16 for denot")
    p.add_argument("--dialect", choices=("pcf", "parallel"), default="pcf")
    p.add_argument("--trace", action="store_true", help="print every step (small only)")

    p = add("model", _cmd_model, "finite full set models, and flat posets")
    p.add_argument("terms", nargs="*")
    p.add_argument("--base-size", type=int, default=2)
    p.add_argument("--json", action="store_true", help="print the judgment table as JSON")
    p.add_argument("--poset", action="store_true", help="poset utilities: show P, maps P Q")

    p = add("repl", _cmd_repl, "interactive loop with let bindings")
    p.add_argument("--calculus", choices=CALCULI, default="untyped")
    p.add_argument("--fuel", type=int, default=1000)

    return ap


def main(argv=None):
    args = build_arg_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
