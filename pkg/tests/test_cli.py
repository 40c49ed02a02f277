"""Tests for the concrete syntax layer and the command line front end."""
from __future__ import annotations

import io
import sys

import pytest

from corpus import pcf_corpus, stlc_corpus, systemf_corpus, untyped_corpus
from calculi import cli, stlc
from calculi.cli import (
    ParseError,
    cl_str,
    export_dot,
    parse,
    parse_cl,
    parse_tree,
    parse_with_spans,
    show,
    stlc_str,
    term_json,
    tree_str,
    type_json,
    untyped_str,
)
from calculi.combinatory import CApp, CVar, Prim, to_combinatory
from calculi.encodings import church_numeral
from calculi.pcf import Succ, Zero, pcf_term_str
from calculi.systemf import Branch, Leaf, fterm_str
from calculi.untyped import Abs, App, Var, reduction_graph


def apps(*terms):
    out = terms[0]
    for t in terms[1:]:
        out = App(out, t)
    return out


def run(argv, stdin=None):
    """Drive main() once and capture the exit code and both streams."""
    out, err = io.StringIO(), io.StringIO()
    saved = sys.stdout, sys.stderr, sys.stdin
    sys.stdout, sys.stderr = out, err
    if stdin is not None:
        sys.stdin = io.StringIO(stdin)
    try:
        code = cli.main(argv)
    except SystemExit as exc:
        code = exc.code
    finally:
        sys.stdout, sys.stderr, sys.stdin = saved
    return code, out.getvalue(), err.getvalue()


X, Y, Z = Var("x"), Var("y"), Var("z")


# ----------------------------------------------------------------- parsing


def test_application_associates_left():
    assert parse("x x x x") == apps(X, X, X, X)


def test_grouped_binders_expand():
    assert parse(r"\x y z. x z (y z)") == Abs(
        "x", Abs("y", Abs("z", apps(X, Z, App(Y, Z))))
    )


def test_body_extends_right():
    assert parse(r"\x. x \y. y") == Abs("x", App(X, Abs("y", Y)))


def test_trailing_lambda_is_the_last_argument():
    assert parse(r"f x \y. y") == apps(Var("f"), X, Abs("y", Y))


def test_church_literal():
    assert parse("#2") == church_numeral(2)


def test_pcf_numeral_literal():
    assert parse("3", "pcf") == Succ(Succ(Succ(Zero())))


def test_keywords_are_gated_per_calculus():
    # pi1 is an operator in stlc but a plain name in the untyped lane
    assert parse("pi1 x", "untyped") == App(Var("pi1"), X)
    got = parse("pi1 <x, y>", "stlc")
    assert got == stlc.Proj1(stlc.Pair(stlc.Var("x"), stlc.Var("y")))
    assert isinstance(parse("<x, y>", "untyped"), ParseError)


def test_unicode_spellings_accepted():
    assert parse("λx. x") == Abs("x", X)
    assert parse("∗", "stlc") == stlc.Star()
    annotated = parse("λp:A × B. p", "stlc")
    assert annotated == stlc.Abs(
        "p", stlc.Product(stlc.Base("A"), stlc.Base("B")), stlc.Var("p")
    )


def test_systemf_syntax():
    got = parse(r"/\a. \x:a. x [forall b. b] x", "systemf")
    assert fterm_str(got) == r"/\a. \x:a. x [forall b. b] x"


# ------------------------------------------------------------ parse errors


def test_error_is_returned_not_raised():
    got = parse("(x")
    assert isinstance(got, ParseError)


@pytest.mark.parametrize(
    "src,message",
    [
        ("", "parse error at line 1, column 1: expected a term, found end of input"),
        ("(x", "parse error at line 1, column 3: expected ')', found end of input"),
        (r"\x", "parse error at line 1, column 3: expected '.', found end of input"),
        ("<x, y>", "parse error at line 1, column 1: expected a term, found '<'"),
        ("x )", "parse error at line 1, column 3: expected end of input, found ')'"),
    ],
)
def test_error_messages_are_frozen(src, message):
    assert str(parse(src)) == message


def test_errors_are_reproducible():
    first, second = parse("(x"), parse("(x")
    assert first == second
    assert str(first) == str(second)


# ----------------------------------------------- notation conventions


def test_minimal_parens_nested_binders():
    t = Abs("x", Abs("y", Abs("z", apps(X, Z, App(Y, Z)))))
    assert untyped_str(t) == r"\x y z. x z (y z)"
    assert untyped_str(t, unicode=True).replace(" ", "") == "λxyz.xz(yz)"


def test_minimal_parens_application_tree():
    a, b, c, d = Var("a"), Var("b"), Var("c"), Var("d")
    e, f, g, h = Var("e"), Var("f"), Var("g"), Var("h")
    t = App(App(App(a, b), App(c, d)), App(App(e, f), App(g, h)))
    assert untyped_str(t, unicode=True).replace(" ", "") == "ab(cd)(ef(gh))"


def test_minimal_parens_inner_redex_chain():
    body = apps(Abs("y", App(Y, X)), Abs("v", Var("v")), Z, Var("u"))
    t = App(Abs("x", body), Abs("w", Var("w")))
    assert untyped_str(t, unicode=True).replace(" ", "") == "(λx.(λy.yx)(λv.v)zu)λw.w"


def test_identity_prints_bare():
    assert untyped_str(Abs("x", X)) == r"\x. x"
    assert untyped_str(Abs("x", X), unicode=True) == "λx. x"


def test_parens_restored_from_convention_forms():
    assert parse("x x x x") == apps(X, X, X, X)
    assert parse(r"\x. x \y. y") == Abs("x", App(X, Abs("y", Y)))
    assert parse(r"\x. (x \y. y x x) x") == Abs(
        "x", App(App(X, Abs("y", apps(Y, X, X))), X)
    )


def test_show_dispatches_per_calculus():
    u = parse(r"\x. x y")
    assert show(u, "untyped") == untyped_str(u)
    s = parse(r"\s:A + A. case s of l:A => l | r:A => r", "stlc")
    assert show(s, "stlc") == stlc_str(s)
    f = parse(r"/\a. \x:a. x", "systemf")
    assert show(f, "systemf") == fterm_str(f)
    p = parse("succ (pred 1)", "pcf")
    assert show(p, "pcf") == pcf_term_str(p)


def test_stlc_printer_keeps_case_annotations():
    src = r"\s:A + A. case s of l:A => l | r:A => r"
    t = parse(src, "stlc")
    assert stlc_str(t) == src


# ------------------------------------------------------------------ spans


def test_span_of_unicode_input_counts_bytes():
    _, tree = parse_with_spans("λx. x")
    assert tree.label == "abs"
    assert (tree.span.start, tree.span.end) == (0, 6)
    assert (tree.span.line, tree.span.column) == (1, 1)
    (var,) = tree.children
    assert (var.span.start, var.span.end) == (5, 6)
    assert var.span.column == 5


def assert_nested(node):
    assert node.span.start <= node.span.end
    for child in node.children:
        assert node.span.start <= child.span.start
        assert child.span.end <= node.span.end
        assert_nested(child)


@pytest.mark.parametrize(
    "src,calculus",
    [
        (r"\x y. x (y x)", "untyped"),
        (r"(\x. x x) \y. y z", "untyped"),
        (r"\s:A + 1. case s of l:A => l | r:1 => x", "stlc"),
        (r"<pi1 p, \u:1. *>", "stlc"),
        (r"/\a. \f:forall b. b -> a. f [a] x", "systemf"),
        (r"if iszero (pred 2) then <1, T> else <zero, por F F>", "pcf"),
    ],
)
def test_spans_nest_with_the_tree(src, calculus):
    term, tree = parse_with_spans(src, calculus)
    assert not isinstance(term, ParseError)
    assert_nested(tree)
    assert tree.span.end <= len(src.encode("utf-8"))


# ------------------------------------------------------------ round trips


def test_untyped_round_trip():
    for t in untyped_corpus(11, 300):
        for unicode in (False, True):
            assert parse(untyped_str(t, unicode), "untyped") == t


def test_stlc_round_trip():
    for t, _ in stlc_corpus(12, 250):
        for unicode in (False, True):
            assert parse(stlc_str(t, unicode), "stlc") == t


def test_systemf_round_trip():
    for t, _ in systemf_corpus(13, 200):
        for unicode in (False, True):
            assert parse(fterm_str(t, unicode), "systemf") == t


def test_pcf_round_trip():
    for t, _ in pcf_corpus(14, 200):
        for unicode in (False, True):
            assert parse(pcf_term_str(t, unicode), "pcf") == t


# ------------------------------------------------------- combinator syntax


def test_cl_parse_structure():
    got = parse_cl("S K K x")
    assert got == CApp(CApp(CApp(Prim("S"), Prim("K")), Prim("K")), CVar("x"))


def test_cl_right_nesting_parenthesized():
    t = CApp(Prim("K"), CApp(Prim("K"), Prim("I")))
    assert cl_str(t) == "K (K I)"
    assert parse_cl(cl_str(t)) == t


def test_cl_round_trip_over_translations():
    for t in untyped_corpus(7, 200):
        c = to_combinatory(t)
        assert parse_cl(cl_str(c)) == c


def test_cl_parse_error():
    assert isinstance(parse_cl("S ("), ParseError)


# ------------------------------------------------------------------- trees


def test_tree_display():
    t = Branch(Leaf(5), Branch(Leaf(8), Leaf(7)))
    assert tree_str(t) == "branch(leaf 5, branch(leaf 8, leaf 7))"
    assert parse_tree(tree_str(t)) == t


def test_tree_parse_error():
    assert isinstance(parse_tree("leaf x"), ParseError)
    assert isinstance(parse_tree("branch(leaf 1)"), ParseError)


# --------------------------------------------------------------- exporters


def test_dot_parallel_edges():
    i = Abs("x", X)
    g = reduction_graph(App(i, App(i, X)))
    assert export_dot(g) == (
        "digraph reduction {\n"
        '  n0 [label="(\\\\x. x) ((\\\\x. x) x)"];\n'
        '  n1 [label="(\\\\x. x) x"];\n'
        '  n2 [label="x"];\n'
        "  n0 -> n1;\n"
        "  n0 -> n1;\n"
        "  n1 -> n2;\n"
        "}\n"
    )


def test_dot_self_loop():
    w = Abs("x", App(X, X))
    g = reduction_graph(App(w, w))
    assert export_dot(g) == (
        "digraph reduction {\n"
        '  n0 [label="(\\\\x. x x) \\\\x. x x"];\n'
        "  n0 -> n0;\n"
        "}\n"
    )


def test_dot_normal_form_has_no_edges():
    g = reduction_graph(X)
    assert export_dot(g) == 'digraph reduction {\n  n0 [label="x"];\n}\n'


def test_dot_is_byte_stable():
    t = parse(r"(\x. x x) ((\y. y) z)")
    assert export_dot(reduction_graph(t)) == export_dot(reduction_graph(t))


def test_term_json_shape():
    assert term_json(parse(r"\x. x y")) == {
        "kind": "abs",
        "binder": "x",
        "children": [
            {
                "kind": "app",
                "children": [
                    {"kind": "var", "name": "x", "children": []},
                    {"kind": "var", "name": "y", "children": []},
                ],
            }
        ],
    }


def test_type_json_shape():
    assert type_json(stlc.Arrow(stlc.Base("A"), stlc.Base("B"))) == {
        "kind": "arrow",
        "children": [
            {"kind": "base", "name": "A", "children": []},
            {"kind": "base", "name": "B", "children": []},
        ],
    }
    assert type_json(stlc.Sum(stlc.Unit(), stlc.Void())) == {
        "kind": "sum",
        "children": [
            {"kind": "unit", "children": []},
            {"kind": "void", "children": []},
        ],
    }


# ----------------------------------------------------------- subcommands


def test_cmd_parse_echoes_normal_forms_of_syntax():
    assert run(["parse", r"\x y z. x z (y z)"]) == (0, "\\x y z. x z (y z)\n", "")
    assert run(["parse", "x x x x"]) == (0, "x x x x\n", "")
    assert run(["parse", r"\x. x \y. y"]) == (0, "\\x. x \\y. y\n", "")


def test_cmd_parse_json():
    code, out, err = run(["parse", "--json", r"\x. x"])
    assert (code, err) == (0, "")
    assert out == (
        "{\n"
        '  "kind": "abs",\n'
        '  "binder": "x",\n'
        '  "children": [\n'
        "    {\n"
        '      "kind": "var",\n'
        '      "name": "x",\n'
        '      "children": []\n'
        "    }\n"
        "  ]\n"
        "}\n"
    )


def test_cmd_parse_rejects_bad_input():
    code, out, err = run(["parse", "(x"])
    assert code == 1
    assert out == ""
    assert err == "parse error at line 1, column 3: expected ')', found end of input\n"


def test_cmd_reduce():
    assert run(["reduce", "--mode", "beta", r"(\x.y)((\z.z z)(\w.w))"]) == (0, "y\n", "")


def test_cmd_reduce_trace():
    code, out, err = run(["reduce", "--trace", r"(\x.y)((\z.z z)(\w.w))"])
    assert (code, err) == (0, "")
    assert out == "(\\x. y) ((\\z. z z) \\w. w)\ny\n"


def test_cmd_reduce_out_of_fuel():
    code, out, err = run(["reduce", "--fuel", "5", r"(\x.x x)(\x.x x)"])
    assert code == 2
    assert err == "fuel exhausted after 5 steps; reached (\\x. x x) \\x. x x\n"


def test_cmd_graph_stdout():
    code, out, err = run(["graph", r"(\x.x)((\x.x) x)"])
    assert (code, err) == (0, "")
    assert out.count("n0 -> n1;") == 2
    assert "n1 -> n2;" in out


def test_cmd_graph_writes_dot_file(tmp_path):
    target = tmp_path / "g.dot"
    code, out, err = run(["graph", "--dot", str(target), r"(\x.x)((\x.x) x)"])
    assert (code, out, err) == (0, "3 vertices, 3 edges\n", "")
    body = target.read_text()
    assert body.startswith("digraph reduction {\n")
    assert body.count("->") == 3


def test_cmd_graph_truncation_exits_2():
    code, out, err = run(["graph", "--max-vertices", "2", r"(\x.x)((\x.x)((\x.x) x))"])
    assert code == 2
    assert out.startswith("digraph reduction {\n")
    assert err == "graph truncated at 2 vertices or depth 100\n"


def test_cmd_check_stlc():
    assert run(["check", r"\x:a. x"]) == (0, "a -> a\n", "")
    assert run(["check", r"\s:A + A. case s of l => l | r => r"]) == (
        0,
        "A + A -> A\n",
        "",
    )


def test_cmd_check_derivation():
    code, out, err = run(["check", "--derivation", r"\x:a. x"])
    assert (code, err) == (0, "")
    assert out == "(->I) |- \\x:a. x : a -> a\n  (ax) x:a |- x : a\n"


def test_cmd_check_derivation_json():
    code, out, err = run(["check", "--json", r"\x:a. x"])
    assert (code, err) == (0, "")
    assert out == (
        "{\n"
        '  "rule": "->I",\n'
        '  "judgment": "|- \\\\x:a. x : a -> a",\n'
        '  "children": [\n'
        "    {\n"
        '      "rule": "ax",\n'
        '      "judgment": "x:a |- x : a",\n'
        '      "children": []\n'
        "    }\n"
        "  ]\n"
        "}\n"
    )


def test_cmd_check_other_lanes():
    assert run(["check", "--calculus", "systemf", r"/\a. \x:a. x"]) == (
        0,
        "forall a. a -> a\n",
        "",
    )
    assert run(["check", "--calculus", "pcf", r"\f:nat -> nat. Y f"]) == (
        0,
        "(nat -> nat) -> nat\n",
        "",
    )
    code, _, err = run(["check", "--calculus", "systemf", "--derivation", r"\x:a. x"])
    assert code == 1
    assert err == "derivations are only rendered in the stlc lane\n"


def test_cmd_check_type_error_exits_1():
    code, out, err = run(["check", r"\x:a. x x"])
    assert code == 1
    assert err == "type error: applied a non-function of type a (rule app, position.0)\n"


def test_cmd_infer():
    assert run(["infer", r"\x.\y. y x"]) == (0, "A -> (A -> B) -> B\n", "")


def test_cmd_infer_trace():
    code, out, err = run(["infer", "-v", r"\x.\y. y x"])
    assert (code, err) == (0, "")
    assert out == (
        "clause 2: g0 ~ T0 -> T1\n"
        "clause 2: T1 ~ T2 -> T3\n"
        "clause 2: T2 ~ T4 -> T3\n"
        "clause 2: T0 ~ T4\n"
        "A -> (A -> B) -> B\n"
    )


def test_cmd_sk_unsk():
    assert run(["sk", r"\x.\y. x"]) == (0, "S (K K) (S K K)\n", "")
    assert run(["unsk", "S K K"]) == (
        0,
        "(\\x y z. x z (y z)) (\\x y. x) \\x y. x\n",
        "",
    )


def test_cmd_encode_decode_numerals():
    assert run(["encode", "numeral", "3"]) == (0, "\\f x. f (f (f x))\n", "")
    assert run(["decode", "numeral", r"\f.\x. f (f x)"]) == (0, "2\n", "")


def test_cmd_encode_decode_booleans():
    assert run(["encode", "bool", "T"]) == (0, "\\x y. x\n", "")
    assert run(["decode", "bool", r"\x.\y. y"]) == (0, "F\n", "")
    code, _, _ = run(["encode", "bool", "maybe"])
    assert code == 1


def test_cmd_decode_diverging_numeral_exits_2():
    code, out, err = run(["decode", "numeral", r"(\x. x x)(\x. x x)"])
    assert code == 2
    assert err == "fuel exhausted while decoding\n"


def test_cmd_systemf_tree_codec():
    display = "branch(leaf 5, branch(leaf 8, leaf 7))"
    code, encoded, err = run(["encode", "--calculus", "systemf", "tree", display])
    assert (code, err) == (0, "")
    assert run(["decode", "--calculus", "systemf", "tree", encoded.strip()]) == (
        0,
        display + "\n",
        "",
    )


def test_cmd_systemf_numeral_decode():
    code, out, err = run(
        ["decode", "--calculus", "systemf", "numeral", r"/\a. \f:a -> a. \x:a. f (f x)"]
    )
    assert (code, out, err) == (0, "2\n", "")


def test_cmd_eval_small():
    assert run(["eval", "--semantics", "small", "iszero (pred (succ zero))"]) == (
        0,
        "T\n",
        "",
    )


def test_cmd_eval_trace():
    code, out, err = run(["eval", "--trace", "iszero (pred (succ zero))"])
    assert (code, err) == (0, "")
    assert out == "iszero(pred(succ(zero)))\niszero(zero)\nT\n"


def test_cmd_eval_big_keeps_pairs_lazy():
    code, out, err = run(
        ["eval", "--semantics", "big", r"(\p:nat * bool. <pi2 p, pi1 p>) <3, F>"]
    )
    assert (code, err) == (0, "")
    assert out == (
        "<pi2 <succ(succ(succ(zero))), F>, pi1 <succ(succ(succ(zero))), F>>\n"
    )


def test_cmd_eval_parallel_dialect():
    left = run(["eval", "--dialect", "parallel", r"por T (Y (\x:bool. x))"])
    right = run(["eval", "--dialect", "parallel", r"por (Y (\x:bool. x)) T"])
    assert left == (0, "T\n", "")
    assert right == (0, "T\n", "")


def test_cmd_eval_por_stuck_in_sequential_dialect():
    code, out, err = run(["eval", "por T F"])
    assert code == 1
    assert err == "stuck at por T F\n"


def test_cmd_eval_out_of_fuel():
    code, out, err = run(
        ["eval", "--fuel", "10", r"(Y (\f:nat -> nat. \n:nat. f n)) zero"]
    )
    assert code == 2
    assert err == "fuel exhausted after 10 steps\n"


def test_cmd_eval_denot():
    assert run(["eval", "--semantics", "denot", r"Y (\x:nat. x)"]) == (0, "_|_\n", "")
    assert run(["eval", "--semantics", "denot", "--unicode", r"Y (\x:nat. x)"]) == (
        0,
        "⊥\n",
        "",
    )
    assert run(["eval", "--semantics", "denot", "iszero (pred (succ zero))"]) == (
        0,
        "T\n",
        "",
    )


def test_cmd_eval_type_error_exits_1():
    code, out, err = run(["eval", "iszero T"])
    assert code == 1
    assert err.startswith("type error:")


def test_cmd_model_single_term():
    assert run(["model", r"\x:A. x"]) == (
        0,
        "type: A -> A\nelements at base size 2: 4\n",
        "",
    )


def test_cmd_model_table_json():
    code, out, err = run(["model", "--base-size", "1", "--json", r"\x:A. x"])
    assert (code, err) == (0, "")
    assert out.splitlines()[-1] == (
        '{"context":[],"inputs":1,"outputs":1,"entries":[[0,0]]}'
    )


def test_cmd_model_separation():
    one = r"\f:A -> A. \x:A. f x"
    two = r"\f:A -> A. \x:A. f (f x)"
    four = r"\f:A -> A. \x:A. f (f (f (f x)))"
    assert run(["model", one, two]) == (0, "separated at base sizes A=2\n", "")
    assert run(["model", two, four]) == (0, "not separated up to base size 2\n", "")
    assert run(["model", "--base-size", "3", two, four]) == (
        0,
        "separated at base sizes A=3\n",
        "",
    )


def test_cmd_model_type_mismatch_exits_1():
    code, out, err = run(["model", r"\x:A. x", r"\x:B. x"])
    assert code == 1
    assert err == "the terms have different types: A -> A and B -> B\n"


def test_cmd_model_overflow_exits_2():
    code, out, err = run(["model", "--base-size", "4", r"\x:(A -> A) -> A -> A. x"])
    assert code == 2
    assert err == "|(A -> A) -> A -> A| = 256^256 exceeds 1000000\n"


def test_cmd_model_posets():
    assert run(["model", "--poset", "show", "bool"]) == (
        0,
        "elements: bot, T, F\nbottom: bot\n",
        "",
    )
    assert run(["model", "--poset", "show", "nat3"]) == (
        0,
        "elements: bot, 0, 1, 2\nbottom: bot\n",
        "",
    )
    assert run(["model", "--poset", "maps", "bool", "bool"]) == (0, "11\n", "")
    code, _, err = run(["model", "--poset", "show", "zilch"])
    assert code == 1
    assert err == "posets are named bool or natN, as in nat3\n"


def test_cmd_repl_session():
    code, out, err = run(
        ["repl"],
        stdin="let i = \\x. x\ni i\n:calculus pcf\nsucc (pred 1)\n:q\n",
    )
    assert (code, err) == (0, "")
    assert out == (
        "i bound\n"
        "\\x. x\n"
        "calculus set to pcf; bindings cleared\n"
        "succ(zero)\n"
    )


def test_cmd_repl_recovers_from_errors():
    code, out, err = run(["repl"], stdin=":nope\n(x\n:q\n")
    assert (code, err) == (0, "")
    assert out == (
        "unknown command :nope; try :q or :calculus NAME\n"
        "parse error at line 1, column 3: expected ')', found end of input\n"
    )


def test_cmd_repl_eof_ends_cleanly():
    assert run(["repl", "--calculus", "pcf"], stdin="iszero zero\n") == (0, "T\n", "")


def test_bad_usage_exits_1():
    code, _, err = run(["model", "--table", "nope"])
    assert code == 1
    assert "unrecognized arguments" in err
    code, _, _ = run([])
    assert code == 1
