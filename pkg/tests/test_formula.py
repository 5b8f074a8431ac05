"""Formula syntax, evaluation semantics, and the uniform definability emitters."""

from __future__ import annotations

import random
import warnings

import pytest

from nilenv.catalog import alternating, dihedral, from_spec, quaternion, symmetric, unitriangular
from nilenv.centralizers import dimension
from nilenv.envelope import build_envelope, padded_parameters
from nilenv.errors import ArityMismatchError, FormulaSyntaxError, MalformedInputError
from nilenv.formula import (
    And,
    Eq,
    EvaluationCostWarning,
    Exists,
    ForAll,
    Inv,
    Mul,
    Not,
    One,
    Or,
    Param,
    Var,
    commutator,
    dimension_sentence,
    emit_envelope_formula,
    envelope_formula,
    evaluate,
    format_formula,
    free_variables,
    max_parameter,
    parse,
    quantifier_depth,
    sentence_holds,
    size,
)
from nilenv.groups import closure
from nilenv.series import nilpotence_class


def brute_term(node, G, env, params):
    if isinstance(node, Var):
        return env[node.name]
    if isinstance(node, Param):
        return params[node.index]
    if isinstance(node, One):
        return 0
    if isinstance(node, Mul):
        return G.mul(brute_term(node.left, G, env, params), brute_term(node.right, G, env, params))
    return G.inv(brute_term(node.operand, G, env, params))


def brute_eval(node, G, env, params):
    """Reference semantics: plain recursion, no caching, no rewriting."""
    if isinstance(node, Eq):
        return brute_term(node.left, G, env, params) == brute_term(node.right, G, env, params)
    if isinstance(node, And):
        return brute_eval(node.left, G, env, params) and brute_eval(node.right, G, env, params)
    if isinstance(node, Or):
        return brute_eval(node.left, G, env, params) or brute_eval(node.right, G, env, params)
    if isinstance(node, Not):
        return not brute_eval(node.operand, G, env, params)
    if isinstance(node, ForAll):
        return all(brute_eval(node.body, G, {**env, node.var: g}, params) for g in range(G.order))
    return any(brute_eval(node.body, G, {**env, node.var: g}, params) for g in range(G.order))


ROUND_TRIP_TEXTS = [
    "x = 1",
    "x*p0 = p0*x",
    "x*p0 = p0*x & x*p1 = p1*x",
    "!(x = 1) | x = 1",
    "A y (x*y = y*x)",
    "E y (A z (y*z*y^-1 = z))",
    "[x, p3] = 1",
    "(x*p0)^-1 = p0^-1*x^-1",
    "A w (!(w = x) | w*w = 1)",
    "x*(p0*p1) = (x*p0)*p1",
    "1 = 1",
]


def test_parse_format_round_trip():
    for text in ROUND_TRIP_TEXTS:
        tree = parse(text)
        printed = format_formula(tree)
        assert parse(printed) == tree


def test_round_trip_of_generated_formulas():
    for d, n in [(1, 0), (1, 1), (3, 1), (2, 2), (1, 3), (2, 3)]:
        phi = envelope_formula(d, n)
        assert parse(format_formula(phi)) == phi
    for d in (1, 2, 3):
        sigma = dimension_sentence(d)
        assert parse(format_formula(sigma)) == sigma


def test_commutator_desugars_left_nested():
    tree = parse("[a, b] = 1")
    a, b = Var("a"), Var("b")
    assert tree.left == Mul(Mul(Mul(Inv(a), Inv(b)), a), b)
    assert tree.left == commutator(a, b)
    assert tree.right == One()


def test_parse_errors_carry_positions():
    with pytest.raises(FormulaSyntaxError) as excinfo:
        parse("x = $")
    assert excinfo.value.position == 4
    assert "(at position 4)" in str(excinfo.value)

    with pytest.raises(FormulaSyntaxError):
        parse("x =")
    with pytest.raises(FormulaSyntaxError):
        parse("(x = 1")
    with pytest.raises(FormulaSyntaxError):
        parse("x = 1 stray")
    with pytest.raises(FormulaSyntaxError):
        parse("[x, = 1")
    with pytest.raises(FormulaSyntaxError):
        parse("A (x = 1)")
    with pytest.raises(FormulaSyntaxError):
        parse("")


def test_format_precedence():
    a, b, c = Var("a"), Var("b"), Var("c")
    assert format_formula(Eq(Mul(Mul(a, b), c), One())) == "a*b*c = 1"
    assert format_formula(Eq(Mul(a, Mul(b, c)), One())) == "a*(b*c) = 1"
    assert format_formula(Eq(Inv(Mul(a, b)), One())) == "(a*b)^-1 = 1"
    assert format_formula(Eq(Inv(Inv(a)), One())) == "a^-1^-1 = 1"
    assert format_formula(Or(And(Eq(a, One()), Eq(b, One())), Eq(c, One()))) == "a = 1 & b = 1 | c = 1"
    assert format_formula(And(Or(Eq(a, One()), Eq(b, One())), Eq(c, One()))) == "(a = 1 | b = 1) & c = 1"
    assert format_formula(Not(Eq(a, b))) == "!a = b"
    assert parse("!a = b") == Not(Eq(a, b))
    assert format_formula(Not(And(Eq(a, b), Eq(b, c)))) == "!(a = b & b = c)"
    assert format_formula(ForAll("y", Eq(a, b))) == "A y (a = b)"


def test_quantifier_spelling_needs_following_identifier():
    tree = parse("A = 1")
    assert tree == Eq(Var("A"), One())
    tree = parse("E y (E = y)")
    assert tree == Exists("y", Eq(Var("E"), Var("y")))


def test_evaluator_matches_brute_force():
    battery = [
        ("x*p0 = p0*x", 1),
        ("[x, p0] = 1 & !(x = 1)", 1),
        ("A y (x*y = y*x)", 0),
        ("E y (x = y*y)", 0),
        ("E y (!(y = 1) & [x, y] = 1)", 0),
        ("A y (E z (x*y*z = z*y*x))", 0),
        ("A w (!(w = x*p0) | w*w = 1)", 1),
    ]
    rng = random.Random(59)
    for G in (symmetric(3), dihedral(4), quaternion()):
        for text, arity in battery:
            tree = parse(text)
            params = tuple(rng.randrange(G.order) for _ in range(arity))
            got = evaluate(tree, G, params)
            expected = [g for g in range(G.order) if brute_eval(tree, G, {"x": g}, params)]
            assert got.elements == tuple(expected)


def test_closed_formulas_match_brute_force():
    sentences = [
        "A x (A y (x*y = y*x))",
        "E x (!(x = 1) & x*x = 1)",
        "A x (E y (y*y = x))",
    ]
    for G in (symmetric(3), quaternion(), dihedral(6)):
        for text in sentences:
            tree = parse(text)
            assert sentence_holds(tree, G) == brute_eval(tree, G, {}, ())


def test_evaluate_without_free_variable_returns_all_or_nothing():
    G = dihedral(4)
    everything = evaluate(parse("1 = 1"), G)
    assert everything.members == G.full_mask
    nothing = evaluate(parse("!(1 = 1)"), G)
    assert nothing.members == 0


def test_evaluate_centralizer_formula():
    rng = random.Random(61)
    tree = parse("x*p0 = p0*x")
    for G in (symmetric(4), unitriangular(3)):
        for _ in range(8):
            p = rng.randrange(G.order)
            assert evaluate(tree, G, (p,)).members == G.element_centralizer_mask(p)


def test_variable_and_parameter_validation():
    G = symmetric(3)
    with pytest.raises(MalformedInputError):
        evaluate(parse("x*y = y*x"), G)
    with pytest.raises(MalformedInputError):
        sentence_holds(parse("x = 1"), G)
    with pytest.raises(ArityMismatchError):
        evaluate(parse("x*p0 = p0*x"), G)
    with pytest.raises(ArityMismatchError):
        evaluate(parse("x*p0 = p0*x"), G, (1, 2))
    with pytest.raises(ArityMismatchError):
        evaluate(parse("x = 1"), G, (1,))
    with pytest.raises(MalformedInputError):
        evaluate(parse("x*p0 = p0*x"), G, (6,))
    with pytest.raises(MalformedInputError):
        evaluate(parse("x*p0 = p0*x"), G, (True,))
    with pytest.raises(MalformedInputError):
        evaluate(Var("x"), G)


def test_metrics():
    tree = parse("A y (x*y = y*x & [y, p2] = 1)")
    assert free_variables(tree) == frozenset({"x"})
    assert quantifier_depth(tree) == 1
    assert max_parameter(tree) == 2
    assert max_parameter(parse("x = 1")) == -1
    assert size(parse("x = 1")) == 3


def test_envelope_formula_shapes():
    flat = envelope_formula(3, 1)
    assert quantifier_depth(flat) == 0
    assert free_variables(flat) == frozenset({"x"})
    assert format_formula(flat) == "x*p0 = p0*x & x*p1 = p1*x & x*p2 = p2*x"

    assert envelope_formula(2, 0) == Eq(Var("x"), One())

    for d in (1, 2, 4):
        assert quantifier_depth(envelope_formula(d, 2)) == 5
        assert quantifier_depth(envelope_formula(d, 3)) == 11
        assert max_parameter(envelope_formula(d, 2)) == 2 * d - 1
        assert free_variables(envelope_formula(d, 2)) == frozenset({"x"})

    with pytest.raises(ArityMismatchError):
        envelope_formula(0, 1)
    with pytest.raises(MalformedInputError):
        envelope_formula(2, -1)


def test_envelope_formula_is_uniform():
    assert envelope_formula(3, 2) is envelope_formula(3, 2)
    assert envelope_formula(3, 2) is not envelope_formula(2, 3)

    G = alternating(4)
    involutions = [g for g in range(12) if g and G.mul(g, g) == 0]
    traces = [build_envelope(G, closure(G, [t])) for t in involutions]
    emitted = {id(emit_envelope_formula(trace)) for trace in traces}
    assert len(emitted) == 1


def test_emitted_formula_solves_envelope():
    cases = [
        ("alternating(4)", [1]),
        ("dihedral(4)", None),
        ("dihedral(8)", None),
        ("dihedral(8)", [2, 8]),
        ("unitriangular(3)", None),
        ("product(dihedral(4),symmetric(3))", [6, 24]),
        ("symmetric(4)", [1]),
    ]
    for spec, gens in cases:
        G = from_spec(spec)
        if gens is None:
            sub = G.as_subgroup()
        else:
            sub = closure(G, gens)
        if gens == [1] and nilpotence_class(sub) is None:
            continue
        trace = build_envelope(G, sub)
        phi = emit_envelope_formula(trace)
        solutions = evaluate(phi, G, trace.parameters)
        assert solutions.members == trace.envelope.members


def test_emitted_formula_at_wider_padding():
    G = alternating(4)
    t = next(g for g in range(12) if g and G.mul(g, g) == 0)
    trace = build_envelope(G, closure(G, [t]))
    for d in (2, 3, 4):
        phi = emit_envelope_formula(trace, d)
        params = padded_parameters(trace, d)
        assert evaluate(phi, G, params).members == trace.envelope.members


def test_emit_checks_width():
    S4 = symmetric(4)
    doubles = [g for g in range(24) if g and S4.mul(g, g) == 0 and len(closure(S4, [g]).conjugate_by(0).elements) == 2]
    klein = next(
        closure(S4, [a, b]) for a in doubles for b in doubles
        if closure(S4, [a, b]).order == 4 and closure(S4, [a, b]).is_normal
    )
    trace = build_envelope(S4, klein)
    with pytest.raises(ArityMismatchError):
        emit_envelope_formula(trace, 1)


def test_dimension_sentence_shape():
    for d in (1, 2, 3):
        sigma = dimension_sentence(d)
        assert free_variables(sigma) == frozenset()
        assert max_parameter(sigma) == -1
        assert sigma is not dimension_sentence(d + 1)


def test_dimension_sentence_detects_dimension():
    specs = [
        "cyclic(1)",
        "cyclic(12)",
        "product(cyclic(2),cyclic(2))",
        "symmetric(3)",
        "dihedral(4)",
        "quaternion",
        "alternating(4)",
        "unitriangular(2)",
    ]
    for spec in specs:
        G = from_spec(spec)
        dim = dimension(G)
        for d in (1, 2, 3):
            assert sentence_holds(dimension_sentence(d), G) == (dim <= d), (spec, d)


def test_dimension_sentence_on_symmetric_4():
    G = symmetric(4)
    assert dimension(G) == 4
    assert not sentence_holds(dimension_sentence(2), G)
    assert not sentence_holds(dimension_sentence(3), G)


def test_cost_warning():
    G = symmetric(3)
    tree = parse("A y (x*y = y*x)")
    with pytest.warns(EvaluationCostWarning):
        evaluate(tree, G, warn_budget=1)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        evaluate(tree, G)
