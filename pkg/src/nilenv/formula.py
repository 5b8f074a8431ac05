"""First-order formulas over groups: syntax trees, text format, evaluation.

Terms are built from variables, parameter slots ``p0, p1, ...``, the identity
``1``, products, and inverses.  Formulas combine term equalities with the
connectives ``&``, ``|``, ``!`` and the quantifiers ``A y (...)`` and
``E y (...)``, read "for all y" and "exists y".  Evaluation is the direct
finite-model semantics: quantifiers range over the whole group, and the
solution set of a formula in the distinguished free variable ``x`` is
returned as an :class:`~nilenv.groups.ElementSet`.

The module also emits the uniform envelope formula: for positive integers
``d`` and ``n``, :func:`envelope_formula` builds a formula with ``d * n``
parameter slots whose solution set, at the witnesses recorded by an envelope
trace, is exactly the constructed envelope.
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass
from functools import lru_cache

from .centralizers import dimension
from .envelope import EnvelopeTrace, padded_parameters
from .errors import ArityMismatchError, FormulaSyntaxError, MalformedInputError
from .groups import ElementSet, FiniteGroup


DEFAULT_WARN_BUDGET = 10**18


class EvaluationCostWarning(RuntimeWarning):
    """Issued when a formula's estimated evaluation cost exceeds the budget."""


# -- Syntax trees --------------------------------------------------------


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Param:
    index: int


@dataclass(frozen=True)
class One:
    pass


@dataclass(frozen=True)
class Mul:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Inv:
    operand: "Term"


Term = Var | Param | One | Mul | Inv


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Not:
    operand: "Formula"


@dataclass(frozen=True)
class ForAll:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


Formula = Eq | And | Or | Not | ForAll | Exists


def commutator(left: Term, right: Term) -> Term:
    """The term left^-1 * right^-1 * left * right, associated to the left."""
    return Mul(Mul(Mul(Inv(left), Inv(right)), left), right)


def conjunction(parts: list[Formula]) -> Formula:
    """Left-associated conjunction of a nonempty list."""
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


# -- Structural measures -------------------------------------------------


def _walk(node, memo: dict, fn):
    got = memo.get(id(node))
    if got is None:
        got = fn(node, lambda child: _walk(child, memo, fn))
        memo[id(node)] = got
    return got


def free_variables(node: Formula | Term) -> frozenset[str]:
    """Free variable names, respecting quantifier binding."""

    def fn(n, rec):
        if isinstance(n, Var):
            return frozenset((n.name,))
        if isinstance(n, (Param, One)):
            return frozenset()
        if isinstance(n, (Mul, And, Or, Eq)):
            return rec(n.left) | rec(n.right)
        if isinstance(n, (Inv, Not)):
            return rec(n.operand)
        if isinstance(n, (ForAll, Exists)):
            return rec(n.body) - {n.var}
        raise MalformedInputError(f"not a formula node: {n!r}")

    return _walk(node, {}, fn)


def max_parameter(node: Formula | Term) -> int:
    """Largest parameter slot index appearing in the node, or -1 for none."""

    def fn(n, rec):
        if isinstance(n, Param):
            return n.index
        if isinstance(n, (Var, One)):
            return -1
        if isinstance(n, (Mul, And, Or, Eq)):
            return max(rec(n.left), rec(n.right))
        if isinstance(n, (Inv, Not)):
            return rec(n.operand)
        return rec(n.body)

    return _walk(node, {}, fn)


def quantifier_depth(node: Formula | Term) -> int:
    """Maximum nesting depth of quantifiers."""

    def fn(n, rec):
        if isinstance(n, (Var, Param, One)):
            return 0
        if isinstance(n, (Mul, And, Or, Eq)):
            return max(rec(n.left), rec(n.right))
        if isinstance(n, (Inv, Not)):
            return rec(n.operand)
        return 1 + rec(n.body)

    return _walk(node, {}, fn)


def size(node: Formula | Term) -> int:
    """Number of nodes in the syntax tree, counting shared subtrees per occurrence."""

    def fn(n, rec):
        if isinstance(n, (Var, Param, One)):
            return 1
        if isinstance(n, (Mul, And, Or, Eq)):
            return 1 + rec(n.left) + rec(n.right)
        if isinstance(n, (Inv, Not)):
            return 1 + rec(n.operand)
        return 1 + rec(n.body)

    return _walk(node, {}, fn)


def cost_estimate(formula: Formula, group: FiniteGroup) -> int:
    """Naive evaluation cost: order ** quantifier_depth * tree size."""
    return group.order ** quantifier_depth(formula) * size(formula)


# -- Parser --------------------------------------------------------------

_SYMBOLS = ("^-1", "(", ")", "[", "]", ",", "*", "=", "&", "|", "!")


def _tokenize(text: str) -> list[tuple[str, str | int, int]]:
    tokens = []
    i = 0
    n = len(text)
    while i < n:
        c = text[i]
        if c.isspace():
            i += 1
            continue
        if c == "p" and i + 1 < n and text[i + 1].isdigit():
            j = i + 1
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(("param", int(text[i + 1 : j]), i))
            i = j
            continue
        if c.isalpha() or c == "_":
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], i))
            i = j
            continue
        if c == "1":
            tokens.append(("one", "1", i))
            i += 1
            continue
        for sym in _SYMBOLS:
            if text.startswith(sym, i):
                tokens.append(("sym", sym, i))
                i += len(sym)
                break
        else:
            raise FormulaSyntaxError(f"unexpected character {c!r}", i)
    tokens.append(("end", "", n))
    return tokens


class _Parser:
    """Recursive-descent parser for the concrete formula syntax."""

    def __init__(self, text: str) -> None:
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> tuple[str, str | int, int]:
        return self.tokens[self.pos]

    def take(self) -> tuple[str, str | int, int]:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect_sym(self, sym: str) -> None:
        kind, value, at = self.take()
        if kind != "sym" or value != sym:
            raise FormulaSyntaxError(f"expected {sym!r}", at)

    def at_sym(self, sym: str) -> bool:
        kind, value, _ = self.peek()
        return kind == "sym" and value == sym

    def formula(self) -> Formula:
        out = self.and_expr()
        while self.at_sym("|"):
            self.take()
            out = Or(out, self.and_expr())
        return out

    def and_expr(self) -> Formula:
        out = self.unary()
        while self.at_sym("&"):
            self.take()
            out = And(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, value, at = self.peek()
        if kind == "sym" and value == "!":
            self.take()
            return Not(self.unary())
        if kind == "ident" and value in ("A", "E") and self.tokens[self.pos + 1][0] == "ident":
            self.take()
            _, var, _ = self.take()
            self.expect_sym("(")
            body = self.formula()
            self.expect_sym(")")
            return ForAll(var, body) if value == "A" else Exists(var, body)
        return self.atom()

    def atom(self) -> Formula:
        if self.at_sym("("):
            saved = self.pos
            self.take()
            try:
                inner = self.formula()
                self.expect_sym(")")
                return inner
            except FormulaSyntaxError:
                self.pos = saved
        left = self.term()
        kind, value, at = self.take()
        if kind != "sym" or value != "=":
            raise FormulaSyntaxError("expected '='", at)
        return Eq(left, self.term())

    def term(self) -> Term:
        out = self.factor()
        while self.at_sym("*"):
            self.take()
            out = Mul(out, self.factor())
        return out

    def factor(self) -> Term:
        out = self.primary()
        while self.at_sym("^-1"):
            self.take()
            out = Inv(out)
        return out

    def primary(self) -> Term:
        kind, value, at = self.take()
        if kind == "one":
            return One()
        if kind == "param":
            return Param(value)
        if kind == "ident":
            return Var(value)
        if kind == "sym" and value == "(":
            inner = self.term()
            self.expect_sym(")")
            return inner
        if kind == "sym" and value == "[":
            left = self.term()
            self.expect_sym(",")
            right = self.term()
            self.expect_sym("]")
            return commutator(left, right)
        raise FormulaSyntaxError(f"unexpected token {value!r}", at)


def parse(text: str) -> Formula:
    """Parse the concrete syntax into a syntax tree.

    Commutator brackets ``[a, b]`` desugar to ``a^-1*b^-1*a*b`` during
    parsing; the tree has no commutator node.  A variable named ``A`` or
    ``E`` directly followed by another identifier cannot be written, since
    that spelling reads as a quantifier.
    """
    parser = _Parser(text)
    out = parser.formula()
    kind, value, at = parser.peek()
    if kind != "end":
        raise FormulaSyntaxError(f"trailing input starting with {value!r}", at)
    return out


# -- Pretty-printer ------------------------------------------------------


def _format_term(node: Term, context: int) -> str:
    if isinstance(node, Var):
        return node.name
    if isinstance(node, Param):
        return f"p{node.index}"
    if isinstance(node, One):
        return "1"
    if isinstance(node, Mul):
        text = f"{_format_term(node.left, 1)}*{_format_term(node.right, 2)}"
        return f"({text})" if context > 1 else text
    text = f"{_format_term(node.operand, 3)}^-1"
    return text


def format_formula(node: Formula) -> str:
    """Render a tree in the concrete syntax; parse(format_formula(F)) == F."""
    return _format_formula(node, 0)


def _format_formula(node: Formula, context: int) -> str:
    if isinstance(node, Eq):
        return f"{_format_term(node.left, 0)} = {_format_term(node.right, 0)}"
    if isinstance(node, Or):
        text = f"{_format_formula(node.left, 1)} | {_format_formula(node.right, 2)}"
        return f"({text})" if context > 1 else text
    if isinstance(node, And):
        text = f"{_format_formula(node.left, 2)} & {_format_formula(node.right, 3)}"
        return f"({text})" if context > 2 else text
    if isinstance(node, Not):
        return f"!{_format_formula(node.operand, 3)}"
    letter = "A" if isinstance(node, ForAll) else "E"
    return f"{letter} {node.var} ({_format_formula(node.body, 0)})"


# -- Evaluator -----------------------------------------------------------

_MISSING = object()


class _Evaluator:
    """One evaluation run: fixed group and parameters, reusable caches.

    Truth values of closed subformulas are cached outright.  A subformula
    with exactly one free variable has a solution set independent of the
    rest of the environment, so it is computed once as a bitset and
    afterwards answered by a single bit test.  Nothing is keyed by full
    variable-assignment frames.
    """

    def __init__(self, group: FiniteGroup, params: tuple[int, ...]) -> None:
        self.group = group
        self.params = params
        self.free: dict[int, frozenset[str]] = {}
        self.bools: dict[int, bool] = {}
        self.bitsets: dict[int, int] = {}
        self.formula_evals = 0

    def free_of(self, node) -> frozenset[str]:
        got = self.free.get(id(node))
        if got is None:
            if isinstance(node, Var):
                got = frozenset((node.name,))
            elif isinstance(node, (Param, One)):
                got = frozenset()
            elif isinstance(node, (Mul, And, Or, Eq)):
                got = self.free_of(node.left) | self.free_of(node.right)
            elif isinstance(node, (Inv, Not)):
                got = self.free_of(node.operand)
            else:
                got = self.free_of(node.body) - {node.var}
            self.free[id(node)] = got
        return got

    def term(self, node: Term, env: dict[str, int]) -> int:
        if isinstance(node, Var):
            return env[node.name]
        if isinstance(node, Param):
            return self.params[node.index]
        if isinstance(node, One):
            return 0
        if isinstance(node, Mul):
            return self.group._mul(self.term(node.left, env), self.term(node.right, env))
        return self.group.inverse_table[self.term(node.operand, env)]

    def eval(self, node: Formula, env: dict[str, int]) -> bool:
        fv = self.free_of(node)
        if not fv:
            got = self.bools.get(id(node), _MISSING)
            if got is _MISSING:
                got = self.raw(node, env)
                self.bools[id(node)] = got
            return got
        if len(fv) == 1:
            (var,) = fv
            bits = self.bitsets.get(id(node))
            if bits is None:
                bits = 0
                saved = env.get(var, _MISSING)
                for g in range(self.group.order):
                    env[var] = g
                    if self.raw(node, env):
                        bits |= 1 << g
                if saved is _MISSING:
                    del env[var]
                else:
                    env[var] = saved
                self.bitsets[id(node)] = bits
            return bool(bits >> env[var] & 1)
        return self.raw(node, env)

    def raw(self, node: Formula, env: dict[str, int]) -> bool:
        self.formula_evals += 1
        if isinstance(node, Eq):
            return self.term(node.left, env) == self.term(node.right, env)
        if isinstance(node, And):
            return self.eval(node.left, env) and self.eval(node.right, env)
        if isinstance(node, Or):
            return self.eval(node.left, env) or self.eval(node.right, env)
        if isinstance(node, Not):
            return not self.eval(node.operand, env)
        if isinstance(node, ForAll):
            guarded = self.guard_value(node, env)
            if guarded is not None:
                saved = env.get(node.var, _MISSING)
                env[node.var] = guarded
                out = self.eval(node.body, env)
                if saved is _MISSING:
                    del env[node.var]
                else:
                    env[node.var] = saved
                return out
            return self.quantify(node, env, want=True)
        return self.quantify(node, env, want=False)

    def guard_value(self, node: ForAll, env: dict[str, int]) -> int | None:
        """Detect A v (!(v = t) | body) with v not free in t.

        Exactly one element satisfies the guard, so the quantifier reduces
        to evaluating the body at the value of t.
        """
        body = node.body
        if not (isinstance(body, Or) and isinstance(body.left, Not)):
            return None
        eq = body.left.operand
        if not (
            isinstance(eq, Eq)
            and isinstance(eq.left, Var)
            and eq.left.name == node.var
            and node.var not in self.free_of(eq.right)
        ):
            return None
        return self.term(eq.right, env)

    def quantify(self, node: ForAll | Exists, env: dict[str, int], want: bool) -> bool:
        saved = env.get(node.var, _MISSING)
        result = want
        for g in range(self.group.order):
            env[node.var] = g
            if self.eval(node.body, env) is not want:
                result = not want
                break
        if saved is _MISSING:
            del env[node.var]
        else:
            env[node.var] = saved
        return result


def _check_params(node: Formula, group: FiniteGroup, params) -> tuple[int, ...]:
    params = tuple(params)
    expected = max_parameter(node) + 1
    if len(params) != expected:
        raise ArityMismatchError(
            f"formula uses parameter slots p0..p{expected - 1}, got {len(params)} values"
        )
    for value in params:
        if not isinstance(value, int) or isinstance(value, bool) or not 0 <= value < group.order:
            raise MalformedInputError(f"parameter {value!r} is not an element index")
    return params


def _warn_cost(node: Formula, group: FiniteGroup, warn_budget: int) -> None:
    cost = cost_estimate(node, group)
    if cost > warn_budget:
        warnings.warn(
            f"estimated evaluation cost {cost} exceeds budget {warn_budget}",
            EvaluationCostWarning,
            stacklevel=3,
        )


def evaluate(
    formula: Formula,
    group: FiniteGroup,
    params=(),
    warn_budget: int = DEFAULT_WARN_BUDGET,
) -> ElementSet:
    """Solution set {g in G : formula(g, params)} in the free variable x.

    The formula may use the single free variable ``x`` (or none, in which
    case the answer is all of G or the empty set).  Parameter values are
    element indices filling every slot the formula mentions.
    """
    if not isinstance(formula, (Eq, And, Or, Not, ForAll, Exists)):
        raise MalformedInputError(f"not a formula: {formula!r}")
    fv = free_variables(formula)
    if fv - {"x"}:
        extra = ", ".join(sorted(fv - {"x"}))
        raise MalformedInputError(f"unexpected free variables: {extra}")
    params = _check_params(formula, group, params)
    _warn_cost(formula, group, warn_budget)
    ev = _Evaluator(group, params)
    bits = 0
    if "x" in fv:
        env: dict[str, int] = {}
        for g in range(group.order):
            env["x"] = g
            if ev.eval(formula, env):
                bits |= 1 << g
    elif ev.eval(formula, {}):
        bits = group.full_mask
    return ElementSet(group, bits)


def sentence_holds(
    formula: Formula,
    group: FiniteGroup,
    params=(),
    warn_budget: int = DEFAULT_WARN_BUDGET,
) -> bool:
    """Truth value of a closed formula (no free variables at all)."""
    fv = free_variables(formula)
    if fv:
        raise MalformedInputError(f"sentence has free variables: {', '.join(sorted(fv))}")
    params = _check_params(formula, group, params)
    _warn_cost(formula, group, warn_budget)
    return _Evaluator(group, params).eval(formula, {})


# -- The uniform envelope formula ----------------------------------------


@lru_cache(maxsize=None)
def envelope_formula(d: int, n: int) -> Formula:
    """The formula phi_{d,n}(x, p0..p{dn-1}) defining envelopes.

    Slot (k-1)*d + i holds the i-th witness of tower stage k.  Stage
    predicates are built recursively: E_1 says x commutes with the first d
    parameters; E_k adds, for each of its d witnesses y, that [x, y] lies
    in the (k-1)-st relativized center of E_{k-1}; the formula itself is
    the n-th relativized center of E_n.  For n = 1 that center is all of
    E_1, which the construction makes abelian, so the formula is E_1(x)
    itself and is quantifier-free.  For n = 0 the formula is x = 1.

    The result depends only on (d, n): one syntax tree per pair, shared
    between calls.
    """
    if d < 1:
        raise ArityMismatchError("parameter width d must be at least 1")
    if n < 0:
        raise MalformedInputError("nilpotence class must be nonnegative")
    if n == 0:
        return Eq(Var("x"), One())

    counter = itertools.count(1)
    stage_memo: dict[tuple[int, str], Formula] = {}
    center_memo: dict[tuple[int, int, str], Formula] = {}

    def slot(k: int, i: int) -> Param:
        return Param((k - 1) * d + i)

    def stage(k: int, name: str) -> Formula:
        got = stage_memo.get((k, name))
        if got is None:
            v = Var(name)
            parts = [Eq(Mul(v, slot(1, i)), Mul(slot(1, i), v)) for i in range(d)]
            got = conjunction(parts)
            if k > 1:
                got = And(
                    stage(k - 1, name),
                    conjunction(
                        [center_at(k - 1, k - 1, commutator(v, slot(k, i))) for i in range(d)]
                    ),
                )
            stage_memo[(k, name)] = got
        return got

    def center(k: int, j: int, name: str) -> Formula:
        got = center_memo.get((k, j, name))
        if got is None:
            w = f"w{next(counter)}"
            got = And(
                stage(k, name),
                ForAll(
                    w,
                    Or(
                        Not(stage(k, w)),
                        center_at(k, j - 1, commutator(Var(name), Var(w))),
                    ),
                ),
            )
            center_memo[(k, j, name)] = got
        return got

    def center_at(k: int, j: int, term: Term) -> Formula:
        if j == 0:
            return Eq(term, One())
        if isinstance(term, Var):
            return center(k, j, term.name)
        v = f"v{next(counter)}"
        return ForAll(v, Or(Not(Eq(Var(v), term)), center(k, j, v)))

    if n == 1:
        return stage(1, "x")
    return center_at(n, n, Var("x"))


def emit_envelope_formula(trace: EnvelopeTrace, d: int | None = None) -> Formula:
    """The envelope formula sized for a trace.

    With d omitted, uses the width the trace's parameters were padded to
    (the ambient group's centralizer dimension).  The width must cover the
    largest witness count in the tower, else :class:`ArityMismatchError`.
    Pair the result with :func:`~nilenv.envelope.padded_parameters` at the
    same width; at those parameters its solution set is the envelope.
    """
    n = trace.nilpotence_class
    if d is None:
        d = len(trace.parameters) // n if n else dimension(trace.group)
    padded_parameters(trace, d)
    return envelope_formula(d, n)


# -- Centralizer dimension as a sentence ----------------------------------


def dimension_sentence(d: int) -> Formula:
    """A sentence true in G exactly when the centralizer dimension is at most d.

    Dimension exceeding d means a strict chain of d+1 centralizer drops,
    witnessed by elements z_1, x_1, ..., z_{d+1}, x_{d+1} where each z_i
    centralizes x_1..x_{i-1} but not x_i.  The sentence negates that
    existential.  Each z_i's commutation constraints sit directly under its
    quantifier, so evaluation prunes as early as possible.
    """
    if d < 1:
        raise MalformedInputError("dimension bound must be at least 1")

    def level(i: int) -> Formula:
        zi = Var(f"z{i}")
        inner: Formula = Not(Eq(commutator(zi, Var(f"x{i}")), One()))
        if i <= d:
            inner = And(inner, level(i + 1))
        body: Formula = Exists(f"x{i}", inner)
        checks = [Eq(commutator(zi, Var(f"x{j}")), One()) for j in range(1, i)]
        if checks:
            body = And(conjunction(checks), body)
        return Exists(f"z{i}", body)

    return Not(level(1))
