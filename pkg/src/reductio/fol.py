"""First-order sentences over a marked graph structure.

Signature: binary E (edge), unary S (selected node), unary H (highlighted
node), binary SE / HE (selected / highlighted edge), and equality.  Concrete
syntax, whitespace insensitive::

    formula := iff
    iff     := impl {"<->" impl}
    impl    := disj ["->" impl]            (right associative)
    disj    := conj {"|" conj}
    conj    := neg {"&" neg}
    neg     := "!" neg | quant | primary
    quant   := ("forall" | "exists") IDENT "." formula
    primary := "(" formula ")" | atom
    atom    := E(x,y) | S(x) | H(x) | SE(x,y) | HE(x,y) | x = y
             | "true" | "false"

A quantifier's scope extends to the end of the enclosing formula or closing
parenthesis.  Only sentences (no free variables) are accepted;
``parse_formula`` reports every unbound variable.  Relation symbols and
keywords are reserved and cannot be used as variables.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from reductio.graphs import Graph, canonical_edge


class FolError(ValueError):
    """Syntax, reserved-name, or unbound-variable error."""


# -- AST -------------------------------------------------------------------

@dataclass(frozen=True)
class Formula:
    pass


@dataclass(frozen=True)
class Lit(Formula):
    value: bool


@dataclass(frozen=True)
class Rel(Formula):
    name: str  # E, S, H, SE or HE
    args: tuple[str, ...]


@dataclass(frozen=True)
class Eq(Formula):
    left: str
    right: str


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class BinOp(Formula):
    op: str  # "&", "|", "->" or "<->"
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Quant(Formula):
    kind: str  # "forall" or "exists"
    var: str
    body: Formula


RESERVED = {"forall", "exists", "true", "false", "E", "S", "H", "SE", "HE"}
_RELATION_ARITY = {"E": 2, "S": 1, "H": 1, "SE": 2, "HE": 2}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<op><->|->|[!&|().,=]))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens: list[tuple[str, str, int]] = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            at = len(text) - len(stripped)
            raise FolError(f"unexpected character {stripped[0]!r} at position {at}")
        kind = "ident" if m.group("ident") else "op"
        value = m.group("ident") or m.group("op")
        tokens.append((kind, value, m.end() - len(value)))
        pos = m.end()
    return tokens


class _Parser:
    def __init__(self, text: str) -> None:
        self.text = text
        self.tokens = _tokenize(text)
        self.index = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.index] if self.index < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        tok = self.peek()
        if tok is None:
            raise FolError(f"unexpected end of formula at position {len(self.text)}")
        self.index += 1
        return tok

    def expect(self, value: str) -> None:
        tok = self.next()
        if tok[1] != value:
            raise FolError(f"expected {value!r} but found {tok[1]!r} at position {tok[2]}")

    def at_op(self, value: str) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] == "op" and tok[1] == value

    # precedence ladder -----------------------------------------------------

    def formula(self) -> Formula:
        left = self.impl()
        while self.at_op("<->"):
            self.next()
            left = BinOp("<->", left, self.impl())
        return left

    def impl(self) -> Formula:
        left = self.disj()
        if self.at_op("->"):
            self.next()
            return BinOp("->", left, self.impl())
        return left

    def disj(self) -> Formula:
        left = self.conj()
        while self.at_op("|"):
            self.next()
            left = BinOp("|", left, self.conj())
        return left

    def conj(self) -> Formula:
        left = self.neg()
        while self.at_op("&"):
            self.next()
            left = BinOp("&", left, self.neg())
        return left

    def neg(self) -> Formula:
        tok = self.peek()
        if tok is None:
            raise FolError(f"unexpected end of formula at position {len(self.text)}")
        if tok[0] == "op" and tok[1] == "!":
            self.next()
            return Not(self.neg())
        if tok[0] == "ident" and tok[1] in ("forall", "exists"):
            return self.quant()
        return self.primary()

    def quant(self) -> Formula:
        kind = self.next()[1]
        var_tok = self.next()
        if var_tok[0] != "ident":
            raise FolError(f"expected a variable after {kind!r} at position {var_tok[2]}")
        if var_tok[1] in RESERVED:
            raise FolError(
                f"{var_tok[1]!r} is reserved and cannot be a variable (position {var_tok[2]})"
            )
        self.expect(".")
        return Quant(kind, var_tok[1], self.formula())

    def primary(self) -> Formula:
        tok = self.next()
        if tok[0] == "op" and tok[1] == "(":
            inner = self.formula()
            self.expect(")")
            return inner
        if tok[0] != "ident":
            raise FolError(f"unexpected token {tok[1]!r} at position {tok[2]}")
        name = tok[1]
        if name == "true":
            return Lit(True)
        if name == "false":
            return Lit(False)
        if name in _RELATION_ARITY and self.at_op("("):
            self.next()
            args = [self.variable()]
            for _ in range(_RELATION_ARITY[name] - 1):
                self.expect(",")
                args.append(self.variable())
            self.expect(")")
            return Rel(name, tuple(args))
        if name in RESERVED:
            raise FolError(f"reserved name {name!r} cannot stand alone (position {tok[2]})")
        self.expect("=")
        right = self.variable()
        return Eq(name, right)

    def variable(self) -> str:
        tok = self.next()
        if tok[0] != "ident":
            raise FolError(f"expected a variable but found {tok[1]!r} at position {tok[2]}")
        if tok[1] in RESERVED:
            raise FolError(
                f"{tok[1]!r} is reserved and cannot be a variable (position {tok[2]})"
            )
        return tok[1]


def free_variables(f: Formula, bound: frozenset[str] = frozenset()) -> set[str]:
    if isinstance(f, Rel):
        return {a for a in f.args if a not in bound}
    if isinstance(f, Eq):
        return {v for v in (f.left, f.right) if v not in bound}
    if isinstance(f, Lit):
        return set()
    if isinstance(f, Not):
        return free_variables(f.body, bound)
    if isinstance(f, BinOp):
        return free_variables(f.left, bound) | free_variables(f.right, bound)
    if isinstance(f, Quant):
        return free_variables(f.body, bound | {f.var})
    raise TypeError(f"not a formula node: {f!r}")


def parse_formula(text: str) -> Formula:
    """Parse a sentence.  Rejects trailing input and free variables."""
    parser = _Parser(text)
    ast = parser.formula()
    trailing = parser.peek()
    if trailing is not None:
        raise FolError(f"unexpected token {trailing[1]!r} at position {trailing[2]}")
    unbound = sorted(free_variables(ast))
    if unbound:
        raise FolError("unbound variable(s): " + ", ".join(unbound))
    return ast


def evaluate(f: Formula, g: Graph, env: dict[str, str] | None = None) -> bool:
    """Tarskian truth over universe = nodes(g).

    E/SE/HE are symmetric on undirected graphs and never hold reflexively
    (no self-loops).  On the empty node set, forall is vacuously true and
    exists is false.
    """
    env = env if env is not None else {}

    def rel_holds(name: str, args: tuple[str, ...]) -> bool:
        values = [env[a] for a in args]
        if name == "S":
            return values[0] in g.selected_nodes
        if name == "H":
            return values[0] in g.highlighted_nodes
        x, y = values
        if x == y:
            return False
        edge = canonical_edge(g.directed, x, y)
        if name == "E":
            return edge in g.edges
        if name == "SE":
            return edge in g.selected_edges
        return edge in g.highlighted_edges

    def run(node: Formula) -> bool:
        if isinstance(node, Lit):
            return node.value
        if isinstance(node, Rel):
            return rel_holds(node.name, node.args)
        if isinstance(node, Eq):
            return env[node.left] == env[node.right]
        if isinstance(node, Not):
            return not run(node.body)
        if isinstance(node, BinOp):
            if node.op == "&":
                return run(node.left) and run(node.right)
            if node.op == "|":
                return run(node.left) or run(node.right)
            if node.op == "->":
                return (not run(node.left)) or run(node.right)
            return run(node.left) == run(node.right)
        if isinstance(node, Quant):
            saved = env.get(node.var)
            had = node.var in env
            hits = 0
            for value in g.nodes:
                env[node.var] = value
                if run(node.body):
                    hits += 1
                elif node.kind == "forall":
                    hits = -1
                    break
            if had:
                env[node.var] = saved  # type: ignore[assignment]
            else:
                env.pop(node.var, None)
            if node.kind == "forall":
                return hits >= 0
            return hits > 0
        raise TypeError(f"not a formula node: {node!r}")

    return run(f)


def format_formula(f: Formula) -> str:
    """Deterministic text form that reparses to an equal AST."""
    if isinstance(f, Lit):
        return "true" if f.value else "false"
    if isinstance(f, Rel):
        return f"{f.name}({', '.join(f.args)})"
    if isinstance(f, Eq):
        return f"{f.left} = {f.right}"
    if isinstance(f, Not):
        return f"!({format_formula(f.body)})"
    if isinstance(f, BinOp):
        return f"({format_formula(f.left)} {f.op} {format_formula(f.right)})"
    if isinstance(f, Quant):
        # parens around the whole formula, else an enclosing "&" would be
        # swallowed into the quantifier scope on reparse
        return f"({f.kind} {f.var}. {format_formula(f.body)})"
    raise TypeError(f"not a formula node: {f!r}")


VERTEX_COVER_TEXT = "forall u. forall v. (E(u,v) -> (S(u) | S(v)))"
DOMINATING_SET_TEXT = "forall v. (S(v) | exists u. (S(u) & E(u,v)))"
INDEPENDENT_SET_TEXT = "forall u. forall v. (!(S(u) & S(v) & E(u,v)))"


def vertex_cover_sentence() -> Formula:
    """Every edge has a selected endpoint."""
    return parse_formula(VERTEX_COVER_TEXT)


def dominating_set_sentence() -> Formula:
    """Every node is selected or adjacent to a selected node."""
    return parse_formula(DOMINATING_SET_TEXT)


def independent_set_sentence() -> Formula:
    """No two selected nodes are adjacent."""
    return parse_formula(INDEPENDENT_SET_TEXT)
