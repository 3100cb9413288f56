"""Constraint trees for grading constructed or marked graphs.

Leaves check one property of the submitted graph (isomorphy to a target,
cardinality of a node/edge/mark set, truth of a logical sentence).
Combinators All / Any / None and the negation Not compose them.  Checking
yields a Verdict listing every violated constraint with a dotted path such
as ``All[2].Cardinality`` and an author-supplied or generated message.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

from reductio import fol
from reductio.graphs import Graph, graph_from_obj, graph_to_obj, isomorphic


class ConstraintError(ValueError):
    """Malformed constraint (bad fields, unparsable sentence, empty list)."""


SCOPES = (
    "nodes",
    "edges",
    "selectedNodes",
    "selectedEdges",
    "highlightedNodes",
    "highlightedEdges",
)


@dataclass(frozen=True)
class Constraint:
    pass


@dataclass(frozen=True)
class Isomorphy(Constraint):
    target: Graph
    respect_marks: bool = False
    message: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.target, Graph):
            raise ConstraintError("isomorphy target must be a graph")
        if not isinstance(self.respect_marks, bool):
            raise ConstraintError("respectMarks must be a boolean")


@dataclass(frozen=True)
class Cardinality(Constraint):
    scope: str
    min_count: int
    max_count: int | None = None
    message: str = ""

    def __post_init__(self) -> None:
        if self.scope not in SCOPES:
            raise ConstraintError(f"unknown cardinality scope {self.scope!r}")
        if not isinstance(self.min_count, int) or isinstance(self.min_count, bool) or self.min_count < 0:
            raise ConstraintError("min must be a nonnegative integer")
        if self.max_count is not None:
            if not isinstance(self.max_count, int) or isinstance(self.max_count, bool) or self.max_count < 0:
                raise ConstraintError("max must be a nonnegative integer")
            if self.min_count > self.max_count:
                raise ConstraintError("min must not exceed max")


@dataclass(frozen=True)
class Logical(Constraint):
    sentence: str
    message: str = ""
    formula: fol.Formula = field(init=False, compare=False, repr=False)

    def __post_init__(self) -> None:
        try:
            parsed = fol.parse_formula(self.sentence)
        except fol.FolError as exc:
            raise ConstraintError(f"bad sentence: {exc}") from exc
        object.__setattr__(self, "formula", parsed)


@dataclass(frozen=True)
class Not(Constraint):
    child: Constraint
    message: str = ""

    def __post_init__(self) -> None:
        if not isinstance(self.child, Constraint):
            raise ConstraintError("not requires a child constraint")


def _checked_children(kind: str, children) -> tuple[Constraint, ...]:
    items = tuple(children)
    if not items:
        raise ConstraintError(f"{kind} requires at least one child constraint")
    for item in items:
        if not isinstance(item, Constraint):
            raise ConstraintError(f"{kind} children must be constraints")
    return items


@dataclass(frozen=True)
class All(Constraint):
    children: tuple[Constraint, ...]
    message: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", _checked_children("all", self.children))


@dataclass(frozen=True)
class Any(Constraint):
    children: tuple[Constraint, ...]
    message: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", _checked_children("any", self.children))


@dataclass(frozen=True)
class NoneOf(Constraint):
    children: tuple[Constraint, ...]
    message: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "children", _checked_children("none", self.children))


@dataclass(frozen=True)
class Verdict:
    satisfied: bool
    violations: tuple[tuple[str, str], ...]

    def __post_init__(self) -> None:
        if self.satisfied != (not self.violations):
            raise ValueError("verdict must be satisfied exactly when violations are empty")


_KIND_NAMES = {
    Isomorphy: "Isomorphy",
    Cardinality: "Cardinality",
    Logical: "Logical",
    Not: "Not",
    All: "All",
    Any: "Any",
    NoneOf: "None",
}

_SCOPE_WORDS = {
    "nodes": "nodes",
    "edges": "edges",
    "selectedNodes": "selected nodes",
    "selectedEdges": "selected edges",
    "highlightedNodes": "highlighted nodes",
    "highlightedEdges": "highlighted edges",
}


def _scope_size(scope: str, g: Graph) -> int:
    return len(
        {
            "nodes": g.nodes,
            "edges": g.edges,
            "selectedNodes": g.selected_nodes,
            "selectedEdges": g.selected_edges,
            "highlightedNodes": g.highlighted_nodes,
            "highlightedEdges": g.highlighted_edges,
        }[scope]
    )


def _default_message(c: Constraint, g: Graph) -> str:
    if isinstance(c, Isomorphy):
        detail = " (marks included)" if c.respect_marks else ""
        return f"the graph is not isomorphic to the expected graph{detail}"
    if isinstance(c, Cardinality):
        words = _SCOPE_WORDS[c.scope]
        found = _scope_size(c.scope, g)
        if c.max_count is None:
            bounds = f"at least {c.min_count}"
        elif c.min_count == c.max_count:
            bounds = f"exactly {c.min_count}"
        else:
            bounds = f"between {c.min_count} and {c.max_count}"
        return f"expected {bounds} {words}, found {found}"
    if isinstance(c, Logical):
        return f"the condition {c.sentence} does not hold"
    if isinstance(c, Not):
        return "a condition that must not hold is satisfied"
    if isinstance(c, NoneOf):
        return "at least one condition that must not hold is satisfied"
    return "constraint not satisfied"


def _message(c: Constraint, g: Graph) -> str:
    return c.message or _default_message(c, g)


def check(c: Constraint, g: Graph) -> Verdict:
    """Evaluate a constraint tree against a graph.

    Violation paths name the failing leaf through its combinator chain;
    Not and None report themselves since their children did not fail.
    Under a failing Any, only the branch with the fewest violations is
    blamed (first on ties).
    """
    satisfied, violations = _check(c, g, _KIND_NAMES[type(c)])
    return Verdict(satisfied, tuple(violations))


def _check(c: Constraint, g: Graph, path: str) -> tuple[bool, list[tuple[str, str]]]:
    if isinstance(c, Isomorphy):
        # mismatched directedness is a plain violation, check stays total
        ok = (
            g.directed == c.target.directed
            and isomorphic(g, c.target, respect_marks=c.respect_marks) is not None
        )
    elif isinstance(c, Cardinality):
        size = _scope_size(c.scope, g)
        ok = size >= c.min_count and (c.max_count is None or size <= c.max_count)
    elif isinstance(c, Logical):
        ok = fol.evaluate(c.formula, g)
    elif isinstance(c, Not):
        inner_ok, _ = _check(c.child, g, path)
        ok = not inner_ok
    elif isinstance(c, All):
        results = [
            _check(child, g, f"{path}[{i}].{_KIND_NAMES[type(child)]}")
            for i, child in enumerate(c.children)
        ]
        ok = all(r[0] for r in results)
        if not ok:
            return False, [v for r in results for v in r[1]]
        return True, []
    elif isinstance(c, Any):
        results = [
            _check(child, g, f"{path}[{i}].{_KIND_NAMES[type(child)]}")
            for i, child in enumerate(c.children)
        ]
        if any(r[0] for r in results):
            return True, []
        blamed = min(results, key=lambda r: len(r[1]))
        return False, list(blamed[1])
    elif isinstance(c, NoneOf):
        inner = [_check(child, g, path)[0] for child in c.children]
        ok = not any(inner)
    else:
        raise TypeError(f"not a constraint node: {c!r}")
    if ok:
        return True, []
    return False, [(path, _message(c, g))]


# -- wire format -----------------------------------------------------------

_COMBINATOR_KINDS = {"all": All, "any": Any, "none": NoneOf}


def constraint_from_obj(obj) -> Constraint:
    if not isinstance(obj, dict):
        raise ConstraintError("constraint must be a JSON object")
    kind = obj.get("kind")
    if kind is None:
        raise ConstraintError("missing required key 'kind'")
    message = obj.get("message", "")
    if not isinstance(message, str):
        raise ConstraintError("message must be a string")

    def expect_keys(*allowed: str) -> None:
        unknown = set(obj) - {"kind", "message", *allowed}
        if unknown:
            raise ConstraintError(f"unknown key {sorted(unknown)[0]!r}")
        for key in allowed:
            if key not in obj and key not in ("max", "respectMarks"):
                raise ConstraintError(f"missing required key {key!r}")

    if kind == "isomorphy":
        expect_keys("target", "respectMarks")
        respect = obj.get("respectMarks", False)
        if not isinstance(respect, bool):
            raise ConstraintError("respectMarks must be a boolean")
        return Isomorphy(graph_from_obj(obj["target"]), respect, message)
    if kind == "cardinality":
        expect_keys("scope", "min", "max")
        return Cardinality(obj["scope"], obj["min"], obj.get("max"), message)
    if kind == "logical":
        expect_keys("sentence")
        if not isinstance(obj["sentence"], str):
            raise ConstraintError("sentence must be a string")
        return Logical(obj["sentence"], message)
    if kind == "not":
        expect_keys("child")
        return Not(constraint_from_obj(obj["child"]), message)
    if kind in _COMBINATOR_KINDS:
        expect_keys("children")
        children = obj["children"]
        if not isinstance(children, list):
            raise ConstraintError("children must be an array")
        parsed = tuple(constraint_from_obj(child) for child in children)
        return _COMBINATOR_KINDS[kind](parsed, message)
    raise ConstraintError(f"unknown constraint kind {kind!r}")


def constraint_to_obj(c: Constraint) -> dict:
    out: dict = {}
    if isinstance(c, Isomorphy):
        out = {"kind": "isomorphy", "target": graph_to_obj(c.target), "respectMarks": c.respect_marks}
    elif isinstance(c, Cardinality):
        out = {"kind": "cardinality", "scope": c.scope, "min": c.min_count}
        if c.max_count is not None:
            out["max"] = c.max_count
    elif isinstance(c, Logical):
        out = {"kind": "logical", "sentence": c.sentence}
    elif isinstance(c, Not):
        out = {"kind": "not", "child": constraint_to_obj(c.child)}
    elif isinstance(c, (All, Any, NoneOf)):
        kind = {All: "all", Any: "any", NoneOf: "none"}[type(c)]
        out = {"kind": kind, "children": [constraint_to_obj(child) for child in c.children]}
    else:
        raise TypeError(f"not a constraint node: {c!r}")
    if c.message:
        out["message"] = c.message
    return out


def parse_constraint(text: str) -> Constraint:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConstraintError(f"invalid JSON at line {exc.lineno}, column {exc.colno}") from exc
    return constraint_from_obj(obj)


def serialize_constraint(c: Constraint) -> str:
    return json.dumps(constraint_to_obj(c))


def verdict_to_obj(v: Verdict) -> dict:
    return {
        "satisfied": v.satisfied,
        "violations": [{"path": path, "message": message} for path, message in v.violations],
    }
