"""Independent brute-force routes used to cross-check the implementation.

Everything here is deliberately naive: permutation enumeration, explicit
cycle arrangement checks, exhaustive subset scans.  Keep these free of any
imports from the algorithms they are checking (graph construction only).
"""

from __future__ import annotations

from itertools import combinations, permutations

from reductio.graphs import Graph, canonical_edge


def iso_by_permutations(g1: Graph, g2: Graph, respect_marks: bool = False) -> dict[str, str] | None:
    """Least witnessing bijection by scanning every permutation in order."""
    if len(g1.nodes) != len(g2.nodes):
        return None

    def preserves(mapping: dict[str, str]) -> bool:
        for a in g1.nodes:
            for b in g1.nodes:
                if a == b:
                    continue
                e1 = canonical_edge(g1.directed, a, b)
                e2 = canonical_edge(g2.directed, mapping[a], mapping[b])
                if (e1 in g1.edges) != (e2 in g2.edges):
                    return False
                if respect_marks and e1 in g1.edges:
                    if (e1 in g1.selected_edges) != (e2 in g2.selected_edges):
                        return False
                    if (e1 in g1.highlighted_edges) != (e2 in g2.highlighted_edges):
                        return False
        if respect_marks:
            for v in g1.nodes:
                if (v in g1.selected_nodes) != (mapping[v] in g2.selected_nodes):
                    return False
                if (v in g1.highlighted_nodes) != (mapping[v] in g2.highlighted_nodes):
                    return False
        return True

    # itertools.permutations of the sorted target nodes yields image tuples in
    # lexicographic order, so the first hit is the least bijection.
    for images in permutations(g2.nodes):
        mapping = dict(zip(g1.nodes, images))
        if preserves(mapping):
            return mapping
    return None


def all_simple_cycles(g: Graph) -> list[list[str]]:
    """Every simple cycle, as canonical node sequences.

    Undirected cycles need >= 3 nodes; directed cycles need >= 2 (a 2-cycle
    uses two distinct arcs).  Canonical form starts at the least node; for
    undirected cycles the direction with the smaller second element is kept.
    """
    found: set[tuple[str, ...]] = set()
    min_len = 2 if g.directed else 3
    for size in range(min_len, len(g.nodes) + 1):
        for subset in combinations(g.nodes, size):
            first = subset[0]
            for rest in permutations(subset[1:]):
                seq = (first,) + rest
                ok = True
                for i in range(size):
                    a, b = seq[i], seq[(i + 1) % size]
                    if g.directed:
                        if (a, b) not in g.edges:
                            ok = False
                            break
                    elif canonical_edge(False, a, b) not in g.edges:
                        ok = False
                        break
                if not ok:
                    continue
                if not g.directed and size > 2 and seq[1] > seq[-1]:
                    continue  # keep one direction only
                found.add(seq)
    return [list(seq) for seq in sorted(found)]


def has_cycle_bruteforce(g: Graph) -> bool:
    return bool(all_simple_cycles(g))


def subsets_ascending(nodes: tuple[str, ...], max_size: int | None = None) -> list[tuple[str, ...]]:
    """All node subsets, ascending by size then lexicographically."""
    limit = len(nodes) if max_size is None else min(max_size, len(nodes))
    out: list[tuple[str, ...]] = []
    for size in range(limit + 1):
        out.extend(combinations(nodes, size))
    return out


def complement_graph(g: Graph) -> Graph:
    assert not g.directed
    edges = [
        (a, b)
        for i, a in enumerate(g.nodes)
        for b in g.nodes[i + 1:]
        if (a, b) not in g.edges
    ]
    return Graph(directed=False, nodes=g.nodes, edges=edges)


def fol_atom_holds(f, g: Graph, scope: tuple[str, ...], row: tuple[str, ...]) -> bool:
    from reductio.fol import Eq, Rel

    def value_of(var: str) -> str:
        # innermost binding wins under shadowing
        return row[len(scope) - 1 - scope[::-1].index(var)]

    if isinstance(f, Eq):
        return value_of(f.left) == value_of(f.right)
    assert isinstance(f, Rel)
    vals = [value_of(a) for a in f.args]
    if f.name == "S":
        return vals[0] in g.selected_nodes
    if f.name == "H":
        return vals[0] in g.highlighted_nodes
    if vals[0] == vals[1]:
        return False
    edge = canonical_edge(g.directed, vals[0], vals[1])
    pool = {"E": g.edges, "SE": g.selected_edges, "HE": g.highlighted_edges}[f.name]
    return edge in pool


def fol_table(f, g: Graph, scope: tuple[str, ...]) -> set[tuple[str, ...]]:
    """Satisfying-assignment table via relational algebra, bottom-up."""
    from itertools import product

    from reductio.fol import BinOp, Eq, Lit, Not, Quant, Rel

    full = set(product(g.nodes, repeat=len(scope)))
    if isinstance(f, Lit):
        return set(full) if f.value else set()
    if isinstance(f, (Rel, Eq)):
        return {row for row in full if fol_atom_holds(f, g, scope, row)}
    if isinstance(f, Not):
        return full - fol_table(f.body, g, scope)
    if isinstance(f, BinOp):
        left = fol_table(f.left, g, scope)
        right = fol_table(f.right, g, scope)
        if f.op == "&":
            return left & right
        if f.op == "|":
            return left | right
        if f.op == "->":
            return (full - left) | right
        return (left & right) | ((full - left) & (full - right))
    assert isinstance(f, Quant)
    body = fol_table(f.body, g, scope + (f.var,))
    if f.kind == "forall":
        return {row for row in full if all(row + (v,) in body for v in g.nodes)}
    return {row for row in full if any(row + (v,) in body for v in g.nodes)}


def table_evaluate(f, g: Graph) -> bool:
    return () in fol_table(f, g, ())
