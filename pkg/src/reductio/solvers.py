"""Exact optimisation solvers over bitmask adjacency.

The subset enumeration in :mod:`reductio.problems` tops out around ten
nodes.  The bounded search in the reduction verifier has to evaluate
gadget targets that are several times larger, so this module provides
branch and bound solvers that compute one number per graph (minimum
cover size, maximum clique size, and so on).  A budget query then
becomes a single comparison against that number.  Each solver can also
report a concrete optimal solution, used when a witness is needed for a
graph too large for the enumeration oracle.

All solvers ignore node marks.
"""

from __future__ import annotations

from .graphs import Graph
from .problems import ProblemId


class SolverError(ValueError):
    """Raised when a solver is applied to the wrong kind of graph."""


def _index_nodes(g: Graph) -> dict[str, int]:
    return {v: i for i, v in enumerate(g.nodes)}


def _undirected_masks(g: Graph, context: str) -> list[int]:
    if g.directed:
        raise SolverError(f"{context} expects an undirected graph")
    index = _index_nodes(g)
    adj = [0] * len(g.nodes)
    for u, v in g.edges:
        adj[index[u]] |= 1 << index[v]
        adj[index[v]] |= 1 << index[u]
    return adj


def _directed_masks(g: Graph) -> tuple[list[int], list[int]]:
    index = _index_nodes(g)
    out = [0] * len(g.nodes)
    inc = [0] * len(g.nodes)
    for u, v in g.edges:
        out[index[u]] |= 1 << index[v]
        inc[index[v]] |= 1 << index[u]
    return out, inc


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def _vc_search(g: Graph) -> tuple[int, tuple[int, ...]]:
    adj = _undirected_masks(g, "vc_number")
    n = len(adj)
    best = n
    best_set: tuple[int, ...] = tuple(range(n))

    def matching_bound(mask: int) -> int:
        # greedy maximal matching; every matched edge needs its own cover node
        used = 0
        size = 0
        for i in _bits(mask):
            if used >> i & 1:
                continue
            free = adj[i] & mask & ~used
            if free:
                used |= (1 << i) | (free & -free)
                size += 1
        return size

    def search(mask: int, count: int, chosen: tuple[int, ...]) -> None:
        nonlocal best, best_set
        # reductions: a degree one node is dominated by its neighbour
        changed = True
        while changed:
            changed = False
            for i in _bits(mask):
                if not mask >> i & 1:
                    continue
                nb = adj[i] & mask
                if nb == 0:
                    mask &= ~(1 << i)
                elif nb & (nb - 1) == 0:
                    count += 1
                    chosen = chosen + (nb.bit_length() - 1,)
                    mask &= ~nb & ~(1 << i)
                    changed = True
            if count >= best:
                return
        pick, degree = -1, 0
        for i in _bits(mask):
            d = (adj[i] & mask).bit_count()
            if d > degree:
                pick, degree = i, d
        if degree == 0:
            best = count
            best_set = chosen
            return
        if count + matching_bound(mask) >= best:
            return
        neighbours = adj[pick] & mask
        search(mask & ~(1 << pick), count + 1, chosen + (pick,))
        search(
            mask & ~neighbours & ~(1 << pick),
            count + neighbours.bit_count(),
            chosen + tuple(_bits(neighbours)),
        )

    search((1 << n) - 1, 0, ())
    return best, best_set


def vc_number(g: Graph) -> int:
    """Size of a minimum vertex cover."""
    return _vc_search(g)[0]


def minimum_vertex_cover(g: Graph) -> tuple[str, ...]:
    _, chosen = _vc_search(g)
    return tuple(sorted(g.nodes[i] for i in chosen))


def _ds_search(g: Graph) -> tuple[int, tuple[int, ...]]:
    adj = _undirected_masks(g, "ds_number")
    n = len(adj)
    full = (1 << n) - 1
    closed = [adj[i] | (1 << i) for i in range(n)]
    best = n
    best_set: tuple[int, ...] = tuple(range(n))

    def search(dominated: int, count: int, chosen: tuple[int, ...]) -> None:
        nonlocal best, best_set
        if count >= best:
            return
        if dominated == full:
            best = count
            best_set = chosen
            return
        uncovered = full & ~dominated
        reach = max(((closed[i] & uncovered).bit_count() for i in range(n)), default=0)
        if reach == 0 or count + -(-uncovered.bit_count() // reach) >= best:
            return
        # branch on the uncovered node with the fewest possible dominators
        target = min(_bits(uncovered), key=lambda i: closed[i].bit_count())
        options = sorted(
            _bits(closed[target]),
            key=lambda w: -(closed[w] & uncovered).bit_count(),
        )
        for w in options:
            search(dominated | closed[w], count + 1, chosen + (w,))

    search(0, 0, ())
    return best, best_set


def ds_number(g: Graph) -> int:
    """Size of a minimum dominating set."""
    return _ds_search(g)[0]


def minimum_dominating_set(g: Graph) -> tuple[str, ...]:
    _, chosen = _ds_search(g)
    return tuple(sorted(g.nodes[i] for i in chosen))


def _multi_adj(g: Graph) -> dict[str, dict[str, int]]:
    adj: dict[str, dict[str, int]] = {v: {} for v in g.nodes}
    for u, v in g.edges:
        adj[u][v] = 1
        adj[v][u] = 1
    return adj


def _drop_node(adj: dict, v) -> None:
    for w in adj.pop(v):
        if w != v:
            del adj[w][v]


def _reduce_fvs(adj: dict, taken: list) -> object | None:
    """Apply safe reductions in place; returns a parallel pair if one remains.

    Reductions: a self loop forces its node into the solution; degree at
    most one nodes lie on no cycle; a degree two node is bypassed by
    joining its neighbours.  A parallel pair that survives is a two node
    cycle, suitable for binary branching.
    """
    pair = None
    dirty = True
    while dirty:
        dirty = False
        for v in list(adj):
            if v not in adj:
                continue
            nb = adj[v]
            if v in nb:
                _drop_node(adj, v)
                taken.append(v)
                dirty = True
                continue
            degree = sum(nb.values())
            if degree <= 1:
                _drop_node(adj, v)
                dirty = True
            elif degree == 2:
                if len(nb) == 1:
                    # doubled edge to a single neighbour: that neighbour
                    # sits on the two node cycle, taking it is optimal
                    (w,) = nb
                    _drop_node(adj, v)
                    _drop_node(adj, w)
                    taken.append(w)
                else:
                    x, y = nb
                    _drop_node(adj, v)
                    adj[x][y] = min(2, adj[x].get(y, 0) + 1)
                    adj[y][x] = adj[x][y]
                dirty = True
        if not dirty:
            for v in adj:
                for w, mult in adj[v].items():
                    if mult >= 2:
                        pair = (v, w)
                        break
                if pair:
                    break
            break
    return pair


def _some_short_cycle(adj: dict) -> list | None:
    """A short cycle in a simple min degree three graph, None if acyclic."""
    best: list | None = None
    for root in adj:
        parent = {root: None}
        depth = {root: 0}
        frontier = [root]
        while frontier and (best is None or depth[frontier[0]] * 2 < len(best)):
            nxt = []
            for x in frontier:
                for y in adj[x]:
                    if y not in depth:
                        depth[y] = depth[x] + 1
                        parent[y] = x
                        nxt.append(y)
                    elif parent[x] != y and depth[y] >= depth[x]:
                        seen = set()
                        a = x
                        while a is not None:
                            seen.add(a)
                            a = parent[a]
                        b = y
                        while b not in seen:
                            b = parent[b]
                        cycle = [b]
                        a = x
                        while a != b:
                            cycle.append(a)
                            a = parent[a]
                        tail = []
                        a = y
                        while a != b:
                            tail.append(a)
                            a = parent[a]
                        cycle.extend(reversed(tail))
                        if best is None or len(cycle) < len(best):
                            best = cycle
            frontier = nxt
        if best is not None and len(best) == 3:
            break
    return best


def _fvs_search(g: Graph, cap: int | None) -> tuple[int, tuple[str, ...]]:
    _undirected_masks(g, "fvs_number")  # directedness guard
    n = len(g.nodes)
    best = n if cap is None else min(n, cap + 1)
    best_set: tuple[str, ...] = tuple(g.nodes)

    def search(adj: dict, chosen: tuple[str, ...]) -> None:
        nonlocal best, best_set
        if len(chosen) >= best:
            return
        taken: list[str] = []
        pair = _reduce_fvs(adj, taken)
        chosen = chosen + tuple(taken)
        if len(chosen) >= best:
            return
        if pair:
            branch = list(pair)
        else:
            cycle = _some_short_cycle(adj)
            if cycle is None:
                best = len(chosen)
                best_set = chosen
                return
            # prefer high degree nodes: they tend to appear in optima
            branch = sorted(cycle, key=lambda v: -sum(adj[v].values()))
        for v in branch:
            child = {a: dict(nb) for a, nb in adj.items()}
            _drop_node(child, v)
            search(child, chosen + (v,))

    search(_multi_adj(g), ())
    return best, best_set


def fvs_number(g: Graph, cap: int | None = None) -> int:
    """Size of a minimum feedback vertex set.

    With ``cap`` the result saturates at ``cap + 1``; queries about
    budgets up to ``cap`` are unaffected and the search stays shallow.
    """
    return _fvs_search(g, cap)[0]


def minimum_feedback_set(g: Graph) -> tuple[str, ...]:
    _, chosen = _fvs_search(g, None)
    return tuple(sorted(chosen))


def _max_clique(adj: list[int], n: int) -> tuple[int, tuple[int, ...]]:
    best = 0
    best_set: tuple[int, ...] = ()

    def expand(candidates: int, members: tuple[int, ...]) -> None:
        nonlocal best, best_set
        if len(members) > best:
            best = len(members)
            best_set = members
        while candidates:
            if len(members) + candidates.bit_count() <= best:
                return
            v = (candidates & -candidates).bit_length() - 1
            candidates &= ~(1 << v)
            expand(candidates & adj[v], members + (v,))

    expand((1 << n) - 1, ())
    return best, best_set


def clique_number(g: Graph) -> int:
    """Size of a maximum clique."""
    adj = _undirected_masks(g, "clique_number")
    return _max_clique(adj, len(adj))[0]


def maximum_clique(g: Graph) -> tuple[str, ...]:
    adj = _undirected_masks(g, "clique_number")
    _, members = _max_clique(adj, len(adj))
    return tuple(sorted(g.nodes[i] for i in members))


def _complement_masks(g: Graph, context: str) -> list[int]:
    adj = _undirected_masks(g, context)
    n = len(adj)
    full = (1 << n) - 1
    return [full & ~adj[i] & ~(1 << i) for i in range(n)]


def is_number(g: Graph) -> int:
    """Size of a maximum independent set."""
    co = _complement_masks(g, "is_number")
    return _max_clique(co, len(co))[0]


def maximum_independent_set(g: Graph) -> tuple[str, ...]:
    co = _complement_masks(g, "is_number")
    _, members = _max_clique(co, len(co))
    return tuple(sorted(g.nodes[i] for i in members))


def _reachable(adj: list[int], start: int, allowed: int) -> int:
    seen = 1 << start
    frontier = seen
    while frontier:
        grow = 0
        for x in _bits(frontier):
            grow |= adj[x] & allowed & ~seen
        seen |= grow
        frontier = grow
    return seen


def _ham_search(g: Graph) -> tuple[str, ...] | None:
    n = len(g.nodes)
    if n < 3:
        return None
    if g.directed:
        out, inc = _directed_masks(g)
    else:
        out = _undirected_masks(g, "has_ham_cycle")
        inc = out
    full = (1 << n) - 1
    for i in range(n):
        if out[i] == 0 or inc[i] == 0:
            return None
    # the cycle needs the whole graph (strongly) connected
    if _reachable(out, 0, full) != full or _reachable(inc, 0, full) != full:
        return None
    start = 0

    def extend(end: int, visited: int, path: tuple[int, ...]) -> tuple[int, ...] | None:
        if visited == full:
            return path if out[end] >> start & 1 else None
        rest = full & ~visited
        for v in _bits(rest):
            # v still needs an entry from the open path side and an exit
            # toward the start
            if inc[v] & (rest | (1 << end)) == 0 or out[v] & (rest | (1 << start)) == 0:
                return None
        if _reachable(out, end, rest) & rest != rest:
            return None
        candidates = sorted(
            _bits(out[end] & rest), key=lambda v: (out[v] & rest).bit_count()
        )
        for v in candidates:
            found = extend(v, visited | (1 << v), path + (v,))
            if found is not None:
                return found
        return None

    found = extend(start, 1 << start, (start,))
    if found is None:
        return None
    return tuple(g.nodes[i] for i in found)


def has_ham_cycle(g: Graph) -> bool:
    """Whether the graph has a Hamiltonian cycle; handles both directednesses."""
    return _ham_search(g) is not None


def hamiltonian_cycle(g: Graph) -> tuple[str, ...] | None:
    """A Hamiltonian cycle as a node sequence, None when there is none."""
    return _ham_search(g)


_NUMBER_SOLVERS = {
    ProblemId.VERTEX_COVER: vc_number,
    ProblemId.DOMINATING_SET: ds_number,
    ProblemId.FEEDBACK_VERTEX_SET: fvs_number,
    ProblemId.CLIQUE: clique_number,
    ProblemId.INDEPENDENT_SET: is_number,
}

_SOLUTION_SOLVERS = {
    ProblemId.VERTEX_COVER: minimum_vertex_cover,
    ProblemId.DOMINATING_SET: minimum_dominating_set,
    ProblemId.FEEDBACK_VERTEX_SET: minimum_feedback_set,
    ProblemId.CLIQUE: maximum_clique,
    ProblemId.INDEPENDENT_SET: maximum_independent_set,
}


def budget_threshold(problem: ProblemId, g: Graph) -> int:
    """The number that settles every budget query for ``problem`` on ``g``.

    A minimising problem is positive at budget ``k`` iff ``k >= threshold``;
    a maximising one iff ``k <= threshold``.
    """
    try:
        solver = _NUMBER_SOLVERS[problem]
    except KeyError:
        raise SolverError(f"{problem.value} takes no budget") from None
    return solver(g)


def optimal_solution(problem: ProblemId, g: Graph) -> tuple[str, ...]:
    """An optimal solution set for a budgeted problem."""
    try:
        solver = _SOLUTION_SOLVERS[problem]
    except KeyError:
        raise SolverError(f"{problem.value} takes no budget") from None
    return solver(g)


def positive_at(problem: ProblemId, g: Graph, budget: int | None) -> bool:
    """Decision for an instance, computed through the threshold solvers."""
    if not problem.requires_budget:
        return has_ham_cycle(g)
    assert budget is not None
    threshold = budget_threshold(problem, g)
    return budget >= threshold if problem.minimizing else budget <= threshold
