"""Hamilton cycle search: cheap certificates of failure, Pósa rotations, exact backtracking.

The solver never guesses.  It answers ``yes`` only with a checked cycle,
``no`` only with a structural witness or an exhausted exact search, and
``unresolved`` otherwise.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from ..graph import Graph
from .connectivity import articulation_points, is_connected

YES, NO, UNRESOLVED = "yes", "no", "unresolved"


@dataclass(frozen=True)
class HamiltonBudget:
    restarts: int = 20
    rotations_per_vertex: int = 100
    exact_n: int = 28
    exact_nodes: int = 2_000_000


@dataclass(frozen=True)
class HamiltonVerdict:
    status: str
    certificate: tuple[int, ...] | None = None
    reason: str | None = None

    @property
    def resolved(self) -> bool:
        return self.status != UNRESOLVED


class _BudgetExceeded(Exception):
    pass


def is_hamilton_cycle(g: Graph, cycle) -> bool:
    """Linear-time certificate check."""
    cycle = list(cycle)
    if len(cycle) != g.n or len(set(cycle)) != g.n or g.n < 3:
        return False
    if any(not 0 <= v < g.n for v in cycle):
        return False
    adj = g.adjacency
    nbrs = [set(a) for a in adj]
    return all(cycle[i - 1] in nbrs[cycle[i]] for i in range(g.n))


def structural_witness(g: Graph) -> str | None:
    """A reason the graph cannot be Hamiltonian, or None if none of the cheap tests fire."""
    deg = g.degrees()
    if deg.min() < 2:
        return "min-degree<2"
    if not is_connected(g):
        return "disconnected"
    if articulation_points(g):
        return "cut-vertex"
    if _forced_edge_conflict(g):
        return "forced-edges"
    return None


def _forced_edge_conflict(g: Graph) -> bool:
    """Edges at degree-2 vertices must all be used: too many at a vertex, or a short forced cycle, is fatal."""
    adj = g.adjacency
    n = g.n
    forced: list[set[int]] = [set() for _ in range(n)]
    for v in range(n):
        if len(adj[v]) == 2:
            for u in adj[v]:
                forced[v].add(u)
                forced[u].add(v)
    if any(len(f) > 2 for f in forced):
        return True
    seen = [False] * n
    for s in range(n):
        if seen[s] or len(forced[s]) != 2:
            continue
        # walk the forced component; it is a path or a cycle
        length, prev, v = 0, -1, s
        closed = False
        while True:
            seen[v] = True
            length += 1
            nxt = [u for u in forced[v] if u != prev]
            if not nxt:
                break
            prev, v = v, nxt[0]
            if v == s:
                closed = True
                break
            if seen[v]:
                break
        if closed and length < n:
            return True
    return False


def _posa_once(n: int, adj: list[list[int]], rnd: random.Random, max_rotations: int) -> list[int] | None:
    deg = [len(a) for a in adj]
    nbr_sets = [set(a) for a in adj]
    free = deg[:]  # unvisited neighbours of each vertex
    pos = [-1] * n
    path: list[int] = []

    def visit(v: int) -> None:
        pos[v] = len(path)
        path.append(v)
        for u in adj[v]:
            free[u] -= 1

    def reverse_tail(i: int) -> None:
        # path[i:] reversed in place
        seg = path[i:]
        seg.reverse()
        path[i:] = seg
        for j in range(i, len(path)):
            pos[path[j]] = j

    visit(rnd.randrange(n))
    rotations = 0
    while rotations <= max_rotations:
        L = len(path)
        end = path[-1]
        best, best_free = -1, n + 1
        for u in adj[end]:
            if pos[u] == -1:
                f = free[u]
                if f < best_free or (f == best_free and rnd.random() < 0.5):
                    best, best_free = u, f
        if best != -1:
            visit(best)
            continue
        start = path[0]
        if L == n:
            if start in nbr_sets[end]:
                return path
        else:
            if free[start] > 0:
                reverse_tail(0)
                continue
            if start in nbr_sets[end]:
                # open the cycle next to a vertex with an unvisited neighbour
                j = next(j for j in range(L) if free[path[j]] > 0)
                path[:] = path[j + 1:] + path[:j + 1]
                for i, v in enumerate(path):
                    pos[v] = i
                continue
        # rotation: edge end-y added, edge y-path[i+1] dropped
        good, ok = [], []
        for y in adj[end]:
            i = pos[y]
            if i >= L - 2:
                continue
            new_end = path[i + 1]
            if deg[new_end] == 2:
                continue
            ok.append(i)
            if (L == n and start in nbr_sets[new_end]) or (L < n and free[new_end] > 0):
                good.append(i)
        rotations += 1
        if good:
            reverse_tail(rnd.choice(good) + 1)
        elif ok:
            if L == n and rnd.random() < 0.1:
                reverse_tail(0)
            else:
                reverse_tail(rnd.choice(ok) + 1)
        else:
            reverse_tail(0)
    return None


def posa_search(g: Graph, rnd: random.Random, restarts: int = 20, rotations_per_vertex: int = 100) -> list[int] | None:
    """Rotation-extension heuristic with restarts; a returned cycle is always genuine."""
    adj = g.adjacency
    for _ in range(restarts):
        cyc = _posa_once(g.n, adj, rnd, rotations_per_vertex * g.n)
        if cyc is not None and is_hamilton_cycle(g, cyc):
            return cyc
    return None


def exact_hamilton(g: Graph, node_limit: int | None = None) -> list[int] | None:
    """Exhaustive backtracking over simple paths from a minimum-degree vertex.

    Returns a Hamilton cycle or None if none exists.  Raises
    ``_BudgetExceeded`` once ``node_limit`` search nodes have been expanded.
    """
    n = g.n
    adj = g.adjacency
    nb = [0] * n
    for v in range(n):
        for u in adj[v]:
            nb[v] |= 1 << u
    full = (1 << n) - 1
    start = min(range(n), key=lambda v: len(adj[v]))
    path = [start]
    nodes = 0

    def bits(x: int):
        while x:
            low = x & -x
            yield low.bit_length() - 1
            x ^= low

    def dfs(end: int, visited: int) -> bool:
        nonlocal nodes
        if visited == full:
            return bool(nb[end] >> start & 1)
        nodes += 1
        if node_limit is not None and nodes > node_limit:
            raise _BudgetExceeded
        unvisited = full & ~visited
        if not nb[start] & unvisited:
            return False
        avail = unvisited | (1 << end) | (1 << start)
        forced = -1
        for v in bits(unvisited):
            a = nb[v] & avail
            c = a.bit_count()
            if c < 2:
                return False
            if c == 2 and a >> end & 1 and end != start:
                if forced != -1:
                    return False
                forced = v
        # every unvisited vertex must still be reachable from the path end
        reach = nb[end] & unvisited
        frontier = reach
        while frontier:
            nxt = 0
            for v in bits(frontier):
                nxt |= nb[v]
            nxt &= unvisited & ~reach
            reach |= nxt
            frontier = nxt
        if reach != unvisited:
            return False
        if forced != -1:
            cands = [forced]
        else:
            cands = sorted(bits(nb[end] & unvisited), key=lambda v: (nb[v] & avail).bit_count())
        for v in cands:
            path.append(v)
            if dfs(v, visited | (1 << v)):
                return True
            path.pop()
        return False

    if dfs(start, 1 << start):
        return path[:]
    return None


def hamilton_solve(g: Graph, budget: HamiltonBudget | None = None, seed: int = 0) -> HamiltonVerdict:
    if g.n < 3:
        raise ValueError("Hamilton cycles need at least 3 vertices")
    budget = budget or HamiltonBudget()
    reason = structural_witness(g)
    if reason is not None:
        return HamiltonVerdict(NO, reason=reason)
    rnd = random.Random(seed)
    cyc = posa_search(g, rnd, budget.restarts, budget.rotations_per_vertex)
    if cyc is not None:
        return HamiltonVerdict(YES, certificate=tuple(cyc))
    if g.n <= budget.exact_n:
        try:
            cyc = exact_hamilton(g, budget.exact_nodes)
        except _BudgetExceeded:
            return HamiltonVerdict(UNRESOLVED, reason="budget")
        if cyc is None:
            return HamiltonVerdict(NO, reason="exhausted")
        return HamiltonVerdict(YES, certificate=tuple(cyc))
    return HamiltonVerdict(UNRESOLVED, reason="heuristic-failed")


def exact_hamilton_verdict(g: Graph, node_limit: int | None = None) -> HamiltonVerdict:
    """Exact solver alone, for cross-checking; no heuristics, no structural shortcuts."""
    if g.n < 3:
        raise ValueError("Hamilton cycles need at least 3 vertices")
    try:
        cyc = exact_hamilton(g, node_limit)
    except _BudgetExceeded:
        return HamiltonVerdict(UNRESOLVED, reason="budget")
    if cyc is None:
        return HamiltonVerdict(NO, reason="exhausted")
    return HamiltonVerdict(YES, certificate=tuple(cyc))
