"""Maximum matching in general graphs (Edmonds' blossom algorithm)."""
from __future__ import annotations

from collections import deque

from ..graph import Graph


def _greedy(n: int, adj: list[list[int]]) -> list[int]:
    mate = [-1] * n
    # low-degree vertices first leaves fewer vertices stranded
    for v in sorted(range(n), key=lambda x: len(adj[x])):
        if mate[v] != -1:
            continue
        best = -1
        for u in adj[v]:
            if mate[u] == -1 and (best == -1 or len(adj[u]) < len(adj[best])):
                best = u
        if best != -1:
            mate[v], mate[best] = best, v
    return mate


def _augment_from(root: int, adj: list[list[int]], mate: list[int]) -> bool:
    """Grow an alternating forest from ``root``; augment ``mate`` and return True on success."""
    n = len(adj)
    parent = [-1] * n
    base = list(range(n))
    used = [False] * n
    used[root] = True
    q = deque([root])

    def lca(a: int, b: int) -> int:
        seen = [False] * n
        while True:
            a = base[a]
            seen[a] = True
            if mate[a] == -1:
                break
            a = parent[mate[a]]
        while True:
            b = base[b]
            if seen[b]:
                return b
            b = parent[mate[b]]

    def mark_path(v: int, b: int, child: int, blossom: list[bool]) -> None:
        while base[v] != b:
            blossom[base[v]] = blossom[base[mate[v]]] = True
            parent[v] = child
            child = mate[v]
            v = parent[mate[v]]

    while q:
        v = q.popleft()
        for to in adj[v]:
            if base[v] == base[to] or mate[v] == to:
                continue
            if to == root or (mate[to] != -1 and parent[mate[to]] != -1):
                cur = lca(v, to)
                blossom = [False] * n
                mark_path(v, cur, to, blossom)
                mark_path(to, cur, v, blossom)
                for i in range(n):
                    if blossom[base[i]]:
                        base[i] = cur
                        if not used[i]:
                            used[i] = True
                            q.append(i)
            elif parent[to] == -1:
                parent[to] = v
                if mate[to] == -1:
                    while to != -1:
                        pv = parent[to]
                        nxt = mate[pv]
                        mate[to], mate[pv] = pv, to
                        to = nxt
                    return True
                used[mate[to]] = True
                q.append(mate[to])
    return False


def maximum_matching(g: Graph, stop_on_exposed: bool = False) -> list[int]:
    """Mate array of a maximum matching (``-1`` for exposed vertices).

    With ``stop_on_exposed`` the search stops at the first vertex that no
    augmenting path can reach; that vertex is exposed in some maximum
    matching, which is all a perfect-matching test needs.
    """
    adj = g.adjacency
    mate = _greedy(g.n, adj)
    for v in range(g.n):
        if mate[v] == -1 and adj[v]:
            if not _augment_from(v, adj, mate) and stop_on_exposed:
                break
    return mate


def has_perfect_matching(g: Graph) -> bool:
    n = g.n
    if n % 2 == 1:
        return False
    if n == 0:
        return True
    if g.degrees().min() == 0:
        return False
    mate = maximum_matching(g, stop_on_exposed=True)
    return all(x != -1 for x in mate)
