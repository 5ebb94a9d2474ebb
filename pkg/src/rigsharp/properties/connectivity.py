"""Connectivity and vertex k-connectivity."""
from __future__ import annotations

from collections import deque

from ..graph import Graph, min_degree


def components(g: Graph) -> list[int]:
    """Component label per vertex (labels are the smallest vertex of each component)."""
    adj = g.adjacency
    label = [-1] * g.n
    for s in range(g.n):
        if label[s] != -1:
            continue
        label[s] = s
        stack = [s]
        while stack:
            v = stack.pop()
            for u in adj[v]:
                if label[u] == -1:
                    label[u] = s
                    stack.append(u)
    return label


def is_connected(g: Graph) -> bool:
    if g.n < 1:
        raise ValueError("connectivity of the empty graph is undefined")
    if g.num_edges < g.n - 1:
        return False
    adj = g.adjacency
    seen = [False] * g.n
    seen[0] = True
    stack = [0]
    count = 1
    while stack:
        for u in adj[stack.pop()]:
            if not seen[u]:
                seen[u] = True
                count += 1
                stack.append(u)
    return count == g.n


def articulation_points(g: Graph) -> list[int]:
    """Cut vertices, by iterative lowpoint DFS."""
    n = g.n
    adj = g.adjacency
    disc = [-1] * n
    low = [0] * n
    cut = [False] * n
    timer = 0
    for root in range(n):
        if disc[root] != -1:
            continue
        disc[root] = low[root] = timer
        timer += 1
        root_children = 0
        stack = [(root, -1, iter(adj[root]))]
        while stack:
            v, parent, it = stack[-1]
            advanced = False
            for u in it:
                if disc[u] == -1:
                    disc[u] = low[u] = timer
                    timer += 1
                    stack.append((u, v, iter(adj[u])))
                    advanced = True
                    break
                if u != parent and disc[u] < low[v]:
                    low[v] = disc[u]
            if advanced:
                continue
            stack.pop()
            if parent == -1:
                continue
            if low[v] < low[parent]:
                low[parent] = low[v]
            if parent == root:
                root_children += 1
            elif low[v] >= disc[parent]:
                cut[parent] = True
        if root_children > 1:
            cut[root] = True
    return [v for v in range(n) if cut[v]]


class _SplitNetwork:
    """Vertex-split flow network: vertex ``v`` becomes ``2v -> 2v+1`` with capacity 1."""

    def __init__(self, g: Graph):
        n = g.n
        self.n = n
        self.head: list[int] = []
        self.cap: list[int] = []
        self.out: list[list[int]] = [[] for _ in range(2 * n)]
        big = n + 1
        for v in range(n):
            self._arc(2 * v, 2 * v + 1, 1)
        for u, v in g.edges:
            self._arc(2 * u + 1, 2 * v, big)
            self._arc(2 * v + 1, 2 * u, big)
        self.base_cap = list(self.cap)

    def _arc(self, a: int, b: int, c: int) -> None:
        self.out[a].append(len(self.head))
        self.head.append(b)
        self.cap.append(c)
        self.out[b].append(len(self.head))
        self.head.append(a)
        self.cap.append(0)

    def disjoint_paths(self, s: int, t: int, limit: int) -> int:
        """Number of internally vertex-disjoint s-t paths, stopping at ``limit``."""
        cap = self.base_cap[:]
        head, out = self.head, self.out
        source, sink = 2 * s + 1, 2 * t
        flow = 0
        while flow < limit:
            prev_arc = [-1] * (2 * self.n)
            prev_arc[source] = -2
            q = deque([source])
            while q and prev_arc[sink] == -1:
                a = q.popleft()
                for e in out[a]:
                    b = head[e]
                    if cap[e] > 0 and prev_arc[b] == -1:
                        prev_arc[b] = e
                        q.append(b)
            if prev_arc[sink] == -1:
                break
            b = sink
            while b != source:
                e = prev_arc[b]
                cap[e] -= 1
                cap[e ^ 1] += 1
                b = head[e ^ 1]
            flow += 1
        return flow


def is_k_connected_flow(g: Graph, k: int) -> bool:
    """Menger check with unit vertex capacities from ``k`` fixed vertices.

    Any separator of size ``< k`` misses one of the fixed vertices ``s``
    and cuts ``s`` from some non-neighbour, so testing all pairs
    ``(s, t)`` with ``t`` not adjacent to ``s`` is sufficient.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    n = g.n
    if n <= k or min_degree(g) < k:
        return False
    net = _SplitNetwork(g)
    adj = [set(a) for a in g.adjacency]
    for s in range(k):
        for t in range(n):
            if t == s or t in adj[s] or (t < k and t < s):
                continue
            if net.disjoint_paths(s, t, k) < k:
                return False
    return True


def is_k_connected(g: Graph, k: int) -> bool:
    """True iff ``n > k`` and removing fewer than ``k`` vertices never disconnects ``g``.

    ``k = 1`` and ``k = 2`` use linear-time DFS checks; larger ``k`` use
    the vertex-capacity max-flow procedure.
    """
    if k < 1:
        raise ValueError("k must be a positive integer")
    if g.n <= k or min_degree(g) < k:
        return False
    if k == 1:
        return is_connected(g)
    if k == 2:
        return is_connected(g) and not articulation_points(g)
    return is_k_connected_flow(g, k)


def min_degree_at_least(g: Graph, k: int) -> bool:
    if k < 0:
        raise ValueError("k must be nonnegative")
    return min_degree(g) >= k
