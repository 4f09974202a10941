"""2-constructible graphs and spanning trees whose co-tree contraction is 2-constructible.

A 2-constructible graph is a single vertex, or two disjoint 2-constructible
graphs joined by exactly two new edges.  Both searches below work on vertex
subsets encoded as bitmasks: a subset splits when exactly two of its internal
edges cross between two connected halves.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .core import GraphError, Multigraph
from .cuts import is_connected


class SpecialTreeError(GraphError):
    def __init__(self, message: str, reason: str):
        super().__init__(message)
        self.reason = reason  # "not-connected" | "exhausted" | "budget"


class _Indexed:
    """Bitmask view of a multigraph."""

    def __init__(self, G: Multigraph):
        self.G = G
        self.n = G.n
        vi = G.vertex_index
        self.ends = [(vi[e.tail], vi[e.head]) for e in G.edges]
        self.ids = [e.id for e in G.edges]
        self.adj = [[] for _ in range(self.n)]
        for k, (a, b) in enumerate(self.ends):
            self.adj[a].append((k, b))
            self.adj[b].append((k, a))

    def internal(self, S: int) -> list[int]:
        return [k for k, (a, b) in enumerate(self.ends) if (S >> a) & 1 and (S >> b) & 1]

    def boundary(self, S: int) -> list[int]:
        out = []
        for v in _bits(S):
            if any(not (S >> w) & 1 for _, w in self.adj[v]):
                out.append(v)
        return out

    def components(self, S: int, edges: list[int], skip: tuple = ()) -> list[int]:
        adj: dict = {v: [] for v in _bits(S)}
        for k in edges:
            if k in skip:
                continue
            a, b = self.ends[k]
            adj[a].append(b)
            adj[b].append(a)
        comps, seen = [], 0
        for v in adj:
            if (seen >> v) & 1:
                continue
            mask = 1 << v
            stack = [v]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if not (mask >> w) & 1:
                        mask |= 1 << w
                        stack.append(w)
            seen |= mask
            comps.append(mask)
        return comps

    def splits(self, S: int, edges: list[int]):
        """Pairs of internal edges whose removal leaves exactly two halves, both edges crossing.

        For each ``e_i`` whose removal keeps ``S`` connected, the partners are the
        bridges of what remains.
        """
        low = S & -S
        adj: dict = {v: [] for v in _bits(S)}
        for k in edges:
            a, b = self.ends[k]
            adj[a].append((k, b))
            adj[b].append((k, a))
        rank = {k: i for i, k in enumerate(edges)}
        for ei in edges:
            found = _bridges(adj, low.bit_length() - 1, ei)
            if found is None:
                continue
            for ej, side in found:
                if rank[ej] <= rank[ei]:
                    continue
                A = side if side & low else S ^ side
                a, b = self.ends[ei]
                if ((A >> a) & 1) == ((A >> b) & 1):
                    continue
                yield ei, ej, A, S ^ A


def _bridges(adj: dict, root: int, skip: int):
    """Bridges of ``adj`` minus edge ``skip`` with the vertex mask below each one,
    or None if removing ``skip`` disconnects."""
    disc = {root: 0}
    low = {root: 0}
    below = {root: 1 << root}
    out = []
    stack = [(root, -1, iter(adj[root]))]
    while stack:
        u, via, it = stack[-1]
        for k, w in it:
            if k == skip or k == via:
                continue
            if w in disc:
                if disc[w] < low[u]:
                    low[u] = disc[w]
            else:
                disc[w] = low[w] = len(disc)
                below[w] = 1 << w
                stack.append((w, k, iter(adj[w])))
                break
        else:
            stack.pop()
            if stack:
                p = stack[-1][0]
                below[p] |= below[u]
                if low[u] < low[p]:
                    low[p] = low[u]
                if low[u] > disc[p]:
                    out.append((via, below[u]))
    if len(disc) != len(adj):
        return None
    return out


def _bits(S: int):
    v = 0
    while S:
        if S & 1:
            yield v
        S >>= 1
        v += 1


def _popcount(S: int) -> int:
    return bin(S).count("1")


def is_2_constructible(H: Multigraph) -> tuple[bool, list | None]:
    """Decide 2-constructibility; on success also return a build order of edge-id pairs.

    The build order lists pairs bottom-up: replaying them from isolated vertices,
    each pair joins two distinct current components.
    """
    if H.n == 0:
        return False, None
    ix = _Indexed(H)
    full = (1 << ix.n) - 1

    @lru_cache(maxsize=None)
    def solve(S: int):
        size = _popcount(S)
        edges = ix.internal(S)
        if size == 1:
            return () if not edges else None
        if len(edges) != 2 * (size - 1):
            return None
        for ei, ej, A, B in ix.splits(S, edges):
            left = solve(A)
            if left is None:
                continue
            right = solve(B)
            if right is None:
                continue
            return left + right + ((ix.ids[ei], ix.ids[ej]),)
        return None

    order = solve(full)
    if order is None:
        return False, None
    return True, list(order)


def replay_build_order(H: Multigraph, order) -> bool:
    """Check that ``order`` rebuilds ``H`` from isolated vertices, two edges at a time."""
    parent = {v: v for v in H.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    used = set()
    for a, b in order:
        if a in used or b in used or a == b:
            return False
        ea, eb = H.edge(a), H.edge(b)
        ca = {find(ea.tail), find(ea.head)}
        cb = {find(eb.tail), find(eb.head)}
        if len(ca) != 2 or ca != cb:
            return False
        x, y = ca
        parent[y] = x
        used.update((a, b))
    return used == set(H.edge_ids) and len({find(v) for v in H.vertices}) == 1


@dataclass(frozen=True)
class Split:
    pair: tuple  # (e_i, e_i') edge ids
    side_a: frozenset  # vertices of H
    side_b: frozenset


@dataclass(frozen=True)
class TreeDecoration:
    tree_edges: frozenset  # red
    nontree_edges: frozenset  # blue
    build_order: tuple  # red pairs, bottom-up
    blocks: tuple  # vertex sets of the blue components (vertices of the contraction)
    splits: tuple  # Split per build_order entry, same order

    def contraction(self, H: Multigraph) -> Multigraph:
        G, _ = H.contract(self.blocks)
        return G


def _partition_key(labels: dict, boundary: list[int]) -> tuple:
    remap: dict = {}
    return tuple(remap.setdefault(labels[v], len(remap)) for v in boundary)


def special_spanning_tree(H: Multigraph, *, budget: int = 2_000_000) -> TreeDecoration:
    """Spanning tree (red) whose co-tree (blue) contraction is 2-constructible without loops.

    Searches recursive two-edge splits of ``H`` bottom-up.  Each vertex subset
    keeps the set of achievable partitions of its boundary vertices into red
    components; leaves of the recursion are blue trees whose vertices all touch
    the boundary, and red edges must never close a cycle.
    """
    if H.n == 0 or not is_connected(H):
        raise SpecialTreeError("special spanning tree needs a non-empty connected graph", "not-connected")
    ix = _Indexed(H)
    full = (1 << ix.n) - 1
    work = [0]
    memo: dict = {}
    cap = [1]

    def states(S: int) -> dict:
        if S in memo:
            return memo[S]
        work[0] += 1
        if work[0] > budget:
            raise SpecialTreeError("special spanning tree search exceeded its budget", "budget")
        boundary = ix.boundary(S)
        bset = set(boundary)
        size = _popcount(S)
        edges = ix.internal(S)
        out: dict = {}
        # leaf: an all-blue tree; each vertex is its own red component and must reach the boundary
        if len(edges) == size - 1 and (S == full and size == 1 or all(v in bset for v in _bits(S))):
            if len(ix.components(S, edges)) == 1:
                out[_partition_key({v: v for v in boundary}, boundary)] = ("leaf", S)
        if len(edges) >= size:  # a split needs at least one cycle inside S
            productive = 0
            for ei, ej, A, B in _ordered(ix.splits(S, edges)):
                if cap[0] is not None and productive >= cap[0]:
                    break
                work[0] += 1
                before = len(out)
                sa, sb = states(A), states(B)
                if not sa or not sb:
                    continue
                ba, bb = ix.boundary(A), ix.boundary(B)
                (a1, b1) = _orient(ix.ends[ei], A)
                (a2, b2) = _orient(ix.ends[ej], A)
                for ka, wa in sa.items():
                    la = {v: ("a", c) for v, c in zip(ba, ka)}
                    for kb, wb in sb.items():
                        lb = {v: ("b", c) for v, c in zip(bb, kb)}
                        if la[a1] == la[a2] and lb[b1] == lb[b2]:
                            continue  # the two red edges would close a cycle
                        merged = _merge(la, lb, (a1, b1), (a2, b2))
                        comps = set(merged.values())
                        if S == full:
                            if len(comps) != 1:
                                continue
                            key = ()
                        else:
                            if comps != {merged[v] for v in boundary}:
                                continue  # some red component cannot reach the outside
                            key = _partition_key(merged, boundary)
                        if key not in out:
                            out[key] = ("split", ei, ej, A, ka, B, kb)
                if S == full and out:
                    break
                productive += len(out) > before
        memo[S] = out
        return out

    # first keep only a few productive splits per subset, then widen to the full search
    for cap[0] in (1, 3, None):
        memo.clear()
        if () in states(full):
            break
    else:
        raise SpecialTreeError("no spanning tree with a 2-constructible co-tree contraction", "exhausted")

    red: list = []
    blocks: list = []
    order: list = []
    splits: list = []

    def unfold(S: int, key: tuple):
        w = memo[S][key]
        if w[0] == "leaf":
            blocks.append(frozenset(H.vertices[v] for v in _bits(S)))
            return
        _, ei, ej, A, ka, B, kb = w
        unfold(A, ka)
        unfold(B, kb)
        pair = (ix.ids[ei], ix.ids[ej])
        red.extend(pair)
        order.append(pair)
        splits.append(
            Split(pair, frozenset(H.vertices[v] for v in _bits(A)), frozenset(H.vertices[v] for v in _bits(B)))
        )

    unfold(full, ())
    red_set = frozenset(red)
    deco = TreeDecoration(
        tree_edges=red_set,
        nontree_edges=frozenset(H.edge_ids) - red_set,
        build_order=tuple(order),
        blocks=tuple(blocks),
        splits=tuple(splits),
    )
    _check_decoration(H, deco)
    return deco


def _ordered(splits):
    """Balanced splits first."""
    return sorted(splits, key=lambda t: abs(_popcount(t[2]) - _popcount(t[3])))


def _orient(ends: tuple, A: int) -> tuple:
    a, b = ends
    return (a, b) if (A >> a) & 1 else (b, a)


def _merge(la: dict, lb: dict, p1: tuple, p2: tuple) -> dict:
    labels = {**la, **lb}
    parent: dict = {c: c for c in set(labels.values())}

    def find(x):
        while parent[x] != x:
            x = parent[x]
        return x

    for x, y in (p1, p2):
        rx, ry = find(labels[x]), find(labels[y])
        if rx != ry:
            parent[ry] = rx
    return {v: find(c) for v, c in labels.items()}


def _check_decoration(H: Multigraph, deco: TreeDecoration) -> None:
    red = H.without_edges(deco.nontree_edges)
    if len(deco.tree_edges) != H.n - 1 or not is_connected(red):
        raise AssertionError("red edges do not form a spanning tree")
    X = deco.contraction(H)
    if X.m != len(deco.tree_edges):
        raise AssertionError("a red edge became a loop under blue contraction")
    if not replay_build_order(X, deco.build_order):
        raise AssertionError("build order does not replay on the blue contraction")
