"""Constructive flows avoiding per-edge forbidden values.

The structured route works on ``H = G - v`` for a 3-edge-connected ``G`` and a
degree-3 vertex ``v``: expand ``G`` to a cubic graph, pick a spanning tree whose
co-tree contraction is 2-constructible, then

* Step 1 walks the build order backwards and pushes a value ``gamma_i`` around
  a cycle through each red pair, chosen so that every later drift from the
  simple sum ``Pi'`` keeps both pair edges allowed;
* Step 2 repairs bad blue edges in rounds, one ``gamma`` from ``Pi`` per round,
  along the symmetric difference of their fundamental cycles.

Every result is checked with ``verify_flow``; if the structured route fails for
any reason the exhaustive search takes over and the report says so.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import lru_cache

from .abelian import FiniteAbelianGroup, SimpleSumBasis, choose_simple_sum_basis, element_to_json
from .decide import ForbiddenMap, exists_flow_avoiding, verify_flow
from .kernels import DEFAULT_MAX_NODES
from .multigraph import (
    Edge,
    ExpansionError,
    GraphError,
    Multigraph,
    SpecialTreeError,
    cubic_expansion,
    cyclicity,
    edge_connectivity_class,
    normalize_to_subdivision,
    special_spanning_tree,
)


class StructuredFailure(RuntimeError):
    """The structured route could not finish; ``reason`` says where."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


class NoFlowExists(RuntimeError):
    """Exhaustive search proved that no allowed flow exists."""

    def __init__(self, message: str, space_size: int):
        super().__init__(message)
        self.space_size = space_size


@dataclass
class SolverReport:
    flow: dict
    path: str  # "structured" | "fallback"
    group: str
    k: int
    regime: str  # "guaranteed" | "outside-guarantee"
    step1_choices: list = field(default_factory=list)  # (pair index, cycle edge ids, gamma)
    step2_rounds: list = field(default_factory=list)  # (gamma, repaired blue edge ids)
    basis: SimpleSumBasis | None = None
    fallback_reason: str | None = None
    notes: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        return {
            "path": self.path,
            "group": self.group,
            "k": self.k,
            "regime": self.regime,
            "flow": {eid: element_to_json(x) for eid, x in self.flow.items()},
            "step1_choices": [
                {"pair": i, "cycle": list(cyc), "gamma": element_to_json(g)} for i, cyc, g in self.step1_choices
            ],
            "step2_rounds": [{"gamma": element_to_json(g), "repaired": list(ids)} for g, ids in self.step2_rounds],
            "basis": None
            if self.basis is None
            else {
                "pi": [element_to_json(x) for x in self.basis.pi],
                "pi_prime_size": self.basis.pi_prime_size,
                "method": self.basis.method,
            },
            "fallback_reason": self.fallback_reason,
            "notes": self.notes,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)


def guarantee_regime(order: int, k: int, q: int = 1) -> str:
    return "guaranteed" if order > 8 * (k * q) ** 3 else "outside-guarantee"


@lru_cache(maxsize=64)
def _basis(group: FiniteAbelianGroup, size: int) -> SimpleSumBasis:
    return choose_simple_sum_basis(group, size)


def solving_basis(group: FiniteAbelianGroup, k: int) -> SimpleSumBasis:
    """Inverse-closed Pi of size 2k with the smallest simple sum found."""
    if k == 0:
        return SimpleSumBasis((), frozenset({group.zero}), 0, "empty")
    if group.order <= 2 * k:
        raise StructuredFailure(f"group of order {group.order} has no inverse-closed subset of size {2 * k}")
    return _basis(group, 2 * k)


@lru_cache(maxsize=128)
def _decomposition(G: Multigraph, v):
    exp = cubic_expansion(G)
    H = exp.graph.without_vertex(v)
    return exp, H, special_spanning_tree(H)


# -- structured route ---------------------------------------------------------


class _Tree:
    """Red spanning tree of H with parent pointers for fundamental cycles."""

    def __init__(self, H: Multigraph, red: frozenset):
        root = H.vertices[0]
        self.parent = {root: None}
        self.depth = {root: 0}
        q = deque([root])
        while q:
            u = q.popleft()
            for e in H.incident(u):
                w = e.other(u)
                if e.id in red and w not in self.parent:
                    self.parent[w] = e
                    self.depth[w] = self.depth[u] + 1
                    q.append(w)

    def path(self, a, b) -> list:
        """Tree path from a to b as (edge, from, to) steps."""
        up_a, up_b = [], []
        while a != b:
            if self.depth[a] >= self.depth[b]:
                e = self.parent[a]
                up_a.append((e, a, e.other(a)))
                a = e.other(a)
            else:
                e = self.parent[b]
                up_b.append((e, e.other(b), b))
                b = e.other(b)
        return up_a + list(reversed(up_b))


def _blue_path(H: Multigraph, blue: frozenset, a, b) -> list:
    prev = {a: None}
    q = deque([a])
    while q and b not in prev:
        u = q.popleft()
        for e in H.incident(u):
            w = e.other(u)
            if e.id in blue and w not in prev:
                prev[w] = (e, u)
                q.append(w)
    if b not in prev:
        raise StructuredFailure("blue block is not connected")
    steps = []
    while prev[b] is not None:
        e, u = prev[b]
        steps.append((e, u, b))
        b = u
    return list(reversed(steps))


def _side_path(H: Multigraph, deco, block_of: dict, side: frozenset, a, b) -> list:
    """Path from a to b inside ``side`` that visits every blue block at most once.

    Breadth-first search over blocks along red edges inside ``side``, then each
    visited block is crossed along its unique blue tree path.
    """
    red_inside = [e for e in H.edges if e.id in deco.tree_edges and e.tail in side and e.head in side]
    start, goal = block_of[a], block_of[b]
    prev = {start: None}
    q = deque([start])
    while q and goal not in prev:
        X = q.popleft()
        for e in red_inside:
            for u, w in ((e.tail, e.head), (e.head, e.tail)):
                if block_of[u] == X and block_of[w] not in prev:
                    prev[block_of[w]] = (e, u, w)
                    q.append(block_of[w])
    if goal not in prev:
        raise StructuredFailure("no block path inside a split side")
    hops = []
    X = goal
    while prev[X] is not None:
        e, u, w = prev[X]
        hops.append((e, u, w))
        X = block_of[u]
    hops.reverse()
    steps = []
    cur = a
    for e, u, w in hops:
        steps += _blue_path(H, deco.nontree_edges, cur, u)
        steps.append((e, u, w))
        cur = w
    steps += _blue_path(H, deco.nontree_edges, cur, b)
    return steps


def _peel_cycles(edges: list) -> list:
    """Split an even multigraph (list of Edge) into edge-disjoint cycles of (edge, from, to) steps."""
    adj: dict = {}
    for e in edges:
        adj.setdefault(e.tail, []).append(e)
        adj.setdefault(e.head, []).append(e)
    used: set = set()
    cycles = []

    def next_edge(u):
        lst = adj[u]
        while lst and lst[-1].id in used:
            lst.pop()
        return lst[-1] if lst else None

    for start in list(adj):
        while next_edge(start) is not None:
            verts = [start]
            steps: list = []
            pos = {start: 0}
            while True:
                u = verts[-1]
                e = next_edge(u)
                if e is None:
                    raise StructuredFailure("symmetric difference is not an even graph")
                used.add(e.id)
                w = e.other(u)
                if w in pos:
                    i = pos[w]
                    cycles.append(steps[i:] + [(e, u, w)])
                    for x in verts[i + 1:]:
                        del pos[x]
                    verts = verts[: i + 1]
                    steps = steps[:i]
                    if len(verts) == 1:
                        break
                else:
                    pos[w] = len(verts)
                    verts.append(w)
                    steps.append((e, u, w))
    return cycles


def _push(group, flow: dict, steps: list, gamma) -> None:
    neg = group.neg(gamma)
    for e, u, _w in steps:
        flow[e.id] = group.add(flow[e.id], gamma if e.tail == u else neg)


def _structured(H: Multigraph, deco, fm: ForbiddenMap, group: FiniteAbelianGroup, basis: SimpleSumBasis, report):
    flow = {e.id: group.zero for e in H.edges}
    pi_prime = list(basis.pi_prime)
    block_of = {u: i for i, blk in enumerate(deco.blocks) for u in blk}
    N = group.order
    done_pairs: set = set()

    # Step 1
    for idx in range(len(deco.build_order) - 1, -1, -1):
        split = deco.splits[idx]
        e1, e2 = (H.edge(eid) for eid in split.pair)
        if set(split.pair) & done_pairs:
            raise StructuredFailure("build order revisits a pair")
        a1, b1 = (e1.tail, e1.head) if e1.tail in split.side_a else (e1.head, e1.tail)
        a2, b2 = (e2.tail, e2.head) if e2.tail in split.side_a else (e2.head, e2.tail)
        first, second = (e1, a1, b1), (e2, b2, a2)
        cycle = (
            [first]
            + _side_path(H, deco, block_of, split.side_b, b1, b2)
            + [second]
            + _side_path(H, deco, block_of, split.side_a, a2, a1)
        )
        visited = [u for _, u, _ in cycle]
        if len(set(visited)) != len(visited):
            raise StructuredFailure("lifted cycle is not simple")
        used_red = {e.id for e, _, _ in cycle if e.id in deco.tree_edges}
        if used_red & done_pairs:
            raise StructuredFailure("cycle uses a pair that already has its value")
        excluded: set = set()
        for e, u, _ in (first, second):
            sign_pos = e.tail == u
            for alpha in fm.get(e.id):
                d = group.sub(alpha, flow[e.id])
                d = d if sign_pos else group.neg(d)
                for p in pi_prime:
                    excluded.add(group.encode(group.add(d, p)))
        code = next((c for c in range(N) if c not in excluded), None)
        if code is None:
            raise StructuredFailure(f"no admissible gamma for pair {idx}")
        gamma = group.decode(code)
        _push(group, flow, cycle, gamma)
        done_pairs.update(split.pair)
        report.step1_choices.append((idx, tuple(e.id for e, _, _ in cycle), gamma))

    # every red edge must survive any drift from Pi'
    for eid in deco.tree_edges:
        for p in pi_prime:
            if group.add(flow[eid], p) in fm.get(eid):
                raise StructuredFailure(f"red edge {eid} is not protected after step 1")
    red_after_step1 = {eid: flow[eid] for eid in deco.tree_edges}

    # Step 2
    tree = _Tree(H, deco.tree_edges)
    blue_order = [e for e in H.edges if e.id in deco.nontree_edges]
    used_gammas: set = set()
    outside_pi = False
    while True:
        bad = [e for e in blue_order if flow[e.id] in fm.get(e.id)]
        if not bad:
            break

        def good(gamma, e):
            return (
                group.add(flow[e.id], gamma) not in fm.get(e.id)
                and group.sub(flow[e.id], gamma) not in fm.get(e.id)
            )

        first = bad[0]
        gamma = next((g for g in basis.pi if g not in used_gammas and good(g, first)), None)
        if gamma is None:
            outside_pi = True
            gamma = next((g for g in group.elements() if g not in used_gammas and good(g, first)), None)
            if gamma is None:
                raise StructuredFailure(f"no good gamma for blue edge {first.id}")
        used_gammas.add(gamma)
        E_gamma = [e for e in bad if good(gamma, e)]
        parity: dict = {}
        for e in E_gamma:
            parity[e.id] = parity.get(e.id, 0) ^ 1
            for te, _, _ in tree.path(e.head, e.tail):
                parity[te.id] = parity.get(te.id, 0) ^ 1
        diff = [H.edge(eid) for eid, bit in parity.items() if bit]
        if {e.id for e in diff if e.id in deco.nontree_edges} != {e.id for e in E_gamma}:
            raise StructuredFailure("round would touch blue edges outside its bad set")
        for cyc in _peel_cycles(diff):
            _push(group, flow, cyc, gamma)
        report.step2_rounds.append((gamma, tuple(e.id for e in E_gamma)))

    if not outside_pi:
        for eid, before in red_after_step1.items():
            if group.sub(flow[eid], before) not in basis.pi_prime:
                raise StructuredFailure(f"red edge {eid} drifted outside the simple sum")
    report.notes["gamma_outside_pi"] = outside_pi
    return flow


def _fallback(G: Multigraph, fm: ForbiddenMap, group: FiniteAbelianGroup, max_nodes: int) -> dict:
    res = exists_flow_avoiding(G, group, fm, max_nodes=max_nodes)
    if not res.found:
        raise NoFlowExists(f"no flow avoids the forbidden values ({res.space_size} circulations)", res.space_size)
    return res.flow


def _finish(G, fm, group, report, run, require_structured, max_nodes) -> SolverReport:
    try:
        flow = run()
        check = verify_flow(G, group, flow, None, fm)
        if not check.ok:
            raise StructuredFailure("structured flow failed verification: " + "; ".join(check.violations))
        report.flow = flow
    except (StructuredFailure, SpecialTreeError, ExpansionError) as exc:
        if require_structured:
            raise StructuredFailure(str(exc)) from exc
        report.path = "fallback"
        report.fallback_reason = str(exc)
        report.step1_choices.clear()
        report.step2_rounds.clear()
        report.flow = _fallback(G, fm, group, max_nodes)
    final = verify_flow(G, group, report.flow, None, fm)
    assert final.ok, final.violations
    return report


def solve_forbidden_flow_apex(
    G: Multigraph,
    v,
    forbidden,
    group: FiniteAbelianGroup,
    *,
    require_structured: bool = False,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SolverReport:
    """Flow on ``G - v`` avoiding ``forbidden`` (edges of ``G - v``; others ignored)."""
    if edge_connectivity_class(G) < 3:
        raise GraphError("the structured solver needs a 3-edge-connected graph")
    if G.degree(v) != 3:
        raise GraphError(f"vertex {v!r} must have degree 3, not {G.degree(v)}")
    H0 = G.without_vertex(v)
    fm = ForbiddenMap.coerce(forbidden, group)
    fm = ForbiddenMap({eid: s for eid, s in fm.sets.items() if H0.has_edge(eid)})
    k = fm.k
    report = SolverReport({}, "structured", group.spec, k, guarantee_regime(group.order, k))

    def run():
        report.basis = solving_basis(group, k)
        exp, H, deco = _decomposition(G, v)
        report.notes.update(
            expanded_vertices=exp.graph.n, blocks=len(deco.blocks), pairs=len(deco.build_order)
        )
        flow = _structured(H, deco, fm, group, report.basis, report)
        return {e.id: flow[e.id] for e in H0.edges}

    return _finish(H0, fm, group, report, run, require_structured, max_nodes)


APEX = "apex"


def add_apex(G: Multigraph) -> tuple[Multigraph, str]:
    """Join a new degree-3 vertex to the first three vertices (repeating them if fewer)."""
    name = APEX
    while G.has_vertex(name):
        name += "'"
    targets = [G.vertices[i % G.n] for i in range(3)]
    taken = set(G.edge_ids)
    edges = list(G.edges)
    for i, t in enumerate(targets):
        eid = f"{name}#{i}"
        while eid in taken:
            eid += "'"
        taken.add(eid)
        edges.append(Edge(eid, name, t))
    return Multigraph(G.vertices + (name,), tuple(edges)), name


def solve_forbidden_flow_3ec(
    G: Multigraph,
    forbidden,
    group: FiniteAbelianGroup,
    *,
    require_structured: bool = False,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SolverReport:
    """Flow on a 3-edge-connected ``G`` avoiding ``forbidden``, via an added apex vertex."""
    fm = ForbiddenMap.coerce(forbidden, group)
    if G.m == 0:
        if G.n > 1:
            raise GraphError("graph is disconnected")
        return SolverReport({}, "structured", group.spec, fm.k, guarantee_regime(group.order, fm.k))
    if edge_connectivity_class(G) < 3:
        raise GraphError("graph is not 3-edge-connected")
    Ga, apex = add_apex(G)
    if edge_connectivity_class(Ga) < 3:
        raise GraphError("apex attachment broke 3-edge-connectivity")
    report = solve_forbidden_flow_apex(Ga, apex, fm, group, require_structured=require_structured, max_nodes=max_nodes)
    report.notes["apex_targets"] = [str(e.head) for e in Ga.edges if e.tail == apex]
    return report


def solve_forbidden_flow_2ec(
    G: Multigraph,
    forbidden,
    group: FiniteAbelianGroup,
    *,
    require_structured: bool = False,
    max_nodes: int = DEFAULT_MAX_NODES,
) -> SolverReport:
    """Flow on a 2-edge-connected ``G``: solve on the class-contracted graph and transport back."""
    fm = ForbiddenMap.coerce(forbidden, group)
    if edge_connectivity_class(G) < 2:
        raise GraphError("graph is not 2-edge-connected")
    k, q = fm.k, cyclicity(G)
    norm = normalize_to_subdivision(G)
    report = SolverReport({}, "structured", group.spec, k, guarantee_regime(group.order, k, q))
    report.notes.update(cyclicity=q, reduced_vertices=norm.graph.n, reduced_edges=norm.graph.m,
                        cycle_classes=len(norm.cycle_classes))

    def class_forbidden(path) -> frozenset:
        out = set()
        for eid, s in path:
            out.update(x if s > 0 else group.neg(x) for x in fm.get(eid))
        return frozenset(out)

    def run():
        fpp = ForbiddenMap({rep: class_forbidden(path) for rep, path in norm.class_paths.items()})
        values: dict = {}
        if norm.graph.m:
            inner = solve_forbidden_flow_3ec(norm.graph, fpp, group, require_structured=True, max_nodes=max_nodes)
            values = inner.flow
            report.basis = inner.basis
            report.step1_choices.extend(inner.step1_choices)
            report.step2_rounds.extend(inner.step2_rounds)
            report.notes["inner"] = inner.notes
        cycle_values = []
        for path in norm.cycle_classes:
            bad = {group.encode(x) for x in class_forbidden(path)}
            code = next((c for c in range(group.order) if c not in bad), None)
            if code is None:
                raise StructuredFailure("a cycle class has every value forbidden")
            cycle_values.append(group.decode(code))
        return norm.transport_to_original(G, values, cycle_values, group)

    return _finish(G, fm, group, report, run, require_structured, max_nodes)
