"""Exhaustive deciders for group connectivity and group colorability.

Every negative verdict carries a certificate (a boundary or an edge map) that
``verify_certificate`` re-checks independently; every positive search result
carries the assignment itself.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

from .abelian import FiniteAbelianGroup, element_from_json, element_to_json, enumerate_groups_of_order, parse_group_spec
from .kernels import BUDGET, DEFAULT_MAX_NODES, FOUND, NONE, color_plan, flow_plan, forbidden_csr, get_kernels
from .multigraph import GraphError, Multigraph, bridges, components, is_connected


class BudgetExceeded(RuntimeError):
    """Search stopped after ``max_nodes`` nodes; ``partial`` holds whatever was finished."""

    def __init__(self, message: str, partial=None):
        super().__init__(message)
        self.partial = partial


_flow_plan = lru_cache(maxsize=512)(flow_plan)
_color_plan = lru_cache(maxsize=512)(color_plan)


# -- value types -------------------------------------------------------------


@dataclass(frozen=True)
class ForbiddenMap:
    """Per-edge forbidden value sets, relative to the declared edge orientation."""

    sets: Mapping[str, frozenset] = field(default_factory=dict)

    @classmethod
    def coerce(cls, fm, group: FiniteAbelianGroup) -> "ForbiddenMap":
        if fm is None:
            return cls({})
        if isinstance(fm, ForbiddenMap):
            fm = fm.sets
        return cls({eid: frozenset(group.element(x) for x in vals) for eid, vals in fm.items()})

    @property
    def k(self) -> int:
        return max((len(s) for s in self.sets.values()), default=0)

    def get(self, eid: str) -> frozenset:
        return self.sets.get(eid, frozenset())

    def reversed_edge(self, eid: str, group: FiniteAbelianGroup) -> "ForbiddenMap":
        """The same constraints after flipping edge ``eid``: F_e becomes -F_e."""
        out = dict(self.sets)
        out[eid] = frozenset(group.neg(x) for x in self.get(eid))
        return ForbiddenMap(out)

    def to_json_obj(self) -> dict:
        return {eid: sorted(element_to_json(x) for x in vals) for eid, vals in sorted(self.sets.items())}

    @classmethod
    def from_json_obj(cls, obj: dict, group: FiniteAbelianGroup) -> "ForbiddenMap":
        return cls({eid: frozenset(element_from_json(x, group) for x in vals) for eid, vals in obj.items()})


def boundary_is_zero_sum(group: FiniteAbelianGroup, beta: Mapping) -> bool:
    return group.sum(beta.values()) == group.zero


@dataclass(frozen=True)
class Certificate:
    """``kind`` is one of boundary, edge-map, flow, coloring, infeasible.

    ``property`` says which claim a boundary / edge-map refutes ("connected" or
    "colorable"); ``extra`` holds optional companions such as the boundary of a
    flow, the edge map of a coloring, a forbidden map or a bridge id.
    """

    kind: str
    group: str
    values: dict
    property: str | None = None
    extra: dict = field(default_factory=dict)

    def to_json_obj(self) -> dict:
        obj = {
            "kind": self.kind,
            "group": self.group,
            "values": {str(k): element_to_json(v) for k, v in self.values.items()},
        }
        if self.property:
            obj["property"] = self.property
        for key, val in self.extra.items():
            if key in ("boundary", "edge_map"):
                obj[key] = {str(k): element_to_json(v) for k, v in val.items()}
            elif key == "forbidden":
                obj[key] = val.to_json_obj()
            else:
                obj[key] = val
        return obj

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), sort_keys=True)

    @classmethod
    def from_json_obj(cls, obj: dict, G: Multigraph | None = None) -> "Certificate":
        group = parse_group_spec(obj["group"])
        lookup = {str(v): v for v in G.vertices} if G is not None else {}

        def elements(d):
            return {lookup.get(k, k): element_from_json(v, group) for k, v in d.items()}

        extra: dict = {}
        for key, val in obj.items():
            if key in ("kind", "group", "values", "property"):
                continue
            if key in ("boundary", "edge_map"):
                extra[key] = elements(val)
            elif key == "forbidden":
                extra[key] = ForbiddenMap.from_json_obj(val, group)
            else:
                extra[key] = val
        return cls(obj["kind"], group.spec, elements(obj["values"]), obj.get("property"), extra)


@dataclass(frozen=True)
class Decision:
    """A verdict with its certificate; unpacks as ``(verdict, certificate)``."""

    verdict: bool
    certificate: Certificate | None = None
    nodes: int = 0
    checked: int = 0  # boundaries / edge maps examined

    def __iter__(self):
        return iter((self.verdict, self.certificate))

    def __bool__(self) -> bool:
        return self.verdict


@dataclass(frozen=True)
class FlowSearch:
    found: bool
    flow: dict | None
    nodes: int
    space_size: int  # |group|^(cycle rank): circulations a full sweep would visit

    def __iter__(self):
        return iter((self.found, self.flow))

    def __bool__(self) -> bool:
        return self.found


@dataclass(frozen=True)
class Verification:
    ok: bool
    violations: tuple = ()

    def __bool__(self) -> bool:
        return self.ok


# -- helpers -----------------------------------------------------------------


def _require_connected(G: Multigraph) -> None:
    if G.n == 0 or not is_connected(G):
        raise GraphError("decider needs a non-empty connected graph")


def _elements_from_codes(group, ids, codes) -> dict:
    return {i: group.decode(int(c)) for i, c in zip(ids, codes)}


def _flow_values(G: Multigraph, group: FiniteAbelianGroup, plan, base: list, x: list) -> dict:
    cur = list(base)
    neg = group.neg_codes
    for j in range(plan.r):
        for k in range(plan.upd_ptr[j], plan.upd_ptr[j + 1]):
            e = plan.upd_edge[k]
            v = int(x[j]) if plan.upd_sign[k] > 0 else neg[int(x[j])]
            cur[e] = group.encode(group.add(group.decode(cur[e]), group.decode(v)))
    return {e.id: group.decode(cur[i]) for i, e in enumerate(G.edges)}


def _tree_base(G: Multigraph, group: FiniteAbelianGroup, plan, beta: Mapping | None) -> list:
    base = [group.zero] * G.m
    if beta:
        for e in range(G.m):
            acc = group.zero
            for k in range(plan.bnd_ptr[e], plan.bnd_ptr[e + 1]):
                b = beta.get(plan.boundary_vertices[plan.bnd_slot[k]], group.zero)
                acc = group.add(acc, b if plan.bnd_sign[k] > 0 else group.neg(b))
            base[e] = acc
    return [group.encode(x) for x in base]


def _check_status(status: int, what: str, nodes: int, partial=None) -> None:
    if status == BUDGET:
        raise BudgetExceeded(f"{what}: node budget exhausted after {nodes} nodes", partial)


# -- flows -------------------------------------------------------------------


def exists_flow_avoiding(
    G: Multigraph,
    group: FiniteAbelianGroup,
    forbidden=None,
    *,
    boundary: Mapping | None = None,
    max_nodes: int = DEFAULT_MAX_NODES,
    backend: str | None = None,
) -> FlowSearch:
    """A flow with the given boundary (default: a circulation) avoiding every F_e.

    Tree-edge values are fixed by the boundary; only the cycle-space
    coordinates on the non-tree edges are searched.  Disconnected graphs are
    fine; a boundary that is unbalanced on some component has no flow.
    """
    fm = ForbiddenMap.coerce(forbidden, group)
    for eid in fm.sets:
        G.edge(eid)
    beta = {v: group.element(x) for v, x in (boundary or {}).items()}
    if beta and not boundary_is_zero_sum(group, beta):
        raise ValueError("boundary does not sum to zero")
    plan = _flow_plan(G)
    if beta and not all(boundary_is_zero_sum(group, {v: beta.get(v, group.zero) for v in comp})
                        for comp in components(G)):
        return FlowSearch(False, None, 0, group.order ** plan.r)
    base = _tree_base(G, group, plan, beta)
    fptr, fval = forbidden_csr(G, group, fm.sets)
    status, nodes, x = get_kernels(backend).search_flow(group, plan, base, fptr, fval, max_nodes)
    _check_status(status, "flow search", nodes)
    space = group.order ** plan.r
    if status == NONE:
        return FlowSearch(False, None, nodes, space)
    return FlowSearch(True, _flow_values(G, group, plan, base, x), nodes, space)


def flow_for_boundary(G: Multigraph, group: FiniteAbelianGroup, beta: Mapping, **kw) -> dict | None:
    """A nowhere-zero flow with boundary ``beta``, or None."""
    zero = {e.id: [group.zero] for e in G.edges}
    return exists_flow_avoiding(G, group, zero, boundary=beta, **kw).flow


def random_boundary(G: Multigraph, group: FiniteAbelianGroup, rng: random.Random) -> dict:
    elems = list(group.elements())
    beta = {v: rng.choice(elems) for v in G.vertices[1:]}
    beta[G.vertices[0]] = group.neg(group.sum(beta.values()))
    return {v: beta[v] for v in G.vertices}


def spot_check_connected(G: Multigraph, group: FiniteAbelianGroup, samples: int = 10, seed: int = 0) -> list:
    """Witness flows for ``samples`` seeded random boundaries: list of (beta, flow or None)."""
    rng = random.Random(seed)
    out = []
    for _ in range(samples):
        beta = random_boundary(G, group, rng)
        out.append((beta, flow_for_boundary(G, group, beta)))
    return out


def _bridge_certificate(G: Multigraph, group: FiniteAbelianGroup, eid: str) -> Certificate:
    beta = {v: group.zero for v in G.vertices}
    return Certificate("boundary", group.spec, beta, "connected", {"bridge": eid})


def is_group_connected(
    G: Multigraph,
    group: FiniteAbelianGroup,
    *,
    max_nodes: int = DEFAULT_MAX_NODES,
    backend: str | None = None,
) -> Decision:
    """Does every zero-sum boundary admit a nowhere-zero flow?

    On "no" the certificate is the first failing boundary in canonical order
    (the value on the first vertex is implied by the others).
    """
    _require_connected(G)
    br = bridges(G)
    if br:
        eid = next(e.id for e in G.edges if e.id in br)
        return Decision(False, _bridge_certificate(G, group, eid))
    plan = _flow_plan(G)
    zero = {e.id: [group.zero] for e in G.edges}
    fptr, fval = forbidden_csr(G, group, zero)
    status, nodes, count, beta = get_kernels(backend).all_boundaries(group, plan, fptr, fval, max_nodes)
    _check_status(status, "connectivity decider", nodes)
    if status == FOUND:
        return Decision(True, None, nodes, count)
    values = {v: group.zero for v in G.vertices}
    values.update(_elements_from_codes(group, plan.boundary_vertices, beta))
    root = G.vertices[0]
    values[root] = group.neg(group.sum(x for v, x in values.items() if v != root))
    return Decision(False, Certificate("boundary", group.spec, values, "connected"), nodes, count)


def is_group_connected_by_forbidden_values(
    G: Multigraph,
    group: FiniteAbelianGroup,
    *,
    max_nodes: int = DEFAULT_MAX_NODES,
    backend: str | None = None,
) -> Decision:
    """Does every single-valued forbidden map admit a circulation avoiding it?

    Sweeps all |group|^m maps; the certificate of a "no" is the first bad map.
    """
    _require_connected(G)
    plan = _flow_plan(G)
    status, nodes, count, phi = get_kernels(backend).all_forbidden_maps(group, plan, max_nodes)
    _check_status(status, "forbidden-value decider", nodes)
    if status == FOUND:
        return Decision(True, None, nodes, count)
    values = _elements_from_codes(group, G.edge_ids, phi)
    return Decision(False, Certificate("edge-map", group.spec, values, "connected"), nodes, count)


# -- colorings ---------------------------------------------------------------


def find_coloring(
    G: Multigraph,
    group: FiniteAbelianGroup,
    phi: Mapping | None = None,
    *,
    max_nodes: int = DEFAULT_MAX_NODES,
    backend: str | None = None,
) -> dict | None:
    """A coloring with c(head) - c(tail) != phi(e) on every edge, or None."""
    phi = phi or {}
    for eid in phi:
        G.edge(eid)
    plan = _color_plan(G)
    codes = [group.encode(group.element(phi[e.id])) if e.id in phi else 0 for e in G.edges]
    status, nodes, c = get_kernels(backend).search_coloring(group, plan, codes, max_nodes)
    _check_status(status, "coloring search", nodes)
    if status == NONE:
        return None
    col = _elements_from_codes(group, plan.order, c)
    return {v: col[v] for v in G.vertices}


def is_group_colorable(
    G: Multigraph,
    group: FiniteAbelianGroup,
    *,
    switching: bool = True,
    max_nodes: int = DEFAULT_MAX_NODES,
    backend: str | None = None,
) -> Decision:
    """Does every edge map admit a proper coloring?

    With ``switching`` only edge maps vanishing on a spanning forest are
    tried: shifting c(v) by d changes phi by +-d on the edges at v, so every
    map is equivalent to one of those.
    """
    plan = _color_plan(G)
    free = plan.free_edges if switching else tuple(range(G.m))
    status, nodes, count, phi = get_kernels(backend).all_edge_maps(group, plan, free, max_nodes)
    _check_status(status, "colorability decider", nodes)
    if status == FOUND:
        return Decision(True, None, nodes, count)
    values = _elements_from_codes(group, G.edge_ids, phi)
    return Decision(False, Certificate("edge-map", group.spec, values, "colorable"), nodes, count)


def chromatic_number(G: Multigraph, *, max_nodes: int = DEFAULT_MAX_NODES) -> int:
    if G.n == 0:
        return 0
    k = 1
    while find_coloring(G, FiniteAbelianGroup.cyclic(k) if k > 1 else FiniteAbelianGroup(()),
                        max_nodes=max_nodes) is None:
        k += 1
    return k


# -- profiles ----------------------------------------------------------------


@dataclass(frozen=True)
class ProfileEntry:
    order: int
    group: str
    verdict: bool
    certificate: Certificate | None


@dataclass
class Profile:
    """Verdicts for every group of order 1..max_order.

    ``strong_number`` is bounded evidence only: the least n such that every
    tested group of order n..max_order said yes.
    """

    property: str
    max_order: int
    entries: list = field(default_factory=list)
    complete: bool = True

    def by_order(self, n: int) -> list:
        return [e for e in self.entries if e.order == n]

    def verdict(self, spec: str) -> bool | None:
        g = parse_group_spec(spec).spec
        return next((e.verdict for e in self.entries if e.group == g), None)

    @property
    def weak_number(self) -> int | None:
        return next((e.order for e in self.entries if e.verdict), None)

    @property
    def strong_number(self) -> int | None:
        done = {e.order for e in self.entries}
        best = None
        for n in range(self.max_order, 0, -1):
            if n not in done or not all(e.verdict for e in self.by_order(n)):
                break
            best = n
        return best

    def to_json_obj(self) -> dict:
        return {
            "property": self.property,
            "max_order": self.max_order,
            "complete": self.complete,
            "weak_number": self.weak_number,
            "strong_number_bounded": self.strong_number,
            "entries": [
                {
                    "order": e.order,
                    "group": e.group,
                    "verdict": e.verdict,
                    "certificate": e.certificate.to_json_obj() if e.certificate else None,
                }
                for e in self.entries
            ],
        }


def _profile(G, max_order, decider, prop, max_nodes, backend) -> Profile:
    prof = Profile(prop, max_order)
    left = max_nodes
    for n in range(1, max_order + 1):
        for grp in enumerate_groups_of_order(n):
            try:
                d = decider(G, grp, max_nodes=left, backend=backend)
            except BudgetExceeded as exc:
                prof.complete = False
                raise BudgetExceeded(f"profile stopped at {grp.spec}: {exc}", prof) from exc
            left -= d.nodes
            prof.entries.append(ProfileEntry(n, grp.spec, d.verdict, d.certificate))
    return prof


def connectivity_profile(
    G: Multigraph, max_order: int, *, max_nodes: int = DEFAULT_MAX_NODES, backend: str | None = None
) -> Profile:
    return _profile(G, max_order, is_group_connected, "connected", max_nodes, backend)


def colorability_profile(
    G: Multigraph, max_order: int, *, max_nodes: int = DEFAULT_MAX_NODES, backend: str | None = None
) -> Profile:
    return _profile(G, max_order, is_group_colorable, "colorable", max_nodes, backend)


# -- verification ------------------------------------------------------------


def _known(G: Multigraph, mapping: Mapping, what: str, has) -> None:
    unknown = [k for k in mapping if not has(k)]
    if unknown:
        raise ValueError(f"unknown {what} id(s): {unknown}")


def _strict(group: FiniteAbelianGroup, x):
    """Element as a tuple if ``x`` is one verbatim (ints allowed for cyclic groups), else None."""
    if isinstance(x, int) and not isinstance(x, bool) and len(group.invariant_factors) == 1:
        x = (x,)
    return tuple(x) if group.contains(x) else None


def verify_flow(
    G: Multigraph,
    group: FiniteAbelianGroup,
    f: Mapping,
    beta: Mapping | None = None,
    forbidden=None,
) -> Verification:
    """Conservation against ``beta`` (default zero) and avoidance of every F_e."""
    _known(G, f, "edge", G.has_edge)
    beta = beta or {}
    _known(G, beta, "vertex", G.has_vertex)
    fm = ForbiddenMap.coerce(forbidden, group)
    _known(G, fm.sets, "edge", G.has_edge)
    bad = []
    vals = {}
    for e in G.edges:
        if e.id not in f:
            bad.append(f"edge {e.id}: no value")
            continue
        x = _strict(group, f[e.id])
        if x is None:
            bad.append(f"edge {e.id}: {f[e.id]!r} is not in {group.spec}")
            continue
        vals[e.id] = x
        if vals[e.id] in fm.get(e.id):
            bad.append(f"edge {e.id}: value {list(vals[e.id])} is forbidden")
    if len(vals) == G.m:
        for v in G.vertices:
            out = group.sum(vals[e.id] for e in G.out_edges(v))
            inn = group.sum(vals[e.id] for e in G.in_edges(v))
            net = group.sub(out, inn)
            want = group.element(beta[v]) if v in beta else group.zero
            if net != want:
                bad.append(f"vertex {v}: net outflow {list(net)} != boundary {list(want)}")
    return Verification(not bad, tuple(bad))


def verify_coloring(G: Multigraph, group: FiniteAbelianGroup, c: Mapping, phi: Mapping | None = None) -> Verification:
    _known(G, c, "vertex", G.has_vertex)
    phi = phi or {}
    _known(G, phi, "edge", G.has_edge)
    bad = [f"vertex {v}: no color" for v in G.vertices if v not in c]
    bad += [f"vertex {v}: {x!r} is not in {group.spec}" for v, x in c.items() if _strict(group, x) is None]
    if not bad:
        for e in G.edges:
            p = group.element(phi[e.id]) if e.id in phi else group.zero
            if group.sub(_strict(group, c[e.head]), _strict(group, c[e.tail])) == p:
                bad.append(f"edge {e.id}: c({e.head}) - c({e.tail}) = {list(p)} is the banned value")
    return Verification(not bad, tuple(bad))


def verify_certificate(G: Multigraph, cert: Certificate, *, max_nodes: int = DEFAULT_MAX_NODES) -> Verification:
    """Independent re-check of any certificate emitted by this package."""
    group = parse_group_spec(cert.group)
    if cert.kind == "flow":
        return verify_flow(G, group, cert.values, cert.extra.get("boundary"), cert.extra.get("forbidden"))
    if cert.kind == "coloring":
        return verify_coloring(G, group, cert.values, cert.extra.get("edge_map"))
    if cert.kind == "boundary":
        beta = cert.values
        _known(G, beta, "vertex", G.has_vertex)
        if not boundary_is_zero_sum(group, beta):
            return Verification(False, ("boundary does not sum to zero",))
        eid = cert.extra.get("bridge")
        if eid is not None:
            if eid not in bridges(G):
                return Verification(False, (f"edge {eid} is not a bridge",))
            side = components(G, removed=[eid])
            tail_side = next(c for c in side if G.edge(eid).tail in c)
            if group.sum(beta.get(v, group.zero) for v in tail_side) != group.zero:
                return Verification(False, (f"boundary does not force a zero value on bridge {eid}",))
            return Verification(True)
        flow = flow_for_boundary(G, group, beta, max_nodes=max_nodes)
        if flow is not None:
            return Verification(False, ("boundary admits a nowhere-zero flow",))
        return Verification(True)
    if cert.kind == "edge-map":
        phi = cert.values
        _known(G, phi, "edge", G.has_edge)
        if cert.property == "colorable":
            c = find_coloring(G, group, phi, max_nodes=max_nodes)
            return Verification(c is None, () if c is None else ("edge map admits a proper coloring",))
        single = {eid: [x] for eid, x in phi.items()}
        res = exists_flow_avoiding(G, group, single, max_nodes=max_nodes)
        return Verification(not res.found, () if not res.found else ("edge map is avoided by a circulation",))
    if cert.kind == "infeasible":
        res = exists_flow_avoiding(G, group, cert.extra.get("forbidden"), max_nodes=max_nodes)
        return Verification(not res.found, () if not res.found else ("a flow avoids the forbidden map",))
    raise ValueError(f"unknown certificate kind {cert.kind!r}")


def flow_certificate(group: FiniteAbelianGroup, flow: dict, forbidden=None, boundary=None) -> Certificate:
    extra: dict = {}
    if boundary:
        extra["boundary"] = boundary
    if forbidden is not None and ForbiddenMap.coerce(forbidden, group).sets:
        extra["forbidden"] = ForbiddenMap.coerce(forbidden, group)
    return Certificate("flow", group.spec, dict(flow), None, extra)


def infeasible_certificate(group: FiniteAbelianGroup, forbidden) -> Certificate:
    """Claim that no circulation avoids ``forbidden``; checked by exhaustive search."""
    return Certificate("infeasible", group.spec, {}, None, {"forbidden": ForbiddenMap.coerce(forbidden, group)})


def coloring_certificate(group: FiniteAbelianGroup, c: dict, phi: Mapping | None = None) -> Certificate:
    extra = {"edge_map": dict(phi)} if phi else {}
    return Certificate("coloring", group.spec, dict(c), None, extra)


def groups_up_to(max_order: int) -> Iterable[FiniteAbelianGroup]:
    for n in range(1, max_order + 1):
        yield from enumerate_groups_of_order(n)
