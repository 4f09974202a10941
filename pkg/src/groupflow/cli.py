"""Command-line front end: JSON in, JSON on stdout, diagnostics on stderr.

Exit codes: 0 yes / success, 1 no (a certificate is emitted), 2 error or budget.
"""

from __future__ import annotations

import argparse
import json
import random
import sys

from .abelian import GroupSpecError, element_from_json, element_to_json, parse_group_spec
from .corpus import coloring_corpus, named_core, planar_rotation, random_3ec_core, solver_instances, two_edge_connected_corpus
from .decide import (
    BudgetExceeded,
    Certificate,
    coloring_certificate,
    colorability_profile,
    connectivity_profile,
    flow_certificate,
    infeasible_certificate,
    is_group_colorable,
    is_group_connected,
    is_group_connected_by_forbidden_values,
    verify_certificate,
)
from .families import Z3, Z5, dual_separation, lift_z3_to_z5, separating_prime, theta_dual, theta_separation
from .kernels import DEFAULT_MAX_NODES
from .multigraph import (
    GraphError,
    Multigraph,
    RotationSystem,
    SpecialTreeError,
    cycle_equivalence,
    cycle_rotation,
    edge_connectivity_class,
    find_planar_rotation,
    gen_complete,
    gen_cycle,
    gen_prism,
    gen_theta,
    planar_dual_with_rotation,
)
from .solve import (
    NoFlowExists,
    StructuredFailure,
    solve_forbidden_flow_2ec,
    solve_forbidden_flow_3ec,
    solve_forbidden_flow_apex,
)

YES, NO, ERROR = 0, 1, 2
DEFAULT_SEED = 20240


class CliError(Exception):
    pass


def _read(path: str):
    try:
        if path == "-":
            return json.load(sys.stdin)
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed JSON in {path}: {exc}") from None


def _read_option(text: str):
    """Option value given either inline as JSON or as a file path."""
    if text.lstrip().startswith(("{", "[")):
        try:
            return json.loads(text)
        except json.JSONDecodeError as exc:
            raise CliError(f"malformed inline JSON: {exc}") from None
    return _read(text)


def _graph(obj) -> Multigraph:
    if isinstance(obj, dict) and "graph" in obj and "vertices" not in obj:
        obj = obj["graph"]
    return Multigraph.from_json_obj(obj)


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _elements(d: dict) -> dict:
    return {str(k): element_to_json(v) for k, v in d.items()}


def _decision(G, group, d, prop) -> int:
    _emit({
        "property": prop,
        "group": group.spec,
        "verdict": d.verdict,
        "checked": d.checked,
        "nodes": d.nodes,
        "certificate": None if d.certificate is None else d.certificate.to_json_obj(),
        "graph": G.to_json_obj(),
    })
    return YES if d.verdict else NO


# -- subcommands -------------------------------------------------------------------


def cmd_decide_connected(a) -> int:
    G, group = _graph(_read(a.graph)), parse_group_spec(a.group)
    decider = is_group_connected if a.method == "definition" else is_group_connected_by_forbidden_values
    return _decision(G, group, decider(G, group, max_nodes=a.budget), "connected")


def cmd_decide_colorable(a) -> int:
    G, group = _graph(_read(a.graph)), parse_group_spec(a.group)
    return _decision(G, group, is_group_colorable(G, group, switching=not a.no_switching, max_nodes=a.budget),
                     "colorable")


def cmd_profile(a) -> int:
    G = _graph(_read(a.graph))
    run = connectivity_profile if a.property == "connected" else colorability_profile
    try:
        prof = run(G, a.max_order, max_nodes=a.budget)
    except BudgetExceeded as exc:
        _emit({"error": str(exc), "partial": exc.partial.to_json_obj() if exc.partial else None})
        return ERROR
    _emit({**prof.to_json_obj(), "graph": G.to_json_obj()})
    return YES


def cmd_cyclicity(a) -> int:
    G = _graph(_read(a.graph))
    part = cycle_equivalence(G)
    out = {"cyclicity": part.cyclicity}
    if a.classes:
        out["classes"] = [list(c) for c in part.classes]
    _emit(out)
    return YES


def _forbidden(path, group) -> dict:
    if path is None:
        return {}
    obj = _read_option(path)
    if not isinstance(obj, dict):
        raise CliError("forbidden map must be a JSON object of edge id -> list of elements")
    return {str(eid): [element_from_json(x, group) for x in vals] for eid, vals in obj.items()}


def cmd_solve_flow(a) -> int:
    G, group = _graph(_read(a.graph)), parse_group_spec(a.group)
    fm = _forbidden(a.forbidden, group)
    kw = dict(require_structured=a.require_structured, max_nodes=a.budget)
    mode = a.mode
    if mode == "auto":
        mode = "3ec" if edge_connectivity_class(G) >= 3 else "2ec"
    try:
        if mode == "apex":
            if a.vertex is None:
                raise CliError("--mode apex needs --vertex")
            v = next((x for x in G.vertices if str(x) == a.vertex), None)
            if v is None:
                raise CliError(f"unknown vertex {a.vertex!r}")
            report = solve_forbidden_flow_apex(G, v, fm, group, **kw)
            target = G.without_vertex(v)
        else:
            solve = solve_forbidden_flow_3ec if mode == "3ec" else solve_forbidden_flow_2ec
            report = solve(G, fm, group, **kw)
            target = G
    except NoFlowExists as exc:
        _emit({"verdict": False, "reason": str(exc), "space_size": exc.space_size,
               "certificate": infeasible_certificate(group, fm).to_json_obj(), "graph": G.to_json_obj()})
        return NO
    out = report.to_json_obj()
    out["verdict"] = True
    out["certificate"] = flow_certificate(group, report.flow, {e: v for e, v in fm.items() if target.has_edge(e)}).to_json_obj()
    out["graph"] = target.to_json_obj()
    _emit(out)
    return YES


def cmd_gen(a) -> int:
    rng = random.Random(a.seed)
    fam = a.family
    if fam == "theta":
        G = gen_theta(a.q, a.len)
    elif fam == "cycle":
        G = gen_cycle(a.n)
    elif fam == "complete":
        G = gen_complete(a.n)
    elif fam == "prism":
        G = gen_prism()
    elif fam == "core":
        try:
            G = named_core(a.name)
        except KeyError:
            raise CliError(f"unknown core {a.name!r}") from None
    elif fam == "random-core":
        G = random_3ec_core(rng, a.max_edges)
    elif fam == "theta-dual":
        D, rot = theta_dual(a.k, a.q)
        _emit({"graph": D.to_json_obj(), "rotation": rot.to_json_obj()})
        return YES
    elif fam == "corpus":
        graphs = two_edge_connected_corpus() if a.kind == "two-edge" else coloring_corpus()
        _emit({"graphs": [g.to_json_obj() for g in graphs]})
        return YES
    elif fam == "solver-instances":
        _emit({"instances": [
            {"graph": inst.graph.to_json_obj(), "group": inst.group.spec, "k": inst.k, "kind": inst.kind,
             "forbidden": {e: [element_to_json(x) for x in vals] for e, vals in inst.forbidden.items()}}
            for inst in solver_instances(a.count, a.seed)
        ]})
        return YES
    else:  # pragma: no cover - argparse restricts choices
        raise CliError(f"unknown family {fam!r}")
    _emit(G.to_json_obj())
    return YES


def cmd_dual(a) -> int:
    obj = _read(a.graph)
    G = _graph(obj)
    if a.rotation:
        rot = RotationSystem.from_json_obj(_read_option(a.rotation), G)
    elif isinstance(obj, dict) and "rotation" in obj:
        rot = RotationSystem.from_json_obj(obj["rotation"], G)
    elif all(G.degree(v) == 2 for v in G.vertices):
        rot = cycle_rotation(G)
    elif G.n <= 4:
        rot = planar_rotation(G)
    else:
        rot = find_planar_rotation(G, budget=min(a.budget, 200_000))
        if rot is None:
            raise CliError("no planar rotation found; pass --rotation")
    D, drot = planar_dual_with_rotation(G, rot)
    _emit({"graph": D.to_json_obj(), "rotation": drot.to_json_obj()})
    return YES


def cmd_lift(a) -> int:
    G = _graph(_read(a.graph))
    phi = {}
    if a.phi:
        raw = _read_option(a.phi)
        phi = {str(k): v if isinstance(v, int) else tuple(v) for k, v in raw.items()}
    try:
        c, audit = lift_z3_to_z5(G, phi, max_nodes=a.budget)
    except ValueError as exc:
        if "not Z3-colorable" not in str(exc):
            raise
        d = is_group_colorable(G, Z3, max_nodes=a.budget)
        _emit({"verdict": False, "reason": str(exc), "certificate": d.certificate.to_json_obj(),
               "graph": G.to_json_obj()})
        return NO
    phi5 = {e.id: Z5.element(phi.get(e.id, 0)) for e in G.edges}
    cert = coloring_certificate(Z5, c, phi5)
    _emit({
        "verdict": True,
        "coloring": _elements(c),
        "phi_z3": _elements(audit["phi_z3"]),
        "coloring_z3": _elements(audit["coloring_z3"]),
        "certificate": cert.to_json_obj(),
        "graph": G.to_json_obj(),
    })
    return YES


_DECIDERS = {"connected": is_group_connected, "colorable": is_group_colorable}


def _collect(obj, graph):
    """(graph, certificate) pairs found in any output of this tool."""
    if isinstance(obj, dict) and "witnesses" in obj:
        for w in obj["witnesses"]:
            yield from _collect(w, graph)
        return
    if isinstance(obj, dict) and "kind" in obj and "values" in obj:
        if graph is None:
            raise CliError("a bare certificate needs --graph")
        yield graph, obj
        return
    if not isinstance(obj, dict):
        raise CliError("nothing to verify")
    G = _graph(obj["graph"]) if "graph" in obj else graph
    found = False
    if obj.get("verdict") is True and obj.get("certificate") is None and obj.get("property") in _DECIDERS:
        # a yes verdict has no finite witness: recompute it
        found = True
        yield G, obj
    for key in ("certificate", "good_sample", "bad_certificate"):
        if obj.get(key) is not None:
            found = True
            yield G, obj[key]
    for entry in obj.get("entries", ()):
        if entry.get("certificate") is not None:
            found = True
            yield G, entry["certificate"]
    if not found and "entries" not in obj:
        raise CliError("no certificate in input")


def cmd_verify(a) -> int:
    graph = _graph(_read(a.graph)) if a.graph else None
    checked, violations = 0, []
    for G, raw in _collect(_read(a.input), graph):
        if G is None:
            raise CliError("certificate has no graph; pass --graph")
        if "property" in raw and "kind" not in raw:
            checked += 1
            decision = _DECIDERS[raw["property"]](G, parse_group_spec(raw["group"]), max_nodes=a.budget)
            if not decision.verdict:
                violations.append(f"{raw['property']}: yes verdict does not reproduce over {raw['group']}")
            continue
        cert = Certificate.from_json_obj(raw, G)
        res = verify_certificate(G, cert, max_nodes=a.budget)
        checked += 1
        violations.extend(f"{cert.kind}: {v}" for v in res.violations)
    _emit({"ok": not violations, "checked": checked, "violations": violations})
    return YES if not violations else NO


def cmd_families(a) -> int:
    ks = [int(x) for x in a.k.split(",") if x.strip()]
    out, ok = [], True
    for k in ks:
        q = a.q if a.q is not None else separating_prime(k)
        for build in (theta_separation, dual_separation):
            w = build(k, q, max_nodes=a.budget)
            ok = ok and w.separates
            out.append(w.to_json_obj())
    _emit({"witnesses": out})
    return YES if ok else NO


# -- parser -----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    # global flags are accepted before or after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="seed for every random choice")
    common.add_argument("--budget", type=int, default=argparse.SUPPRESS, help="search node budget")
    p = argparse.ArgumentParser(prog="groupflow", description=__doc__.splitlines()[0], parents=[common])
    sub = p.add_subparsers(dest="command", required=True)
    _add = sub.add_parser

    def add_parser(name, **kw):
        return _add(name, parents=[common], **kw)

    sub.add_parser = add_parser

    def graph_arg(sp):
        sp.add_argument("graph", help="graph JSON file, or - for stdin")

    sp = sub.add_parser("decide-connected", help="exact group-connectivity verdict")
    sp.add_argument("--group", required=True)
    sp.add_argument("--method", choices=("definition", "forbidden-values"), default="definition")
    graph_arg(sp)
    sp.set_defaults(run=cmd_decide_connected)

    sp = sub.add_parser("decide-colorable", help="exact group-colorability verdict")
    sp.add_argument("--group", required=True)
    sp.add_argument("--no-switching", action="store_true", help="sweep every edge map")
    graph_arg(sp)
    sp.set_defaults(run=cmd_decide_colorable)

    sp = sub.add_parser("profile", help="verdicts for all groups up to an order")
    sp.add_argument("--property", choices=("connected", "colorable"), default="connected")
    sp.add_argument("--max-order", type=int, default=6)
    graph_arg(sp)
    sp.set_defaults(run=cmd_profile)

    sp = sub.add_parser("cyclicity", help="largest cycle-equivalence class")
    sp.add_argument("--classes", action="store_true")
    graph_arg(sp)
    sp.set_defaults(run=cmd_cyclicity)

    sp = sub.add_parser("solve-flow", help="flow avoiding per-edge forbidden values")
    sp.add_argument("--group", required=True)
    sp.add_argument("--forbidden", help="JSON object (inline or file): edge id -> list of elements")
    sp.add_argument("--mode", choices=("auto", "3ec", "2ec", "apex"), default="auto")
    sp.add_argument("--vertex", help="removed degree-3 vertex for --mode apex")
    sp.add_argument("--require-structured", action="store_true", help="fail instead of falling back")
    graph_arg(sp)
    sp.set_defaults(run=cmd_solve_flow)

    sp = sub.add_parser("gen", help="generate graphs and corpora")
    sp.add_argument("family", choices=("theta", "cycle", "complete", "prism", "core", "random-core", "theta-dual",
                                       "corpus", "solver-instances"))
    sp.add_argument("--q", type=int, default=3)
    sp.add_argument("--len", type=int, default=1)
    sp.add_argument("--n", type=int, default=3)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--name", default="K4")
    sp.add_argument("--max-edges", type=int, default=12)
    sp.add_argument("--kind", choices=("two-edge", "coloring"), default="two-edge")
    sp.add_argument("--count", type=int, default=10)
    sp.set_defaults(run=cmd_gen)

    sp = sub.add_parser("dual", help="planar dual under a rotation system")
    sp.add_argument("--rotation", help="rotation JSON, inline or file; inferred for cycles and graphs on <= 4 vertices")
    graph_arg(sp)
    sp.set_defaults(run=cmd_dual)

    sp = sub.add_parser("lift", help="Z5-coloring from a Z3-coloring")
    sp.add_argument("--phi", help="JSON object (inline or file): edge id -> Z5 element, default all zero")
    graph_arg(sp)
    sp.set_defaults(run=cmd_lift)

    sp = sub.add_parser("verify", help="re-check certificates emitted by any subcommand")
    sp.add_argument("input", help="certificate or subcommand output, or - for stdin")
    sp.add_argument("--graph", help="graph for a bare certificate")
    sp.set_defaults(run=cmd_verify)

    sp = sub.add_parser("families", help="separation witnesses as JSON bundles")
    sp.add_argument("--k", default="1,2", help="comma-separated k values")
    sp.add_argument("--q", type=int, help="number of paths (default: the separating prime)")
    sp.set_defaults(run=cmd_families)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    # defaults filled here: set_defaults would leak into the shared flag actions
    for name, default in (("seed", DEFAULT_SEED), ("budget", DEFAULT_MAX_NODES)):
        if not hasattr(args, name):
            setattr(args, name, default)
    try:
        return args.run(args)
    except BudgetExceeded as exc:
        print(f"groupflow: budget exceeded: {exc}", file=sys.stderr)
    except (CliError, GraphError, GroupSpecError, StructuredFailure, SpecialTreeError, ValueError, KeyError) as exc:
        print(f"groupflow: {exc}", file=sys.stderr)
    return ERROR


if __name__ == "__main__":
    sys.exit(main())
