"""Compiled vs pure-Python kernels on the exhaustive deciders.

    python3 benchmarks/bench_kernels.py [--repeat N] [--quick]
"""

import argparse
import time

from groupflow.abelian import parse_group_spec
from groupflow.decide import (
    exists_flow_avoiding,
    is_group_colorable,
    is_group_connected,
    is_group_connected_by_forbidden_values,
)
from groupflow.kernels import available_backends
from groupflow.multigraph import gen_complete, gen_cycle, gen_prism, gen_theta, multiply_edges


def workloads(quick):
    Z5, V4, Z7 = parse_group_spec("Z5"), parse_group_spec("Z2^2"), parse_group_spec("Z7")
    yield "connected G(3,2) Z5", lambda b: is_group_connected(gen_theta(3, 2), Z5, backend=b)
    yield "connected G(5,2) Z2^2", lambda b: is_group_connected(gen_theta(5, 2), V4, backend=b)
    yield "forbidden-values G(3,1) Z5", lambda b: is_group_connected_by_forbidden_values(gen_theta(3, 1), Z5, backend=b)
    yield "colorable C5x2 Z5", lambda b: is_group_colorable(multiply_edges(gen_cycle(5), 2), Z5, backend=b)
    yield "colorable K4 Z7", lambda b: is_group_colorable(gen_complete(4), Z7, backend=b)
    prism = gen_prism()
    yield "flow prism Z7 nowhere-zero", lambda b: exists_flow_avoiding(
        prism, Z7, {e: [0, 1] for e in prism.edge_ids}, backend=b)
    if not quick:
        yield "connected G(5,2) Z5", lambda b: is_group_connected(gen_theta(5, 2), Z5, backend=b)


def best_of(fn, backend, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(backend)
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--quick", action="store_true", help="skip the slowest workload")
    args = ap.parse_args()
    backends = sorted(available_backends())
    if "compiled" not in backends:
        print("compiled extension not built; only the python backend is timed")
    header = f"{'workload':<30}" + "".join(f"{b:>12}" for b in backends)
    if len(backends) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for name, fn in workloads(args.quick):
        t = {b: best_of(fn, b, args.repeat) for b in backends}
        row = f"{name:<30}" + "".join(f"{t[b]:>11.4f}s" for b in backends)
        if len(backends) == 2:
            row += f"{t['python'] / max(t['compiled'], 1e-9):>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
