"""Compiled vs numpy phase kernel on the benchmark lattice.

    python3 benchmarks/bench_kernel.py [--cycles 20] [--sizes 36,324,1024]

Prints microseconds per RK4 step for each backend, the speedup, and the
largest phase difference between the two after the same run.
"""

import argparse
import time
from dataclasses import replace

import numpy as np

from oimshil import VariationScenario, apply_variation, build_shil, initial_state, integrate
from oimshil import kings_graph, maxcut_to_ising
from oimshil._backend import available
from oimshil.harness import BENCHMARK_DYNAMICS


def time_backend(backend, problem, shil, dev, cfg, repeats):
    best, final = np.inf, None
    for _ in range(repeats):
        t0 = time.perf_counter()
        tr = integrate(initial_state(problem.n, 0), problem, shil, dev, cfg, 0, backend)
        best = min(best, time.perf_counter() - t0)
        final = tr.final.phases
    return best, final


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--cycles", type=float, default=20.0)
    ap.add_argument("--sizes", default="36,324,1024")
    ap.add_argument("--kind", default="rosc")
    ap.add_argument("--repeats", type=int, default=3)
    a = ap.parse_args(argv)
    backends = available()
    if "cython" not in backends:
        print("compiled kernel not built; only the numpy fallback is available")
    cfg = replace(BENCHMARK_DYNAMICS, max_cycles=a.cycles)
    print(f"{'n':>6} {'backend':>8} {'us/step':>10} {'speedup':>8} {'max |dphi|':>11}")
    for n_side in (int(round(int(s) ** 0.5)) for s in a.sizes.split(",")):
        g = kings_graph(n_side, n_side, "random-sign", seed=2024)
        p = maxcut_to_ising(g)
        shil = build_shil(a.kind, 1.13e9, g.n)
        dev = apply_variation(VariationScenario(0.05, process_seed=0), shil, g.n)
        res = {b: time_backend(b, p, shil, dev, cfg, a.repeats) for b in backends}
        ref = res["python"][0]
        for b, (t, ph) in res.items():
            d = np.angle(np.exp(1j * (ph - res["python"][1])))
            print(f"{g.n:>6} {b:>8} {1e6 * t / cfg.n_steps:>10.2f} {ref / t:>8.1f} "
                  f"{np.max(np.abs(d)):>11.1e}")


if __name__ == "__main__":
    main()
