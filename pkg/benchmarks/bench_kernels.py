"""Compiled vs pure-Python path kernels.

    python benchmarks/bench_kernels.py [--paths N] [--repeat R]

Each kernel runs on the same generator family with both backends; the
outputs are compared for equality and the per-path wall time reported.
"""

import argparse
import math
import time

import numpy as np

from ssabsorb import bessel_model, sawtooth_model
from ssabsorb.mc import process
from ssabsorb.mc.backend import backend, compiled_available


def _args(model, dt=1e-3, h_max=0.02, horizon=1e4, eps_tail=1e-10):
    spec = process.compile_process(model)
    h = model.exponent()
    level = process.tail_level(spec, h.mean_xi1, eps_tail)
    return (spec.alpha, spec.drift, spec.var, spec.lam, spec.kill_q, spec.mode, spec.table, spec.tail,
            dt, h_max, horizon, level)


def cases():
    bessel = _args(bessel_model(-0.5))
    saw = _args(sawtooth_model(1.0, 0.5))
    return {
        "sigma bessel": ("sigma_paths", bessel + (math.inf, math.inf)),
        "sigma saw-tooth": ("sigma_paths", saw + (math.inf, math.inf)),
        "crossing bessel": ("crossing_paths", bessel + (0.5, math.log(4.0), -1.0, 1.0)),
        "stable max a=1.5": ("stable_max_paths", (1.5, 1000)),
    }


def time_kernel(mod, name, args, paths, repeat, seed=1):
    fn = getattr(mod, name)
    best = math.inf
    out = None
    for _ in range(repeat):
        gens = process.path_generators(seed, 0, paths)
        t0 = time.perf_counter()
        out = fn(gens, *args, threads=1)
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--paths", type=int, default=200)
    p.add_argument("--repeat", type=int, default=3)
    a = p.parse_args(argv)
    if not compiled_available():
        print("compiled kernels are not built; run `python setup.py build_ext --inplace`")
        return 1
    fast = backend("compiled")
    slow = backend("python")
    print(f"{'kernel':<20}{'compiled us/path':>18}{'python us/path':>16}{'speed-up':>10}  equal")
    for label, (name, args) in cases().items():
        tc, oc = time_kernel(fast, name, args, a.paths, a.repeat)
        tp, op = time_kernel(slow, name, args, a.paths, 1)
        same = all(np.array_equal(x, y, equal_nan=True) for x, y in zip(oc, op))
        print(f"{label:<20}{1e6 * tc / a.paths:>18.1f}{1e6 * tp / a.paths:>16.1f}{tp / tc:>10.1f}  {same}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
