"""Compare the compiled and pure-Python simplex kernels.

    python benchmarks/bench_simplex.py [--repeat 3]

Three workloads: random bounded LPs, the robust LP for every hospital, and
the exact (bisection) ranking of random 12-DMU datasets.  Each is timed under
every available backend and the results are checked to be bitwise equal.
"""

import argparse
import sys
import time
from pathlib import Path

import numpy as np

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "tests"))

from oracles import random_bounded_lp  # noqa: E402
from robdea.io import bundled  # noqa: E402
from robdea.lp import LinearProgram, Sense, _kernel, solve  # noqa: E402
from robdea.models import ModelKind  # noqa: E402
from robdea.properties import random_dataset  # noqa: E402
from robdea.ranking import rank_all  # noqa: E402


def random_lps():
    rng = np.random.default_rng(0)
    progs = []
    for _ in range(300):
        c, A, rel, rhs, lo, hi, sense = random_bounded_lp(rng)
        progs.append(LinearProgram.from_arrays(c, A, rel, rhs, lo, hi,
                                               Sense.MAXIMIZE if sense == "max" else Sense.MINIMIZE))
    return lambda: [solve(p).variable_values for p in progs]


def hospital_lps():
    ds = bundled("hospitals")
    return lambda: [r.r for _ in range(20) for r in rank_all(ds, ModelKind.CCR_ROBUST_LP)]


def exact_rankings():
    rng = np.random.default_rng(1)
    sets = [random_dataset(rng) for _ in range(5)]
    return lambda: [r.r for ds in sets for r in rank_all(ds, ModelKind.CCR_ROBUST_EXACT)]


WORKLOADS = {"random LPs (300)": random_lps, "hospital robust LP (20x12)": hospital_lps,
             "exact ranking, 5 random datasets": exact_rankings}


def fingerprint(values):
    return [None if v is None else np.asarray(v).tobytes() for v in values]


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)
    backends = _kernel.available_backends()
    previous = _kernel.backend_name()
    print(f"backends: {', '.join(backends)} (default {previous})")
    print(f"{'workload':36s}" + "".join(f"{b:>12s}" for b in backends) + "     speed-up")
    try:
        for name, make in WORKLOADS.items():
            run = make()
            times, prints = {}, {}
            for backend in backends:
                _kernel.use_backend(backend)
                run()  # warm-up
                best = float("inf")
                for _ in range(args.repeat):
                    t0 = time.perf_counter()
                    out = run()
                    best = min(best, time.perf_counter() - t0)
                times[backend], prints[backend] = best, fingerprint(out)
            same = len({tuple(p) for p in prints.values()}) == 1
            row = f"{name:36s}" + "".join(f"{times[b]:11.3f}s" for b in backends)
            if "cython" in times and "python" in times:
                row += f"  {times['python'] / times['cython']:8.1f}x"
            print(row + ("" if same else "  RESULTS DIFFER"))
    finally:
        _kernel.use_backend(previous)


if __name__ == "__main__":
    main()
