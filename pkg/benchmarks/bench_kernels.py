"""Compare the compiled and numpy gate kernels.

    python benchmarks/bench_kernels.py [--qubits 4 6 8 10] [--repeat 5]

For each register size, applies a random 1- and 2-qubit unitary (with and
without a control) to a state block and reports the best time per call.
"""

import argparse
import timeit

import numpy as np

from qsdisc import kernels
from qsdisc.linalg import random_unitary

CASES = {
    "1q": lambda n: ((n - 1,), ()),
    "1q+ctrl": lambda n: ((n - 1,), (0,)),
    "2q": lambda n: ((0, n - 1), ()),
    "2q+ctrl": lambda n: ((1, n - 1), (0,)),
}


def bench(n, cols, repeat, rng):
    impls = kernels.implementations()
    state = rng.normal(size=(1 << n, cols)) + 1j * rng.normal(size=(1 << n, cols))
    rows = []
    for case, make in CASES.items():
        targets, controls = make(n)
        u = random_unitary(1 << len(targets), rng)
        times = {}
        for name, impl in impls.items():
            s = np.ascontiguousarray(state.copy())
            t = timeit.Timer(lambda: kernels.apply_unitary(s, u, targets, controls, n, impl=impl))
            number = max(1, 2000 >> n)
            times[name] = min(t.repeat(repeat, number)) / number
        rows.append((n, cols, case, times))
    return rows


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--qubits", type=int, nargs="+", default=[4, 6, 8, 10])
    p.add_argument("--cols", type=int, default=1, help="state columns (use 2**n for a density matrix)")
    p.add_argument("--repeat", type=int, default=5)
    args = p.parse_args(argv)

    rng = np.random.default_rng(0)
    impls = list(kernels.implementations())
    print(f"active backend: {kernels.BACKEND}")
    print(f"{'n':>3} {'cols':>5} {'case':>8} " + " ".join(f"{k:>12}" for k in impls) + ("  speedup" if len(impls) > 1 else ""))
    for n in args.qubits:
        for n_, cols, case, times in bench(n, args.cols, args.repeat, rng):
            line = f"{n_:>3} {cols:>5} {case:>8} " + " ".join(f"{times[k] * 1e6:>10.1f}us" for k in impls)
            if "cython" in times:
                line += f"  {times['numpy'] / times['cython']:7.1f}x"
            print(line)


if __name__ == "__main__":
    main()
