"""Time the compiled and NumPy kernels on the same inputs.

    python benchmarks/bench_kernels.py [--sizes 1000 5000 20000] [--repeat 3] [--threads 4]

Both backends must agree on every value; the script stops if they do not.
"""
import argparse
import time

import numpy as np

from pointline import _backend
from pointline.lemma1 import derive_params


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t)
    return min(times), out


def main(argv=None):
    ap = argparse.ArgumentParser()
    ap.add_argument("--sizes", type=int, nargs="+", default=[1000, 5000, 20000])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    names = sorted(_backend.BACKENDS)
    if "compiled" not in names:
        print("compiled extension not built; timing the python backend only")
    rng = np.random.default_rng(args.seed)
    print(f"{'kernel':<12}{'n':>8}" + "".join(f"{n:>12}" for n in names) + f"{'speedup':>10}")

    for n in args.sizes:
        x, y, t = (np.ascontiguousarray(v) for v in rng.uniform(-1, 1, (3, n)))
        cases = {
            "brute": lambda k: k.min_pair_brute(x, y, t, num_threads=args.threads),
            "grid": lambda k: k.min_pair_grid(x, y, t, None),
        }
        for label, call in cases.items():
            if label == "brute" and n > 20000:
                continue
            results = {}
            for name in names:
                k = _backend.get(name)
                results[name] = best_of(lambda: call(k), args.repeat)
            outs = {tuple(r[1]) for r in results.values()}
            assert len(outs) == 1, f"backends disagree on {label} n={n}: {outs}"
            row = f"{label:<12}{n:>8}" + "".join(f"{results[m][0]:>11.4f}s" for m in names)
            if len(names) == 2:
                row += f"{results['python'][0] / results['compiled'][0]:>9.1f}x"
            print(row)

    # the strip scan of the randomized construction at its natural size
    for delta in (1e-3, 1e-4):
        p = derive_params(delta)
        px, py = (np.ascontiguousarray(v) for v in rng.random((2, p.N)) - 0.5)
        slopes = p.slopes()
        results = {name: best_of(lambda k=_backend.get(name): k.strip_scan(px, py, slopes, delta),
                                 args.repeat) for name in names}
        outs = {r[1].tobytes() for r in results.values()}
        assert len(outs) == 1, "backends disagree on strip_scan"
        row = f"{'strip_scan':<12}{p.N:>8}" + "".join(f"{results[m][0]:>11.4f}s" for m in names)
        if len(names) == 2:
            row += f"{results['python'][0] / results['compiled'][0]:>9.1f}x"
        print(row)


if __name__ == "__main__":
    main()
