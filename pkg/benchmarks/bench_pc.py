"""Time the compiled and pure-Python path-consistency kernels on the same networks.

    python benchmarks/bench_pc.py [--networks 200] [--size 12] [--repeat 3]
"""
import argparse
import random
import time

from stal.spatial import QCSP, load_algebra
from stal.spatial.kernel import backends


def networks(alg, count, size, seed):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = QCSP(alg, range(size))
        for i in range(size):
            for j in range(i + 1, size):
                if rng.random() < 0.5:
                    n.add(i, j, alg.mask(rng.sample(alg.atoms, rng.randint(2, 5))))
        out.append(n.to_matrix())
    return out


def bench(refine, alg, mats, size, repeat):
    args = (size, alg.comp_by_mask, alg.converse_mask, len(alg.atoms))
    best = float("inf")
    results = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        results = [refine(m, *args) for m in mats]
        best = min(best, time.perf_counter() - t0)
    return best, results


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--networks", type=int, default=200)
    p.add_argument("--size", type=int, default=12)
    p.add_argument("--repeat", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    found = backends()
    for name in ("rcc8", "cda"):
        alg = load_algebra(name)
        mats = networks(alg, args.networks, args.size, args.seed)
        timings, outputs = {}, {}
        for backend, refine in found.items():
            timings[backend], outputs[backend] = bench(refine, alg, mats, args.size, args.repeat)
        agree = len({repr(o) for o in outputs.values()}) == 1
        line = ", ".join(f"{b} {t * 1e3:.1f} ms" for b, t in timings.items())
        speedup = ""
        if "cython" in timings:
            speedup = f", speedup {timings['python'] / timings['cython']:.1f}x"
        print(f"{name}: {args.networks} networks of {args.size} variables: {line}{speedup}, "
              f"results {'agree' if agree else 'DIFFER'}")


if __name__ == "__main__":
    main()
