"""Benchmark the primitive-collection kernel: jitted scan vs vectorized numpy.

Builds progressively larger fans (products of projective lines/planes and a
blowup tower) and times minimal-non-face enumeration through both paths.
The numpy path wins below ~15 rays (no JIT warm-up); the numba path wins as
2^r grows.  Run:

    python benchmarks/bench_kernels.py [--repeat 3]
"""

import argparse
import statistics
import sys
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "tests"))

import numpy as np

from toricfans import _accel
from fixtures import b3, p2, pn, product_fan


def tower(n_blowups: int):
    """Blowup tower over P4: each step subdivides the first available 2-cone."""
    from toricfans.fan import star_subdivision

    f = pn(4)
    for _ in range(n_blowups):
        cone = f.max_cones[0][:2]
        f = star_subdivision(f, cone)
    return f


def cases():
    p1 = pn(1)
    out = [("B3", b3()), ("B3 x P2", product_fan(b3(), pn(2)))]
    prod = p1
    for _ in range(1, 9):
        prod = product_fan(prod, p1)
        if prod.n_rays >= 10:
            out.append((f"(P1)^{prod.n_rays // 2}", prod))
    t = tower(8)
    out.append(("blowup tower over P4", t))
    out.append(("tower x P1", product_fan(t, p1)))
    out.append(("P3 x P3 x P1 x P1", product_fan(product_fan(pn(3), pn(3)), product_fan(p1, p1))))
    out.sort(key=lambda kv: kv[1].n_rays)
    return out


def time_path(fn, masks, r, repeat):
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(masks, r)
        samples.append(time.perf_counter() - t0)
    return list(result), min(samples), statistics.mean(samples)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()

    if not _accel.HAVE_NUMBA:
        print("numba not available; benchmarking the numpy path only")

    def numpy_path(masks, r):
        return _accel._minimal_nonfaces_numpy(np.asarray(masks, dtype=np.int64), r)

    def numba_path(masks, r):
        return list(_accel._minimal_nonfaces_numba(np.asarray(masks, dtype=np.int64), r))

    if _accel.HAVE_NUMBA:
        # warm the JIT outside the timed region
        numba_path(list(b3().cone_masks), b3().n_rays)

    header = f"{'fan':34} {'rays':>4} {'cones':>6} {'PCs':>5} {'numpy best':>11} {'numba best':>11}"
    print(header)
    print("-" * len(header))
    for name, fan in cases():
        masks, r = list(fan.cone_masks), fan.n_rays
        if r > _accel.MAX_KERNEL_RAYS:
            print(f"{name:34} {r:>4}   (beyond kernel cap)")
            continue
        res_np, best_np, _ = time_path(numpy_path, masks, r, args.repeat)
        if _accel.HAVE_NUMBA:
            res_nb, best_nb, _ = time_path(numba_path, masks, r, args.repeat)
            assert res_np == res_nb, f"paths disagree on {name}"
            nb = f"{best_nb * 1e3:9.2f}ms"
        else:
            nb = "-"
        print(f"{name:34} {r:>4} {len(masks):>6} {len(res_np):>5} {best_np * 1e3:9.2f}ms {nb:>11}")


if __name__ == "__main__":
    main()
