"""Time the numba kernels against their numpy counterparts.

    python benchmarks/bench_kernels.py [--repeat N]

Compilation is excluded: each numba kernel is called once before timing.
"""

import argparse
import timeit

import numpy as np

from discode import _kernels as K


def cases(rng):
    def ser(n, k, lead=None):
        s = rng.standard_normal((n, k)) + 1j * rng.standard_normal((n, k))
        s /= np.arange(1, k + 1)
        if lead is not None:
            s[:, 0] = lead
        return s

    a, b = ser(2000, 24), ser(2000, 24, lead=1.5)
    zeros = 0.9 * np.sqrt(rng.random(40)) * np.exp(2j * np.pi * rng.random(40))
    pts = 0.95 * np.sqrt(rng.random(4000)) * np.exp(2j * np.pi * rng.random(4000))
    ca = 0.9 * np.sqrt(rng.random(300)) * np.exp(2j * np.pi * rng.random(300))
    w = rng.random(pts.shape[0])
    return {
        "series_mul": (a, b),
        "series_div": (a, b),
        "series_exp": (a,),
        "series_log": (b,),
        "blaschke_taylor": (pts, zeros, 8),
        "carleson_sums": (ca, pts, w),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    rng = np.random.default_rng(0)
    print(f"{'kernel':<16}{'numpy [ms]':>12}{'numba [ms]':>12}{'speed-up':>10}{'rel diff':>11}")
    for name, inputs in cases(rng).items():
        f_np = getattr(K, "np_" + name)
        t_np = min(timeit.repeat(lambda: f_np(*inputs), number=1, repeat=args.repeat))
        if K.HAVE_NUMBA:
            f_nb = getattr(K, "nb_" + name)
            f_nb(*inputs)
            t_nb = min(timeit.repeat(lambda: f_nb(*inputs), number=1, repeat=args.repeat))
            ref = f_np(*inputs)
            diff = float(np.max(np.abs(f_nb(*inputs) - ref) / np.maximum(1.0, np.abs(ref))))
            print(f"{name:<16}{1e3 * t_np:>12.2f}{1e3 * t_nb:>12.2f}{t_np / t_nb:>10.1f}{diff:>11.1e}")
        else:
            print(f"{name:<16}{1e3 * t_np:>12.2f}{'n/a':>12}{'':>10}{'':>11}")


if __name__ == "__main__":
    main()
