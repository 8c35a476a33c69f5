"""Time the numba kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Each kernel is called once untimed so JIT compilation is excluded, then the
best of ``--repeat`` runs is reported along with the max absolute difference
between the two backends.
"""
import argparse
import time

import numpy as np

from qfeedback import _kernels_numpy, kernels

SINGLET = np.array([0, 1, -1, 0], dtype=np.complex128) / np.sqrt(2)


def best_of(fn, repeat):
    fn()
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def cases(rng):
    cs = rng.standard_normal((100_000, 3))
    lams = rng.uniform(0, 20, 100_000)
    rho = np.array([[1, 0], [0, 0]], dtype=np.complex128)
    m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    h = m + m.conj().T
    hs = [h + k * np.eye(4) for k in range(2000)]
    return {
        "channel_average (1e5 draws)": lambda k: k.channel_average(cs, 5.0, rho),
        "undo_fidelity_batch (1e5 pairs)": lambda k: k.undo_fidelity_batch(cs, lams, SINGLET),
        "su2_exp_batch (1e5)": lambda k: k.su2_exp_batch(cs, lams),
        "jacobi_eigvalsh 4x4 (x2000)": lambda k: np.array([k.jacobi_eigvalsh(x, 1e-12, 100) for x in hs]),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fast = kernels.numba_kernels
    if fast is None:
        print("numba backend disabled or not installed; timing numpy only")
    print(f"{'kernel':34s} {'numpy [ms]':>11s} {'numba [ms]':>11s} {'speedup':>8s} {'max diff':>9s}")
    for name, call in cases(np.random.default_rng(0)).items():
        t_np = best_of(lambda: call(_kernels_numpy), args.repeat)
        if fast is None:
            print(f"{name:34s} {t_np * 1e3:11.2f} {'-':>11s} {'-':>8s} {'-':>9s}")
            continue
        t_nb = best_of(lambda: call(fast), args.repeat)
        diff = np.abs(np.asarray(call(fast)) - np.asarray(call(_kernels_numpy))).max()
        print(f"{name:34s} {t_np * 1e3:11.2f} {t_nb * 1e3:11.2f} {t_np / t_nb:7.1f}x {diff:9.1e}")


if __name__ == "__main__":
    main()
