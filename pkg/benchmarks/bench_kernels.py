"""Time the numba kernels against their numpy twins on representative inputs.

    python benchmarks/bench_kernels.py [--repeat 5]

JIT compilation is triggered once before timing and reported separately.
"""

from __future__ import annotations

import argparse
import time

import numpy as np

from hsr_alloc import kernels
from hsr_alloc.capacity import user_rule
from hsr_alloc.config import parse_config
from hsr_alloc.study import Study


def _cases(study, rng):
    coef, weight, scale = user_rule(study.factors[0])
    s = np.linspace(0.0, 2.0, 20_000)
    betas = np.arange(1001) / 1000
    tol = 1e-6 * study.target.c_sum
    gains = rng.standard_exponential((50, 512, 50))
    ucoef = rng.uniform(1.0, 1e4, 50)
    prof = study.cfg.profile
    amp = np.sqrt(np.asarray(prof.powers) / sum(prof.powers) / 2)
    tau = np.asarray(prof.delays)
    phi1 = rng.uniform(0, 2 * np.pi, (500, amp.size))
    phi2 = rng.uniform(0, 2 * np.pi, (500, amp.size))
    idx = np.arange(251, 262)
    T, N = study.params.symbol_duration, study.params.n_subcarriers
    return {
        "expect_log1p (20k scales)": ("expect_log1p", (coef, weight, s)),
        "bisect_eta (1001 betas)": ("bisect_eta",
                                    (betas, coef, weight, scale, study.target.r_th, tol, 200)),
        "select_rates (50x512x50)": ("select_rates", (gains, ucoef)),
        "channel_block (500x1x11)": ("channel_block",
                                     (phi1, phi2, amp, tau, 979.8, T, N, idx[5:6], idx)),
    }


def _best(fn, args, repeat):
    times = []
    for _ in range(repeat):
        t = time.perf_counter()
        fn(*args)
        times.append(time.perf_counter() - t)
    return min(times)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    study = Study(parse_config())
    cases = _cases(study, np.random.default_rng(args.seed))
    impls = [("numpy", kernels.numpy_impl)]
    if kernels.numba_impl is not None:
        impls.append(("numba", kernels.numba_impl))

    print(f"{'kernel':28s} {'numpy ms':>10s} {'numba ms':>10s} {'speedup':>8s} {'jit s':>7s}")
    for label, (name, cargs) in cases.items():
        row = {}
        jit = float("nan")
        for backend, impl in impls:
            fn = getattr(impl, name)
            t = time.perf_counter()
            fn(*cargs)                       # warm-up (compiles for numba)
            if backend == "numba":
                jit = time.perf_counter() - t
            row[backend] = _best(fn, cargs, args.repeat)
        nb = row.get("numba", float("nan"))
        print(f"{label:28s} {row['numpy'] * 1e3:10.2f} {nb * 1e3:10.2f} "
              f"{row['numpy'] / nb:8.2f} {jit:7.2f}")


if __name__ == "__main__":
    main()
