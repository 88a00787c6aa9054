#!/usr/bin/env python3
"""Benchmark the compiled kernel core against the numpy fallback.

Times the two hot kernels (joint-value contraction, best-response
projection) on grid-style sparse kernels and on dense random kernels, plus
one end-to-end best response.  The compiled core walks compressed rows, so
it wins on sparse transitions; dense instances favor the BLAS-backed
fallback.  Run:

    python benchmarks/bench_kernels.py [--repeats 20]
"""

import argparse
import time

import numpy as np

from reachgame._kernels import _numpy_impl
from reachgame.indexing import collision_free_mask, pairwise_distinct, unpack_joint

try:
    from reachgame._kernels import _core
except ImportError:
    _core = None


def timeit(fn, repeats):
    fn()  # warm-up
    start = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - start) / repeats


def grid_kernels(state_count, n, rng):
    """Row-stochastic matrices with ~5 successors per state (grid-like)."""
    out = []
    for _ in range(n):
        k = np.zeros((state_count, state_count))
        for s in range(state_count):
            succ = rng.choice(state_count, size=min(5, state_count), replace=False)
            k[s, succ] = rng.random(succ.size) + 0.1
        k /= k.sum(axis=1, keepdims=True)
        out.append(k)
    return out


def dense_kernels(state_count, n, rng):
    out = []
    for _ in range(n):
        k = rng.random((state_count, state_count)) + 0.01
        k /= k.sum(axis=1, keepdims=True)
        out.append(k)
    return out


def bench_contract(repeats):
    rng = np.random.default_rng(0)
    print(f"{'masked_value_contract':<34}{'python':>12}{'compiled':>12}{'ratio':>8}")
    for label, n, s_count, maker in (
        ("sparse S=40 N=2", 2, 40, grid_kernels),
        ("sparse S=40 N=3", 3, 40, grid_kernels),
        ("dense  S=40 N=2", 2, 40, dense_kernels),
        ("dense  S=40 N=3", 3, 40, dense_kernels),
    ):
        kernels = maker(s_count, n, rng)
        v = rng.random(s_count**n)
        mask = collision_free_mask(s_count, n)
        t_py = timeit(lambda: _numpy_impl.masked_value_contract(v, kernels, mask), repeats)
        if _core is None:
            print(f"{label:<34}{t_py * 1e3:>10.3f}ms{'n/a':>12}")
            continue
        t_c = timeit(lambda: _core.masked_value_contract(v, kernels, mask), repeats)
        print(f"{label:<34}{t_py * 1e3:>10.3f}ms{t_c * 1e3:>10.3f}ms{t_py / t_c:>8.2f}")


def bench_projection(repeats):
    rng = np.random.default_rng(1)
    print(f"\n{'br_action_values':<34}{'python':>12}{'compiled':>12}{'ratio':>8}")
    for label, n, s_count, a_count, n_entries, sparse in (
        ("sparse S=40 N=3 E=40000", 3, 40, 4, 40000, True),
        ("sparse S=70 N=2 E=1750", 2, 70, 4, 1750, True),
        ("dense  S=40 N=3 E=40000", 3, 40, 4, 40000, False),
    ):
        v = rng.random(s_count**n)
        own = rng.random((s_count, a_count, s_count)) + 0.01
        if sparse:
            keep = rng.random(own.shape) < 5.0 / s_count
            own = own * keep
            own[..., 0] += 0.01
        own /= own.sum(axis=2, keepdims=True)
        src = rng.integers(0, s_count ** (n - 1), n_entries)
        dst = rng.integers(0, s_count ** (n - 1), n_entries)
        mass = rng.random(n_entries)
        digits = unpack_joint(src, s_count, n - 1)
        ok = pairwise_distinct(digits)
        args = (v, own, 0, n, digits, ok, dst, mass)
        t_py = timeit(lambda: _numpy_impl.br_action_values(*args), repeats)
        if _core is None:
            print(f"{label:<34}{t_py * 1e3:>10.3f}ms{'n/a':>12}")
            continue
        t_c = timeit(lambda: _core.br_action_values(*args), repeats)
        print(f"{label:<34}{t_py * 1e3:>10.3f}ms{t_c * 1e3:>10.3f}ms{t_py / t_c:>8.2f}")


_END_TO_END = """
import time
from reachgame import EpsilonSchedule, GridSpec, best_response, random_scenario, backend_name
from reachgame.ibr import default_initial_policies

game = random_scenario(GridSpec(5, 8, players=3, horizon=15, stochasticity=0.95, seed=0))
policies = default_initial_policies(game)
schedule = EpsilonSchedule.paper_default()
best_response(game, 0, policies, schedule)  # warm-up
start = time.perf_counter()
for _ in range({repeats}):
    best_response(game, 0, policies, schedule)
elapsed = (time.perf_counter() - start) / {repeats}
print(f"  {{backend_name():<10}}{{elapsed * 1e3:>10.1f}}ms per response")
"""


def bench_end_to_end(repeats):
    """Times a full best response under each backend via the import-time
    selection switch (REACHGAME_PURE)."""
    import os
    import subprocess
    import sys

    print(f"\n{'best_response (40 states, N=3, T=15)':<40}")
    sys.stdout.flush()
    code = _END_TO_END.format(repeats=max(1, repeats // 5))
    variants = [("1",)] + ([()] if _core is not None else [])
    for variant in variants:
        env = dict(os.environ)
        env.pop("REACHGAME_PURE", None)
        if variant:
            env["REACHGAME_PURE"] = variant[0]
        subprocess.run([sys.executable, "-c", code], env=env, check=True)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=20)
    args = parser.parse_args()
    if _core is None:
        print("compiled core not available; timing the fallback only\n")
    bench_contract(args.repeats)
    bench_projection(args.repeats)
    bench_end_to_end(args.repeats)


if __name__ == "__main__":
    main()
