"""Compare the compiled forward-recursion kernel against the numpy fallback.

Times the batched scaled forward pass on workloads shaped like real fits
(small state spaces, many short sequences) and like long studies (hundreds of
occasions), plus a full log-likelihood evaluation.  Run with::

    python benchmarks/forward_bench.py
"""

import time

import numpy as np

from stopover import GENERATING_STRUCTURE, available_kernels, log_likelihood, reference_scenario, simulate
from stopover.hmm import secondary_matrices
from stopover.kernels import forward_loglik


def time_call(fn, repeat=7):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def forward_workload(J, K, S, M, seed=0):
    rng = np.random.default_rng(seed)
    pi = rng.dirichlet(np.ones(S))
    trans = rng.dirichlet(np.ones(S), size=(K - 1, S))
    obs = rng.uniform(0.05, 1.0, size=(K, M, S))
    codes = rng.integers(0, M, size=(J, K))
    with np.errstate(divide="ignore"):
        log_obs = np.log(obs)
    return pi, trans, log_obs, codes


def bench_forward(label, J, K, S, M, loops):
    pi, trans, log_obs, codes = forward_workload(J, K, S, M)
    results = {}
    for name in available_kernels():
        def run():
            for _ in range(loops):
                forward_loglik(pi, trans, log_obs, codes, kernel=name)

        results[name] = time_call(run) / loops
    report(label, results)
    return results


def bench_loglik(loops=50):
    params, design = reference_scenario(100)
    dataset, _ = simulate(params, design, seed=7)
    results = {}
    for name in available_kernels():
        def run():
            for _ in range(loops):
                log_likelihood(dataset, params, kernel=name)

        results[name] = time_call(run, repeat=3) / loops
    report("full log-likelihood (benchmark scenario, n=%d)" % dataset.n, results)
    return results


def report(label, results):
    print(f"\n{label}")
    base = results.get("python")
    for name, seconds in sorted(results.items()):
        speedup = f"  ({base / seconds:.1f}x vs python)" if base and name != "python" else ""
        print(f"  {name:8s} {seconds * 1e6:10.1f} us/call{speedup}")


def main():
    kernels = sorted(available_kernels())
    print("available kernels:", ", ".join(kernels))
    if "cython" not in kernels:
        print("compiled kernel missing; rebuild with `pip install -e . --no-build-isolation`")
    bench_forward("fit-shaped batch: J=80 sequences, K=5 steps, S=12 states, M=30 codes",
                  J=80, K=5, S=12, M=30, loops=200)
    bench_forward("large study: J=120, K=253, S=44, M=60", J=120, K=253, S=44, M=60, loops=3)
    bench_forward("single sequence: J=1, K=300, S=8, M=4", J=1, K=300, S=8, M=4, loops=200)
    bench_loglik()


if __name__ == "__main__":
    main()
