"""Rings as an exactly solvable benchmark.

On a cycle graph every edge sees the same local environment, so as long as
2p+2 <= N the optimized level-p objective equals N*(2p+1)/(2p+2) and the
approximation ratio has a closed form:

    even N:  r = (2p+1)/(2p+2)            (C_max = N)
    odd  N:  r = (2p+1)N/((2p+2)(N-1))    (C_max = N-1, one frustrated edge)

and r = 1 once p >= floor(N/2).  The amplitude-reuse heuristic reproduces
these optima to machine precision, which pins down the whole
simulate-optimize pipeline end to end.
"""

from qaoa_lab.graphs import Graph
from qaoa_lab.optimizer import CHAIN_B, StrategyConfig, run_fourier_strategy


def ring(n):
    return Graph(n, tuple((i, (i + 1) % n, 1.0) for i in range(n)),
                 "unweighted_regular", 2)


for n in (6, 7, 8, 9, 10):
    cfg = StrategyConfig(strategy="fourier", r=0, p_max=n // 2, seed=1,
                         objective_tol=1e-10, step_tol=1e-12)
    results = [lr for lr in run_fourier_strategy(ring(n), cfg)
               if lr.chain == CHAIN_B]
    print(f"\nN={n} ring (C_max = {n if n % 2 == 0 else n - 1}):")
    print("  p   r (optimized)   r (closed form)   |diff|")
    for lr in results:
        p = lr.p
        if p < (n // 2 if n % 2 == 0 else (n + 1) // 2) and 2 * p + 2 <= n:
            closed = ((2 * p + 1) / (2 * p + 2) if n % 2 == 0
                      else (2 * p + 1) * n / ((2 * p + 2) * (n - 1)))
        else:
            closed = 1.0
        print(f"  {p}   {lr.r:.12f}  {closed:.12f}    {abs(lr.r - closed):.1e}")
