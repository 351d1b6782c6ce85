"""Time spent building, compiling and solving representative programs.

    python benchmarks/bench_split.py

Prints one row per problem. The split shows whether any Python-side step is
worth moving into compiled code; the solve column is already native code.
"""

import time

import numpy as np

from bqt.channels import swap_channel_choi
from bqt.qmat import LabeledOperator, partial_trace, partial_transpose
from bqt.sdp import SolverOptions, solve_sdp
from bqt.simerr import bipartite_dual_problem, ppt_sim_problem, swap_problem
from bqt.states import gadc_state, random_state


def timed(fn, repeat=1):
    t0 = time.perf_counter()
    for _ in range(repeat):
        out = fn()
    return out, (time.perf_counter() - t0) / repeat


def split(name, build):
    prob, t_build = timed(build)
    backend = prob.pick_backend(SolverOptions())
    _, t_compile = timed(lambda: prob.compile(backend))
    sol, t_solve = timed(lambda: solve_sdp(prob))
    total = t_build + t_compile + t_solve
    print(f"{name:28s} {backend:9s} build {t_build * 1e3:8.1f} ms  compile {t_compile * 1e3:8.1f} ms"
          f"  solve {t_solve * 1e3:9.1f} ms  solver share {t_solve / total:6.1%}  [{sol.status}]")


def dense_ops():
    rng = np.random.default_rng(0)
    x = LabeledOperator(rng.normal(size=(64, 64)), (2, 2, 2, 2, 2, 2))
    _, t_pt = timed(lambda: partial_transpose(x, [1, 3, 5]), repeat=200)
    _, t_tr = timed(lambda: partial_trace(x, [4, 5]), repeat=200)
    print(f"{'dense ops, 64x64':28s} partial transpose {t_pt * 1e6:.1f} us, partial trace {t_tr * 1e6:.1f} us")


def main():
    s = swap_channel_choi(2)
    rho = random_state((2, 2), np.random.default_rng(1))
    split("swap, random [2,2]", lambda: swap_problem(rho, 2))
    split("swap, GADC [4,4]", lambda: swap_problem(gadc_state(0.5, 0.3), 2))
    split("general diamond, [2,2]", lambda: ppt_sim_problem(s, rho, [(1,)]))
    split("explicit dual, [2,2]", lambda: bipartite_dual_problem(s, rho))
    split("general infidelity, [2,2]", lambda: ppt_sim_problem(s, rho, [(1,)], infidelity=True))
    dense_ops()


if __name__ == "__main__":
    main()
