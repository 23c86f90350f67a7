"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import timeit

import numpy as np

from adaptscaffold import _core
from adaptscaffold._core import fallback
from adaptscaffold.logic import parse
from adaptscaffold.logic.formula import variables
from adaptscaffold.logic.semantics import compile_postfix


def cases():
    f = parse("(A -> B) & (B -> C) & (C -> D) & (D -> E) & (E -> F) & (F -> G) & (G -> H) & (H -> I) -> (A -> I)")
    names = sorted(variables(f))
    code = np.asarray(compile_postfix(f, {n: i for i, n in enumerate(names)}), dtype=np.int32)
    obs = (np.random.default_rng(0).random(400) < 0.7).astype(np.uint8)
    rng = np.random.default_rng(1)
    xs, ys = rng.normal(size=40).round(1), rng.normal(size=40).round(1)
    return {
        "first_countermodel (9 vars, valid)": ("first_countermodel", (code, len(names))),
        "bkt_trace (400 observations)": ("bkt_trace", (0.01, obs, 0.01, 0.3, 0.1)),
        "dominance_counts (40 x 40)": ("dominance_counts", (xs, ys)),
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _core.BACKEND != "compiled":
        print("compiled extension not available; only the fallback can be timed")
    print(f"{'kernel':38s} {'compiled us':>12s} {'fallback us':>12s} {'speedup':>8s}")
    for label, (name, call_args) in cases().items():
        row = []
        for impl in (_core, fallback):
            fn = getattr(impl, name)
            number, _ = timeit.Timer(lambda: fn(*call_args)).autorange()
            best = min(timeit.repeat(lambda: fn(*call_args), number=number, repeat=args.repeat))
            row.append(best / number * 1e6)
        print(f"{label:38s} {row[0]:12.1f} {row[1]:12.1f} {row[1] / row[0]:7.1f}x")


if __name__ == "__main__":
    main()
