"""Compare the compiled branch and bound against the pure-numpy fallback.

Each mode runs in its own interpreter because ``PRA_DISABLE_NUMBA`` is read
at import time. The timed work is a set of lexicographic solves on
generated wards; compilation is excluded by a warm-up solve.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--periods 6]
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
from pra._accel import BACKEND
from pra.generate import GeneratorParams, generate_instance
from pra.ip import build_model, compute_smax, solve_lexicographic
from pra.ip.solver import warm_up
from pra.matching import wmin
from pra.scoring import parse_scorer

periods, repeat = int(sys.argv[1]), int(sys.argv[2])
warm_up()
params = GeneratorParams(horizon=periods, n_rooms=6, occupancy=0.8, mean_los=3.0)
scorer = parse_scorer("abs-age")
cases = []
for seed in range(4):
    inst = generate_instance(params, seed)
    fix = {"smax": compute_smax(inst), "wmin": wmin(inst, scorer)[0]}
    for variant in ("Q", "T", "U"):
        cases.append((variant, build_model(variant, inst, scorer, fix)))
best = None
nodes = 0
for _ in range(repeat):
    t0 = time.perf_counter()
    nodes = 0
    for variant, model in cases:
        nodes += solve_lexicographic(model, 120.0).nodes
    elapsed = time.perf_counter() - t0
    best = elapsed if best is None else min(best, elapsed)
print(json.dumps({"backend": BACKEND, "seconds": best, "nodes": nodes, "solves": len(cases)}))
"""


def run(disable: bool, periods: int, repeat: int) -> dict:
    env = dict(os.environ)
    env["PRA_DISABLE_NUMBA"] = "1" if disable else "0"
    out = subprocess.run([sys.executable, "-c", WORKER, str(periods), str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--periods", type=int, default=6)
    args = parser.parse_args(argv)
    fast = run(False, args.periods, args.repeat)
    slow = run(True, args.periods, args.repeat)
    if fast["nodes"] != slow["nodes"]:
        print(f"warning: node counts differ ({fast['nodes']} vs {slow['nodes']})")
    for r in (fast, slow):
        rate = r["nodes"] / r["seconds"] if r["seconds"] > 0 else float("inf")
        print(f"{r['backend']:>6}: {r['solves']} solves, {r['nodes']} nodes, {r['seconds']:.3f} s, {rate:,.0f} nodes/s")
    print(f"speedup: {slow['seconds'] / fast['seconds']:.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
