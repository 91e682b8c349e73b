"""Compare the compiled kernels against the pure-Python fallback.

Runs the same workloads in two subprocesses, one with SETSIZE_NO_NUMBA=1,
and reports wall times and the speedup. Compilation time is excluded by a
warmup pass inside each subprocess.

Usage: python benchmarks/bench_backends.py [--replications R]
"""

import argparse
import json
import os
import subprocess
import sys

WORKER = r"""
import json, sys, time
import setsize
from setsize import engine
from setsize.models import (TankConfig, CRC2Config, BinomialCountConfig,
                            NsumHiddenConfig)

R = int(sys.argv[1])
cases = {
    "tank n=200 N=400": (TankConfig(400, 200), ("tank.goodman",)),
    "crc2 n=500 N=1000": (CRC2Config(1000, 500, 500), ("crc.chapman",)),
    "binom mme N=1000": (BinomialCountConfig(1000, 0.3, 50),
                         ("binom.mme",)),
    "nsum hidden n=60": (NsumHiddenConfig(400, 0.05, 60), ("nsum.hidden",)),
}
out = {"backend": setsize.backend_name(), "times": {}}
for name, (cfg, est) in cases.items():
    engine.run_cell(cfg, 1, est, 300, 1, exact=False, threads=1)  # warmup
    t0 = time.perf_counter()
    engine.run_cell(cfg, 1, est, R, 2, exact=False, threads=1)
    out["times"][name] = time.perf_counter() - t0
print(json.dumps(out))
"""


def run_backend(disable_numba, replications):
    env = dict(os.environ)
    if disable_numba:
        env["SETSIZE_NO_NUMBA"] = "1"
    else:
        env.pop("SETSIZE_NO_NUMBA", None)
    proc = subprocess.run(
        [sys.executable, "-c", WORKER, str(replications)],
        env=env, capture_output=True, text=True, check=True)
    return json.loads(proc.stdout.strip().splitlines()[-1])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replications", type=int, default=5000)
    args = ap.parse_args()
    # the fallback is orders of magnitude slower; scale its workload down
    # and normalize to per-replication time
    r_fast = args.replications
    r_slow = max(50, args.replications // 100)
    fast = run_backend(False, r_fast)
    slow = run_backend(True, r_slow)
    print(f"{'case':<22} {'numba (s)':>10} {'python (s)':>11} "
          f"{'speedup':>8}")
    for name in fast["times"]:
        tf = fast["times"][name] / r_fast
        ts = slow["times"][name] / r_slow
        print(f"{name:<22} {tf * r_fast:>10.3f} {ts * r_slow:>11.3f} "
              f"{ts / tf:>7.0f}x")
    print(f"\n(numba at {r_fast} replications, python at {r_slow}; "
          "speedup is per-replication)")


if __name__ == "__main__":
    main()
