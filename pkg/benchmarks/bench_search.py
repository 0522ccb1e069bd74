"""Time the sequence search under the compiled and pure kernel backends.

Each measurement runs in a fresh interpreter because the backend is chosen
once at import time (FTWALK_PURE=1 forces the NumPy fallback).  Both backends
produce byte-identical tables — the test suite checks that — so this script
only reports wall time.

Usage: python benchmarks/bench_search.py [--depths 14 18 22]
"""

import argparse
import json
import os
import subprocess
import sys

SNIPPET = """
import json, sys, time
from ftwalk import kernel
from ftwalk.synth import search

depth = int(sys.argv[1])
start = time.perf_counter()
tables = search(depth)
elapsed = time.perf_counter() - start
print(json.dumps({
    "backend": kernel.backend_name(),
    "seconds": elapsed,
    "angles": len(tables.positive_best_r.entries),
}))
"""


def run_once(depth: int, pure: bool) -> dict:
    env = dict(os.environ)
    if pure:
        env["FTWALK_PURE"] = "1"
    else:
        env.pop("FTWALK_PURE", None)
    proc = subprocess.run(
        [sys.executable, "-c", SNIPPET, str(depth)],
        env=env,
        capture_output=True,
        text=True,
        check=True,
    )
    result = json.loads(proc.stdout)
    expected = "pure" if pure else "compiled"
    if result["backend"] != expected:
        raise SystemExit(
            f"wanted the {expected} backend but got {result['backend']}; "
            "build the extension first (pip install -e .)"
        )
    return result


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--depths", type=int, nargs="+", default=[14, 18, 22])
    args = parser.parse_args()

    print(f"{'depth':>5} {'angles':>7} {'pure (s)':>9} {'compiled (s)':>13} {'speedup':>8}")
    for depth in args.depths:
        pure = run_once(depth, pure=True)
        fast = run_once(depth, pure=False)
        if pure["angles"] != fast["angles"]:
            raise SystemExit(f"backend mismatch at depth {depth}: angle counts differ")
        ratio = pure["seconds"] / fast["seconds"] if fast["seconds"] else float("inf")
        print(
            f"{depth:>5} {fast['angles']:>7} {pure['seconds']:>9.2f} "
            f"{fast['seconds']:>13.2f} {ratio:>7.1f}x"
        )
    return 0


if __name__ == "__main__":
    sys.exit(main())
