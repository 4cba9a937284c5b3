"""Compare the jitted and pure-numpy gate kernels.

The backend is frozen at import time by AQS_KERNELS, so this script times
each backend in a child process and prints one table. Run from the repo
root:

    python3 benchmarks/bench_kernels.py
    python3 benchmarks/bench_kernels.py --sizes 8 12 16 20 --gates 400
"""

from __future__ import annotations

import argparse
import json
import os
import subprocess
import sys
import time


def _worker(sizes: list[int], gates: int) -> None:
    import numpy as np

    from aqs import kernels
    from aqs.gates import u_gate

    kernels.warmup()
    rng = np.random.default_rng(0)
    results = {"backend": kernels.active_backend(), "timings": {}}
    for n in sizes:
        dim = 1 << n
        amps = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        amps /= np.linalg.norm(amps)
        amps = amps.astype(np.complex128)
        singles = [
            (1 << int(rng.integers(0, n)),
             u_gate(*rng.uniform(0, 3.1, size=3)))
            for _ in range(gates)
        ]
        pairs = []
        for _ in range(gates):
            c, t = rng.choice(n, size=2, replace=False)
            pairs.append((1 << int(c), 1 << int(t),
                          u_gate(*rng.uniform(0, 3.1, size=3))))

        t0 = time.perf_counter()
        for mask, gate in singles:
            kernels.apply_single_inplace(amps, mask, gate)
        t1 = time.perf_counter()
        for cmask, tmask, gate in pairs:
            kernels.apply_controlled_inplace(amps, cmask, tmask, gate)
        t2 = time.perf_counter()
        results["timings"][str(n)] = {
            "single_us": (t1 - t0) / gates * 1e6,
            "controlled_us": (t2 - t1) / gates * 1e6,
        }
    print(json.dumps(results))


def _spawn(backend: str, sizes: list[int], gates: int) -> dict:
    env = dict(os.environ, AQS_KERNELS=backend)
    cmd = [sys.executable, os.path.abspath(__file__), "--worker",
           "--gates", str(gates), "--sizes", *map(str, sizes)]
    out = subprocess.run(cmd, env=env, capture_output=True, text=True, check=True)
    return json.loads(out.stdout.strip().splitlines()[-1])


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--sizes", type=int, nargs="+", default=[8, 12, 16, 20])
    parser.add_argument("--gates", type=int, default=200)
    parser.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = parser.parse_args()

    if args.worker:
        _worker(args.sizes, args.gates)
        return 0

    rows = {}
    for backend in ("numba", "numpy"):
        try:
            rows[backend] = _spawn(backend, args.sizes, args.gates)
        except subprocess.CalledProcessError as exc:
            print(f"{backend} backend unavailable:\n{exc.stderr}", file=sys.stderr)

    if not rows:
        return 1

    print(f"{'kernel':<12}{'n':>4}{'numba us':>12}{'numpy us':>12}{'speedup':>10}")
    for kind in ("single_us", "controlled_us"):
        label = kind.replace("_us", "")
        for n in map(str, args.sizes):
            nb = rows.get("numba", {}).get("timings", {}).get(n, {}).get(kind)
            np_ = rows.get("numpy", {}).get("timings", {}).get(n, {}).get(kind)
            speed = f"{np_ / nb:.2f}x" if nb and np_ else "-"
            fmt = lambda v: f"{v:12.2f}" if v is not None else f"{'-':>12}"
            print(f"{label:<12}{n:>4}{fmt(nb)}{fmt(np_)}{speed:>10}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
