"""Time the hot kernels with numba on and off.

    python3 benchmarks/bench_kernels.py [--repeat N]

Each backend runs in its own interpreter because the switch is read at import.
"""
import argparse
import json
import os
import subprocess
import sys

_WORKER = r"""
import json, sys, timeit
import numpy as np
from ncphase import _accel, _kernels as K
from ncphase import DeformationSpec

repeat = int(sys.argv[1])
P = DeformationSpec.quadratic(1.0).kernel_params()
F = np.array([0.3, -0.2, 1.0])
n = 20000
Z, V6 = np.empty((n + 1, 6)), np.empty((n + 1, 6))
X, V3 = np.empty((n + 1, 3)), np.empty((n + 1, 3))
z0 = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
y = np.sin(np.linspace(0.0, 10.0, 200001))
xs = np.ascontiguousarray(np.stack([y, y, y], axis=1))
cases = {
    "rk4_flow": lambda: K.rk4_flow(P, 1.0, F, z0, 0.0, 1e-4, n, Z, V6),
    "rk4_newton": lambda: K.rk4_newton(P, 1.0, F, z0[:3], z0[3:], 0.0, 1e-4, n, X, V3),
    "cumulative_simpson": lambda: K.cumulative_simpson(y, 5e-5),
    "second_derivative": lambda: K.second_derivative(xs, 5e-5),
}
out = {"numba": _accel.USE_NUMBA}
for name, fn in cases.items():
    fn()  # compile / warm up
    out[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
print(json.dumps(out))
"""


def run(disable, repeat):
    env = dict(os.environ)
    env.pop("NCPHASE_DISABLE_NUMBA", None)
    if disable:
        env["NCPHASE_DISABLE_NUMBA"] = "1"
    res = subprocess.run([sys.executable, "-c", _WORKER, str(repeat)], env=env,
                         capture_output=True, text=True, check=True)
    return json.loads(res.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    fast, slow = run(False, args.repeat), run(True, args.repeat)
    if not fast.pop("numba"):
        print("numba unavailable; both columns use numpy")
    slow.pop("numba")
    print(f"{'kernel':<20}{'numba [s]':>12}{'numpy [s]':>12}{'speedup':>10}")
    for name in fast:
        print(f"{name:<20}{fast[name]:>12.4g}{slow[name]:>12.4g}{slow[name] / fast[name]:>10.1f}")


if __name__ == "__main__":
    main()
