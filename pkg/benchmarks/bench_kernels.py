"""Compare the compiled integration kernel against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--steps 5000] [--repeats 3]

Both kernels run the same seeded anneals; the script checks that the
resulting records are identical and reports time per simulated step.
"""

import argparse
import time
from pathlib import Path

from skisat import _fallback
from skisat.cnf import generate_random_ksat, read_dimacs
from skisat.dynamics import DynamicsConfig, Network, run
from skisat.perturb import PerturbationConfig, make_schedule

try:
    from skisat import _kernel
except ImportError:
    _kernel = None

DATA = Path(__file__).resolve().parent.parent / "tests" / "data"


def time_kernel(cnf, kernel, cfg, mode, seeds):
    net = Network(cnf)
    pcfg = PerturbationConfig(mode=mode)
    scheds = [make_schedule(pcfg, cfg.max_steps, s) for s in seeds]
    t0 = time.perf_counter()
    recs = [run(cnf, cfg, sch, s, network=net, kernel=kernel) for s, sch in zip(seeds, scheds)]
    elapsed = time.perf_counter() - t0
    steps = sum(r.steps_run for r in recs)
    return elapsed / steps, [r.to_json() for r in recs]


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--steps", type=int, default=5000)
    ap.add_argument("--repeats", type=int, default=3, help="seeds per (instance, mode)")
    args = ap.parse_args()
    if _kernel is None:
        raise SystemExit("compiled kernel not built; run 'pip install -e . --no-build-isolation'")

    cfg = DynamicsConfig(max_steps=args.steps)
    instances = {
        "uf20-01": read_dimacs(DATA / "uf20-01.cnf"),
        "rand50-218": read_dimacs(DATA / "rand50-218-s5000.cnf"),
        "rand250-1065": generate_random_ksat(250, 1065, 3, seed=1),
    }
    print(f"{'instance':<14}{'mode':<16}{'compiled ns/step':>18}{'python us/step':>16}{'speedup':>10}  same")
    for name, cnf in instances.items():
        for mode in ("ski_pulse", "none"):
            seeds = list(range(args.repeats))
            fast, a = time_kernel(cnf, _kernel.simulate, cfg, mode, seeds)
            slow, b = time_kernel(cnf, _fallback.simulate, cfg, mode, seeds)
            print(f"{name:<14}{mode:<16}{fast * 1e9:>18.1f}{slow * 1e6:>16.1f}{slow / fast:>10.0f}  {a == b}")


if __name__ == "__main__":
    main()
