"""Compare the compiled and pure-Python propagation kernels.

Each backend runs in its own interpreter because the kernel is chosen at
import time (``FINIMOD_PURE=1`` forces the Python one).  Workloads are
random 3-SAT near the phase transition and random graph colorings; every
workload is solved ``--repeat`` times and the best wall time is kept.

    python3 benchmarks/bench_bcp.py [--vars 120] [--instances 10] [--repeat 3]
"""

import argparse
import json
import os
import random
import subprocess
import sys
import time


def sat_workload(nvars, instances, seed):
    from finimod.engine import Engine
    from finimod.fcc import FCCConfig
    from finimod.kernel import Clause, TermBank

    verdicts = []
    for i in range(instances):
        rng = random.Random(seed + i)
        b = TermBank()
        atoms = [b.atom(b.mk_app(b.declare_fun("p%d" % v, [], b.BOOL), []))
                 for v in range(nvars)]
        eng = Engine(b, FCCConfig(ladder=False))
        ok = True
        for _ in range(int(4.26 * nvars)):
            lits = [atoms[v] if rng.random() < 0.5 else ~atoms[v]
                    for v in rng.sample(range(nvars), 3)]
            ok = eng.add_input_clause(Clause(lits)) and ok
        verdicts.append(eng.check() if ok else "unsat")
    return verdicts


def coloring_workload(instances, seed):
    from finimod.driver import SolverConfig, solve
    from finimod.gen import random_coloring
    from finimod.parser import parse
    from finimod.purifier import Purifier

    cards = []
    rng = random.Random(seed)
    for i in range(instances):
        n = rng.randint(20, 30)
        inst = random_coloring(n, int(0.4 * n * (n - 1) / 2), seed + i)
        s = parse(inst.script())
        pur = Purifier(s.bank)
        r = solve(pur.purify(s.formula()), SolverConfig(), pur)
        cards.append(r.cards.get("S"))
    return cards


def worker(args):
    from finimod import _kernels
    out = {"backend": _kernels.BACKEND}
    for name, fn in (("3-sat", lambda: sat_workload(args.vars, args.instances, args.seed)),
                     ("coloring", lambda: coloring_workload(args.instances, args.seed))):
        best, result = None, None
        for _ in range(args.repeat):
            t = time.perf_counter()
            result = fn()
            dt = time.perf_counter() - t
            best = dt if best is None else min(best, dt)
        out[name] = {"seconds": best, "result": result}
    print(json.dumps(out))


def run_backend(pure, argv):
    env = dict(os.environ, FINIMOD_PURE="1" if pure else "")
    p = subprocess.run([sys.executable, __file__, "--worker"] + argv, env=env,
                       capture_output=True, text=True, check=True)
    return json.loads(p.stdout)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--vars", type=int, default=120)
    ap.add_argument("--instances", type=int, default=10)
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--worker", action="store_true", help=argparse.SUPPRESS)
    args = ap.parse_args()
    if args.worker:
        return worker(args)
    argv = ["--vars", str(args.vars), "--instances", str(args.instances),
            "--repeat", str(args.repeat), "--seed", str(args.seed)]
    fast, slow = run_backend(False, argv), run_backend(True, argv)
    if fast["backend"] != "cython":
        print("compiled kernel not available; both runs used the Python kernel")
    print("%-10s %12s %12s %9s  %s" % ("workload", fast["backend"], slow["backend"],
                                       "speedup", "same answers"))
    for name in ("3-sat", "coloring"):
        a, b = fast[name], slow[name]
        print("%-10s %11.3fs %11.3fs %8.2fx  %s" % (
            name, a["seconds"], b["seconds"], b["seconds"] / a["seconds"],
            "yes" if a["result"] == b["result"] else "NO"))


if __name__ == "__main__":
    main()
