"""Command line: ``finimod [solve|gen|oracle] [flags] [file]``.

Exit status 0 means a verdict was printed, 1 a usage or parse error and
2 an internal invariant failure.
"""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from . import _kernels
from .driver import SolverConfig, UsageError, solve, validate_model
from .gen import gen_coloring
from .oracle import OracleLimit, oracle_solve
from .parser import ParseError, parse
from .purifier import PurifyError, Purifier

SUBCOMMANDS = ("solve", "gen", "oracle")


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(message)


def _onoff(v: str) -> bool:
    v = v.lower()
    if v in ("on", "true", "1", "yes"):
        return True
    if v in ("off", "false", "0", "no"):
        return False
    raise argparse.ArgumentTypeError("expected on or off, got %r" % v)


def _solve_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="finimod solve", description="Decide a problem and print a finite model.")
    p.add_argument("file", nargs="?", help="input script (default: stdin)")
    p.add_argument("--mbqi", choices=("none", "full"), default=None,
                   help="full: model-based instantiation; none: all instances")
    p.add_argument("--ematch", type=_onoff, default=None, metavar="{on,off}")
    p.add_argument("--inst-cap", type=int, default=None, metavar="N",
                   help="instances per quantifier per round (0 = unlimited)")
    p.add_argument("--regions", type=_onoff, default=None, metavar="{on,off}")
    p.add_argument("--clique-explain", choices=("lemma", "conflict"), default=None)
    p.add_argument("--max-card", type=int, default=None, metavar="N",
                   help="bound on the summed sort cardinality (0 = unlimited)")
    p.add_argument("--certify", action="store_true", default=None,
                   help="check the model exhaustively before answering sat")
    p.add_argument("--stats", action="store_true", default=None)
    p.add_argument("--mace", action="store_true", default=None,
                   help="domain-constant baseline (ground single-sort input only)")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--timeout", type=float, default=None, metavar="SECONDS")
    return p


_OPTION_KEYS = {
    "mbqi": str, "ematch": _onoff, "inst-cap": int, "regions": _onoff,
    "clique-explain": str, "max-card": int, "certify": _onoff, "stats": _onoff,
    "mace": _onoff, "seed": int, "timeout": float,
}


def _read(path: Optional[str]) -> str:
    if path is None or path == "-":
        return sys.stdin.read()
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise _Usage("cannot read %s: %s" % (path, e.strerror))


def _settings(args, script) -> dict:
    s = {}
    for key, conv in _OPTION_KEYS.items():
        if script is not None and key in script.options:
            try:
                s[key] = conv(script.options[key])
            except (ValueError, argparse.ArgumentTypeError):
                raise _Usage("bad value for option :%s" % key)
    for key in _OPTION_KEYS:
        v = getattr(args, key.replace("-", "_"))
        if v is not None:
            s[key] = v
    return s


def _config(s: dict) -> SolverConfig:
    cfg = SolverConfig(
        mbqi=s.get("mbqi", "full"), ematch=s.get("ematch", False),
        regions=s.get("regions", True), clique_explain=s.get("clique-explain", "lemma"),
        max_card=s.get("max-card", 0), inst_cap=s.get("inst-cap", 0),
        seed=s.get("seed", 0), mace=s.get("mace", False),
        timeout=s.get("timeout", 0.0), certify=s.get("certify", False))
    if cfg.mbqi not in ("none", "full"):
        raise _Usage("mbqi must be none or full")
    if cfg.clique_explain not in ("lemma", "conflict"):
        raise _Usage("clique-explain must be lemma or conflict")
    if cfg.max_card < 0 or cfg.inst_cap < 0 or cfg.timeout < 0:
        raise _Usage("numeric limits must be non-negative")
    return cfg


def run_solve(argv: List[str], out) -> int:
    args = _solve_parser().parse_args(argv)
    _config(_settings(args, None))      # reject bad flags before reading input
    script = parse(_read(args.file))
    s = _settings(args, script)
    cfg = _config(s)
    bank = script.bank
    nsorts = len(bank.uninterpreted_sorts())
    if cfg.max_card and cfg.max_card < nsorts:
        raise _Usage("max-card %d is below the number of sorts (%d)" % (cfg.max_card, nsorts))
    purifier = Purifier(bank)
    problem = purifier.purify(script.formula())
    result = solve(problem, cfg, purifier)
    if result.verdict == "sat" and cfg.certify and not cfg.mace:
        if not validate_model(result.model, problem, result.trail):
            raise AssertionError("model failed certification")
    print(result.verdict, file=out)
    if result.verdict == "sat" and script.get_model and result.model is not None:
        text = result.model.format()
        if text:
            print(text, file=out)
    if s.get("stats"):
        result.stats.setdefault("backend", _kernels.BACKEND)
        for k, v in result.stats.items():
            print("%s=%s" % (k, v), file=out)
        for name, k in result.cards.items():
            print("%s=%d" % (name, k), file=out)
    return 0


def run_gen(argv: List[str], out) -> int:
    p = _Parser(prog="finimod gen", description="Print a random graph-coloring script.")
    p.add_argument("-n", "--vertices", type=int, required=True)
    p.add_argument("-m", "--edges", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args(argv)
    try:
        out.write(gen_coloring(args.vertices, args.edges, args.seed))
    except ValueError as e:
        raise _Usage(str(e))
    return 0


def run_oracle(argv: List[str], out) -> int:
    p = _Parser(prog="finimod oracle", description="Brute-force model search.")
    p.add_argument("file", nargs="?")
    p.add_argument("--max-card", type=int, default=4)
    p.add_argument("--limit", type=int, default=2_000_000,
                   help="enumeration budget")
    args = p.parse_args(argv)
    script = parse(_read(args.file))
    problem = Purifier(script.bank).purify(script.formula())
    try:
        r = oracle_solve(problem, args.max_card, args.limit)
    except OracleLimit as e:
        raise _Usage(str(e))
    if r.verdict == "sat":
        print("sat", file=out)
        for name, k in r.cards.items():
            print("%s=%d" % (name, k), file=out)
    else:
        print("unsat_up_to %d" % r.cards, file=out)
    return 0


def main(argv: Optional[List[str]] = None, out=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = out or sys.stdout
    cmd = "solve"
    if argv and argv[0] in SUBCOMMANDS:
        cmd = argv.pop(0)
    elif argv and argv[0] in ("-h", "--help"):
        print("usage: finimod [solve|gen|oracle] [flags] [file]", file=out)
        return 0
    try:
        return {"solve": run_solve, "gen": run_gen, "oracle": run_oracle}[cmd](argv, out)
    except (_Usage, UsageError) as e:
        print("usage error: %s" % e, file=sys.stderr)
        return 1
    except (ParseError, PurifyError) as e:
        print("parse error: %s" % e, file=sys.stderr)
        return 1
    except SystemExit as e:
        return 0 if e.code in (0, None) else 1
    except Exception as e:  # invariant failure anywhere in the solver
        print("internal error: %s: %s" % (type(e).__name__, e), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
