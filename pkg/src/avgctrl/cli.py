"""Command-line interface.

Exit codes for ``analyze``: 0 certified controllable, 1 certified not
controllable, 2 undetermined, 3 input error.  ``construct`` returns 0 for
a certificate with nonzero determinant and 2 otherwise; ``simulate`` and
``hilbert`` return 1 on a singular Gramian or any violated check.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .analysis import analyze
from .construction import AVERAGED_CONTROLLABLE, Certificate, monomial_certificate
from .ensemble import EnsembleConfig, SingularGramianError, steer_average
from .graph import PatternError, load_pattern, parse_pattern
from .hilbert import hilbert, hilbert_inverse, invertibility_scan, verify_single_truncation
from .poly import PolyMatrix, RationalMatrix

INPUT_ERROR = 3
PATTERN_SUFFIXES = (".json", ".dot", ".gv")


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")


def _fail_input(msg: str) -> int:
    sys.stderr.write(f"error: {msg}\n")
    return INPUT_ERROR


# -- analyze / construct ------------------------------------------------------

def _analyze_one(path: Path, args) -> int:
    try:
        g = load_pattern(path)
    except (OSError, PatternError) as exc:
        return _fail_input(f"{path}: {exc}")
    report = analyze(g, trap_limit=args.trap_limit, j_max=args.jmax, seed=args.seed)
    if args.json:
        d = report.to_dict(timing=args.timing)
        if args.dir:
            d["file"] = path.name
        _emit(d)
    else:
        if args.dir:
            print(f"== {path.name}")
        print(report.to_text())
    return report.exit_code


def cmd_analyze(args) -> int:
    if args.dir:
        root = Path(args.path)
        if not root.is_dir():
            return _fail_input(f"{root} is not a directory")
        files = sorted(p for p in root.iterdir() if p.suffix in PATTERN_SUFFIXES)
        codes = [_analyze_one(p, args) for p in files]
        return max(codes, default=0)
    return _analyze_one(Path(args.path), args)


def cmd_construct(args) -> int:
    try:
        g = load_pattern(args.path)
    except (OSError, PatternError) as exc:
        return _fail_input(f"{args.path}: {exc}")
    result = monomial_certificate(g)
    if isinstance(result, Certificate):
        _emit(result.to_json())
        return 0 if result.verdict == AVERAGED_CONTROLLABLE else 2
    _emit({"verdict": result.verdict, "reason": result.note})
    return 2


# -- hilbert --------------------------------------------------------------------

def cmd_hilbert(args) -> int:
    if args.action == "verify":
        if args.n_max < 2:
            return _fail_input("--n-max must be at least 2")
        violations = 0
        for n in range(2, args.n_max + 1):
            rep = verify_single_truncation(n)
            violations += len(rep.violations)
            _emit({"n": n, "peak": rep.peak, "violations": rep.violations,
                   "min_abs_z": str(abs(rep.z[1]))})
        _emit({"summary": "verify", "n_max": args.n_max, "violations": violations})
        return 1 if violations else 0
    if args.action == "scan":
        try:
            gammas = range(args.gamma_min, (args.gamma_max or args.n) + 1)
            rep = invertibility_scan(args.n, gammas, limit=args.limit, sink=_emit)
        except ValueError as exc:
            return _fail_input(str(exc))
        _emit({"summary": "scan", **rep.summary()})
        return 1 if rep.singular or rep.block_disagreements else 0
    if args.action == "inverse":
        if args.n < 1:
            return _fail_input("--n must be positive")
        inv = hilbert_inverse(args.n)
        ok = inv @ hilbert(args.n) == RationalMatrix.identity(args.n)
        _emit({"n": args.n, "inverse": [[int(x) for x in row] for row in inv],
               "identity_check": ok})
        return 0 if ok else 1
    raise AssertionError(args.action)


# -- simulate -------------------------------------------------------------------

def load_scenario(path) -> tuple[EnsembleConfig, object, np.ndarray]:
    """Parse a scenario file into ``(config, x0, target)``.

    Keys: ``pattern`` (pattern JSON object; its monomial certificate pair is
    used) or ``pair`` (``{"A": ..., "B": ...}`` with polynomial coefficient
    maps), ``M``, ``T``, ``time_steps``, ``target``, optional ``x0``
    (``"zero"``, an n-vector, or one n-vector per sample) and
    ``quadrature``.
    """
    with open(path) as fh:
        data = json.load(fh)
    if "pair" in data:
        a = PolyMatrix.from_json(data["pair"]["A"])
        b = PolyMatrix.from_json(data["pair"]["B"])
    elif "pattern" in data:
        g = parse_pattern(json.dumps(data["pattern"]))
        cert = monomial_certificate(g)
        if not isinstance(cert, Certificate):
            raise ValueError(f"pattern has no monomial certificate: {cert.note}")
        a, b = cert.pair_in_original_labels()
    else:
        raise ValueError("scenario needs 'pattern' or 'pair'")
    cfg = EnsembleConfig(a, b, samples=int(data.get("M", 201)), horizon=float(data.get("T", 1.0)),
                         quadrature=data.get("quadrature", "midpoint"),
                         time_steps=int(data.get("time_steps", 40)))
    x0 = data.get("x0", "zero")
    x0 = None if x0 == "zero" else np.asarray(x0, dtype=float)
    target = np.asarray(data["target"], dtype=float)
    if target.shape != (cfg.n,):
        raise ValueError(f"target must have {cfg.n} entries")
    return cfg, x0, target


def cmd_simulate(args) -> int:
    try:
        cfg, x0, target = load_scenario(args.scenario)
    except (OSError, ValueError, KeyError, PatternError) as exc:
        return _fail_input(f"{args.scenario}: {exc}")
    try:
        result = steer_average(cfg, x0, target)
    except SingularGramianError as exc:
        sys.stderr.write(f"singular Gramian: {exc}\n")
        _emit({"error": "singular-gramian", "gramian_condition": exc.condition})
        return 1
    if args.json:
        _emit(result.to_dict())
    else:
        print(f"achieved average : {np.array2string(result.achieved_average, precision=8)}")
        print(f"target           : {np.array2string(result.target, precision=8)}")
        print(f"relative error   : {result.relative_error:.3e}")
        print(f"Gramian condition: {result.gramian_condition:.3e}")
        print(f"control energy   : {result.control_energy:.6g}")
    return 0


# -- entry point ----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="avgctrl", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="classify a sparsity pattern")
    p.add_argument("path", help="pattern file (.json or .dot), or a directory with --dir")
    p.add_argument("--dir", action="store_true", help="analyze every pattern file in PATH")
    p.add_argument("--json", action="store_true", help="emit the report as JSON")
    p.add_argument("--timing", action="store_true", help="include per-test timings in JSON")
    p.add_argument("--trap-limit", "--corollary9-limit", dest="trap_limit", type=int, default=None,
                   help="largest n for the exhaustive acyclic-trap search "
                        "(default: $AVGCTRL_COROLLARY9_LIMIT or 20)")
    p.add_argument("--jmax", type=int, default=None, help="rank-test horizon (default 4n)")
    p.add_argument("--seed", type=int, default=0, help="seed for random compliant pairs")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("construct", help="emit the monomial certificate as JSON")
    p.add_argument("path")
    p.set_defaults(func=cmd_construct)

    p = sub.add_parser("hilbert", help="sparse Hilbert matrix checks")
    hsub = p.add_subparsers(dest="action", required=True)
    h = hsub.add_parser("verify", help="single-truncation invertibility sweep")
    h.add_argument("--n-max", type=int, default=25)
    h = hsub.add_parser("scan", help="enumerate all truncation sequences for one n")
    h.add_argument("--n", type=int, required=True)
    h.add_argument("--gamma-min", type=int, default=1)
    h.add_argument("--gamma-max", type=int, default=None)
    h.add_argument("--limit", type=int, default=8, help="largest n allowed (default 8)")
    h = hsub.add_parser("inverse", help="explicit inverse of H_n, checked exactly")
    h.add_argument("--n", type=int, required=True)
    p.set_defaults(func=cmd_hilbert)

    p = sub.add_parser("simulate", help="steer the ensemble average numerically")
    p.add_argument("scenario")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
