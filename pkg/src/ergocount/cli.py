"""Command-line entry point: ``ergocount <experiment> [options]``.

Exit codes: 0 success, 2 invalid scenario or input, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from .errors import BudgetExceeded, ValidationError
from .harness import EXPERIMENTS, Scenario, ScenarioFailed, run_scenario
from .regions import ThinningRegion, mc_volume, region_volume
from .sampling import SeededStream

EXIT_OK, EXIT_INVALID, EXIT_BUDGET = 0, 2, 3


def _common(p: argparse.ArgumentParser) -> None:
    # defaults are None so a --scenario file can supply them
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--samples", type=int, help="number of random samples")
    p.add_argument("--out", help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), help="report format (default csv)")
    p.add_argument("--log2T", type=int, help="largest scale is T = 2^log2T")
    p.add_argument("--b", type=float, help="thinning parameter b > 0")
    p.add_argument("--m", type=int, help="dimension of the x block")
    p.add_argument("--n", type=int, help="dimension of the y block")
    p.add_argument("--scenario", help="TOML file with scenario parameters; flags override it")
    p.add_argument("--budget", type=int, help="cap on enumeration candidates")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ergocount", description="Counting experiments in thinning regions.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} convergence experiment")
        _common(p)
        if name == "toral":
            p.add_argument("--N", type=int, help="largest number of rotation steps")
        if name in ("toral", "siegel"):
            p.add_argument("--inhomogeneous", action="store_const", const=True,
                           help="random target point / random translate")
        if name in ("lattice", "siegel"):
            p.add_argument("--primitive", action="store_const", const=True, help="count primitive vectors only")
        if name == "origami":
            p.add_argument("--file", dest="origami", help="origami file (N, h, v lines) or a built-in name")
            p.add_argument("--theta", choices=("zero", "random"), help="rotation policy (default random)")
            p.add_argument("--distinct-holonomies", dest="distinct_holonomies", action="store_const", const=True,
                           help="count distinct holonomy vectors instead of saddle connections")
    p = sub.add_parser("volume-check", help="compare the exact region volume with Monte Carlo integration")
    _common(p)
    p.add_argument("--theta-angle", type=float, default=0.0, help="rotation angle of the region (m = n = 1)")
    return parser


def _scenario(args) -> Scenario:
    keys = ("seed", "samples", "out", "format", "log2T", "b", "m", "n", "budget", "N", "inhomogeneous",
            "primitive", "origami", "theta", "distinct_holonomies")
    overrides = {k: getattr(args, k, None) for k in keys}
    if args.scenario:
        sc = Scenario.from_toml(args.scenario, **overrides)
        if sc.experiment != args.command:
            raise ValidationError(f"scenario file is for {sc.experiment!r}, not {args.command!r}")
        return sc
    return Scenario.from_mapping({"experiment": args.command}, **overrides)


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _volume_check(args) -> int:
    b = 1.0 if args.b is None else args.b
    m = 1 if args.m is None else args.m
    n = 1 if args.n is None else args.n
    log2T = 1 if args.log2T is None else args.log2T
    samples = 10**6 if args.samples is None else args.samples
    seed = 0 if args.seed is None else args.seed
    region = ThinningRegion(b, m, n, 1.0, math.ldexp(1.0, log2T), args.theta_angle)
    exact = region_volume(region)
    est = mc_volume(region, samples, SeededStream(seed, 0).rng())
    rel = abs(est.mean - exact) / exact
    if args.format == "json":
        text = json.dumps({"exact": exact, "mc_mean": est.mean, "mc_stderr": est.stderr,
                           "samples": samples, "rel_diff": rel}, indent=2) + "\n"
    else:
        text = "exact,mc_mean,mc_stderr,samples,rel_diff\n" + ",".join(
            f"{x:.12g}" if isinstance(x, float) else str(x) for x in (exact, est.mean, est.stderr, samples, rel)) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "volume-check":
            return _volume_check(args)
        scenario = _scenario(args)
        report = run_scenario(scenario)
        _emit(report.render(), scenario.out or None)
        s = report.summary
        print(f"final ratio {s['final_ratio']:.4f}, slope ratio {s['slope_ratio']:.4f}", file=sys.stderr)
        return EXIT_OK
    except ScenarioFailed as exc:
        return _fail(exc.cause)
    except (ValidationError, BudgetExceeded) as exc:
        return _fail(exc)


def _fail(exc: BaseException) -> int:
    print(f"ergocount: error: {exc}", file=sys.stderr)
    if isinstance(exc, BudgetExceeded):
        return EXIT_BUDGET
    if isinstance(exc, ValidationError):
        return EXIT_INVALID
    raise exc


if __name__ == "__main__":
    sys.exit(main())
