"""``sturmkit`` command line.

Exit codes: 0 success, 1 finding flagged fatal by ``--fatal-findings``,
2 usage or input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

from . import oscillate, potential, propagate, sct, sweeps, theorem1, zero_motion
from .errors import NumericError, PotentialError, PreconditionError, SturmkitError
from .expr import evaluate
from .potential import Interval

EXIT_OK, EXIT_FINDING, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(SturmkitError):
    pass


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output: str | None = None
    format: str = "json"
    seed: int = 0


@dataclass
class Result:
    text: str
    finding: bool = False


def _real(text: str) -> float:
    return evaluate(text)


def _pair(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise UsageError(f"expected 'x,y', got {text!r}")
    return _real(parts[0]), _real(parts[1])


def _load(path: str) -> potential.PiecewisePotential:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read potential file {path!r}: {exc.strerror}") from exc
    return potential.parse_potential_spec(text)


def _clean(x):
    """JSON-safe floats: NaN and infinities become null."""
    if isinstance(x, float) and not math.isfinite(x):
        return None
    if isinstance(x, dict):
        return {k: _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    return x


def _json(obj) -> str:
    return json.dumps(_clean(obj), indent=2) + "\n"


# --- subcommands --------------------------------------------------------------


def cmd_solve(cfg: RunConfig) -> Result:
    p = cfg.parameters
    q = _load(p["potential"])
    v0, dv0 = _pair(p["ic"])
    t0 = q.a if p["from"] is None else _real(p["from"])
    t1 = q.b if p["to"] is None else _real(p["to"])
    ivp = propagate.IVP(q, t0, v0, dv0)
    traj = propagate.solve(ivp, t1, p["tol"], samples=p["samples"])
    if cfg.format == "csv":
        return Result(traj.to_csv())
    return Result(_json({
        "method": traj.method, "accuracy": traj.accuracy, "t0": t0, "t_end": t1,
        "samples": [{"t": s.t, "v": s.v, "dv": s.dv} for s in traj.samples],
    }))


def cmd_zeros(cfg: RunConfig) -> Result:
    p = cfg.parameters
    q = _load(p["potential"])
    v0, dv0 = _pair(p["ic"])
    t0 = q.a if p["from"] is None else _real(p["from"])
    interval = Interval.parse(p["interval"]) if p["interval"] else Interval(t0, q.b if p["to"] is None else _real(p["to"]))
    zs = oscillate.locate_zeros(propagate.IVP(q, t0, v0, dv0), interval, p["tol"])
    if cfg.format == "csv":
        return Result(zs.to_csv())
    return Result(_json({"a": interval.a, "b": interval.b, "count": len(zs), "zeros": list(zs.zeros),
                         "interior_zeros": list(zs.interior().zeros)}))


def cmd_disconjugate(cfg: RunConfig) -> Result:
    p = cfg.parameters
    q = _load(p["potential"])
    interval = Interval.parse(p["interval"]) if p["interval"] else q.domain
    point = oscillate.first_conjugate_point(q, interval.a, interval.b)
    witness = oscillate.zero_free_direction(q, interval)
    doc = {"a": interval.a, "b": interval.b, "disconjugate": point is None,
           "first_conjugate_point": point, "witness_theta": witness}
    if cfg.format == "csv":
        text = "a,b,disconjugate,first_conjugate_point,witness_theta\n" + ",".join(
            _cell(doc[k]) for k in ("a", "b", "disconjugate", "first_conjugate_point", "witness_theta")) + "\n"
        return Result(text, finding=point is None)
    return Result(_json(doc), finding=point is None)


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def cmd_sct(cfg: RunConfig) -> Result:
    p = cfg.parameters
    q1, q2 = _load(p["q1"]), _load(p["q2"])
    interval = Interval.parse(p["interval"]) if p["interval"] else None
    verdict = sct.sct_verdict(q1, q2, interval)
    doc = verdict.to_dict()
    if cfg.format == "csv":
        keys = ("outcome", "a", "b", "witness_theta", "disconjugate")
        return Result(",".join(keys) + "\n" + ",".join(_cell(doc[k]) for k in keys) + "\n",
                      finding=verdict.outcome == "fails")
    return Result(_json(doc), finding=verdict.outcome == "fails")


def cmd_theorem1(cfg: RunConfig) -> Result:
    p = cfg.parameters
    eps = _real(p["epsilon"])
    threshold = None
    if p["lambda"] is not None:
        lam = _real(p["lambda"])
    else:
        threshold = theorem1.find_lambda_threshold(eps)
        lam = threshold + 1.0
    report = theorem1.verify_theorem1(eps, lam)
    if cfg.format == "csv":
        return Result(theorem1.CSV_HEADER + "\n" + report.csv_row() + "\n", finding=not report.zero_free)
    doc = report.to_dict()
    doc["lambda_threshold"] = threshold
    return Result(_json(doc), finding=not report.zero_free)


def cmd_track_zero(cfg: RunConfig) -> Result:
    p = cfg.parameters
    q = _load(p["potential"])
    track = zero_motion.track_zero(q, _real(p["lambda_from"]), _real(p["lambda_to"]), p["steps"])
    if cfg.format == "csv":
        return Result(track.to_csv())
    return Result(_json({"lambda": list(track.lambda_grid), "t0": list(track.t0),
                         "dt0_dlambda": list(track.dt0_dlambda), "exit_lambda": track.exit_lambda}))


def cmd_epsilon0(cfg: RunConfig) -> Result:
    value = theorem1.epsilon0()
    if cfg.format == "csv":
        return Result(f"epsilon0\n{value:.17g}\n")
    if not cfg.parameters.get("explicit_format"):
        return Result(f"{value:.17g}\n")
    return Result(_json({"epsilon0": value, "residual": math.sin(value) - value * value}))


def cmd_construct(cfg: RunConfig) -> Result:
    p = cfg.parameters
    kind = p["kind"]
    if kind == "theorem1":
        if p["epsilon"] is None:
            raise UsageError("--kind theorem1 needs --epsilon")
        q = potential.build_theorem1_q2(_real(p["epsilon"]))
    elif kind == "delta":
        if p["epsilon"] is None:
            raise UsageError("--kind delta needs --epsilon")
        _, q = potential.build_delta_construction(_real(p["epsilon"]))
    else:
        if p["J"] is None:
            raise UsageError("--kind large-M needs --J a,b")
        q1 = _load(p["q1"]) if p["q1"] else potential.PiecewisePotential.constant(1.0)
        _, q = potential.build_large_M_construction(q1, Interval.parse(p["J"]))
    return Result(q.to_spec())


def cmd_property_sweep(cfg: RunConfig) -> Result:
    results = sweeps.run_property_sweep(cfg.seed, cfg.parameters["count"])
    failed = any(not r.ok for r in results)
    if cfg.format == "csv":
        lines = ["suite,passed,failed"] + [f"{r.name},{r.passed},{r.failed}" for r in results]
        return Result("\n".join(lines) + "\n", finding=failed)
    return Result(_json({"seed": cfg.seed, "count": cfg.parameters["count"],
                         "suites": [{"name": r.name, "passed": r.passed, "failed": r.failed} for r in results],
                         "all_passed": not failed}), finding=failed)


COMMANDS = {
    "solve": cmd_solve,
    "zeros": cmd_zeros,
    "disconjugate": cmd_disconjugate,
    "sct": cmd_sct,
    "theorem1": cmd_theorem1,
    "track-zero": cmd_track_zero,
    "epsilon0": cmd_epsilon0,
    "construct": cmd_construct,
    "property-sweep": cmd_property_sweep,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "csv"), default=None, help="output format (default: json)")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--fatal-findings", action="store_true",
                        help="exit 1 when the result is a finding (SCT fails, sweep failures, ...)")

    parser = argparse.ArgumentParser(prog="sturmkit", description="Sturm comparison experiments.")
    sub = parser.add_subparsers(dest="command", required=True)

    def ivp_flags(p):
        p.add_argument("--potential", required=True, help="potential spec file (JSON)")
        p.add_argument("--ic", required=True, help="initial data v0,dv0")
        p.add_argument("--from", dest="from_", metavar="FROM", help="initial point (default: domain start)")
        p.add_argument("--to", help="final point (default: domain end)")
        p.add_argument("--tol", type=float, default=propagate.DEFAULT_TOL)

    p = sub.add_parser("solve", parents=[common], help="solve an initial-value problem")
    ivp_flags(p)
    p.add_argument("--samples", type=int, default=201, help="extra uniform samples in the trajectory")

    p = sub.add_parser("zeros", parents=[common], help="locate zeros of a solution")
    ivp_flags(p)
    p.add_argument("--interval", help="a,b (default: from..to)")

    p = sub.add_parser("disconjugate", parents=[common], help="disconjugacy test with witness")
    p.add_argument("--potential", required=True)
    p.add_argument("--interval", help="a,b (default: the domain)")

    p = sub.add_parser("sct", parents=[common], help="SCT verdict for a pair of potentials")
    p.add_argument("--q1", required=True)
    p.add_argument("--q2", required=True)
    p.add_argument("--interval", help="a,b (default: consecutive zeros of u)")

    p = sub.add_parser("theorem1", parents=[common], help="step-potential counterexample report")
    p.add_argument("--epsilon", required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--lambda", dest="lambda_", metavar="LAMBDA")
    g.add_argument("--find-lambda", action="store_true", help="use the threshold + 1 (default)")

    p = sub.add_parser("track-zero", parents=[common], help="follow a zero as the slope grows")
    p.add_argument("--potential", required=True)
    p.add_argument("--lambda-from", required=True)
    p.add_argument("--lambda-to", required=True)
    p.add_argument("--steps", type=int, default=50)

    sub.add_parser("epsilon0", parents=[common], help="root of sin x = x^2 (bare number unless --format)")

    p = sub.add_parser("construct", parents=[common], help="emit a construction's potential spec")
    p.add_argument("--kind", required=True, choices=("theorem1", "delta", "large-M"))
    p.add_argument("--epsilon")
    p.add_argument("--q1", help="q1 spec for large-M (default: constant 1 on [0, pi])")
    p.add_argument("--J", help="a,b for large-M")

    p = sub.add_parser("property-sweep", parents=[common], help="randomized invariant suites")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--count", type=int, default=50)
    return parser


def to_config(ns: argparse.Namespace) -> RunConfig:
    params = {k.rstrip("_"): v for k, v in vars(ns).items()
              if k not in ("command", "out", "format", "seed", "fatal_findings")}
    params["explicit_format"] = ns.format is not None
    return RunConfig(ns.command, params, ns.out, ns.format or "json", getattr(ns, "seed", 0))


def _validate(cfg: RunConfig):
    p = cfg.parameters
    if p.get("tol") is not None and not p["tol"] > 0:
        raise UsageError(f"--tol must be positive, got {p['tol']}")
    if cfg.command == "track-zero" and p["steps"] < 2:
        raise UsageError(f"--steps must be at least 2, got {p['steps']}")
    if cfg.command == "property-sweep" and p["count"] < 1:
        raise UsageError(f"--count must be positive, got {p['count']}")
    if cfg.command == "solve" and p["samples"] < 0:
        raise UsageError(f"--samples must be non-negative, got {p['samples']}")


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    cfg = to_config(ns)
    try:
        _validate(cfg)
        result = COMMANDS[cfg.command](cfg)
    except (UsageError, PotentialError, PreconditionError, ValueError) as exc:
        print(f"sturmkit {cfg.command}: error: {exc}", file=sys.stderr)
        print(f"usage: {_synopsis(parser, cfg.command)}", file=sys.stderr)
        return EXIT_USAGE
    except NumericError as exc:
        print(f"sturmkit {cfg.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    if cfg.output:
        Path(cfg.output).write_text(result.text, encoding="utf-8")
    else:
        sys.stdout.write(result.text)
    if result.finding and ns.fatal_findings:
        return EXIT_FINDING
    return EXIT_OK


def _synopsis(parser: argparse.ArgumentParser, command: str) -> str:
    for action in parser._subparsers._group_actions:
        if command in action.choices:
            return action.choices[command].format_usage().removeprefix("usage: ").strip()
    return parser.format_usage().strip()


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
