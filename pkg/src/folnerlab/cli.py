"""Command-line front end.

Subcommands: folner, transport, dynamics, homeo, experiment.  Exit codes:
0 ok, 1 usage error, 2 invariant failure, 3 guard violation.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .dynamics import (
    LimitProfile,
    average_invariance_defect,
    averaging_residual,
    default_sample,
    empirical_measure,
    example_case,
    genericity_table,
    limit_measure,
    seever_residual,
    translation_gap,
    verdicts,
)
from .errors import (
    ConfigError,
    GuardViolation,
    InvariantViolation,
    LipschitzViolation,
    MetricOracleError,
    WordParseError,
)
from .experiment import (
    ExperimentConfig,
    ResultRow,
    ResultTable,
    guard_violations,
    run_experiment,
    validate_config,
    write_outputs,
)
from .folner import (
    RateSequence,
    box_folner,
    flip_balance,
    interleave_folner,
    left_defect,
    rate_folner,
    right_defect,
    translate_folner,
)
from .functions import ends_separator, random_affine
from .homeo import (
    HomeoFamily,
    IDENTITY_MAP,
    PLHomeo,
    end_mixture,
    endpoint_fractions,
    interval_distance,
    interval_empirical,
    matching_number,
    repelling_element,
    repelling_family,
)
from .lamplighter import FLIP, INF_HAT, Point, hat, metric, parse_word
from .transport import DiscreteMeasure, dual_lower_bound, wasserstein


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _parse_point(raw: str) -> Point:
    try:
        component, pos = raw.split(":", 1)
        return Point.from_dict({"component": component, "pos": pos if pos == "inf" else int(pos)})
    except (ValueError, KeyError) as exc:
        raise UsageError(f"bad point {raw!r}; expected hat:<int>|check:<int>|hat:inf") from exc


def _load_measure(path: str) -> DiscreteMeasure:
    entries = json.loads(Path(path).read_text())
    pairs = []
    for entry in entries:
        point = entry["point"]
        if isinstance(point, dict):
            point = Point.from_dict(point)
        elif isinstance(point, str):
            point = Fraction(point)
        else:
            point = Fraction(repr(float(point)))
        pairs.append((point, entry["mass"]))
    return DiscreteMeasure.from_pairs(pairs)


def _measure_dist(mu: DiscreteMeasure):
    sample = mu.support()[0]
    return metric if isinstance(sample, Point) else interval_distance


def _emit(payload, args) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_table(table: ResultTable, args) -> None:
    fmt = getattr(args, "fmt", None) or "csv"
    text = table.to_csv() if fmt == "csv" else table.to_json()
    if getattr(args, "out", None):
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _rate_arg(args) -> RateSequence:
    return RateSequence.from_preset(args.preset)


def _number(value: Fraction) -> dict:
    return {"exact": str(value), "float": float(value)}


# ---------------------------------------------------------------- folner

def _cmd_folner(args) -> int:
    rate = _rate_arg(args)
    if args.action == "build":
        if args.kind == "box":
            folner = box_folner(range(args.a_min, args.a_max + 1), materialize=args.materialize)
        else:
            folner = rate_folner(rate, args.n, materialize=args.materialize)
        _emit(folner.to_dict(), args)
        return 0
    if args.action == "defect":
        folner = rate_folner(rate, args.n)
        g = parse_word(args.g)
        value = left_defect(folner, g) if args.side == "left" else right_defect(folner, g)
        _emit({"side": args.side, "word": args.g, "defect": _number(value)}, args)
        return 0
    if args.action == "balance":
        folner = (
            box_folner(range(args.a_min, args.a_max + 1))
            if args.kind == "box"
            else rate_folner(rate, args.n)
        )
        _emit({"position": args.b, "balance": _number(flip_balance(folner, args.b))}, args)
        return 0
    if args.action == "interleave":
        presets = [RateSequence.from_preset(p) for p in args.presets.split(",")]
        families = [
            (lambda r: (lambda j: rate_folner(r, j + 1)))(r) for r in presets
        ]
        schedule = [i % len(families) for i in range(args.count)]
        tests = [[FLIP, parse_word("s")] for _ in range(args.count)]
        chosen = interleave_folner(families, schedule, tests)
        _emit([dict(f.recipe) for f in chosen], args)
        return 0
    if args.action == "translate":
        sets = [rate_folner(rate, n, materialize=True) for n in range(1, args.n + 1)]
        words = args.g.split(",")
        if len(words) == 1:
            words = words * len(sets)
        translated = translate_folner(sets, [parse_word(w) for w in words])
        _emit([dict(f.recipe) | {"size": f.size} for f in translated], args)
        return 0
    raise UsageError(f"unknown folner action {args.action!r}")


# -------------------------------------------------------------- transport

def _cmd_transport(args) -> int:
    mu = _load_measure(args.mu)
    nu = _load_measure(args.nu)
    dist = _measure_dist(mu)
    if args.action == "wasserstein":
        value, plan = wasserstein(mu, nu, dist)
        _emit(
            {
                "value": _number(value),
                "plan": [[i, j, str(q)] for i, j, q in plan.flows],
            },
            args,
        )
        return 0
    if args.action == "assign":
        if len(mu.atoms) != len(nu.atoms) or any(m != mu.atoms[0][1] for _, m in mu.atoms + nu.atoms):
            raise UsageError("assign expects two uniform measures with equal support sizes")
        value, _ = wasserstein(mu, nu, dist)
        _emit({"value": _number(value), "note": "uniform-uniform assignment equals transport"}, args)
        return 0
    if args.action == "dual":
        support = list(dict.fromkeys(mu.support() + nu.support()))
        witnesses = [(lambda p: (lambda z: dist(z, p)))(p) for p in support]
        value = dual_lower_bound(mu, nu, witnesses, dist)
        primal, _ = wasserstein(mu, nu, dist)
        _emit({"lower_bound": _number(value), "primal": _number(primal)}, args)
        return 0
    raise UsageError(f"unknown transport action {args.action!r}")


# --------------------------------------------------------------- dynamics

def _cmd_dynamics(args) -> int:
    import random

    rate = _rate_arg(args)
    profile = LimitProfile(rate)
    rng = random.Random(args.seed)
    table = ResultTable()
    sample = default_sample(8)
    if args.action == "generic":
        sets = [rate_folner(rate, n) for n in range(1, args.nmax + 1)]
        rows, violations = genericity_table(sets, _parse_point(args.x), profile)
        table.failures.extend(violations)
        for row in rows:
            table.rows.append(
                ResultRow("generic", row.n, args.x, "w-to-limit", float(row.distance), "closed-form")
            )
    elif args.action == "rightavg":
        f = ends_separator()
        for n in range(1, args.nmax + 1):
            mu = empirical_measure(box_folner(range(-n, n + 1)), _parse_point(args.x))
            table.rows.append(
                ResultRow("rightavg", n, args.x, "average", float(mu.integrate(f)), "closed-form")
            )
    elif args.action == "seever":
        worst = Fraction(0)
        for _ in range(args.pairs):
            worst = max(
                worst, seever_residual(profile, random_affine(rng), random_affine(rng), sample)
            )
        table.rows.append(
            ResultRow("seever", None, "random-pairs", "residual", float(worst), "closed-form")
        )
        if worst > Fraction(1, 10**12):
            table.failures.append("seever: residual exceeded tolerance")
    elif args.action == "averaging":
        for _ in range(args.pairs):
            averaging_residual(profile, random_affine(rng), random_affine(rng), hat(rng.randint(-8, 8)))
        value = averaging_residual(profile, ends_separator(), ends_separator(), hat(0))
        table.rows.append(
            ResultRow("averaging", None, "hat:0", "residual", float(value), "closed-form")
        )
    elif args.action == "tinv":
        gap = translation_gap(profile, ends_separator(), parse_word(args.g), sample)
        table.rows.append(
            ResultRow("tinv", None, args.g, "translation-gap", float(gap), "closed-form")
        )
    elif args.action == "met":
        f = ends_separator()
        for n in range(1, args.nmax + 1):
            value = average_invariance_defect(
                rate_folner(rate, n), parse_word(args.g), f, sample
            )
            table.rows.append(
                ResultRow("met", n, args.g, "average-invariance-defect", float(value), "brute-force-oracle")
            )
    elif args.action == "thm-example":
        bundle = example_case(args.case)
        continuous, pattern = verdicts(bundle.profile, 16)
        table.rows.append(
            ResultRow(f"thm-example-{args.case}", None, "verdict", "continuous", float(continuous), "closed-form")
        )
        table.rows.append(
            ResultRow(
                f"thm-example-{args.case}",
                None,
                "verdict",
                "ergodic-everywhere",
                float(pattern == "all"),
                "closed-form",
            )
        )
        for b in range(-8, 9):
            mu = limit_measure(bundle.profile, hat(b))
            value, _ = wasserstein(mu, DiscreteMeasure.point_mass(INF_HAT), metric)
            table.rows.append(
                ResultRow(f"thm-example-{args.case}", None, f"hat:{b}", "w-to-hat-end", float(value), "closed-form")
            )
    else:
        raise UsageError(f"unknown dynamics action {args.action!r}")
    _emit_table(table, args)
    return table.exit_code()


# ------------------------------------------------------------------ homeo

def _load_family(path: str | None, n: int | None = None) -> HomeoFamily:
    if path is None:
        return HomeoFamily((IDENTITY_MAP,), "identity", n)
    raw = json.loads(Path(path).read_text())
    return HomeoFamily(tuple(PLHomeo.from_dict(entry) for entry in raw), path, n)


def _cmd_homeo(args) -> int:
    if args.action == "match":
        left = _load_family(args.base)
        right = _load_family(args.other or args.base)
        value = matching_number(left, right, Fraction(repr(args.radius)))
        _emit({"matching": value, "left": len(left.members), "right": len(right.members)}, args)
        return 0
    if args.action == "repel":
        g = repelling_element(Fraction(repr(args.x)), Fraction(repr(args.eps)))
        _emit(g.to_dict(), args)
        return 0
    if args.action == "hatfn":
        family = repelling_family(_load_family(args.base), args.n)
        _emit([g.to_dict() for g in family.members], args)
        return 0
    if args.action == "empirical":
        family = repelling_family(_load_family(args.base), args.n)
        y = Fraction(repr(args.y))
        mu = interval_empirical(family, y)
        low, high = endpoint_fractions(family, y)
        value, _ = wasserstein(mu, end_mixture(y), interval_distance)
        _emit(
            {
                "measure": [{"point": float(p), "mass": float(m)} for p, m in mu.atoms],
                "low_fraction": _number(low),
                "high_fraction": _number(high),
                "w_to_end_mixture": _number(value),
            },
            args,
        )
        return 0
    raise UsageError(f"unknown homeo action {args.action!r}")


# ------------------------------------------------------------- experiment

def _cmd_experiment(args) -> int:
    if args.config:
        config = validate_config(Path(args.config).read_text())
    else:
        config = ExperimentConfig((), seed=args.seed or 0, fmt=args.fmt or "csv", out=args.out)
    overrides = {}
    if args.out:
        overrides["out"] = args.out
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.fmt:
        overrides["fmt"] = args.fmt
    if overrides:
        config = ExperimentConfig(
            config.scenarios,
            seed=overrides.get("seed", config.seed),
            fmt=overrides.get("fmt", config.fmt),
            out=overrides.get("out", config.out),
        )
    table = run_experiment(config)
    write_outputs(table, config)
    if config.out is None:
        sys.stdout.write(table.to_csv() if config.fmt == "csv" else table.to_json())
    return table.exit_code()


def build_parser() -> _Parser:
    parser = _Parser(prog="folnerlab", description=__doc__)
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default=None, help="output path (directory for experiment)")
    common.add_argument("--seed", type=int, default=None, help="seed for randomized suites")
    common.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    folner = sub.add_parser("folner", parents=[common])
    folner.add_argument("action", choices=("build", "defect", "balance", "interleave", "translate"))
    folner.add_argument("--preset", default="r-const:0.5")
    folner.add_argument("--presets", default="r-zero,r-const:0.5", help="comma list (interleave)")
    folner.add_argument("--n", type=int, default=1)
    folner.add_argument("--kind", choices=("rate", "box"), default="rate")
    folner.add_argument("--a-min", type=int, default=-2)
    folner.add_argument("--a-max", type=int, default=2)
    folner.add_argument("--b", type=int, default=0)
    folner.add_argument("--g", default="s")
    folner.add_argument("--side", choices=("left", "right"), default="left")
    folner.add_argument("--count", type=int, default=3)
    folner.add_argument("--materialize", action="store_true")
    folner.set_defaults(func=_cmd_folner)

    transport = sub.add_parser("transport", parents=[common])
    transport.add_argument("action", choices=("wasserstein", "assign", "dual"))
    transport.add_argument("--mu", required=True)
    transport.add_argument("--nu", required=True)
    transport.set_defaults(func=_cmd_transport)

    dynamics = sub.add_parser("dynamics", parents=[common])
    dynamics.add_argument(
        "action",
        choices=("generic", "rightavg", "seever", "averaging", "tinv", "met", "thm-example"),
    )
    dynamics.add_argument("--case", choices=("a", "b", "c", "d"), default="d")
    dynamics.add_argument("--preset", default="r-const:0.5")
    dynamics.add_argument("--nmax", type=int, default=3)
    dynamics.add_argument("--pairs", type=int, default=20)
    dynamics.add_argument("--x", default="hat:0")
    dynamics.add_argument("--g", default="f")
    dynamics.set_defaults(func=_cmd_dynamics)

    homeo = sub.add_parser("homeo", parents=[common])
    homeo.add_argument("action", choices=("match", "repel", "hatfn", "empirical"))
    homeo.add_argument("--n", type=int, default=8)
    homeo.add_argument("--y", type=float, default=0.5)
    homeo.add_argument("--x", type=float, default=0.5)
    homeo.add_argument("--eps", type=float, default=0.125)
    homeo.add_argument("--radius", type=float, default=0.25)
    homeo.add_argument("--base", default=None, help="JSON file with a list of PL maps")
    homeo.add_argument("--other", default=None)
    homeo.set_defaults(func=_cmd_homeo)

    experiment = sub.add_parser("experiment", parents=[common])
    experiment.add_argument("--config", default=None)
    experiment.set_defaults(func=_cmd_experiment)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except ConfigError as exc:
        for violation in exc.violations:
            print(f"config error: {violation}", file=sys.stderr)
        return 3 if guard_violations(exc) else 1
    except (WordParseError, LipschitzViolation, MetricOracleError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except InvariantViolation as exc:
        print(f"invariant failure: {exc}", file=sys.stderr)
        return 2
    except GuardViolation as exc:
        print(f"guard violation: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
