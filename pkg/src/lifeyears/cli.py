"""Command-line entry points.

Reports are byte-stable for identical inputs and seed: mappings are
emitted with sorted keys and floats are printed with nine significant
digits.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import elicitation as el
from . import io as lio
from .axioms import CheckConfig, conformance_report
from .evaluators import (
    AffinePaly,
    EvaluatorSpec,
    GenPaly,
    LinearPaly,
    PowerPqaly,
    Pqaly,
    Qaly,
    QalyPaly,
    QalyPqaly,
    QualityWeightTable,
    ProductivityValueCurve,
    TIME_LINEAR_FAMILIES,
    check_spec_registry,
    compare,
    evaluate,
    hpye_of_profile,
    per_profile_contributions,
)
from .model import Distribution, HealthRegistry, ensure_valid
from .thresholds import (
    ParametricFamily,
    difference_svg,
    find_thresholds,
    hybrid_table,
    render_table,
    single_attribute_table,
)


def _fmt(x: float) -> str:
    return f"{x:.9g}"


def _round_floats(obj):
    if isinstance(obj, float):
        return float(_fmt(obj))
    if isinstance(obj, dict):
        return {k: _round_floats(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v) for v in obj]
    return obj


def _emit_json(payload: dict) -> None:
    print(json.dumps(_round_floats(payload), sort_keys=True, indent=2))


class CliError(Exception):
    pass


def _load_registry(args) -> HealthRegistry | None:
    if getattr(args, "registry", None):
        return lio.read_registry_csv(args.registry)
    return None


def _load_and_validate(path: str, spec: EvaluatorSpec, registry: HealthRegistry | None) -> Distribution:
    dist = lio.read_distribution(path)
    if registry is not None:
        ensure_valid(dist, registry)
        check_spec_registry(spec, registry)
    return dist


def _cmd_evaluate(args) -> int:
    spec = lio.read_spec(args.spec)
    registry = _load_registry(args)
    dist = _load_and_validate(args.dist, spec, registry)
    total = evaluate(spec, dist)
    contributions = per_profile_contributions(spec, dist)
    equivalents = None
    if spec.family in TIME_LINEAR_FAMILIES:
        equivalents = [hpye_of_profile(spec, prof) for prof in dist]
    if args.format == "json":
        payload = {
            "family": spec.family,
            "total": total,
            "contributions": contributions,
        }
        if equivalents is not None:
            payload["healthy_productive_years"] = equivalents
        _emit_json(payload)
    else:
        print(f"family: {spec.family}")
        print(f"total: {_fmt(total)}")
        header = "person  contribution" + ("  equivalent_years" if equivalents else "")
        print(header)
        for i, c in enumerate(contributions):
            line = f"{i:6d}  {_fmt(c):>12}"
            if equivalents is not None:
                line += f"  {_fmt(equivalents[i]):>16}"
            print(line)
    return 0


def _cmd_compare(args) -> int:
    spec = lio.read_spec(args.spec)
    registry = _load_registry(args)
    d_first = _load_and_validate(args.a, spec, registry)
    d_second = _load_and_validate(args.b, spec, registry)
    verdict = compare(spec, d_first, d_second, args.tol)
    e1, e2 = evaluate(spec, d_first), evaluate(spec, d_second)
    if args.format == "json":
        _emit_json({"first": e1, "second": e2, "result": verdict, "tolerance": args.tol})
    else:
        print(f"first:  {_fmt(e1)}")
        print(f"second: {_fmt(e2)}")
        print(f"result: {verdict}")
    return 0


def _cmd_axioms(args) -> int:
    spec = lio.read_spec(args.spec)
    registry = _load_registry(args)
    if registry is None:
        registry = lio.infer_registry(spec)
    if registry is None:
        from .axioms import default_check_registry

        registry = default_check_registry()
    check_spec_registry(spec, registry)
    cfg = CheckConfig(
        trials=args.trials,
        tolerance=args.tol,
        seed=args.seed,
        max_individuals=args.max_individuals,
        max_lifetime=args.max_lifetime,
        registry=registry,
    )
    report = conformance_report(spec, cfg)
    if args.format == "json":
        _emit_json(report.to_json_dict())
    else:
        print(report.to_text())
    return 2 if report.defects else 0


_NEUTRAL_WEIGHT = 0.5


def _default_table(registry: HealthRegistry) -> QualityWeightTable:
    weights = {s: _NEUTRAL_WEIGHT for s in registry.states}
    weights[registry.full_health] = 1.0
    return QualityWeightTable(weights)


def _default_spec(family: str, registry: HealthRegistry | None) -> EvaluatorSpec:
    table_needed = family in ("qaly", "pqaly", "qaly_pqaly", "qaly_paly", "power_pqaly")
    if table_needed and registry is None:
        raise CliError(f"family {family} needs --registry (or --spec with explicit tables)")
    if family == "linear_paly":
        return LinearPaly()
    if family == "affine_paly":
        return AffinePaly(0.5)
    if family == "gen_paly":
        return GenPaly(ProductivityValueCurve.from_pairs([(0.0, 0.0), (1.0, 1.0)]))
    table = _default_table(registry) if table_needed else None
    if family == "qaly":
        return Qaly(table)
    if family == "pqaly":
        return Pqaly(table)
    if family == "qaly_pqaly":
        return QalyPqaly(0.5, table, _default_table(registry))
    if family == "qaly_paly":
        return QalyPaly(0.5, table)
    if family == "power_pqaly":
        return PowerPqaly(0.5, table)
    raise CliError(f"no default parameterisation for family {family}; pass --spec")


def _cmd_thresholds(args) -> int:
    registry = _load_registry(args)
    if args.spec:
        base = lio.read_spec(args.spec)
    else:
        base = _default_spec(args.family, registry)
    lo_hi = args.range.split(",")
    if len(lo_hi) != 2:
        raise CliError("--range must be lo,hi")
    lo, hi = float(lo_hi[0]), float(lo_hi[1])
    fam = ParametricFamily(base, args.param, lo, hi)
    d_first = _load_and_validate(args.a, base, registry)
    d_second = _load_and_validate(args.b, base, registry)
    report = find_thresholds(fam, d_first, d_second, grid_n=args.grid, tol=args.tol)
    if args.svg:
        Path(args.svg).write_text(
            difference_svg(fam, d_first, d_second), encoding="utf-8"
        )
    if args.format == "json":
        _emit_json(report.to_json_dict())
    else:
        if report.degenerate:
            print("identically indifferent across the whole range")
        elif not report.crossings:
            side = "first" if report.signs[0] > 0 else "second"
            print(f"no reversal: the {side} distribution is preferred on the whole range")
        else:
            print("crossings: " + ", ".join(_fmt(c) for c in report.crossings))
            for lo_iv, hi_iv in report.prefer_first_on():
                print(f"first preferred on [{_fmt(lo_iv)}, {_fmt(hi_iv)}]")
    return 0


def _cmd_tables(args) -> int:
    curve = ProductivityValueCurve.from_pairs([(0.0, args.v0), (0.5, args.v05), (1.0, 1.0)])
    focal = single_attribute_table(args.qa, args.alpha, curve)
    hybrid = hybrid_table(args.qa, args.ra, args.delta, args.sigma)
    if args.format == "json":
        payload = {
            "single_attribute": [
                {"evaluator": r.label, "first": r.first, "second": r.second, "ranking": r.preference}
                for r in focal
            ],
            "hybrid": [
                {"evaluator": r.label, "first": r.first, "second": r.second, "ranking": r.preference}
                for r in hybrid
            ],
        }
        _emit_json(payload)
    else:
        print(render_table(focal))
        print()
        print(render_table(hybrid))
    return 0


def _cmd_elicit_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(snapshot_path=args.snapshot, cors_origin=args.cors)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def _cmd_elicit_simulate(args) -> int:
    truth = lio.read_spec(args.truth)
    if truth.family != "qaly_paly":
        raise CliError(f"--truth must be a qaly_paly spec, got {truth.family}")
    if args.k < 1:
        raise CliError("need at least one session (-k)")
    state = args.state
    if state is None:
        non_full = [s for s, w in sorted(truth.q.weights.items()) if w != 1.0]
        state = non_full[0] if non_full else sorted(truth.q.weights)[0]
    if state not in truth.q.weights:
        raise CliError(f"state {state!r} is not in the truth quality table")

    estimates = []
    sessions = []
    for _ in range(args.k):
        if args.kind == "quality":
            session = el.start_quality_session(state, tolerance=args.tol)
        else:
            session = el.start_sigma_session(truth.q.weights[state], tolerance=args.tol, state=state)
        done = el.run_simulated_session(truth, session)
        est = el.estimate(done)
        estimates.append(est.value)
        sessions.append((done.questions_asked, est.value))
    summary = el.aggregate(estimates)
    parameter = "quality_weight" if args.kind == "quality" else "mixing_weight"
    if args.format == "json":
        _emit_json(
            {
                "kind": args.kind,
                "parameter": parameter,
                "state": state,
                "sessions": [
                    {"questions": q, "estimate": v} for q, v in sessions
                ],
                "aggregate": {"n": summary.n, "median": summary.median, "iqr": summary.iqr},
            }
        )
    else:
        print(f"kind: {args.kind} ({parameter} for state {state})")
        print("session  questions  estimate")
        for i, (q, v) in enumerate(sessions):
            print(f"{i:7d}  {q:9d}  {_fmt(v)}")
        print(f"aggregate: median {_fmt(summary.median)}, iqr {_fmt(summary.iqr)} over {summary.n} sessions")
    return 0


def _add_format(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=["text", "json"], default="text")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lifeyears",
        description="Score population health and productivity scenarios, check evaluator axioms, find ranking thresholds, and run trade-off elicitation sessions.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evaluate", help="score one distribution under an evaluator spec")
    p.add_argument("--dist", required=True, help="distribution CSV or JSON file")
    p.add_argument("--spec", required=True, help="evaluator spec JSON file")
    p.add_argument("--registry", help="registry CSV for validation")
    _add_format(p)
    p.set_defaults(fn=_cmd_evaluate)

    p = sub.add_parser("compare", help="rank two distributions under one evaluator")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--spec", required=True)
    p.add_argument("--registry")
    p.add_argument("--tol", type=float, default=1e-9)
    _add_format(p)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("axioms", help="run the axiom conformance suite for a spec")
    p.add_argument("--spec", required=True)
    p.add_argument("--registry")
    p.add_argument("--trials", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-individuals", type=int, default=6)
    p.add_argument("--max-lifetime", type=float, default=80.0)
    _add_format(p)
    p.set_defaults(fn=_cmd_axioms)

    p = sub.add_parser("thresholds", help="find preference reversals along one parameter")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--param", help="alpha|delta|sigma|gamma or q:<state>/r:<state>")
    p.add_argument("--range", required=True, help="lo,hi")
    p.add_argument("--spec", help="base spec JSON (defaults per family)")
    p.add_argument("--registry")
    p.add_argument("--grid", type=int, default=1024)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--svg", help="also write a difference-vs-parameter SVG here")
    _add_format(p)
    p.set_defaults(fn=_cmd_thresholds)

    p = sub.add_parser("tables", help="worked fixture comparison tables")
    p.add_argument("--qa", type=float, default=0.5, help="impaired-state quality weight")
    p.add_argument("--ra", type=float, default=0.5, help="impaired-state weight in the mixed family")
    p.add_argument("--alpha", type=float, default=0.5)
    p.add_argument("--delta", type=float, default=0.5)
    p.add_argument("--sigma", type=float, default=0.5)
    p.add_argument("--v0", type=float, default=0.0, help="curve value at zero productivity")
    p.add_argument("--v05", type=float, default=0.5, help="curve value at half productivity")
    _add_format(p)
    p.set_defaults(fn=_cmd_tables)

    p = sub.add_parser("elicit", help="trade-off elicitation sessions")
    elicit_sub = p.add_subparsers(dest="elicit_command", required=True)

    ps = elicit_sub.add_parser("serve", help="run the HTTP session service")
    ps.add_argument("--port", type=int, default=8710)
    ps.add_argument("--host", default="127.0.0.1")
    ps.add_argument("--snapshot", help="JSON snapshot file updated on every mutation")
    ps.add_argument("--cors", help="allowed browser origin (or *)")
    ps.set_defaults(fn=_cmd_elicit_serve)

    pm = elicit_sub.add_parser("simulate", help="run scripted sessions against a truth spec")
    pm.add_argument("--truth", required=True, help="qaly_paly spec JSON acting as the respondent")
    pm.add_argument("-k", type=int, default=20, help="number of sessions")
    pm.add_argument("--kind", choices=["quality", "sigma"], default="quality")
    pm.add_argument("--state", help="probe health state (default: first non-full-health)")
    pm.add_argument("--tol", type=float, default=1e-3)
    _add_format(pm)
    pm.set_defaults(fn=_cmd_elicit_simulate)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (CliError, lio.FileFormatError, ValueError, LookupError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
