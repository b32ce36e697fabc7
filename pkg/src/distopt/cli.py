"""Command-line interface.

Subcommands:

* ``optimize`` — run the full pipeline on an instance file and write a
  run report (JSON), optionally with CSV curves of the build sweep and
  the threshold landscape.
* ``analyze`` — threshold report and verdict for one designated candidate
  against the instance's crossing distribution.
* ``carveout`` — attempt a compensating carve for the instance's
  disagreement extension.
* ``gen`` — deterministically generate instance files from named profiles.
* ``oracle-check`` — run the independent sampled and finite-difference
  verifications and report mismatches.

Exit codes: 0 success, 1 schema/usage error, 2 degenerate instance (the
report is still written) or an unmet generation target.  All randomness
comes from explicit ``--seed`` values; identical inputs and seeds produce
byte-identical outputs.  Set ``DISTOPT_LOG`` to a level name for
diagnostics on stderr.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any

import jsonschema

from . import oracle
from .core import Distribution, PointIncrement, ProducerTransform, q_of, expected_t
from .instances import SCHEMA_VERSION, build_objects
from .optimizer import (
    CarveoutInfeasibleError,
    CarveoutResult,
    OptimizationResult,
    OptimizerConfig,
    continue_to_d2_star,
    determine_d_star,
    generate_carveout,
)
from .participation import ParticipationModel, actual, potential
from .sequence import greedy_sweep
from .thresholds import (
    CONTINUE_TO_D2_STAR_THM4,
    SATURATED_CONSUMER,
    UNDER_SERVED,
    EquilibriumVerdict,
    ThresholdReport,
    ExtensionContext,
    threshold_report,
)

log = logging.getLogger("distopt.cli")

_NUMBER = {"type": "number"}

_POINT_SCHEMA = {
    "type": "object",
    "properties": {
        "id": {"type": ["string", "integer"]},
        "c": _NUMBER,
        "p": _NUMBER,
        "n": {"type": "number", "exclusiveMinimum": 0},
    },
    "required": ["id", "c", "p", "n"],
    "additionalProperties": False,
}

_PARTICIPATION_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["power", "saturating", "table"]},
        "zeta": {"type": "number", "exclusiveMinimum": 0},
        "alpha": {"type": "number", "exclusiveMinimum": 0, "maximum": 1},
        "cap": {"type": "number", "exclusiveMinimum": 0},
        "knots": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "items": _NUMBER,
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_TRANSFORM_SCHEMA = {
    "type": "object",
    "properties": {
        "kind": {"enum": ["identity", "affine", "table"]},
        "a": _NUMBER,
        "b": _NUMBER,
        "table": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "array",
                "items": _NUMBER,
                "minItems": 2,
                "maxItems": 2,
            },
        },
    },
    "required": ["kind"],
    "additionalProperties": False,
}

_OPTIMIZER_SCHEMA = {
    "type": "object",
    "properties": {
        "ratio_threshold": {"type": "number", "minimum": 1},
        "lookahead_steps": {"type": "integer", "minimum": 0},
        "consumer_mode": {"enum": ["adaptive", "reactive"]},
        "iota": {"type": "number", "minimum": 0},
        "seed_policy": {
            "oneOf": [
                {"const": "highest_value"},
                {
                    "type": "object",
                    "properties": {
                        "ids": {
                            "type": "array",
                            "minItems": 1,
                            "items": {"type": ["string", "integer"]},
                        }
                    },
                    "required": ["ids"],
                    "additionalProperties": False,
                },
            ]
        },
        "increment_policy": {
            "oneOf": [
                {"const": "full_point"},
                {
                    "type": "object",
                    "properties": {
                        "kind": {"const": "unit_chunks"},
                        "chunk": {"type": "number", "exclusiveMinimum": 0},
                    },
                    "required": ["kind", "chunk"],
                    "additionalProperties": False,
                },
            ]
        },
    },
    "additionalProperties": False,
}

INSTANCE_SCHEMA = {
    "type": "object",
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "points": {"type": "array", "minItems": 1, "items": _POINT_SCHEMA},
        "participation": _PARTICIPATION_SCHEMA,
        "transform": _TRANSFORM_SCHEMA,
        "optimizer": _OPTIMIZER_SCHEMA,
    },
    "required": ["points", "participation"],
    "additionalProperties": False,
}


class CliError(Exception):
    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


def canonical_json(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False) + "\n"


def _clean_float(x: Any) -> Any:
    if isinstance(x, float) and (x != x or x in (float("inf"), float("-inf"))):
        return repr(x)
    return x


def load_instance(path: str) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    try:
        instance = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise CliError(f"{path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(instance, INSTANCE_SCHEMA)
    except jsonschema.ValidationError as exc:
        raise CliError(f"{path} failed schema validation: {exc.message}") from exc
    ids = [str(p["id"]) for p in instance["points"]]
    if len(set(ids)) != len(ids):
        raise CliError(f"{path} has duplicate point ids")
    return instance


def fingerprint(instance: dict) -> str:
    return hashlib.sha256(canonical_json(instance).encode()).hexdigest()


# ---------------------------------------------------------------------------
# report assembly
# ---------------------------------------------------------------------------


def _dist_summary(
    d: Distribution, model: ParticipationModel, t: ProducerTransform
) -> dict:
    m = potential(model, d)
    return {
        "points": [
            {"id": pt.id, "c": pt.c, "p": pt.p, "weight": w}
            for pt, w in sorted(d.items(), key=lambda e: e[0].id)
        ],
        "n": d.n,
        "q": q_of(d) if not d.is_empty() else None,
        "e_t": expected_t(d, t) if not d.is_empty() else None,
        "m": m,
        "w": min(m, d.n),
    }


def _verdict_dict(v: EquilibriumVerdict) -> dict:
    return {
        "kind": v.kind,
        "is_nash": v.is_nash,
        "is_pareto": v.is_pareto,
        "carveout_recommended": v.carveout_recommended,
        "indeterminate": v.indeterminate,
        "notes": list(v.notes),
    }


def _threshold_dict(report: ThresholdReport | None) -> dict | None:
    if report is None:
        return None
    return {k: _clean_float(v) for k, v in report.to_dict().items()}


def _carveout_dict(
    c: CarveoutResult, model: ParticipationModel, t: ProducerTransform
) -> dict:
    return {
        "y": _dist_summary(c.y, model, t),
        "d_plus": _dist_summary(c.d_plus, model, t),
        "r2": _dist_summary(c.r2, model, t),
        "n_y": c.n_y,
        "consumer_gain": c.consumer_gain,
        "producer_slack": c.producer_slack,
        "landing_gap": c.landing_gap,
        "iterations": c.iterations,
        "trigger_kind": c.trigger_kind,
    }


def run_report(
    instance: dict,
    result: OptimizationResult,
    model: ParticipationModel,
    t: ProducerTransform,
) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "instance": {
            "fingerprint": fingerprint(instance),
            "point_count": len(instance["points"]),
        },
        "d_star": _dist_summary(result.d_star, model, t),
        "n_star": result.n_star,
        "crossing_gap": result.crossing_gap,
        "trace": [
            {
                "j": s.index,
                "id": s.added.point.id,
                "weight": s.added.weight,
                "n": s.n_after,
                "q": s.q_after,
                "m": s.m_after,
                "w": s.w_after,
                "step_delta_v": s.step_delta_v,
            }
            for s in result.trace.steps
        ],
        "verdict": _verdict_dict(result.verdict),
        "thresholds": _threshold_dict(result.verdict.witness),
        "events": [_verdict_dict(e) for e in result.events],
        "carveout": (
            _carveout_dict(result.carveout, model, t)
            if result.carveout is not None
            else None
        ),
        "carveouts": [_carveout_dict(c, model, t) for c in result.carveouts],
        "d2_star": (
            _dist_summary(result.d2_star, model, t)
            if result.d2_star is not None
            else None
        ),
        "d2_deltas": (
            {
                "delta_v": result.d2_delta_v,
                "delta_s": result.d2_delta_s,
                "crossing_gap": result.d2_crossing_gap,
            }
            if result.d2_star is not None
            else None
        ),
        "budget_exhausted": result.budget_exhausted,
        "timing": {"steps": result.steps, "evaluations": result.evaluations},
    }


# ---------------------------------------------------------------------------
# CSV curves
# ---------------------------------------------------------------------------


def sweep_csv(
    instance: dict,
    result: OptimizationResult,
    model: ParticipationModel,
    t: ProducerTransform,
) -> str:
    """The raw greedy build curve (volume vs potential participation).

    Runs the plain sweep to pool exhaustion so the supply/demand crossing
    is visible as the sign change of m − n; the row whose prefix equals
    the crossing distribution is marked.
    """
    pool, _, _, cfg = build_objects(instance)
    trace = greedy_sweep(pool, cfg.sequence, model, t)
    target = {pid: result.d_star.weight_of(pid) for pid in result.d_star.ids()}
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(["j", "id", "weight", "n", "q", "m", "w", "is_d_star"])
    running: dict[str, float] = {}
    for s in trace.steps:
        running[s.added.point.id] = (
            running.get(s.added.point.id, 0.0) + s.added.weight
        )
        matches = set(running) == set(target) and all(
            abs(running[k] - target[k]) <= 1e-12 * max(1.0, abs(target[k]))
            for k in target
        )
        writer.writerow(
            [
                s.index,
                s.added.point.id,
                repr(s.added.weight),
                repr(s.n_after),
                repr(s.q_after),
                repr(s.m_after),
                repr(s.w_after),
                int(matches),
            ]
        )
    return out.getvalue()


def threshold_csv(
    report: ThresholdReport,
    d_star_n: float,
    d_star_q: float,
    model: ParticipationModel,
) -> str:
    """Threshold landscape versus candidate weight.

    Sweeps the candidate's weight share while holding its value ratios
    fixed, recomputing the marginal-participation slopes from the
    participation curve directly.
    """
    n_star = d_star_n
    q_star = d_star_q
    m_star = report.m_star_ratio * n_star
    c2_raw = report.c2_ratio * q_star
    n_r1 = report.n_r1
    c1a = report.c1a_ratio
    tp1 = report.tp1_ratio
    tp2 = report.tp2_ratio
    w1 = n_r1 * n_star
    denom_a = n_star - w1 + c1a * w1
    q_a = q_star * n_star / denom_a if denom_a > 0 else q_star
    n_a = n_star - w1
    m_a = model.m(q_a) if n_a > 0 else m_star

    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(
        ["n_r2", "x_l_kappa", "x_u_kappa", "x_u_kappa_alt", "kappa_r2", "kappa_ar2"]
    )
    steps = 50
    for i in range(1, steps + 1):
        n2 = 0.02 * i
        w2 = n2 * n_star
        if report.consumer_mode == "reactive":
            x_l = 1.0 - tp2 * (1.0 + n2)
        else:
            d = 1.0 + tp2 * n2
            x_l = (1.0 - tp2) / d if abs(d) > 1e-12 else float("inf")
        du = 1.0 - n_r1 + tp2 * n2
        if abs(du) > 1e-12:
            x_u = (1.0 - tp2) / du
            x_u_alt = (
                (1.0 - n_r1 + n2) * (tp1 - 1.0) * n_r1 / n2 + (1.0 - tp2)
            ) / du
        else:
            x_u = x_u_alt = float("inf")
        q_mix = (q_star * n_star + c2_raw * w2) / (n_star + w2)
        k_r2 = (model.m(q_mix) - m_star) / w2
        if n_a > 0:
            q_mix_a = (q_a * n_a + c2_raw * w2) / (n_a + w2)
            k_ar2 = (model.m(q_mix_a) - m_a) / w2
        else:
            k_ar2 = k_r2
        writer.writerow(
            [repr(n2), repr(x_l), repr(x_u), repr(x_u_alt), repr(k_r2), repr(k_ar2)]
        )
    return out.getvalue()


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _csv_paths(output: str | None) -> tuple[str, str]:
    if output is None:
        raise CliError("--format csv requires --output")
    stem = output[: -len(".json")] if output.endswith(".json") else output
    return f"{stem}.trace.csv", f"{stem}.thresholds.csv"


def _run_pipeline(
    instance: dict,
) -> tuple[OptimizationResult, ParticipationModel, ProducerTransform, OptimizerConfig, Distribution]:
    pool, model, transform, cfg = build_objects(instance)
    result = determine_d_star(pool, cfg, model, transform)
    if result.verdict.kind == CONTINUE_TO_D2_STAR_THM4:
        result = continue_to_d2_star(result, pool, cfg, model, transform)
    return result, model, transform, cfg, pool


def _optimize_one(instance: dict, output: str | None, fmt: str) -> int:
    if fmt == "csv":
        _csv_paths(output)  # reject --format csv without --output up front
    result, model, transform, _, _ = _run_pipeline(instance)
    report = run_report(instance, result, model, transform)
    _write(output, canonical_json(report))
    if fmt == "csv":
        trace_path, thresh_path = _csv_paths(output)
        Path(trace_path).write_text(sweep_csv(instance, result, model, transform))
        if result.verdict.witness is not None:
            Path(thresh_path).write_text(
                threshold_csv(
                    result.verdict.witness,
                    result.n_star,
                    q_of(result.d_star),
                    model,
                )
            )
    if result.verdict.kind in (UNDER_SERVED, SATURATED_CONSUMER):
        return 2
    return 0


def cmd_optimize(args: argparse.Namespace) -> int:
    if args.batch:
        in_dir = Path(args.batch)
        if not in_dir.is_dir():
            raise CliError(f"{args.batch} is not a directory")
        out_dir = Path(args.output) if args.output else in_dir
        out_dir.mkdir(parents=True, exist_ok=True)
        worst = 0
        for path in sorted(in_dir.glob("*.json")):
            if path.name.endswith(".report.json"):
                continue
            instance = load_instance(str(path))
            out = out_dir / f"{path.stem}.report.json"
            code = _optimize_one(instance, str(out), args.format)
            log.info("%s -> %s (exit %d)", path.name, out.name, code)
            worst = max(worst, code)
        return worst
    if not args.input:
        raise CliError("optimize needs --input or --batch")
    instance = load_instance(args.input)
    return _optimize_one(instance, args.output, args.format)


def cmd_analyze(args: argparse.Namespace) -> int:
    instance = load_instance(args.input)
    result, model, transform, cfg, pool = _run_pipeline(instance)
    cand_id = str(args.candidate)
    if cand_id not in pool:
        raise CliError(f"candidate {cand_id!r} is not in the instance pool")
    if cand_id in result.d_star:
        raise CliError(
            f"candidate {cand_id!r} is already inside the crossing distribution"
        )
    r1 = result.trace.steps[-1].added if result.trace.steps else None
    candidate = PointIncrement(pool.point_of(cand_id), pool.weight_of(cand_id))
    ctx = ExtensionContext.from_run(
        result.d_star,
        r1,
        candidate,
        model,
        transform,
        iota=cfg.iota,
        consumer_mode=cfg.consumer_mode,
    )
    from .thresholds import classify

    verdict = classify(ctx)
    report = {
        "schema_version": SCHEMA_VERSION,
        "instance": {"fingerprint": fingerprint(instance)},
        "candidate": cand_id,
        "d_star": _dist_summary(result.d_star, model, transform),
        "thresholds": _threshold_dict(verdict.witness),
        "verdict": _verdict_dict(verdict),
    }
    _write(args.output, canonical_json(report))
    if args.format == "csv" and verdict.witness is not None:
        _, thresh_path = _csv_paths(args.output)
        Path(thresh_path).write_text(
            threshold_csv(
                verdict.witness, result.n_star, q_of(result.d_star), model
            )
        )
    return 0


def cmd_carveout(args: argparse.Namespace) -> int:
    instance = load_instance(args.input)
    result, model, transform, cfg, pool = _run_pipeline(instance)
    report: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "instance": {"fingerprint": fingerprint(instance)},
        "applicable": False,
        "feasible": False,
        "carveout": None,
        "reason": None,
    }
    if result.carveouts:
        report["applicable"] = True
        report["feasible"] = True
        report["carveout"] = _carveout_dict(result.carveouts[-1], model, transform)
    elif result.verdict.carveout_recommended:
        report["applicable"] = True
        remaining = Distribution(
            [
                (pt, w - result.d_star.weight_of(pt.id))
                for pt, w in pool.items()
                if w - result.d_star.weight_of(pt.id) > 1e-12
            ]
        )
        try:
            carve = generate_carveout(
                result.d_star, remaining, cfg, model, transform
            )
            report["feasible"] = True
            report["carveout"] = _carveout_dict(carve, model, transform)
        except (CarveoutInfeasibleError, ValueError) as exc:
            report["reason"] = str(exc)
    else:
        report["reason"] = "no disagreement extension at the crossing"
    _write(args.output, canonical_json(report))
    return 0


def cmd_gen(args: argparse.Namespace) -> int:
    try:
        instance = oracle.generate_instance(args.profile, args.seed, args.size)
    except LookupError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except ValueError as exc:
        raise CliError(str(exc)) from exc
    jsonschema.validate(instance, INSTANCE_SCHEMA)
    _write(args.output, canonical_json(instance))
    return 0


def cmd_oracle_check(args: argparse.Namespace) -> int:
    cross = oracle.crosscheck_thresholds(args.samples, args.seed)
    fd = oracle.finite_difference_facts(args.grid)
    report = {
        "schema_version": SCHEMA_VERSION,
        "threshold_crosscheck": {
            "checked": cross.checked,
            "skipped": cross.skipped,
            "mismatches": list(cross.mismatches),
        },
        "finite_difference": {
            "checked": fd.checked,
            "skipped": fd.skipped,
            "mismatches": list(fd.mismatches),
        },
        "ok": cross.ok and fd.ok,
    }
    _write(args.output, canonical_json(report))
    return 0 if cross.ok and fd.ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distopt",
        description=(
            "Volume-optimal content distributions, equilibrium classification, "
            "and carveout synthesis for a single consumer/media-source pair."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--output", default=None, help="output path (stdout if omitted)")
        p.add_argument(
            "--format",
            choices=["json", "csv"],
            default="json",
            help="csv additionally writes curve files next to --output",
        )

    p_opt = sub.add_parser("optimize", help="run the full pipeline on an instance")
    p_opt.add_argument("--input", default=None)
    p_opt.add_argument("--batch", default=None, help="directory of instance files")
    common(p_opt)
    p_opt.set_defaults(func=cmd_optimize)

    p_ana = sub.add_parser("analyze", help="thresholds for a designated candidate")
    p_ana.add_argument("--input", required=True)
    p_ana.add_argument("--candidate", required=True, help="candidate point id")
    common(p_ana)
    p_ana.set_defaults(func=cmd_analyze)

    p_car = sub.add_parser("carveout", help="attempt a compensating carve")
    p_car.add_argument("--input", required=True)
    common(p_car)
    p_car.set_defaults(func=cmd_carveout)

    p_gen = sub.add_parser("gen", help="generate an instance file")
    p_gen.add_argument(
        "--profile",
        required=True,
        help="uniform | monotone | underserved | saturated | scenario:<Kind>",
    )
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.add_argument("--size", type=int, default=8)
    p_gen.add_argument("--output", default=None)
    p_gen.set_defaults(func=cmd_gen)

    p_orc = sub.add_parser("oracle-check", help="run independent verifications")
    p_orc.add_argument("--samples", type=int, default=10_000)
    p_orc.add_argument("--seed", type=int, default=20240817)
    p_orc.add_argument("--grid", type=int, default=50)
    p_orc.add_argument("--output", default=None)
    p_orc.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv: list[str] | None = None) -> int:
    level = os.environ.get("DISTOPT_LOG")
    if level:
        logging.basicConfig(
            level=getattr(logging, level.upper(), logging.INFO),
            stream=sys.stderr,
            format="%(name)s %(levelname)s %(message)s",
        )
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


def entrypoint() -> None:  # console-script shim
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
