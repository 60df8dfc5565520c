from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from reefopt.batch import RunJob, run_jobs, summarize
from reefopt.core import ConfigError, xdg
from reefopt.core import config as cfg
from reefopt.core.runconfig import RunConfig, load_json, load_run_config
from reefopt.engine.cro import run
from reefopt.engine.problem import Problem
from reefopt.problems import evaluate_solution
from reefopt.problems.bsop import BsopProblem, bill_report, deterministic_schedule
from reefopt.problems.tmd import TmdDesign, TmdProblem, to_db
from reefopt.telemetry import summary_dict, write_csv, write_summary
from reefopt.telemetry.export import format_number

log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_RUNS_FAILED = 1
EXIT_CONFIG = 2

CRO_SL_VARIANT = "cro-sl"
BSOP_MODES = ("none", "deterministic")


def _setup_logging(verbose: bool) -> None:
    level = logging.DEBUG if verbose else logging.INFO
    logging.basicConfig(format="%(levelname)-8s %(message)s", level=level)


# ---------------------------------------------------------------------------
# Helpers
# ---------------------------------------------------------------------------


def _output_dir(args: argparse.Namespace, config: RunConfig, user_config: dict[str, Any]) -> Path:
    """--out, then the run config's output_dir, then the user default root, then XDG."""
    if args.out:
        return Path(args.out).expanduser()
    if config.output_dir is not None:
        return config.output_dir
    stem = config.source.stem if config.source is not None else "run"
    root = cfg.get_output_dir(user_config) or xdg.runs_dir()
    return root / stem


def _write_rows(header: Sequence[str], rows: Sequence[Sequence[str]], out: str | None) -> None:
    """CSV with LF endings to *out*, or to stdout when no path is given."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if out is None:
        sys.stdout.write(buffer.getvalue())
        return
    path = Path(out).expanduser()
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(buffer.getvalue(), encoding="utf-8", newline="")
    log.info("Wrote %s", path)


def _load_solution(path: str) -> tuple[dict[str, Any], Path]:
    solution = load_json(path, what="solution file")
    if not isinstance(solution, dict):
        raise ConfigError(f"{path}: solution must be a JSON object")
    return solution, Path(path).resolve().parent


def _require(problem: Problem, kind: type, command: str) -> None:
    if not isinstance(problem, kind):
        raise ConfigError(f"'{command}' needs a {kind.kind} problem, the config describes {problem.kind!r}")


# ---------------------------------------------------------------------------
# Sub-commands
# ---------------------------------------------------------------------------


def cmd_run(args: argparse.Namespace) -> int:
    user_config = cfg.load_config()
    config = load_run_config(args.config)
    if args.seed is not None:
        config = config.with_seed(args.seed)

    problem = config.build_problem()
    best, telemetry = run(config.params, problem, threads=cfg.get_threads(user_config))

    out_dir = _output_dir(args, config, user_config)
    out_dir.mkdir(parents=True, exist_ok=True)
    write_csv(telemetry, out_dir / "telemetry.csv")

    if best is None:
        log.warning("No feasible coral was found")
        summary = summary_dict(telemetry, None, [], {"problem": problem.kind})
    else:
        summary = summary_dict(
            telemetry,
            best.fitness,
            [float(v) for v in best.genome],
            {"problem": problem.kind, "solution": problem.describe(best.genome)},
        )
    write_summary(summary, out_dir / "summary.json")
    log.info("Artifacts written to %s", out_dir)
    return EXIT_OK


def cmd_compare(args: argparse.Namespace) -> int:
    user_config = cfg.load_config()
    config = load_run_config(args.config)
    base_seed = args.seed if args.seed is not None else config.params.seed
    n_seeds = args.seeds if args.seeds is not None else cfg.get_seeds(user_config)
    if n_seeds < 1:
        raise ConfigError(f"--seeds must be >= 1, got {n_seeds}")

    # The full reef plus every substrate on its own, same reef size and budget.
    variants: dict[str, RunConfig] = {CRO_SL_VARIANT: config}
    for substrate in config.params.substrates:
        if substrate.name == CRO_SL_VARIANT:
            raise ConfigError(
                f"substrate name {CRO_SL_VARIANT!r} is reserved for the full reef in compare"
            )
        variants[substrate.name] = config.with_substrates((substrate,))

    jobs = [
        RunJob(variant=name, seed=base_seed + k, config=variant.with_seed(base_seed + k))
        for name, variant in variants.items()
        for k in range(n_seeds)
    ]
    log.info("Comparing %d variants over %d seeds (%d runs)", len(variants), n_seeds, len(jobs))
    results = run_jobs(jobs, threads=cfg.get_threads(user_config))
    stats = summarize(list(variants), results)

    for row in stats:
        log.info(
            "%-12s runs %d  min %.6g  mean %.6g  evaluations %.0f",
            row.variant,
            row.runs,
            row.min,
            row.mean,
            row.mean_evaluations,
        )

    out_dir = _output_dir(args, config, user_config)
    _write_rows(
        ["variant", "min", "mean", "mean_evaluations"],
        [
            [row.variant, format_number(row.min), format_number(row.mean), format_number(row.mean_evaluations)]
            for row in stats
        ],
        str(out_dir / "compare.csv"),
    )
    failed = sum(1 for r in results if r is None)
    if failed:
        log.warning("%d of %d runs failed", failed, len(jobs))
    empty = [row.variant for row in stats if row.runs == 0]
    if empty:
        log.error("No run succeeded for %s", ", ".join(empty))
        return EXIT_RUNS_FAILED
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    problem = config.build_problem()
    solution, base_dir = _load_solution(args.solution)
    cost = evaluate_solution(problem, solution, base_dir)
    print(f"{cost:.6g}")
    return EXIT_OK


def cmd_frf(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    problem = config.build_problem()
    _require(problem, TmdProblem, "frf")

    model = problem.model
    if args.solution is None:
        curves = model.open_loop()
        log.info("Open-loop FRF, %d floors", model.n_floors)
    else:
        solution, _ = _load_solution(args.solution)
        if "genome" in solution:
            design = problem.decode(np.asarray(solution["genome"], dtype=float))
        else:
            design = TmdDesign.from_dict(solution)
        curves = model.closed_loop(design)
        log.info("Closed-loop FRF with %d TMD(s)", design.n_tmd)

    db = to_db(curves)
    log.info("FRF maximum %.2f dB", float(db.max()))
    header = ["omega_rad_s"] + [f"floor_{i + 1}_db" for i in range(model.n_floors)]
    rows = [
        [format_number(float(omega))] + [format_number(float(v)) for v in db[:, k]]
        for k, omega in enumerate(model.omega)
    ]
    _write_rows(header, rows, args.out)
    return EXIT_OK


def cmd_bsop_report(args: argparse.Namespace) -> int:
    config = load_run_config(args.config)
    problem = config.build_problem()
    _require(problem, BsopProblem, "bsop-report")
    scenario = problem.scenario

    rows = []
    for mode in args.mode or list(BSOP_MODES):
        if mode == "none":
            schedule = np.zeros(len(problem.encoding))
        elif mode == "deterministic":
            schedule = deterministic_schedule(scenario)
        else:
            solution, _ = _load_solution(mode)
            key = "schedule" if "schedule" in solution else "genome"
            if key not in solution:
                raise ConfigError(f"{mode}: solution needs a 'schedule' list")
            schedule = np.asarray(solution[key], dtype=float)
            if schedule.shape != (len(problem.encoding),):
                raise ConfigError(
                    f"{mode}: schedule has {schedule.size} values, expected {len(problem.encoding)}"
                )
        report = bill_report(scenario, schedule)
        log.info(
            "%s: PT %.2f  ET %.2f  total %.2f  (%.2f%%)",
            mode,
            report["pt"],
            report["et"],
            report["total"],
            report["improvement_pct"],
        )
        rows.append(
            [
                mode,
                f"{report['pt']:.2f}",
                f"{report['et']:.2f}",
                f"{report['total']:.2f}",
                f"{report['improvement_pct']:.2f}",
            ]
        )

    _write_rows(["mode", "pt", "et", "total", "improvement_pct"], rows, args.out)
    return EXIT_OK


def cmd_generate_config(_args: argparse.Namespace) -> int:
    config_path = xdg.config_file()

    if config_path.exists():
        log.info("Config already exists at %s, not overwriting", config_path)
        return EXIT_OK

    xdg.ensure_dirs()
    config_path.write_text(cfg.DEFAULT_TOML, encoding="utf-8")
    log.info("Created default config at %s", config_path)
    return EXIT_OK


# ---------------------------------------------------------------------------
# Argument parser
# ---------------------------------------------------------------------------


def _add_common(parser: argparse.ArgumentParser, top: bool = False) -> None:
    # Sub-parsers must not reset a -v given before the sub-command.
    parser.add_argument(
        "-v", "--verbose", action="store_true", default=False if top else argparse.SUPPRESS
    )


def _seed(value: str) -> int:
    seed = int(value)
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {value}")
    return seed


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="reefopt", description="Coral reef optimization with substrate layers."
    )
    _add_common(parser, top=True)
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="Run one CRO-SL job from a JSON config")
    run_p.add_argument("--config", required=True, help="Run config (JSON)")
    run_p.add_argument("--seed", type=_seed, default=None, help="Override engine.seed")
    run_p.add_argument("--out", default=None, help="Output directory for telemetry.csv and summary.json")
    _add_common(run_p)

    compare_p = sub.add_parser(
        "compare", help="Run CRO-SL against each substrate on its own over several seeds"
    )
    compare_p.add_argument("--config", required=True, help="Run config (JSON)")
    compare_p.add_argument("--seed", type=_seed, default=None, help="First seed (default: engine.seed)")
    compare_p.add_argument(
        "--seeds", type=int, default=None, help="Runs per variant (default: from config or 5)"
    )
    compare_p.add_argument("--out", default=None, help="Output directory for compare.csv")
    _add_common(compare_p)

    eval_p = sub.add_parser("eval", help="Evaluate a stored solution once")
    eval_p.add_argument("--config", required=True, help="Run config holding the problem block")
    eval_p.add_argument("--solution", required=True, help="Solution file (JSON)")
    _add_common(eval_p)

    frf_p = sub.add_parser("frf", help="Per-floor FRF curves in dB for a TMD problem")
    frf_p.add_argument("--config", required=True, help="Run config with a tmd problem")
    frf_p.add_argument(
        "--solution", default=None, help="TMD design (JSON); open-loop curves when omitted"
    )
    frf_p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    _add_common(frf_p)

    bsop_p = sub.add_parser("bsop-report", help="Billing breakdown of battery schedules")
    bsop_p.add_argument("--config", required=True, help="Run config with a bsop problem")
    bsop_p.add_argument(
        "--mode",
        action="append",
        default=None,
        help="none, deterministic or a solution file; repeatable (default: none and deterministic)",
    )
    bsop_p.add_argument("--out", default=None, help="CSV path (default: stdout)")
    _add_common(bsop_p)

    config_p = sub.add_parser(
        "generate-config",
        help="Create default reefopt.toml configuration",
    )
    _add_common(config_p)

    return parser


HANDLERS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "eval": cmd_eval,
    "frf": cmd_frf,
    "bsop-report": cmd_bsop_report,
    "generate-config": cmd_generate_config,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    if args.verbose:
        for name, path in xdg.dump().items():
            log.debug("%s: %s", name, path)
    try:
        return HANDLERS[args.command](args)
    except (ConfigError, FileNotFoundError, json.JSONDecodeError) as exc:
        if args.verbose:
            log.exception("%s", exc)
        else:
            log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
