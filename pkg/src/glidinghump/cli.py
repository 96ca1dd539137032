"""Command line entry points.

Four subcommands sharing one flag vocabulary:

* ``run``: execute the condensation, verify it, write trace/certificate
  JSON plus the per-step growth table;
* ``check``: probe a family's declared inequalities on random samples;
* ``lebesgue``: tabulate the partial-sum operator norms;
* ``schedule``: print a budget schedule for externally given constants.

Exit codes: 0 on success, 1 when a run or check fails its verification
(horizon exhaustion included), 2 for configuration or usage errors.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .config import (
    ConfigError,
    RunConfig,
    load_config_file,
    merge_config,
    validate_config,
)
from .families import DIAGNOSTIC_FAMILY_IDS, FAMILY_IDS, build_family, lebesgue_constant
from .glide import (
    HorizonExhaustedError,
    HumpSearchError,
    ScheduleUnderflowError,
    build_schedule,
    run_condensation,
)
from .hypotheses import REPORT_HEADER, report_table, report_to_jsonable, run_all_checks
from .spaces import DimensionMismatchError
from .traceio import (
    GROWTH_HEADER,
    LEBESGUE_HEADER,
    SCHEDULE_HEADER,
    certificate_to_jsonable,
    growth_table,
    lebesgue_table,
    schedule_table,
    trace_to_jsonable,
    write_csv_file,
    write_json_file,
)

# (flag destination, config field, value transform)
_FLAG_FIELDS = (
    ("seed", "seed", int),
    ("out", "out_dir", str),
    ("family", "family", str),
    ("p", "p", float),
    ("K", "horizon", int),
    ("cap", "cap", float),
    ("n_max", "index_max", int),
    ("points", "points", None),
    ("quadrature_order", "quadrature_order", int),
    ("smoothing_width", "smoothing_width", float),
    ("eta", "eta", float),
    ("grid_resolution", "grid_resolution", int),
    ("samples", "samples", int),
    ("trend_samples", "trend_samples", int),
    ("blowup_floor", "blowup_floor", float),
    ("L", "increment_constant", float),
    ("C", "subadditivity_constant", float),
)


def _parse_points_flag(text: str) -> tuple[float, ...]:
    try:
        parts = [p.strip() for p in text.split(",") if p.strip()]
        if not parts:
            raise ValueError("empty angle list")
        return tuple(float(p) for p in parts)
    except ValueError as err:
        raise argparse.ArgumentTypeError(str(err)) from err


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="glidinghump",
        description="budgeted gliding-hump condensation runs with verified certificates",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_shared(sp: argparse.ArgumentParser, families=None) -> None:
        sp.add_argument("--config", default=None, help="key = value config file")
        sp.add_argument("--seed", type=int, default=None, help="random seed")
        sp.add_argument("--out", default=None, help="output directory")
        if families is not None:
            sp.add_argument("--family", choices=list(families), default=None)
        sp.add_argument("--p", type=float, default=None, help="norm exponent in (0, 1]")
        sp.add_argument("--K", type=int, default=None, help="horizon (number of steps)")
        sp.add_argument("--cap", type=float, default=None, help="largest allowed budget")
        sp.add_argument(
            "--n-max", dest="n_max", type=int, default=None,
            help="largest operator index the search may visit",
        )
        sp.add_argument("--no-plots", action="store_true", help="skip figure rendering")

    run_p = sub.add_parser("run", help="run the condensation and verify the certificate")
    add_shared(run_p, FAMILY_IDS)
    run_p.add_argument("--points", type=_parse_points_flag, default=None,
                       help="comma-separated target angles (fourier)")
    run_p.add_argument("--quadrature-order", dest="quadrature_order", type=int, default=None)
    run_p.add_argument("--smoothing-width", dest="smoothing_width", type=float, default=None)
    run_p.add_argument("--eta", type=float, default=None, help="declared norming efficiency")
    run_p.add_argument("--grid-resolution", dest="grid_resolution", type=int, default=None)

    check_p = sub.add_parser("check", help="probe a family's declared inequalities")
    add_shared(check_p, DIAGNOSTIC_FAMILY_IDS)
    check_p.add_argument("--points", type=_parse_points_flag, default=None)
    check_p.add_argument("--quadrature-order", dest="quadrature_order", type=int, default=None)
    check_p.add_argument("--samples", type=int, default=None, help="samples per inequality")
    check_p.add_argument("--trend-samples", dest="trend_samples", type=int, default=None)
    check_p.add_argument("--blowup-floor", dest="blowup_floor", type=float, default=None)

    leb_p = sub.add_parser("lebesgue", help="tabulate partial-sum operator norms")
    add_shared(leb_p)
    leb_p.add_argument("--quadrature-order", dest="quadrature_order", type=int, default=None)

    sched_p = sub.add_parser("schedule", help="print a budget schedule for given constants")
    add_shared(sched_p)
    sched_p.add_argument("--L", type=float, default=None, help="increment constant (>= 1)")
    sched_p.add_argument("--C", type=float, default=None, help="subadditivity constant (>= 1)")
    return parser


def resolve_config(args: argparse.Namespace, command: str) -> RunConfig:
    cfg = RunConfig()
    config_path = getattr(args, "config", None)
    if config_path:
        cfg = merge_config(cfg, load_config_file(config_path))
    overrides: dict = {}
    for flag, field_name, _ in _FLAG_FIELDS:
        value = getattr(args, flag, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "no_plots", False):
        overrides["plots"] = False
    cfg = merge_config(cfg, overrides)
    if command == "lebesgue" and cfg.index_max is None:
        cfg = replace(cfg, index_max=100)
    validate_config(cfg, command)
    return cfg


def _build_family_from(cfg: RunConfig):
    return build_family(
        cfg.family,
        p=cfg.p,
        eta=cfg.eta,
        points=cfg.points,
        quadrature_order=cfg.quadrature_order,
        smoothing_width=cfg.smoothing_width,
        grid_resolution=cfg.grid_resolution,
    )


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_run(cfg: RunConfig) -> int:
    try:
        family = _build_family_from(cfg)
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    index_max = cfg.resolved_index_max()
    try:
        trace, certificate = run_condensation(
            family, cfg.horizon, cfg.cap, index_max, cfg.seed
        )
    except ScheduleUnderflowError as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 1
    except (HorizonExhaustedError, HumpSearchError) as err:
        print(f"run failed: {err}", file=sys.stderr)
        return 1
    except (DimensionMismatchError, ValueError) as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    schedule = build_schedule(
        family.domain_space.p,
        family.constants.increment,
        family.constants.subadditivity,
        cfg.cap,
        cfg.horizon,
    )
    out = _out_dir(cfg)
    write_json_file(str(out / "trace.json"), trace_to_jsonable(trace, schedule))
    write_json_file(str(out / "certificate.json"), certificate_to_jsonable(certificate))
    write_csv_file(str(out / "growth.csv"), GROWTH_HEADER, growth_table(trace, certificate))
    if cfg.plots:
        from . import plots

        plots.plot_growth(trace, certificate, str(out / "growth.png"))
        plots.plot_schedule(schedule, str(out / "schedule.png"))
    if not certificate.accepted:
        failing = [c.k for c in certificate.steps if not c.passed]
        detail = f"steps {failing}" if failing else "schedule consistency"
        print(f"certificate rejected: {detail}", file=sys.stderr)
        return 1
    print(
        f"accepted: family={cfg.family} K={cfg.horizon} cap={cfg.cap} "
        f"seed={cfg.seed}; outputs in {out}"
    )
    return 0


def cmd_check(cfg: RunConfig) -> int:
    try:
        family = _build_family_from(cfg)
    except ValueError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    report = run_all_checks(
        family,
        samples=cfg.samples,
        seed=cfg.seed,
        trend_samples=cfg.trend_samples,
        index_max=cfg.probe_index_max,
        row_max=cfg.probe_row_max,
        blowup_floor=cfg.blowup_floor,
    )
    out = _out_dir(cfg)
    write_json_file(str(out / "report.json"), report_to_jsonable(report))
    write_csv_file(str(out / "report.csv"), REPORT_HEADER, report_table(report))
    if cfg.plots:
        from . import plots

        plots.plot_trends(report, str(out / "trends.png"))
    if not report.passed:
        print(
            f"hypothesis checks failed: {report.total_violations} violations "
            f"for family {cfg.family}; see {out / 'report.json'}",
            file=sys.stderr,
        )
        return 1
    print(f"all hypothesis checks passed for family {cfg.family}; outputs in {out}")
    return 0


def cmd_lebesgue(cfg: RunConfig) -> int:
    n_hi = cfg.resolved_index_max()
    orders = list(range(0, n_hi + 1))
    values = [lebesgue_constant(n, cfg.quadrature_order) for n in orders]
    out = _out_dir(cfg)
    write_csv_file(str(out / "lebesgue.csv"), LEBESGUE_HEADER, lebesgue_table(orders, values))
    if cfg.plots:
        from . import plots

        plots.plot_lebesgue(orders, values, str(out / "lebesgue.png"))
    print(f"tabulated {len(orders)} operator norms; outputs in {out}")
    return 0


def cmd_schedule(cfg: RunConfig) -> int:
    def increment(row: int) -> float:
        return cfg.increment_constant

    def subadditivity(row: int) -> float:
        return cfg.subadditivity_constant

    try:
        schedule = build_schedule(cfg.p, increment, subadditivity, cfg.cap, cfg.horizon)
    except ScheduleUnderflowError as err:
        print(f"schedule failed: {err}", file=sys.stderr)
        return 1
    out = _out_dir(cfg)
    write_csv_file(str(out / "schedule.csv"), SCHEDULE_HEADER, schedule_table(schedule))
    if cfg.plots:
        from . import plots

        plots.plot_schedule(schedule, str(out / "schedule.png"))
    print(f"schedule for K={cfg.horizon} written; outputs in {out}")
    return 0


_COMMANDS = {
    "run": cmd_run,
    "check": cmd_check,
    "lebesgue": cmd_lebesgue,
    "schedule": cmd_schedule,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = resolve_config(args, args.command)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg)
    except ConfigError as err:
        print(f"config error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
