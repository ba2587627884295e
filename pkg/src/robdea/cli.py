"""Command-line front end: ``rank``, ``verify`` and ``perturb``.

Exit codes: 0 on success, 1 on bad input (diagnostics on stderr), 2 when a
solver could not produce a trustworthy answer.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field

from .dataset import DatasetError, IntervalDataset
from .fractional import BisectionConfig, BracketError
from .io import BUNDLED, bundled, load_dataset
from .lp import LPError, NumericFailure
from .models import ALL_VARY, FIX_NAMES, ModelError, ModelKind, PerturbationMask
from .perturbation import SCHEMES, PerturbationError, retention_test
from .properties import KNOWN_FAILING, run_property_suites
from .ranking import RankingConfig, RankingError, rank_all, rank_interval_all, sorted_order

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2
FORMATS = ("table", "json")


class InputError(Exception):
    """Bad command line or unusable input file."""


@dataclass(frozen=True)
class RunConfig:
    model: ModelKind = ModelKind.CCR_ROBUST_LP
    mask: PerturbationMask = ALL_VARY
    include_self_classical: bool = True
    interval_mode: bool = False
    bisection: BisectionConfig = field(default_factory=BisectionConfig)
    output_format: str = "table"
    precision: int = 4
    seed: int | None = None

    def __post_init__(self):
        if self.output_format not in FORMATS:
            raise InputError(f"output format must be one of {FORMATS}")
        if not 1 <= self.precision <= 12:
            raise InputError("precision must lie in [1, 12]")
        if self.interval_mode and ModelKind(self.model).is_classical:
            raise InputError("interval ranges need a robust model")

    def ranking_config(self) -> RankingConfig:
        return RankingConfig(self.bisection, self.include_self_classical, ModelKind(self.model))

    def check_data(self, data):
        if self.interval_mode and not isinstance(data, IntervalDataset):
            raise InputError("--interval needs interval columns (':lo' / ':hi') in the input")
        if not self.interval_mode and isinstance(data, IntervalDataset):
            raise InputError("input has interval columns; pass --interval")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise InputError(f"{self.prog}: {message}")


def _mask(fixes) -> PerturbationMask:
    return ALL_VARY.fixing(fixes) if fixes else ALL_VARY


def _json_number(v):
    return v if math.isfinite(v) else None


def dumps_json(records) -> str:
    """Byte-stable JSON: fixed key order, repr floats, non-finite values as null."""
    clean = [{k: _json_number(v) if isinstance(v, float) else v for k, v in rec.items()} for rec in records]
    return json.dumps(clean, indent=2, allow_nan=False) + "\n"


def format_table(header, rows, precision) -> str:
    def cell(v):
        if isinstance(v, bool):
            return "yes" if v else "no"
        if isinstance(v, float):
            return f"{v:.{precision}f}" if math.isfinite(v) else ("inf" if v > 0 else "-inf")
        return str(v)

    body = [[cell(v) for v in row] for row in rows]
    widths = [max(len(h), *(len(r[j]) for r in body)) if body else len(h) for j, h in enumerate(header)]
    lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
    lines += ["  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in body]
    return "\n".join(lines) + "\n"


def _load(args):
    if args.example:
        return bundled(args.example)
    try:
        return load_dataset(args.input)
    except OSError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror or exc}") from None


def _cmd_rank(args, out, err) -> int:
    config = RunConfig(
        model=ModelKind(args.model),
        mask=_mask(args.fix),
        interval_mode=args.interval,
        output_format=args.format,
        precision=args.precision,
    )
    data = _load(args)
    config.check_data(data)
    if config.interval_mode:
        if not config.mask.is_all_vary:
            raise InputError("--fix does not apply to interval ranges")
        ranges = rank_interval_all(data, config.model, config.ranking_config())
        if config.output_format == "json":
            out.write(dumps_json([r.as_dict() for r in ranges]))
        else:
            rows = [(r.dmu_id, r.r_lower, r.r_upper, r.always_efficient, r.never_efficient) for r in ranges]
            out.write(format_table(("id", "r_lower", "r_upper", "always", "never"), rows, config.precision))
        return EXIT_OK

    batch = rank_all(data, config.model, config.mask, config.ranking_config())
    if config.output_format == "json":
        out.write(dumps_json([r.as_dict() for r in batch]))
    else:
        rows = [(r.dmu_id, r.classical_score, r.delta_star, r.r, r.efficient) for r in batch]
        out.write(format_table(("id", "classical", "delta*", "r", "efficient"), rows, config.precision))
        out.write("order: " + " > ".join(sorted_order(batch)) + "\n")
    for failure in batch.failures:
        err.write(f"error: DMU {failure.dmu_id!r}: {failure.error}\n")
    return EXIT_NUMERIC if batch.failures else EXIT_OK


def _cmd_verify(args, out, err) -> int:
    if args.datasets < 1:
        raise InputError("--datasets must be at least 1")
    report = run_property_suites(args.datasets, seed=args.seed)
    for name, violations in report.violations.items():
        note = " (known not to hold in general)" if name in KNOWN_FAILING else ""
        out.write(f"{'PASS' if not violations else 'FAIL'} {name}: {len(violations)} violations{note}\n")
        for msg in violations[:args.show]:
            out.write(f"    {msg}\n")
    out.write(f"{report.datasets} datasets, {report.dmus} DMUs, {report.seconds:.1f} s\n")
    ok = report.ok if args.strict else report.ok_except()
    return EXIT_OK if ok else EXIT_NUMERIC


def _cmd_perturb(args, out, err) -> int:
    data = _load(args)
    if isinstance(data, IntervalDataset):
        raise InputError("perturb needs point data, not interval columns")
    if args.dmu not in data.ids:
        raise InputError(f"no DMU with id {args.dmu!r}")
    if not 0.0 <= args.delta < 1.0:
        raise InputError("--delta must lie in [0, 1)")
    if args.trials < 1:
        raise InputError("--trials must be at least 1")
    report = retention_test(data, data.index(args.dmu), args.delta, args.trials, args.seed,
                            _mask(args.fix), scheme=args.scheme)
    record = {
        "id": report.dmu_id,
        "delta": report.delta,
        "trials": report.trials,
        "retained": report.retained,
        "nominal_efficient": report.nominal_efficient,
        "violations": list(report.violations),
    }
    if args.format == "json":
        out.write(json.dumps(record, indent=2) + "\n")
    else:
        status = "efficient" if report.nominal_efficient else "inefficient"
        out.write(f"DMU {report.dmu_id} ({status}) at delta = {report.delta:g}, scheme {args.scheme}: "
                  f"{report.retained}/{report.trials} scenarios kept the classification\n")
        if report.violations:
            shown = ", ".join(str(s) for s in report.violations[:10])
            more = " ..." if len(report.violations) > 10 else ""
            out.write(f"flipping trial seeds: {shown}{more}\n")
    return EXIT_OK


def _add_source(p):
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", metavar="PATH", help="CSV (or .json) dataset")
    src.add_argument("--example", choices=BUNDLED, help="use a bundled example dataset")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="robdea", description="Robustness-based DEA ranking.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    rank = sub.add_parser("rank", help="rank every DMU of a dataset")
    _add_source(rank)
    rank.add_argument("--model", choices=[k.value for k in ModelKind], default=ModelKind.CCR_ROBUST_LP.value)
    rank.add_argument("--fix", action="append", choices=list(FIX_NAMES), default=[],
                      help="keep a data group at its nominal value (repeatable)")
    rank.add_argument("--interval", action="store_true", help="rank interval data by best/worst case")
    rank.add_argument("--format", choices=FORMATS, default="table")
    rank.add_argument("--precision", type=int, default=4, help="decimals in table output (1-12)")
    rank.set_defaults(run=_cmd_rank)

    verify = sub.add_parser("verify", help="run the randomised property suites")
    verify.add_argument("--datasets", type=int, default=200)
    verify.add_argument("--seed", type=int, default=0)
    verify.add_argument("--show", type=int, default=5, help="violations listed per suite")
    verify.add_argument("--strict", action="store_true", help="also fail on suites known not to hold")
    verify.set_defaults(run=_cmd_verify)

    perturb = sub.add_parser("perturb", help="Monte-Carlo retention test for one DMU")
    _add_source(perturb)
    perturb.add_argument("--dmu", required=True, metavar="ID")
    perturb.add_argument("--delta", type=float, required=True)
    perturb.add_argument("--trials", type=int, default=1000)
    perturb.add_argument("--seed", type=int, default=0)
    perturb.add_argument("--fix", action="append", choices=list(FIX_NAMES), default=[])
    perturb.add_argument("--scheme", choices=SCHEMES, default="vertex")
    perturb.add_argument("--format", choices=FORMATS, default="table")
    perturb.set_defaults(run=_cmd_perturb)
    return parser


def run_cli(argv=None, stdout=None, stderr=None) -> int:
    out = stdout if stdout is not None else sys.stdout
    err = stderr if stderr is not None else sys.stderr
    try:
        args = build_parser().parse_args(argv)
        return args.run(args, out, err)
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    except (InputError, DatasetError, ModelError, KeyError, ValueError) as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except (NumericFailure, LPError, RankingError, BracketError, PerturbationError) as exc:
        err.write(f"numeric failure: {exc}\n")
        return EXIT_NUMERIC


def main(argv=None):
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
