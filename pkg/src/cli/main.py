"""
kappa-psi command-line front end.

Commands:
- corr        evaluate one correlator with one or all engines
- volume      Weil-Petersson volume polynomial Vol_{g,n}
- alpha       alpha_L table up to a weight
- positivity  signs of the inverse of a conjecture series
- beta        beta_b closed form against the series inversion
- verify      run verification suites

Results go to stdout; logging goes to stderr (and optionally a log file).
"""
import argparse
import asyncio
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

from ..config.settings import Settings
from ..database.manager import CacheManager
from ..models.schemas import (
    ALL_ENGINES,
    BetaRow,
    CheckReport,
    CorrelatorResult,
    Engine,
    OutputFormat,
    SeriesId,
    Suite,
    TableEntry,
)
from ..services import constants, verify, volumes
from ..services.correlator import CorrelatorKey, CorrelatorService
from ..utils.errors import KappaPsiError, UsageError, VerificationFailure
from ..utils.exact import format_rational
from ..utils.multiindex import MultiIndex

logger = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"


class ArgumentParser(argparse.ArgumentParser):
    """argparse with UsageError instead of SystemExit(2)."""

    def error(self, message):
        raise UsageError(message)


def parse_taus(text: str) -> List[int]:
    """'3,0,0' -> [3, 0, 0]; empty text (or '-') means no insertions."""
    text = (text or "").strip()
    if text in ("", "-"):
        return []
    try:
        return [int(part) for part in text.split(",")]
    except ValueError:
        raise UsageError(f"cannot parse tau list {text!r}")


def configure_logging(level: str, log_file: Optional[str] = None):
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(level=level, format=LOG_FORMAT, handlers=handlers, force=True)


def common_options() -> ArgumentParser:
    """Global flags, accepted before or after the command name."""
    common = ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--cache", dest="cache_path", help="persistent correlator cache file")
    common.add_argument("--format", dest="output_format", choices=[f.value for f in OutputFormat])
    common.add_argument("--log-level", dest="log_level", choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    common.add_argument("--log-file", dest="log_file")
    return common


def build_parser() -> ArgumentParser:
    common = common_options()
    parser = ArgumentParser(prog="kappa-psi", description="Mixed psi/kappa intersection numbers", parents=[common])
    commands = parser.add_subparsers(dest="command", required=True, parser_class=ArgumentParser)

    corr = commands.add_parser("corr", parents=[common], help="evaluate <kappa(b) tau_d1 ... tau_dn>_g")
    corr.add_argument("--g", type=int, required=True)
    corr.add_argument("--kappas", default="-", help="multi-index like 1:3,2:1, '-' for none")
    corr.add_argument("--taus", nargs="?", const="", default="", help="comma list like 3,0,0")
    corr.add_argument("--engine", choices=[ALL_ENGINES] + [e.value for e in Engine])

    volume = commands.add_parser("volume", parents=[common], help="Weil-Petersson volume polynomial")
    volume.add_argument("--g", type=int, required=True)
    volume.add_argument("--n", type=int, required=True)
    volume.add_argument("--engine", choices=[e.value for e in Engine])

    alpha = commands.add_parser("alpha", parents=[common], help="alpha_L table")
    alpha.add_argument("--max-weight", type=int)

    positivity = commands.add_parser("positivity", parents=[common], help="signs of an inverted series")
    positivity.add_argument("--series", choices=[s.value for s in SeriesId], default=SeriesId.RECURSION_KERNEL.value)
    positivity.add_argument("--max-weight", type=int)

    beta = commands.add_parser("beta", parents=[common], help="beta_b closed form vs series")
    beta.add_argument("--max", dest="max_b", type=int, default=10)

    check = commands.add_parser("verify", parents=[common], help="run verification suites")
    check.add_argument("--suite", choices=[s.value for s in Suite], default=Suite.ALL.value)
    check.add_argument("--max-t", dest="verify_max_t", type=int)
    check.add_argument("--max-s", dest="verify_max_s", type=int)
    check.add_argument("--max-degree", dest="verify_max_degree", type=int)
    check.add_argument("--g-max", dest="verify_g_max", type=int)
    check.add_argument("--trials", dest="proposition_trials", type=int)
    check.add_argument("--seed", dest="proposition_seed", type=int)
    return parser


SETTING_FLAGS = (
    "cache_path",
    "output_format",
    "log_level",
    "log_file",
    "engine",
    "verify_max_t",
    "verify_max_s",
    "verify_max_degree",
    "verify_g_max",
    "proposition_trials",
    "proposition_seed",
)


def settings_from_args(args: argparse.Namespace) -> Settings:
    """Settings from the environment, overridden by any flag that was given."""
    overrides = {name: getattr(args, name) for name in SETTING_FLAGS if getattr(args, name, None) is not None}
    if args.command == "volume" and "engine" in overrides:
        overrides["default_engine"] = overrides.pop("engine")
    return Settings(**overrides)


class CommandRunner:
    """Runs one command with the cache loaded before and saved after."""

    def __init__(self, settings: Settings, service: Optional[CorrelatorService] = None):
        self.settings = settings
        self.service = service or CorrelatorService()
        self.cache_manager = CacheManager(settings.cache_path, self.service)
        self.output: List[str] = []

    async def setup(self):
        await self.cache_manager.initialize()

    async def cleanup(self):
        await self.cache_manager.cleanup()

    @property
    def fmt(self) -> OutputFormat:
        return OutputFormat(self.settings.output_format)

    def emit(self, lines: Sequence[str]):
        self.output.extend(lines)

    def emit_json(self, payload: Any):
        self.output.append(json.dumps(payload, indent=2, sort_keys=True))

    async def run(self, args: argparse.Namespace) -> int:
        handler = getattr(self, f"cmd_{args.command}")
        return await handler(args)

    # -- commands ------------------------------------------------------------

    async def cmd_corr(self, args) -> int:
        key = CorrelatorKey.of(args.g, MultiIndex.parse(args.kappas), parse_taus(args.taus))
        engines = self.settings.selected_engines
        values = self.service.evaluate_engines(key, engines)
        results = [
            CorrelatorResult(
                engine=engine, genus=key.genus, kappa=str(key.kappa), taus=list(key.taus), value=format_rational(value)
            )
            for engine, value in values.items()
        ]
        if self.fmt is OutputFormat.JSON:
            self.emit_json([r.model_dump(mode="json") for r in results])
        elif self.fmt is OutputFormat.TSV:
            self.emit([f"{r.engine.value}\t{r.value}" for r in results])
        else:
            self.emit([r.value for r in results])
        if len(set(values.values())) > 1:
            detail = ", ".join(f"{r.engine.value}={r.value}" for r in results)
            raise VerificationFailure(f"engines disagree on {key}: {detail}")
        return 0

    async def cmd_volume(self, args) -> int:
        polynomial = volumes.volume_polynomial(args.g, args.n, self.settings.default_engine, self.service)
        if self.fmt is OutputFormat.JSON:
            self.emit_json([r.model_dump() for r in polynomial.records()])
        elif self.fmt is OutputFormat.TSV:
            self.emit(polynomial.tsv_lines())
        else:
            self.emit(polynomial.render_lines())
        return 0

    async def cmd_alpha(self, args) -> int:
        max_weight = args.max_weight if args.max_weight is not None else self.settings.alpha_max_weight
        table = constants.alpha_table(max_weight)
        items = [(m, v) for m, v in table.sorted_items() if m.weight <= max_weight]
        if self.fmt is OutputFormat.JSON:
            entries = [TableEntry(multiindex=str(m), weight=m.weight, value=format_rational(v)) for m, v in items]
            self.emit_json([e.model_dump() for e in entries])
        else:
            self.emit([f"{m}\t{format_rational(v)}" for m, v in items])
        return 0

    async def cmd_positivity(self, args) -> int:
        max_weight = args.max_weight if args.max_weight is not None else self.settings.alpha_max_weight
        report = constants.positivity_scan(SeriesId(args.series), max_weight)
        if self.fmt is OutputFormat.JSON:
            self.emit_json(report.model_dump(mode="json"))
            return 0
        self.emit([f"{e.multiindex}\t{e.value}\t{e.sign}" for e in report.entries])
        status = "ALL-POSITIVE" if report.all_positive else f"NON-POSITIVE={len(report.non_positive)}"
        self.emit([f"SERIES {report.series.value} weight<={max_weight} {status}"])
        return 0

    async def cmd_beta(self, args) -> int:
        series = constants.beta_series(args.max_b)
        rows = []
        for b in range(args.max_b + 1):
            closed = constants.beta_closed(b)
            rows.append(
                BetaRow(b=b, closed=format_rational(closed), series=format_rational(series[b]), agrees=closed == series[b])
            )
        if self.fmt is OutputFormat.JSON:
            self.emit_json([row.model_dump() for row in rows])
        else:
            self.emit([f"{row.b}\t{row.closed}\t{row.series}\t{'ok' if row.agrees else 'MISMATCH'}" for row in rows])
        if not all(row.agrees for row in rows):
            raise VerificationFailure("beta closed form disagrees with the series inversion")
        return 0

    async def cmd_verify(self, args) -> int:
        s = self.settings
        reports: List[CheckReport] = await verify.run_battery(
            Suite(args.suite),
            s.bounds,
            g_max=s.verify_g_max,
            iz_g_max=s.verify_iz_g_max,
            trials=s.proposition_trials,
            seed=s.proposition_seed,
            max_dimension=s.engines_max_dimension,
            max_kappa_weight=s.engines_max_kappa_weight,
            alpha_max_weight=s.alpha_max_weight,
            engine=s.default_engine,
            service=self.service,
        )
        if self.fmt is OutputFormat.JSON:
            self.emit_json([r.model_dump(mode="json") for r in reports])
        else:
            self.emit([r.render() for r in reports])
        failed = [r.name for r in reports if not r.passed]
        if failed:
            raise VerificationFailure(f"{len(failed)} checks failed: {', '.join(failed)}")
        return 0


async def run_command(args: argparse.Namespace, settings: Settings, service: Optional[CorrelatorService] = None) -> int:
    runner = CommandRunner(settings, service)
    await runner.setup()
    try:
        return await runner.run(args)
    finally:
        for line in runner.output:
            print(line)
        await runner.cleanup()


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Parse arguments, run the command, map errors to exit codes."""
    try:
        args = build_parser().parse_args(argv)
        settings = settings_from_args(args)
    except KappaPsiError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return UsageError.exit_code

    configure_logging(settings.log_level, settings.log_file)
    try:
        return asyncio.run(run_command(args, settings))
    except KappaPsiError as e:
        logger.error(f"{type(e).__name__}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
