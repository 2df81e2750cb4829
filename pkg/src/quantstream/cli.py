"""Command-line interface: ``quantstream {stream,bands,reproduce,qq,tail}``."""
import argparse
import csv
import logging
import os
import sys
import warnings
from json import JSONDecodeError
from pathlib import Path
from typing import Iterator, Optional, Sequence, TextIO

import numpy as np
from pydantic import ValidationError

from .BandReport import BandReport
from .Checkpoint import Checkpoint
from .ExitCode import ExitCode
from .ExperimentPlan import ExperimentPlan
from .JSONBaseModel import JSONBaseModel
from .OutputFormat import OutputFormat
from .QuantileState import QuantileState
from .ReservoirSample import ReservoirSample
from .RunConfig import RunConfig
from .SparsityMode import SparsityMode
from .SparsityEstimate import SparsityEstimate
from .errors import ConfigError, DomainError, InputError, NumericError, QuantStreamWarning
from .experiments import run_conditional_coverage, run_crossing, run_qq, run_table, run_tail_curve
from .inference import (independent_bridges_spec, kde_sparsity, known_sparsity, run_test,
                        simulate_critical_value, uniform_bands)
from .presets import Preset, conditional_plan, qq_plan

logger = logging.getLogger(__name__)

SEED_ENV = "QUANTSTREAM_SEED"
DEFAULT_SEED = 0
DEFAULT_TAIL_X = "0,0.01,0.02,0.05,0.1,0.2"


class UnknownPresetError(LookupError):
    pass


class _Parser(argparse.ArgumentParser):
    """Argument parser that exits with the usage code on errors."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(ExitCode.USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--beta", type=float, help="learning-rate decay exponent in (1/2, 1) (default 0.7)")
    common.add_argument("--c-gamma", dest="c_gamma", type=float, help="learning-rate scale (default 1)")
    common.add_argument("--a", type=float, help="smoothing-width multiple, > 1/2 (default 1)")
    common.add_argument("--grid", help="comma-separated quantile levels (default 0.1,...,0.9)")
    common.add_argument("--alpha", type=float, help="test / band level (default 0.05)")
    common.add_argument("--seed", type=int, help=f"random seed (default ${SEED_ENV}, then {DEFAULT_SEED})")
    common.add_argument("--reps", type=int, help="Monte Carlo replications")
    common.add_argument("--sparsity", help="'kde' or 'known:<normal|t<df>>'")
    common.add_argument("--bridge-reps", dest="bridge_reps", type=int,
                        help="draws of the limiting maximum (default 100000)")
    common.add_argument("--format", choices=[f.value for f in OutputFormat], help="output format (default json)")
    common.add_argument("--output", type=Path, help="output file (default standard output)")
    common.add_argument("-v", "--verbose", action="store_true", help="log progress")
    common.add_argument("-q", "--quiet", action="store_true", help="log errors only")

    parser = _Parser(prog="quantstream",
                     description="Streaming multi-quantile estimation with simultaneous inference")
    commands = parser.add_subparsers(dest="command", required=True)

    stream = commands.add_parser("stream", parents=[common], help="estimate quantiles of a CSV stream")
    stream.add_argument("input", nargs="?", type=Path, help="CSV file, one observation vector per line (default stdin)")
    stream.add_argument("--checkpoint", type=Path, help="write a resumable checkpoint here")
    stream.add_argument("--resume", type=Path, help="start from this checkpoint")
    stream.add_argument("--infer", action="store_true", help="test the quantiles given by --null")
    stream.add_argument("--null", type=Path, help="CSV of null quantiles, one row per series")

    bands = commands.add_parser("bands", parents=[common], help="uniform confidence bands for a CSV data file")
    bands.add_argument("input", type=Path, help="CSV file, one observation vector per line")

    reproduce = commands.add_parser("reproduce", parents=[common], help="run a named Monte Carlo study")
    reproduce.add_argument("preset", help=", ".join(p.value for p in Preset))
    reproduce.add_argument("--sizes", help="comma-separated sample sizes replacing the preset's")

    for name, text in (("qq", "QQ data of the test statistic"), ("tail", "tail frequencies of the estimates")):
        sub = commands.add_parser(name, parents=[common], help=text)
        sub.add_argument("--dgp", help="standard_normal, student_t or cond_normal_variance_x")
        sub.add_argument("--df", type=float, help="degrees of freedom of student_t (default 10)")
        sub.add_argument("--n", type=int, help="observations per replication")
        if name == "tail":
            sub.add_argument("--tau", type=float, help="quantile level (default 0.5)")
            sub.add_argument("--x", help=f"comma-separated thresholds (default {DEFAULT_TAIL_X})")
    return parser


def _configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.ERROR if quiet else logging.INFO if verbose else logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    # flagged conditions are already logged by errors.warn
    warnings.simplefilter("ignore", QuantStreamWarning)


def _resolve_seed(seed: Optional[int]) -> int:
    if seed is not None:
        return seed
    value = os.environ.get(SEED_ENV)
    if value is None:
        return DEFAULT_SEED
    try:
        return int(value)
    except ValueError as e:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {value!r}", field="seed") from e


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    options = {key: value for key, value in vars(args).items()
               if key not in ("verbose", "quiet") and value is not None}
    options["seed"] = _resolve_seed(args.seed)
    if not options.get("infer", True):
        options.pop("infer")
    return RunConfig.model_validate(options)


def _parse_row(row: list[str], line: int) -> np.ndarray:
    for cell in row:
        # float() also takes digit separators and non-ASCII digits
        if "_" in cell or not cell.isascii():
            raise InputError(f"not a number: {cell.strip()!r}", line=line)
    try:
        values = np.array([float(cell) for cell in row], dtype=float)
    except ValueError as e:
        raise InputError(f"not a number: {e}", line=line) from e
    if not np.all(np.isfinite(values)):
        raise InputError("values must be finite", line=line)
    return values


def read_rows(handle: TextIO) -> Iterator[tuple[int, np.ndarray]]:
    """Yields (1-based line, values) for every non-blank CSV line."""
    reader = csv.reader(handle)
    for row in reader:
        if not row or all(not cell.strip() for cell in row):
            continue
        yield reader.line_num, _parse_row(row, reader.line_num)


def _open_input(path: Optional[Path]) -> TextIO:
    if path is None or str(path) == "-":
        return sys.stdin
    return open(path, encoding="utf-8", newline="")


def consume(config: RunConfig, checkpoint: Optional[Checkpoint] = None) -> Checkpoint:
    """Streams the input of ``config`` through the estimator and the reservoir.

    Raises:
        InputError: On a malformed line (carrying its number) or when there is
            nothing to estimate from
    """
    state = checkpoint.state if checkpoint else None
    reservoir = checkpoint.reservoir if checkpoint else None
    handle = _open_input(config.input)
    try:
        for line, values in read_rows(handle):
            if state is None:
                state = QuantileState.init(values.size, config.grid, config.schedule())
                reservoir = ReservoirSample.create(values.size, seed=config.seed)
            if values.size != state.series_count:
                raise InputError(f"expected {state.series_count} values, got {values.size}", line=line)
            state.update(values)
            reservoir.offer(values)
    finally:
        if handle is not sys.stdin:
            handle.close()
    if state is None:
        raise InputError("input contains no observations", field="input")
    logger.info("Consumed input, estimator is at step %d", state.step)
    return Checkpoint(state=state, reservoir=reservoir)


def _sparsity(config: RunConfig, checkpoint: Checkpoint) -> SparsityEstimate:
    state = checkpoint.state
    if config.sparsity_mode(SparsityMode.KDE) == SparsityMode.KNOWN:
        return known_sparsity(config.known_distribution(), state.grid, state.series_count)
    reservoir = checkpoint.reservoir
    return kde_sparsity([reservoir.column(i) for i in range(reservoir.width)], state)


def _read_null(path: Path, state: QuantileState) -> np.ndarray:
    with open(path, encoding="utf-8", newline="") as handle:
        rows = [values for _, values in read_rows(handle)]
    null = np.array(rows, dtype=float) if rows else np.empty((0, 0))
    if null.shape != state.averaged.shape:
        raise InputError(f"null quantiles must be a {state.series_count} x {len(state.grid)} table",
                         field="null")
    return null


def _load_checkpoint(path: Path) -> Checkpoint:
    try:
        return Checkpoint.load(path)
    except (ValidationError, JSONDecodeError) as e:
        raise InputError(f"not a valid checkpoint: {e}", field="resume") from e


def cmd_stream(config: RunConfig) -> JSONBaseModel:
    resumed = _load_checkpoint(config.resume) if config.resume else None
    checkpoint = consume(config, resumed)
    if config.checkpoint:
        checkpoint.save(config.checkpoint)
        logger.info("Checkpoint written to %s", config.checkpoint)
    if not config.infer:
        return checkpoint.state
    if config.null is None:
        raise ConfigError("--infer needs --null", field="null")
    state = checkpoint.state
    spec = independent_bridges_spec(state.grid, state.series_count, config.bridge_reps, seed=config.seed)
    return run_test(state, _read_null(config.null, state), _sparsity(config, checkpoint), spec, config.alpha)


def cmd_bands(config: RunConfig) -> JSONBaseModel:
    checkpoint = consume(config)
    state = checkpoint.state
    spec = independent_bridges_spec(state.grid, state.series_count, config.bridge_reps, seed=config.seed)
    critical = simulate_critical_value(spec, config.alpha)
    bands = uniform_bands(state, _sparsity(config, checkpoint), critical)
    return BandReport(alpha=config.alpha, critical_value=critical, step=state.step, bands=bands)


def cmd_reproduce(config: RunConfig) -> JSONBaseModel:
    try:
        preset = Preset(config.preset)
    except ValueError as e:
        raise UnknownPresetError(f"unknown preset {config.preset!r}; choose from "
                                 f"{', '.join(p.value for p in Preset)}") from e
    n = config.sizes[0] if config.sizes else None
    if preset.is_table:
        return run_table(preset, replications=config.reps, sizes=config.sizes, seed=config.seed)
    if preset == Preset.CONDITIONAL:
        return run_conditional_coverage(conditional_plan(config.reps, n=n or 4000, seed=config.seed))
    if preset == Preset.QQ:
        return run_qq(qq_plan(config.reps, n=n or 4000, seed=config.seed))
    return run_crossing(n=n or 1000, replications=config.reps or 100, schedule=config.schedule(),
                        seed=config.seed)


def _plan(config: RunConfig) -> ExperimentPlan:
    mode = config.sparsity_mode(SparsityMode.KNOWN)
    return ExperimentPlan(dgp=config.dgp, df=config.df, n=config.n or 4000, replications=config.reps or 1000,
                          beta=config.beta, c_gamma=config.c_gamma, a=config.a, grid=config.grid,
                          sparsity_mode=mode, seed=config.seed, bridge_replications=config.bridge_reps)


def cmd_qq(config: RunConfig) -> JSONBaseModel:
    return run_qq(_plan(config))


def cmd_tail(config: RunConfig) -> JSONBaseModel:
    x = config.x if config.x is not None else [float(v) for v in DEFAULT_TAIL_X.split(",")]
    return run_tail_curve(config.dgp, config.n or 1000, config.tau, x, config.reps or 1000,
                          config.schedule(), seed=config.seed, df=config.df)


COMMANDS = {
    "stream": cmd_stream,
    "bands": cmd_bands,
    "reproduce": cmd_reproduce,
    "qq": cmd_qq,
    "tail": cmd_tail,
}


def _write(text: str, output: Optional[Path]) -> None:
    if output is None:
        sys.stdout.write(text)
    else:
        output.write_text(text, encoding="utf-8")


def _validation_message(error: ValidationError) -> str:
    first = error.errors()[0]
    field = ".".join(str(part) for part in first["loc"]) or "input"
    return f"invalid value for '{field}': {first['msg']}"


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Runs one command and returns its exit code."""
    args = build_parser().parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        config = _config_from_args(args)
    except ValidationError as e:
        logger.error(_validation_message(e))
        return ExitCode.USAGE
    except ConfigError as e:
        logger.error(str(e))
        return ExitCode.USAGE
    try:
        result = COMMANDS[config.command](config)
        _write(result.render(config.format), config.output)
    except UnknownPresetError as e:
        logger.error(str(e))
        return ExitCode.UNKNOWN_PRESET
    except InputError as e:
        logger.error(str(e))
        return ExitCode.MALFORMED_INPUT
    except NumericError as e:
        logger.error(str(e))
        return ExitCode.NUMERIC
    except (ConfigError, DomainError) as e:
        logger.error(str(e))
        return ExitCode.USAGE
    except ValidationError as e:
        logger.error(_validation_message(e))
        return ExitCode.USAGE
    except OSError as e:
        logger.error("%s: %s", getattr(e, "filename", None) or "I/O error", e.strerror or e)
        return ExitCode.IO
    return ExitCode.OK


if __name__ == "__main__":
    sys.exit(main())
