"""Command line front end.

    alertrank rank  [LOG] --min-support 2 --score simple --out ranked.tsv
    alertrank mine  [LOG] --min-support 50% --out patterns.tsv
    alertrank eval  --supports 2,4,6 --seed 42 --out sweep.tsv

Every command is a plain batch job: rerun it (from cron, a systemd timer,
by hand) whenever the sensor log rolls over.  Output files are written to
a temporary name and renamed into place, so a failed run never leaves a
half-written file behind.

Exit codes: 0 ok, 1 I/O error, 2 bad arguments, 3 degenerate input.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import logging
import os
import sys
import tempfile
from pathlib import Path
from typing import Iterator, Sequence, TextIO

from .evaluation import SyntheticSpec, generate_log, sweep
from .ingest import Dataset, DegenerateTransactionError, IngestConfig, LogReadError, parse_log, read_log
from .miner import MinerConfig, mine, write_patterns
from .ranking import DEFAULT_TOP_PERCENT, rank, top_p, write_ranked
from .scoring import ScoreKind, UndefinedScoreError, score_all

log = logging.getLogger("alertrank")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_DEGENERATE = 0, 1, 2, 3

EVAL_DEFAULT_MAX_LEN = 6


class ConfigError(ValueError):
    pass


class DegenerateInput(ValueError):
    pass


def parse_min_support(text: str) -> int | float:
    """``"2"`` is an absolute count, ``"50%"`` a fraction of the log."""
    text = text.strip()
    try:
        if text.endswith("%"):
            pct = float(text[:-1])
            if not 0.0 < pct <= 100.0:
                raise argparse.ArgumentTypeError(f"percentage must be in (0, 100]: {text}")
            return pct / 100.0
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or N%, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"absolute support must be >= 1, got {value}")
    return value


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}") from None


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {value}")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="alertrank",
        description="Rank IDS alerts so rare ones come first, using frequent pattern outlier factors.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--ignore-fields", type=_int_list, default=[],
                        help="comma separated 0-based field positions to leave out")
    common.add_argument("--max-pattern-len", type=_positive_int, default=None)
    common.add_argument("--basket", action="store_true",
                        help="treat each line as a plain set of tokens, ignoring field positions")
    common.add_argument("--workers", type=_positive_int, default=1,
                        help="threads used while mining; output does not depend on it")
    common.add_argument("--out", type=Path, default=None, help="output file (default: stdout)")

    mining = argparse.ArgumentParser(add_help=False)
    mining.add_argument("--min-support", type=parse_min_support, default=2,
                        help="absolute count (e.g. 2) or percentage (e.g. 50%%); default 2")

    p = sub.add_parser("rank", parents=[common, mining], help="write the alert log ordered by outlier score")
    p.add_argument("input", nargs="?", type=Path, help="alert log (default: stdin)")
    p.add_argument("--score", choices=[k.value for k in ScoreKind], default=ScoreKind.SIMPLE.value)
    p.add_argument("--top-percent", type=float, default=DEFAULT_TOP_PERCENT)

    p = sub.add_parser("mine", parents=[common, mining], help="dump frequent patterns with their alert lists")
    p.add_argument("input", nargs="?", type=Path, help="alert log (default: stdin)")

    p = sub.add_parser("eval", parents=[common], help="support sweep on a synthetic or labelled log")
    p.add_argument("input", nargs="?", type=Path,
                   help="alert log to evaluate; needs --attack-tids (default: synthesize one)")
    p.add_argument("--attack-tids", type=Path, help="file of attack tids, comma or newline separated")
    p.add_argument("--supports", type=_int_list, default=[2, 4, 6])
    p.add_argument("--score", choices=[k.value for k in ScoreKind], default=ScoreKind.SIMPLE.value)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--n-routine", type=int, default=10_000)
    p.add_argument("--n-attacks", type=_positive_int, default=5)
    p.add_argument("--attack-ip", default="203.0.113.66")
    p.add_argument("--plot-data", type=Path, help="also write support vs. attack placement columns here")
    return parser


@contextlib.contextmanager
def atomic_output(path: Path | None) -> Iterator[TextIO]:
    """Yield a text stream; for a path, it only appears once fully written."""
    if path is None:
        buf = io.StringIO()
        yield buf
        out = sys.stdout.buffer if hasattr(sys.stdout, "buffer") else None
        data = buf.getvalue()
        if out is None:
            sys.stdout.write(data)
        else:
            out.write(data.encode("utf-8", "surrogateescape"))
            out.flush()
        return
    path = Path(path)
    fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", errors="surrogateescape", newline="\n") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise


def _load(args) -> Dataset:
    config = IngestConfig(frozenset(args.ignore_fields), positional=not args.basket)
    if args.input is None:
        return parse_log(sys.stdin.buffer, config)
    return read_log(args.input, config)


def _miner_config(args) -> MinerConfig:
    return MinerConfig(args.min_support, args.max_pattern_len)


def cmd_rank(args) -> int:
    dataset = _load(args)
    if dataset.n == 0:
        raise DegenerateInput("input has no alerts")
    config = _miner_config(args)
    fps = mine(dataset, config, workers=args.workers)
    kind = ScoreKind(args.score)
    if kind is ScoreKind.FPOF and not fps.patterns:
        raise DegenerateInput(f"no frequent patterns at min support {fps.min_support_abs}; FPOF undefined")
    report = top_p(rank(score_all(dataset, fps, kind), dataset), args.top_percent)
    with atomic_output(args.out) as out:
        write_ranked(report, out, kind=kind.value, min_support=fps.min_support_abs)
    print(f"n={dataset.n} patterns={len(fps)} top {report.top_p_percent:g}% = {report.cut} alerts",
          file=sys.stderr)
    return EXIT_OK


def cmd_mine(args) -> int:
    dataset = _load(args)
    if dataset.n == 0:
        raise DegenerateInput("input has no alerts")
    fps = mine(dataset, _miner_config(args), workers=args.workers)
    with atomic_output(args.out) as out:
        write_patterns(fps, out)
    print(f"n={dataset.n} min_support={fps.min_support_abs} patterns={len(fps)}", file=sys.stderr)
    return EXIT_OK


def _read_tids(path: Path) -> set[int]:
    try:
        text = path.read_text()
    except OSError as exc:
        raise LogReadError(f"cannot read {path}: {exc.strerror or exc}") from exc
    try:
        return {int(tok) for tok in text.replace(",", " ").split()}
    except ValueError:
        raise ConfigError(f"{path}: attack tids must be integers") from None


def cmd_eval(args) -> int:
    if not args.supports:
        raise ConfigError("--supports needs at least one value")
    if any(s < 2 for s in args.supports):
        raise ConfigError("swept supports must be >= 2")
    max_len = args.max_pattern_len or EVAL_DEFAULT_MAX_LEN
    if args.input is not None:
        if args.attack_tids is None:
            raise ConfigError("an input log needs --attack-tids")
        dataset = _load(args)
        attack_tids = _read_tids(args.attack_tids)
        if not attack_tids:
            raise ConfigError("attack tid file is empty")
    else:
        if args.n_routine < 0:
            raise ConfigError("--n-routine must be >= 0")
        spec = SyntheticSpec(
            n_routine=args.n_routine,
            n_attacks=args.n_attacks,
            attack_source_ip=args.attack_ip,
            seed=args.seed,
        )
        dataset, attack_tids = generate_log(spec, IngestConfig(frozenset(args.ignore_fields)))
    if dataset.n == 0:
        raise DegenerateInput("input has no alerts")
    result = sweep(dataset, attack_tids, args.supports, args.score,
                   max_pattern_len=max_len, workers=args.workers)
    with atomic_output(args.out) as out:
        result.write_tsv(out)
    if args.plot_data is not None:
        with atomic_output(args.plot_data) as out:
            result.write_plot_data(out)
    for row in result.rows:
        print(f"support={row.min_support} patterns={row.pattern_count} "
              f"worst attack rank={row.worst_attack_rank} reduction={row.reduction_pct:.3f}%",
              file=sys.stderr)
    return EXIT_OK


COMMANDS = {"rank": cmd_rank, "mine": cmd_mine, "eval": cmd_eval}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="alertrank: %(message)s",
        stream=sys.stderr,
    )
    try:
        return COMMANDS[args.command](args)
    except (DegenerateInput, DegenerateTransactionError, UndefinedScoreError) as exc:
        log.error("%s", exc)
        return EXIT_DEGENERATE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO
    except ValueError as exc:
        log.error("%s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
