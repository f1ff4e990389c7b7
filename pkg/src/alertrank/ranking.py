"""Ordering alerts by score and measuring how much review work it saves."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence, TextIO

from .ingest import Dataset
from .scoring import AlertScore

__all__ = [
    "DEFAULT_TOP_PERCENT",
    "RankedAlert",
    "TriageReport",
    "rank",
    "reduction",
    "top_p",
    "write_ranked",
]

DEFAULT_TOP_PERCENT = 1.0


@dataclass(frozen=True)
class RankedAlert:
    rank: int  # 1 = most anomalous
    tid: int
    score: AlertScore
    raw: str


@dataclass(frozen=True)
class TriageReport:
    ranked: tuple[RankedAlert, ...]
    top_p_percent: float

    @property
    def cut(self) -> int:
        return candidate_count(len(self.ranked), self.top_p_percent)

    @property
    def candidate_true(self) -> tuple[RankedAlert, ...]:
        return self.ranked[: self.cut]


def candidate_count(n: int, p: float) -> int:
    # round() guards against 0.07 * 100 style float noise before ceil
    return min(n, math.ceil(round(p / 100.0 * n, 9)))


def rank(scores: Sequence[AlertScore], dataset: Dataset) -> list[RankedAlert]:
    """Sort alerts by ascending score; equal scores keep log order."""
    if len(scores) != dataset.n:
        raise ValueError(f"{len(scores)} scores for {dataset.n} alerts")
    order = sorted(scores, key=lambda s: (s.value, s.tid))
    return [
        RankedAlert(i, s.tid, s, dataset[s.tid].raw.text)
        for i, s in enumerate(order, start=1)
    ]


def top_p(ranked: Sequence[RankedAlert], p: float = DEFAULT_TOP_PERCENT) -> TriageReport:
    if not 0.0 < p <= 100.0:
        raise ValueError(f"top percent must be in (0, 100], got {p}")
    return TriageReport(tuple(ranked), float(p))


def reduction(ranked: Sequence[RankedAlert], attack_tids: Iterable[int]) -> float:
    """Share of the log below the worst-placed attack.

    An analyst reading from the top must reach every attack; whatever lies
    below the last one is review work avoided.
    """
    attack_tids = set(attack_tids)
    if not attack_tids:
        raise ValueError("attack_tids must not be empty")
    rank_of = {r.tid: r.rank for r in ranked}
    unknown = attack_tids - rank_of.keys()
    if unknown:
        raise ValueError(f"unknown attack tids: {sorted(unknown)}")
    n = len(ranked)
    cutoff = max(rank_of[t] for t in attack_tids)
    return (n - cutoff) / n


def worst_rank(ranked: Sequence[RankedAlert], attack_tids: Iterable[int]) -> int:
    rank_of = {r.tid: r.rank for r in ranked}
    return max(rank_of[t] for t in attack_tids)


def write_ranked(
    report: TriageReport,
    out: TextIO,
    *,
    kind: str,
    min_support: int,
) -> None:
    """Write the ranked log: a ``#`` header, then ``rank score tid line``
    separated by tabs, one alert per line."""
    n = len(report.ranked)
    out.write(
        f"# n={n}\tscore={kind}\tmin_support={min_support}"
        f"\tp={report.top_p_percent:g}\tcandidates={report.cut}\n"
    )
    for r in report.ranked:
        out.write(f"{r.rank}\t{r.score.format()}\t{r.tid}\t{r.raw}\n")
