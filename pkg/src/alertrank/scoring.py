"""Per-alert outlier scores from a mined pattern set.

Two scores are offered.  ``fpof`` is the Frequent Pattern Outlier Factor:
the relative supports of the frequent patterns an alert contains, summed
and divided by the number of frequent patterns, so it lies in [0, 1].
``simple`` just counts the frequent patterns an alert contains.  Either
way, a low score means the alert looks unlike the bulk of the log.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .ingest import Dataset, Transaction
from .miner import FrequentPatternSet

__all__ = [
    "AlertScore",
    "ScoreKind",
    "UndefinedScoreError",
    "fpof",
    "score_all",
    "simple_fpof",
]


class ScoreKind(str, enum.Enum):
    FPOF = "fpof"
    SIMPLE = "simple"

    def __str__(self) -> str:
        return self.value


class UndefinedScoreError(ValueError):
    """FPOF over an empty pattern set would divide by zero."""


@dataclass(frozen=True)
class AlertScore:
    tid: int
    value: float | int
    kind: ScoreKind

    def format(self) -> str:
        if self.kind is ScoreKind.SIMPLE:
            return str(int(self.value))
        return f"{self.value:.6f}"


def _check_fpof_defined(fps: FrequentPatternSet) -> None:
    if not fps.patterns or fps.dataset_size < 1:
        raise UndefinedScoreError("FPOF is undefined for an empty frequent pattern set")


def fpof(t: Transaction, fps: FrequentPatternSet) -> float:
    _check_fpof_defined(fps)
    total = sum(p.support for p in fps.patterns if p.contained_in(t))
    return total / (fps.dataset_size * len(fps.patterns))


def simple_fpof(t: Transaction, fps: FrequentPatternSet) -> int:
    return sum(1 for p in fps.patterns if p.contained_in(t))


def score_all(dataset: Dataset, fps: FrequentPatternSet, kind: ScoreKind | str = ScoreKind.FPOF) -> list[AlertScore]:
    """Score every transaction of ``dataset``, in tid order.

    Rather than testing each pattern against each alert, every pattern
    credits the alerts in its own tid list, so the cost is the total length
    of all tid lists.  Patterns with identical tid lists are credited in one
    pass.
    """
    kind = ScoreKind(kind)
    if fps.dataset_size != dataset.n:
        raise ValueError(
            f"pattern set was mined from {fps.dataset_size} alerts, dataset has {dataset.n}"
        )
    if dataset.n == 0:
        return []
    if kind is ScoreKind.FPOF:
        _check_fpof_defined(fps)

    grouped: dict[tuple[int, ...], int] = {}
    for p in fps.patterns:
        grouped[p.tids] = grouped.get(p.tids, 0) + 1

    # int64 is exact here; python ints would be too slow at log scale
    acc = np.zeros(dataset.n, dtype=np.int64)
    for tids, count in grouped.items():
        weight = count if kind is ScoreKind.SIMPLE else count * len(tids)
        acc[np.fromiter(tids, dtype=np.int64, count=len(tids))] += weight

    if kind is ScoreKind.SIMPLE:
        return [AlertScore(tid, int(v), kind) for tid, v in enumerate(acc.tolist())]
    denom = dataset.n * len(fps.patterns)
    return [AlertScore(tid, v / denom, kind) for tid, v in enumerate(acc.tolist())]
