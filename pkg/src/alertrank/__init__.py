"""Rank IDS alerts by how unusual they are relative to the frequent patterns of the log."""

from .ingest import Dataset, IngestConfig, Item, RawAlert, Transaction, parse_log, read_log, tokenize_line
from .miner import (
    FrequentPatternSet,
    MinerConfig,
    Pattern,
    brute_force_mine,
    candidate_gen,
    mine,
    tidlist_intersect,
)
from .ranking import RankedAlert, TriageReport, rank, reduction, top_p
from .scoring import AlertScore, ScoreKind, fpof, score_all, simple_fpof

__version__ = "0.1.0"

__all__ = [
    "AlertScore",
    "Dataset",
    "FrequentPatternSet",
    "IngestConfig",
    "Item",
    "MinerConfig",
    "Pattern",
    "RankedAlert",
    "RawAlert",
    "ScoreKind",
    "Transaction",
    "TriageReport",
    "brute_force_mine",
    "candidate_gen",
    "fpof",
    "mine",
    "parse_log",
    "rank",
    "read_log",
    "reduction",
    "score_all",
    "simple_fpof",
    "tidlist_intersect",
    "tokenize_line",
    "top_p",
]
