"""Parsing of whitespace-delimited IDS alert logs into transactions.

Every alert line becomes one transaction.  Its items are the whitespace
tokens of the line tagged with their field position, so ``(3,
"WEB-MISC/doc/access")`` and ``(4, "WEB-MISC/doc/access")`` are different
items.  A frequent pattern over such items reads as a line template with
wildcards at the positions it does not fix.

Basket mode (``positional=False``) drops the position and treats a line
as a plain set of tokens, which is what textbook itemset tables look like.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import total_ordering
from typing import BinaryIO, Iterable, Iterator

__all__ = [
    "Dataset",
    "DegenerateTransactionError",
    "IngestConfig",
    "Item",
    "LogReadError",
    "RawAlert",
    "Transaction",
    "parse_log",
    "read_log",
    "tokenize_line",
]

# ASCII whitespace only; str.split() would also split on U+0085 and friends.
_WS = re.compile(r"[ \t\n\r\x0b\x0c]+")


class LogReadError(OSError):
    """The alert log could not be read."""

    def __init__(self, message: str, lineno: int | None = None):
        super().__init__(message if lineno is None else f"line {lineno}: {message}")
        self.lineno = lineno


class DegenerateTransactionError(ValueError):
    """A line produced no items after field filtering."""

    def __init__(self, tid: int):
        super().__init__(f"transaction {tid} has no items left after ignoring fields")
        self.tid = tid


@total_ordering
@dataclass(frozen=True)
class Item:
    """A token at a field position.  ``field_index`` is None in basket mode."""

    field_index: int | None
    token: str

    @property
    def sort_key(self) -> tuple[int, str]:
        # str order is code point order, which matches UTF-8 byte order
        return (-1 if self.field_index is None else self.field_index, self.token)

    def __lt__(self, other: Item) -> bool:
        if not isinstance(other, Item):
            return NotImplemented
        return self.sort_key < other.sort_key

    def __str__(self) -> str:
        if self.field_index is None:
            return self.token
        return f"{self.field_index}={self.token}"


@dataclass(frozen=True)
class RawAlert:
    tid: int
    line: str  # includes the original terminator, if there was one

    @property
    def text(self) -> str:
        """The line without its trailing newline."""
        return self.line.rstrip("\r\n")

    def to_bytes(self) -> bytes:
        return self.line.encode("utf-8", "surrogateescape")


@dataclass(frozen=True)
class Transaction:
    tid: int
    items: frozenset[Item]
    raw: RawAlert

    def __len__(self) -> int:
        return len(self.items)


@dataclass(frozen=True)
class Dataset:
    transactions: tuple[Transaction, ...] = ()

    @property
    def n(self) -> int:
        return len(self.transactions)

    def __len__(self) -> int:
        return len(self.transactions)

    def __iter__(self) -> Iterator[Transaction]:
        return iter(self.transactions)

    def __getitem__(self, tid: int) -> Transaction:
        return self.transactions[tid]

    @classmethod
    def from_lines(cls, lines: Iterable[str], config: IngestConfig | None = None) -> Dataset:
        """Build a dataset from already-decoded lines (mostly for tests)."""
        config = config or IngestConfig()
        transactions = []
        for line in lines:
            if not line.strip():
                continue
            transactions.append(tokenize_line(line, len(transactions), config))
        return cls(tuple(transactions))


@dataclass(frozen=True)
class IngestConfig:
    ignore_fields: frozenset[int] = field(default_factory=frozenset)
    positional: bool = True

    def __post_init__(self):
        object.__setattr__(self, "ignore_fields", frozenset(self.ignore_fields))
        if any(i < 0 for i in self.ignore_fields):
            raise ValueError("ignore_fields must be non-negative positions")


def tokenize_line(line: str, tid: int, config: IngestConfig | None = None) -> Transaction:
    """Turn one alert line into a transaction of (position, token) items.

    Runs of ASCII whitespace separate tokens.  Positions listed in
    ``config.ignore_fields`` are dropped but still counted, so the
    remaining items keep their original positions.
    """
    config = config or IngestConfig()
    tokens = [tok for tok in _WS.split(line) if tok]
    if not tokens:
        raise ValueError(f"transaction {tid}: blank line")
    items = frozenset(
        Item(i if config.positional else None, tok)
        for i, tok in enumerate(tokens)
        if i not in config.ignore_fields
    )
    if not items:
        raise DegenerateTransactionError(tid)
    return Transaction(tid, items, RawAlert(tid, line))


def parse_log(source: BinaryIO, config: IngestConfig | None = None) -> Dataset:
    """Read a byte stream with one alert per line.

    Blank lines are skipped and tids stay dense.  Bytes that are not valid
    UTF-8 survive via ``surrogateescape`` so raw lines round-trip exactly.
    """
    config = config or IngestConfig()
    transactions: list[Transaction] = []
    lineno = 0
    while True:
        try:
            chunk = source.readline()
        except (OSError, ValueError) as exc:
            raise LogReadError(str(exc), lineno + 1) from exc
        if not chunk:
            break
        lineno += 1
        if isinstance(chunk, str):
            line = chunk
        else:
            line = chunk.decode("utf-8", "surrogateescape")
        if not line.strip(" \t\n\r\x0b\x0c"):
            continue
        transactions.append(tokenize_line(line, len(transactions), config))
    return Dataset(tuple(transactions))


def read_log(path, config: IngestConfig | None = None) -> Dataset:
    try:
        fh = open(path, "rb")
    except OSError as exc:
        raise LogReadError(f"cannot open {path}: {exc.strerror or exc}") from exc
    with fh:
        return parse_log(fh, config)
