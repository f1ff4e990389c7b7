"""Synthetic alert logs with planted attacks, and the min-support sweep.

Routine alerts are drawn from a handful of line templates laid out like a
Snort sensor export (sensor, counter, sig-id, signature, class, priority,
date, time, source, destination, protocol, bytes, port).  Attacks come
from one fixed source address and carry a signature no routine template
uses.  The sweep mines, scores and ranks the log at each support value
and records where the last attack landed.
"""

from __future__ import annotations

import ipaddress
import random
import string
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence, TextIO

from .ingest import Dataset, IngestConfig
from .miner import MinerConfig, mine
from .ranking import rank, reduction, worst_rank
from .scoring import ScoreKind, score_all

__all__ = [
    "DEFAULT_ATTACK_TEMPLATES",
    "DEFAULT_TEMPLATES",
    "SweepResult",
    "SweepRow",
    "SyntheticSpec",
    "generate_log",
    "sweep",
]

# (template, relative weight); weights mimic a log dominated by a few noisy rules
DEFAULT_TEMPLATES: tuple[tuple[str, float], ...] = (
    ("7 {counter} 1852 WEB-MISC/robots.txt/access 25 2 {date} {time} {src} {web} 6 {bytes} 80", 30),
    ("7 {counter} 508 WEB-MISC/doc/access 25 2 {date} {time} {src} {web} 6 {bytes} 80", 20),
    ("7 {counter} 384 ICMP/PING 29 3 {date} {time} {src} {dst} 1 {bytes} 0", 18),
    ("7 {counter} 1417 SNMP/request/udp 30 2 {date} {time} {src} {dst} 17 {bytes} 161", 12),
    ("7 {counter} 553 POLICY/FTP/anonymous-login 22 3 {date} {time} {src} {ftp} 6 {bytes} 21", 8),
    ("7 {counter} 618 SCAN/Squid-Proxy-attempt 24 2 {date} {time} {src} {dst} 6 {bytes} 3128", 6),
    ("7 {counter} 990 WEB-IIS/_vti_inf/access 25 2 {date} {time} {src} {web} 6 {bytes} 80", 4),
    ("7 {counter} 537 NETBIOS/SMB/IPC$-share-access 26 3 {date} {time} {src} {dst} 6 {bytes} 139", 2),
)

# one signature per planted attack; all of them share the attacker address
DEFAULT_ATTACK_TEMPLATES: tuple[str, ...] = (
    "7 {counter} 2123 SHELLCODE/x86-setuid-0 31 1 {date} {time} {attack_ip} {dst} 6 {bytes} 4444",
    "7 {counter} 1002 WEB-IIS/cmd.exe-access 32 1 {date} {time} {attack_ip} {web} 6 {bytes} 8080",
    "7 {counter} 2465 NETBIOS/SMB-DS/IPC$-unicode-share-access 33 1 {date} {time} {attack_ip} {dst} 6 {bytes} 445",
    "7 {counter} 1256 WEB-IIS/CodeRed-v2-root.exe-access 34 1 {date} {time} {attack_ip} {web} 6 {bytes} 8000",
    "7 {counter} 2003 MS-SQL/Worm-propagation-attempt 35 1 {date} {time} {attack_ip} {dst} 17 {bytes} 1434",
)

_SLOTS = {"counter", "date", "time", "src", "dst", "web", "ftp", "bytes", "attack_ip"}


@dataclass(frozen=True)
class SyntheticSpec:
    templates: tuple = DEFAULT_TEMPLATES
    n_routine: int = 10_000
    n_attacks: int = 5
    attack_source_ip: str = "203.0.113.66"
    seed: int = 42
    attack_templates: tuple[str, ...] = DEFAULT_ATTACK_TEMPLATES
    date: str = "6/22/2010"
    n_sources: int = 60
    n_servers: int = 12

    def __post_init__(self):
        if not self.templates:
            raise ValueError("at least one routine template is required")
        if self.n_attacks < 1:
            raise ValueError("n_attacks must be >= 1")
        if self.n_routine < 0:
            raise ValueError("n_routine must be >= 0")
        if not self.attack_templates:
            raise ValueError("at least one attack template is required")
        for tpl in (*self._template_strings(), *self.attack_templates):
            names = {f for _, f, _, _ in string.Formatter().parse(tpl) if f}
            if names - _SLOTS:
                raise ValueError(f"unknown template slots {sorted(names - _SLOTS)} in {tpl!r}")
        if any("{attack_ip}" not in tpl for tpl in self.attack_templates):
            raise ValueError("every attack template must place {attack_ip}")
        ipaddress.ip_address(self.attack_source_ip)

    def _template_strings(self) -> list[str]:
        return [t[0] if isinstance(t, tuple) else t for t in self.templates]

    def weighted_templates(self) -> tuple[list[str], list[float]]:
        tpls, weights = [], []
        for t in self.templates:
            if isinstance(t, tuple):
                tpls.append(t[0])
                weights.append(float(t[1]))
            else:
                tpls.append(t)
                weights.append(1.0)
        return tpls, weights


def _ip_token(addr: str) -> str:
    return str(int(ipaddress.ip_address(addr)))


def _clock(minute: int) -> str:
    h, m = divmod(minute, 60)
    suffix = "AM" if h < 12 else "PM"
    return f"{(h % 12) or 12}:{m:02d}{suffix}"


def generate_log(spec: SyntheticSpec, config: IngestConfig | None = None) -> tuple[Dataset, set[int]]:
    """Render ``spec`` to a dataset plus the tids of the planted attacks.

    Everything is drawn from one ``random.Random(spec.seed)``, so the same
    spec always yields the same log.
    """
    rng = random.Random(spec.seed)
    tpls, weights = spec.weighted_templates()
    attack_ip = _ip_token(spec.attack_source_ip)

    # 10.0.0.0/8 hosts, 192.168.0.0/16 servers; both exclude the attacker
    sources = rng.sample(range(int(ipaddress.ip_address("10.0.0.1")),
                               int(ipaddress.ip_address("10.255.255.254"))), spec.n_sources)
    servers = rng.sample(range(int(ipaddress.ip_address("192.168.0.1")),
                               int(ipaddress.ip_address("192.168.255.254"))), spec.n_servers)
    pools = {
        "src": [str(a) for a in sources if str(a) != attack_ip],
        "dst": [str(a) for a in servers if str(a) != attack_ip],
    }
    pools["web"] = pools["dst"][:3]
    pools["ftp"] = pools["dst"][3:4] or pools["dst"][:1]

    total = spec.n_routine + spec.n_attacks
    attack_tids = set(rng.sample(range(total), spec.n_attacks))
    attack_no = 0
    lines = []
    for tid in range(total):
        values = {
            "counter": str(tid + 1),
            "date": spec.date,
            "time": _clock(rng.randrange(24 * 60)),
            "src": rng.choice(pools["src"]),
            "dst": rng.choice(pools["dst"]),
            "web": rng.choice(pools["web"]),
            "ftp": rng.choice(pools["ftp"]),
            "bytes": f"{rng.randrange(1000, 100_000):,}",
            "attack_ip": attack_ip,
        }
        if tid in attack_tids:
            tpl = spec.attack_templates[attack_no % len(spec.attack_templates)]
            line = tpl.format(**values)
            attack_no += 1
        else:
            line = rng.choices(tpls, weights)[0].format(**values)
        lines.append(line + "\n")
    return Dataset.from_lines(lines, config), attack_tids


@dataclass(frozen=True)
class SweepRow:
    min_support: int
    pattern_count: int
    worst_attack_rank: int
    reduction: float

    @property
    def reduction_pct(self) -> float:
        return 100.0 * self.reduction


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...] = field(default_factory=tuple)
    n: int = 0

    def write_tsv(self, out: TextIO) -> None:
        out.write("min_support\tpattern_count\tworst_attack_rank\treduction_pct\n")
        for r in self.rows:
            out.write(f"{r.min_support}\t{r.pattern_count}\t{r.worst_attack_rank}\t{r.reduction_pct:.3f}\n")

    def write_plot_data(self, out: TextIO) -> None:
        """Two whitespace columns (support, attack placement) for gnuplot & co."""
        out.write("# min_support worst_attack_rank\n")
        for r in self.rows:
            out.write(f"{r.min_support} {r.worst_attack_rank}\n")


def _sweep_one(dataset, attack_tids, support, kind, max_pattern_len, workers):
    fps = mine(dataset, MinerConfig(support, max_pattern_len), workers=workers)
    ranked = rank(score_all(dataset, fps, kind), dataset)
    return SweepRow(support, len(fps), worst_rank(ranked, attack_tids), reduction(ranked, attack_tids))


def sweep(
    dataset: Dataset,
    attack_tids: Iterable[int],
    supports: Sequence[int],
    kind: ScoreKind | str = ScoreKind.SIMPLE,
    *,
    max_pattern_len: int | None = None,
    workers: int = 1,
) -> SweepResult:
    """Mine, score and rank once per support value.

    Rows come back sorted by support regardless of ``workers``.
    """
    if not supports:
        raise ValueError("supports must not be empty")
    if any(isinstance(s, bool) or int(s) != s or s < 2 for s in supports):
        raise ValueError("every swept support must be an integer >= 2")
    attack_tids = frozenset(attack_tids)
    kind = ScoreKind(kind)
    ordered = sorted({int(s) for s in supports})
    args = (dataset, attack_tids)
    if workers > 1 and len(ordered) > 1:
        with ThreadPoolExecutor(min(workers, len(ordered))) as pool:
            rows = list(pool.map(lambda s: _sweep_one(*args, s, kind, max_pattern_len, 1), ordered))
    else:
        rows = [_sweep_one(*args, s, kind, max_pattern_len, workers) for s in ordered]
    return SweepResult(tuple(rows), dataset.n)
