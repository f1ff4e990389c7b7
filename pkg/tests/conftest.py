import io
import random

import pytest

from alertrank.ingest import Dataset, IngestConfig, parse_log

# Table 1: three alerts over items {1,2,3,4,5}
TABLE1 = b"1 3 4\n2 3 5\n1 2 3 5\n"

# The Snort sample, one alert per line as printed in the output sample
# (time and AM/PM joined into one token, 13 fields per line).
FIGURE1 = (
    b"7 1 508 WEB-MISC/doc/access 25 2 6/11/2010 8:57AM 1136881320 2148203530 6 46,865 80\n"
    b"7 2 508 WEB-MISC/robots.txt/access 25 2 6/11/2010 8:57AM 3632363311 2148203629 6 34,074 80\n"
    b"7 3 508 WEB-MISC/robots.txt/access 25 2 8/11/2010 8:59AM 3632363313 2148203229 6 34,075 80\n"
)

BASKET = IngestConfig(positional=False)


@pytest.fixture
def table1() -> Dataset:
    return parse_log(io.BytesIO(TABLE1), BASKET)


@pytest.fixture
def figure1() -> Dataset:
    return parse_log(io.BytesIO(FIGURE1))


def random_dataset(rng: random.Random, max_rows: int = 20) -> Dataset:
    """Up to ``max_rows`` lines over at most 12 distinct items.

    Positional logs use 4 fields x 3 tokens; basket logs draw from 12 tokens.
    """
    n = rng.randint(1, max_rows)
    if rng.random() < 0.5:
        lines = []
        for _ in range(n):
            width = rng.randint(1, 4)
            lines.append(" ".join(rng.choice("abc") for _ in range(width)))
        return Dataset.from_lines(lines)
    alphabet = [f"i{k}" for k in range(12)]
    lines = [" ".join(rng.sample(alphabet, rng.randint(1, 8))) for _ in range(n)]
    return Dataset.from_lines(lines, BASKET)


@pytest.fixture(scope="session")
def desk_scale_eval(tmp_path_factory):
    """The default `eval` run (10,000 routine alerts, 5 attacks, supports
    2/4/6, seed 42, patterns capped at 6 items), executed once per session."""
    import time

    from alertrank.cli import main

    out = tmp_path_factory.mktemp("eval") / "sweep.tsv"
    start = time.perf_counter()
    code = main(["eval", "--seed", "42", "--supports", "2,4,6", "--max-pattern-len", "6", "--out", str(out)])
    elapsed = time.perf_counter() - start
    rows = [line.split("\t") for line in out.read_text().splitlines()[1:]]
    parsed = [(int(s), int(c), int(r), float(p)) for s, c, r, p in rows]
    return code, out, parsed, elapsed


def pytest_terminal_summary(terminalreporter):
    import sys

    mods = [m for name, m in list(sys.modules.items()) if name.rsplit(".", 1)[-1] == "test_acceptance"]
    results = next((m.RESULTS for m in mods if getattr(m, "RESULTS", None)), None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
