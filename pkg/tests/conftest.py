import pathlib

import pytest

from litnav.bkg import build_bkg
from litnav.corpus import load_corpus
from litnav.embed import HashingEmbedder

FIXTURES = pathlib.Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def ai50_path() -> pathlib.Path:
    return FIXTURES / "ai4health_50.jsonl"


@pytest.fixture(scope="session")
def syn200_path() -> pathlib.Path:
    return FIXTURES / "synthetic_200.jsonl"


@pytest.fixture(scope="session")
def ai50_store(ai50_path):
    return load_corpus(ai50_path)


@pytest.fixture(scope="session")
def syn200_store(syn200_path):
    return load_corpus(syn200_path)


@pytest.fixture(scope="session")
def ai50_embeddings(ai50_store):
    emb = HashingEmbedder()
    return {
        uid: emb.embed(f"{rec.title} {rec.abstract}")
        for uid, rec in sorted(ai50_store.records.items())
    }


@pytest.fixture(scope="session")
def ai50_bkg(ai50_store, ai50_embeddings):
    return build_bkg(ai50_store, ai50_embeddings)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """One PASS/FAIL line per acceptance criterion when the gate ran."""
    verdicts: dict[str, str] = {}
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            if "test_acceptance.py::" not in report.nodeid:
                continue
            if outcome == "passed" and report.when != "call":
                continue
            name = report.nodeid.split("::")[-1]
            label = name.removeprefix("test_").replace("_", " ")
            if outcome == "passed":
                verdicts.setdefault(label, "PASS")
            else:
                verdicts[label] = "FAIL"
    if verdicts:
        terminalreporter.section("acceptance criteria")
        for label in sorted(verdicts):
            terminalreporter.write_line(f"{verdicts[label]}  {label}")
