import os
from pathlib import Path

import pytest

REPO_ROOT = Path(__file__).resolve().parent.parent
DEFAULT_DATASET = REPO_ROOT / "data" / "released" / "pairs.jsonl"

_acceptance_reports = []


def released_dataset_path() -> Path | None:
    """The released claim/summary dataset, if it has been fetched.

    Resolution: $CLAIMCHECK_DATASET, then data/released/pairs.jsonl.
    See scripts/fetch_dataset.py for how to obtain and convert it.
    """
    env = os.environ.get("CLAIMCHECK_DATASET")
    if env:
        path = Path(env)
        return path if path.exists() else None
    return DEFAULT_DATASET if DEFAULT_DATASET.exists() else None


@pytest.fixture(scope="session")
def released_dataset():
    path = released_dataset_path()
    if path is None:
        pytest.skip(
            "released dataset not available: fetch it with scripts/fetch_dataset.py "
            "or point CLAIMCHECK_DATASET at the converted JSONL"
        )
    return path


def pytest_runtest_logreport(report):
    if "test_acceptance" not in report.nodeid:
        return
    if report.when == "call" or (report.when == "setup" and report.skipped):
        _acceptance_reports.append(report)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_reports:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for rep in _acceptance_reports:
        name = rep.nodeid.split("::")[-1]
        if rep.passed:
            line = f"PASS  {name}"
        elif rep.skipped:
            reason = ""
            if isinstance(rep.longrepr, tuple):
                reason = rep.longrepr[2].removeprefix("Skipped: ")
            line = f"SKIP  {name}  ({reason})"
        else:
            line = f"FAIL  {name}"
        terminalreporter.write_line(line)
