from __future__ import annotations

import pytest

from hemeroclim.workspace import Workspace, sample_corpus_lines


@pytest.fixture(scope="session")
def fixture_lines() -> list[str]:
    return sample_corpus_lines()


@pytest.fixture(scope="session")
def seeded_workspace(fixture_lines) -> Workspace:
    """Read-only workspace over the packaged fixture corpus; tests that
    mutate state build their own."""
    ws = Workspace.open()
    report = ws.store.ingest(fixture_lines)
    assert report.accepted == 36 and not report.rejected
    return ws


@pytest.fixture()
def workspace(fixture_lines) -> Workspace:
    ws = Workspace.open()
    ws.store.ingest(fixture_lines)
    return ws
