import pytest

from diagbieb import search

# criterion number -> (title, passed, seconds); filled by test_acceptance
CRITERIA: dict[int, tuple[str, bool, float]] = {}


@pytest.fixture(scope="session")
def digest_3_6():
    return search.exhaustive_reducibility(3, 6, expect_reducible=False)


@pytest.fixture(scope="session")
def digest_2_4():
    return search.exhaustive_reducibility(2, 4, expect_reducible=False)


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(CRITERIA):
        title, ok, secs = CRITERIA[num]
        terminalreporter.write_line(
            f"criterion {num:2d}: {'PASS' if ok else 'FAIL'}  {title}  ({secs:.2f}s)"
        )
