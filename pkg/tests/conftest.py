from __future__ import annotations

import pytest

from enriques_phi.enriques import build_lambda_gamma, gamma_classes


@pytest.fixture(scope="session")
def all_classes():
    return gamma_classes()


@pytest.fixture(scope="session")
def lambda_gammas(all_classes):
    return {g.label: build_lambda_gamma(g) for g in all_classes}


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
