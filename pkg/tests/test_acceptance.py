"""Acceptance criteria 1-12, one test each, with exact tables and runtime budgets.

Each test prints a ``criterion N PASS|FAIL`` line; the lines are also
collected into the terminal summary.  Run standalone with
``python3 tests/test_acceptance.py``.
"""

import pytest

from tateforge.acceptance import CRITERIA, DETERMINISM, SuiteOptions, determinism_check, run_criterion, run_suite

_results = {}


def _record(result, log):
    line = result.line()
    log[result.number] = line
    print(line)
    assert result.passed, "\n".join(result.failures) or f"{result.seconds:.2f}s over the {result.budget:g}s budget"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, acceptance_log):
    result = run_criterion(number, SuiteOptions())
    _results[number] = result
    _record(result, acceptance_log)


def test_criterion_12_determinism(acceptance_log):
    # reuse the tables from the tests above when they ran in this session
    reference = [_results.get(n) or run_criterion(n, SuiteOptions()) for n in sorted(CRITERIA)]
    result = determinism_check(reference)
    assert result.number == DETERMINISM[0]
    _record(result, acceptance_log)


if __name__ == "__main__":
    report = run_suite()
    print("\n".join(report.lines()))
    raise SystemExit(0 if report.ok else 1)
