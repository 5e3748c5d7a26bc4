"""One test per acceptance criterion; each prints a PASS/FAIL line.

The lines are also collected and repeated in the terminal summary.
"""

import pytest

from hcblocks import acceptance
from conftest import ACCEPTANCE_LINES


def _check(result):
    line = result.line()
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert result.ok, f"{line}; first failures: {result.failures[:3]}"


def test_criterion_01_ext_quiver_of_glued_algebra():
    _check(acceptance.criterion_1())


def test_criterion_02_block_decomposition_totality():
    _check(acceptance.criterion_2())


def test_criterion_03_support_of_exact_sequences():
    _check(acceptance.criterion_3())


def test_criterion_04_fitting_split():
    _check(acceptance.criterion_4())


def test_criterion_05_gwa_window_dimensions():
    _check(acceptance.criterion_5())


def test_criterion_06_gwa_double_quotients():
    _check(acceptance.criterion_6())


def test_criterion_07_category_laws():
    _check(acceptance.criterion_7())


def test_criterion_08_completion_stages():
    _check(acceptance.criterion_8())


def test_criterion_09_hc_decomposition_on_finite_models():
    _check(acceptance.criterion_9())


def test_criterion_10_cyclicity():
    _check(acceptance.criterion_10())


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v", "-s"]))
