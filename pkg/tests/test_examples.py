import pytest

import goldens


@pytest.mark.parametrize("check", [c for checks in goldens.GOLDEN.values() for c in checks],
                         ids=lambda c: c.__name__)
def test_worked_example(check):
    check()
