import pytest

from qfactor.golden import check_golden

RESULTS = check_golden()


@pytest.mark.parametrize("name, passed", RESULTS, ids=[name for name, _ in RESULTS])
def test_reference_tables(name, passed):
    assert passed, name
