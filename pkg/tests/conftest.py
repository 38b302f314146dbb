import pytest

from dqgkit import logger
from dqgkit.builders import build_commutative, build_group_dual, build_suq2_window, cyclic, symmetric3

logger.disabled = True


@pytest.fixture(scope="session")
def z5_doc():
    return build_commutative(cyclic(5))


@pytest.fixture(scope="session")
def s3_doc():
    return build_commutative(symmetric3())


@pytest.fixture(scope="session")
def s3_dual_doc():
    return build_group_dual(symmetric3())


@pytest.fixture(scope="session")
def z3_regular_doc():
    return build_commutative(cyclic(3), "regular")


@pytest.fixture(scope="session")
def suq2_doc():
    return build_suq2_window(1.5, 1.0)


@pytest.fixture(scope="session")
def suq2_wide_doc():
    return build_suq2_window(1.5, 2.0)
