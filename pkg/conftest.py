"""Shared fixtures for the SDS engine tests."""

from pathlib import Path

import pandas as pd
import pytest

from groups import Group, make_group
from models import GroupSpec

TESTDATA = Path(__file__).resolve().parent / "testdata"


def read_table(name: str) -> pd.DataFrame:
    return pd.read_csv(TESTDATA / name, sep="\t", dtype=str, keep_default_na=False)


@pytest.fixture(scope="session")
def gf25() -> Group:
    return make_group(GroupSpec.elementary_abelian(5, 2, (2, 0, 1)))


@pytest.fixture(scope="session")
def gf27() -> Group:
    return make_group(GroupSpec.elementary_abelian(3, 3, (1, 2, 0, 1)))


@pytest.fixture(scope="session")
def gf49() -> Group:
    return make_group(GroupSpec.elementary_abelian(7, 2, (4, 0, 1)))


@pytest.fixture(scope="session")
def gf125() -> Group:
    return make_group(GroupSpec.elementary_abelian(5, 3, (2, 3, 0, 1)))


@pytest.fixture(scope="session")
def gf9() -> Group:
    return make_group(GroupSpec.elementary_abelian(3, 2, (1, 0, 1)))


@pytest.fixture(scope="session")
def z5() -> Group:
    return make_group(GroupSpec.cyclic(5))


@pytest.fixture(scope="session")
def z7() -> Group:
    return make_group(GroupSpec.cyclic(7))


@pytest.fixture(scope="session")
def z9() -> Group:
    return make_group(GroupSpec.cyclic(9))


@pytest.fixture(scope="session")
def table1() -> pd.DataFrame:
    return read_table("table1.tsv")


@pytest.fixture(scope="session")
def table2() -> pd.DataFrame:
    return read_table("table2.tsv")
