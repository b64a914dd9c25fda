import pytest

from spotplan import (
    ScalingSource,
    bundled_aws_catalog,
    bundled_simulated_catalog,
    default_saturation_table,
)


@pytest.fixture(scope="session")
def simulated_catalog():
    return bundled_simulated_catalog()


@pytest.fixture(scope="session")
def aws_catalog():
    return bundled_aws_catalog()


@pytest.fixture(scope="session")
def sat_table():
    return default_saturation_table()


@pytest.fixture()
def scaling_source():
    return ScalingSource()
