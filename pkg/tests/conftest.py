import pytest
from click.testing import CliRunner

from wlab import create_cli
from wlab.aop import _cache
from wlab.catalog import make_catenoid, make_riemann_cylinder


@pytest.fixture
def cli(tmp_path):
    cli = create_cli({"output_dir": str(tmp_path / "out")})
    yield cli
    # Clean up cache after each test
    _cache.clear()


@pytest.fixture
def cli_runner():
    return CliRunner()


@pytest.fixture
def out_dir(tmp_path):
    return tmp_path / "out"


@pytest.fixture(scope="module")
def catenoid():
    return make_catenoid()


@pytest.fixture(scope="module")
def riemann_dz():
    return make_riemann_cylinder(1.0)
