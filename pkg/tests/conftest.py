import importlib.resources

import pytest

from perigrowth.periodic_graph import parse_periodic_graph
from perigrowth.vab import parse_vag

DATA = importlib.resources.files("perigrowth.data")

# fixed seed for every randomized corpus in the suite
SEED = 20240 + 817


def data_text(name: str) -> str:
    return (DATA / name).read_text()


def data_path(name: str) -> str:
    return str(DATA / name)


@pytest.fixture(scope="session")
def square():
    return parse_periodic_graph(data_text("square.pg"))


@pytest.fixture(scope="session")
def honeycomb():
    return parse_periodic_graph(data_text("honeycomb.pg"))


@pytest.fixture(scope="session")
def z_pm():
    return parse_periodic_graph(data_text("z_pm.pg"))


@pytest.fixture(scope="session")
def z_oneway():
    return parse_periodic_graph(data_text("z_oneway.pg"))


@pytest.fixture(scope="session")
def dinf():
    return parse_vag(data_text("dinf.vag"))


@pytest.fixture(scope="session")
def klein():
    return parse_vag(data_text("klein.vag"))
