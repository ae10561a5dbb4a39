import numpy as np
import pytest
from hypothesis import settings

from lshaped_doa.array_model import ArrayGeometry, Scene

settings.register_profile("default", deadline=None, max_examples=30)
settings.load_profile("default")


@pytest.fixture(scope="session")
def geometry():
    return ArrayGeometry.nested(6)


@pytest.fixture(scope="session")
def three_targets():
    return Scene((10.0, 20.0, 30.0), (45.0, 40.0, 35.0))


def crandn(rng, *shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        verdict, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {verdict}  {detail}")
