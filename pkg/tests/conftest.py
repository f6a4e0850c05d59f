import numpy as np
import pytest

from motkit import modelfile
from motkit.chow import ChowModel, projective_space, split_quadric_odd, tensor_product

ACCEPTANCE_LINES: list = []


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def conic():
    return modelfile.load("zoo:conic")


@pytest.fixture(scope="session")
def synth1():
    return modelfile.load("zoo:synth1")


@pytest.fixture(scope="session")
def adversarial():
    return modelfile.load("zoo:adversarial")


def small_model(p: int) -> ChowModel:
    return ChowModel(p, [
        projective_space(1, "P1"),
        projective_space(2, "P2"),
        split_quadric_odd(1, "C"),
        split_quadric_odd(3, "Q3"),
        tensor_product(projective_space(1), projective_space(1), "Q"),
    ])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
