import functools

import pytest

from lefschetz_lab.complex import build_complex, salamon
from lefschetz_lab.exterior import Form
from lefschetz_lab.fixtures import bundled_fixture
from lefschetz_lab.hodge import MetricStructure
from lefschetz_lab.sasakian import contact_structure, sasakian_check


def heis_spec(n):
    dim = 2 * n + 1
    return salamon(f"heis{dim}", dim, {dim: [(-2, 2 * i + 1, 2 * i + 2) for i in range(n)]})


def phi_std(n):
    dim = 2 * n + 1
    P = [[0] * dim for _ in range(dim)]
    for i in range(n):
        P[2 * i + 1][2 * i] = 1
        P[2 * i][2 * i + 1] = -1
    return P


@functools.lru_cache(maxsize=None)
def heis_complex(n):
    return build_complex(heis_spec(n))


@functools.lru_cache(maxsize=None)
def heis_structure(n):
    dim = 2 * n + 1
    return sasakian_check(heis_complex(n), Form.monomial(dim, dim), MetricStructure.identity(dim), phi_std(n))


@functools.lru_cache(maxsize=None)
def fixture_structure(name):
    doc = bundled_fixture(name)
    C = doc.complex()
    return sasakian_check(C, contact_structure(C, doc.eta_form()), doc.metric_structure(), doc.phi, strict=False)


@functools.lru_cache(maxsize=None)
def n5_complex():
    return build_complex(salamon("n5", 5, {4: [(1, 1, 2)], 5: [(1, 1, 4), (1, 2, 3)]}))


@functools.lru_cache(maxsize=None)
def n5_contact():
    return contact_structure(n5_complex(), Form.monomial(5, 5))


@pytest.fixture
def heis3():
    return heis_structure(1)


@pytest.fixture
def heis5():
    return heis_structure(2)


@pytest.fixture
def heis7():
    return heis_structure(3)


def e(dim, *idx, c=1):
    return Form.monomial(dim, *idx, coeff=c)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
