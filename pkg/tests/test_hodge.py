from fractions import Fraction
from math import comb

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from lefschetz_lab.errors import MetricError, PreconditionError
from lefschetz_lab.exterior import Form, wedge
from lefschetz_lab.hodge import HodgePackage, MetricStructure, inner, integrate_top, star, star_matrix
from lefschetz_lab.linalg import QMatrix

import oracles
from conftest import e, fixture_structure, heis_complex


def test_inner_diag_example():
    m = MetricStructure([[2, 0, 0], [0, 3, 0], [0, 0, 1]])
    assert inner(e(3, 1, 2), e(3, 1, 2), m) == 6
    assert inner(e(3, 1), e(3, 1), m) == 2
    assert inner(e(3, 1, 2), e(3, 1, 3), m) == 0
    with pytest.raises(PreconditionError):
        inner(e(3, 1), e(3, 1, 2), m)


def test_star_identity_metric():
    m = MetricStructure.identity(3)
    assert star(e(3, 3), m) == e(3, 1, 2)
    assert star(e(3, 2), m) == e(3, 1, 3, c=-1)
    assert star(Form.constant(3), m) == e(3, 1, 2, 3)
    for p in range(4):
        S = star_matrix(m, 3 - p) @ star_matrix(m, p)
        assert S == QMatrix.identity(comb(3, p))


def test_orientation_flips_star():
    assert star(e(3, 3), MetricStructure.identity(3, -1)) == e(3, 1, 2, c=-1)


def test_heis3_codifferential_and_laplacian():
    H = HodgePackage(heis_complex(1), MetricStructure.identity(3))
    assert H.codifferential(e(3, 1, 2)) == e(3, 3, c=-2)
    assert H.laplace(e(3, 3)) == e(3, 3, c=4)
    assert H.green(e(3, 3)) == Fraction(1, 4) * e(3, 3)
    assert H.green(e(3, 1)).is_zero()
    assert H.codifferential(Form.constant(3)).is_zero()


def test_integrate_top():
    assert integrate_top(e(3, 1, 2, 3)) == 1
    assert integrate_top(e(3, 1, 2, 3, c=5)) == 5
    m = MetricStructure([[4, 0, 0], [0, 1, 0], [0, 0, 1]])
    assert m.volume_coefficient == Fraction(1, 2)
    assert integrate_top(m.volume_form(), m) == 1
    assert integrate_top(e(3, 1, 2, 3), m) == 2
    with pytest.raises(PreconditionError):
        integrate_top(e(3, 1, 2))


def test_metric_errors():
    with pytest.raises(MetricError):
        MetricStructure([[1, 1], [0, 1]])
    with pytest.raises(MetricError):
        MetricStructure([[1, 2], [2, 1]])
    with pytest.raises(MetricError):
        MetricStructure([[1, 0], [0, 1, 0]])
    with pytest.raises(MetricError):
        MetricStructure.identity(3, orientation=0)
    with pytest.raises(MetricError):
        MetricStructure([[2, 0, 0], [0, 1, 0], [0, 0, 1]]).volume_coefficient


def test_gram_inverse_is_compound_of_inverse():
    m = MetricStructure([[2, 1, 0], [1, 1, 0], [0, 0, 1]])
    for p in range(4):
        assert m.gram(p) @ m.gram_inv(p) == QMatrix.identity(comb(3, p))


@st.composite
def metrics(draw, dim):
    """gram1 = A A^T for lower-triangular integer A, so det is a rational square."""
    A = [[draw(st.integers(-2, 2)) if j < i else (draw(st.sampled_from([1, 2])) if i == j else 0)
          for j in range(dim)] for i in range(dim)]
    G = [[sum(A[i][k] * A[j][k] for k in range(dim)) for j in range(dim)] for i in range(dim)]
    return MetricStructure(G, draw(st.sampled_from([1, -1])))


@st.composite
def metric_and_forms(draw):
    dim = draw(st.integers(2, 5))
    m = draw(metrics(dim))
    p = draw(st.integers(0, dim))
    vec = lambda: {i: draw(st.integers(-3, 3)) for i in range(comb(dim, p))}
    return m, Form.from_vector(dim, p, vec()), Form.from_vector(dim, p, vec())


@settings(max_examples=80, deadline=None)
@given(metric_and_forms())
def test_star_defining_property(mab):
    m, a, b = mab
    assert wedge(a, star(b, m)) == inner(a, b, m) * m.volume_form()


@settings(max_examples=80, deadline=None)
@given(metric_and_forms())
def test_star_is_isometry_and_involution(mab):
    m, a, b = mab
    p, dim = a.degree, a.dim
    assert inner(star(a, m), star(b, m), m) == inner(a, b, m)
    assert star(star(a, m), m) == (-1) ** (p * (dim - p)) * a


@settings(max_examples=50, deadline=None)
@given(metric_and_forms())
def test_inner_against_sympy(mab):
    m, a, b = mab
    p = a.degree
    G1 = sympy.Matrix(m.gram1)
    # <e^I, e^J> = det G1[I, J]
    tot = 0
    for I, x in a.coeffs.items():
        for J, y in b.coeffs.items():
            sub = G1.extract([i - 1 for i in I], [j - 1 for j in J]) if p else sympy.Matrix([[1]])
            tot += x * y * sub.det()
    assert inner(a, b, m) == tot


def _hodge(name):
    return fixture_structure(name).hodge


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis7", "heis3_alt", "heis5_alt"])
def test_green_identities(name):
    assert all(_hodge(name).green_identities().values())


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis3_alt", "heis5_alt"])
def test_hodge_decomposition(name):
    H = _hodge(name)
    C = H.complex
    for p in range(C.dim + 1):
        ex, coex, harm = H.hodge_decomposition_dims(p)
        assert ex + coex + harm == comb(C.dim, p)
        assert harm == C.betti(p)


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis3_alt", "heis5_alt"])
def test_delta_star_route(name):
    assert all(_hodge(name).star_crosscheck_delta().values())


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis3_alt", "heis5_alt"])
def test_star_commutes_with_laplacian(name):
    H = _hodge(name)
    for p in range(H.dim + 1):
        assert H.star[p] @ H.laplacian_matrix(p) == H.laplacian_matrix(H.dim - p) @ H.star[p]


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis3_alt", "heis5_alt"])
def test_eps_eta_star_i_xi(name):
    S = fixture_structure(name)
    H, E, I = S.hodge, S.eps_eta, S.i_xi
    dim = S.dim
    for p in range(1, dim + 1):
        # eps_eta * = (-1)^(p+1) * i_xi on p-forms
        lhs = E[dim - p] @ H.star[p]
        rhs = (H.star[p - 1] @ I[p]).scale((-1) ** (p + 1))
        assert lhs == rhs


@pytest.mark.parametrize("name", ["heis3", "heis5_alt"])
def test_laplacian_symmetric_and_nonnegative(name):
    H = _hodge(name)
    for p in range(H.dim + 1):
        G = oracles.to_sympy(H.metric.gram(p))
        L = oracles.to_sympy(H.laplacian_matrix(p))
        GL = G * L
        assert GL == GL.T
        assert GL.is_positive_semidefinite


def test_harmonic_projector_idempotent():
    H = _hodge("heis5_alt")
    for p in range(6):
        P = H.projector(p)
        assert P @ P == P
        assert (H.laplacian_matrix(p) @ P).is_zero()
