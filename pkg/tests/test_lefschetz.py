import random

import pytest
from hypothesis import given, settings, strategies as st

from lefschetz_lab import lefschetz as lef
from lefschetz_lab.errors import InvariantViolation, PreconditionError
from lefschetz_lab.exterior import Form
from lefschetz_lab.lefschetz import (
    DOMAIN_DEFICIENT,
    GRAPH_OF_ISOMORPHISM,
    LEFSCHETZ_CONTACT,
    NON_BIJECTIVE,
    NOT_WELL_DEFINED,
    OBSTRUCTED,
    betti_parity,
    bilinear_form,
    constraint_space,
    lef_matrix_harmonic,
    metric_independence_check,
    relation,
    verdict,
)
from lefschetz_lab.linalg import QMatrix, det, rank

import oracles
from conftest import e, fixture_structure, heis_structure, n5_complex, n5_contact


def _ctx(name):
    S = fixture_structure(name)
    return S.complex, S.contact, S


def test_heis3_relation_p1():
    C, contact, _ = _ctx("heis3")
    r = relation(C, contact, 1)
    V = [Form.from_vector(3, 1, r.constraint_basis.col(j)) for j in range(r.constraint_basis.ncols)]
    assert {tuple(sorted(w.coeffs)) for w in V} == {((1,),), ((2,),)}
    assert r.classification == GRAPH_OF_ISOMORPHISM and r.is_graph_of_isomorphism
    assert r.matrix.shape == (2, 2) and rank(r.matrix) == 2


def test_heis3_relation_p0():
    C, contact, _ = _ctx("heis3")
    r = relation(C, contact, 0)
    assert r.constraint_basis.ncols == 1
    assert r.is_graph_of_isomorphism and r.matrix.shape == (1, 1) and r.matrix[0, 0] != 0


def test_relation_precondition():
    C, contact, _ = _ctx("heis3")
    with pytest.raises(PreconditionError):
        relation(C, contact, 2)


def test_n5_relations():
    C, contact = n5_complex(), n5_contact()
    r1 = relation(C, contact, 1)
    assert not r1.is_graph_of_isomorphism
    assert r1.classification == NON_BIJECTIVE
    assert relation(C, contact, 2).classification == NOT_WELL_DEFINED


def test_classification_order():
    Z = QMatrix(0, 0)
    mk = lambda wd, full, bij: lef.LefschetzRelationReport(1, 2, Z, Z, Z, full, wd, bij, None)
    assert mk(False, False, False).classification == NOT_WELL_DEFINED
    assert mk(True, False, False).classification == DOMAIN_DEFICIENT
    assert mk(True, True, False).classification == NON_BIJECTIVE
    assert mk(True, True, True).classification == GRAPH_OF_ISOMORPHISM


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis7"])
def test_relation_equals_harmonic_route(name):
    C, contact, S = _ctx(name)
    for p in range(S.n + 1):
        r = relation(C, contact, p)
        assert r.is_graph_of_isomorphism
        assert lef_matrix_harmonic(S, p) == r.matrix


def test_lef_matrix_examples():
    S = heis_structure(2)
    assert lef_matrix_harmonic(S, 0).shape == (1, 1)
    M2 = lef_matrix_harmonic(S, 2)
    assert M2.shape == (5, 5) and rank(M2) == 5
    with pytest.raises(PreconditionError):
        lef_matrix_harmonic(fixture_structure("n5_contact"), 1)


@pytest.mark.parametrize("base, alt", [("heis3", "heis3_alt"), ("heis5", "heis5_alt")])
def test_metric_independence(base, alt):
    S1, S2 = fixture_structure(base), fixture_structure(alt)
    assert S1.metric != S2.metric and S1.verified and S2.verified
    C, contact = S1.complex, S1.contact
    for p in range(S1.n + 1):
        ok, res = metric_independence_check(C, contact, p, S1, S2)
        assert ok and res["S1-S2"].is_zero()
    ok, _ = metric_independence_check(C, contact, 0, S1, S1)
    assert ok


def test_metric_independence_needs_same_eta():
    S1 = heis_structure(1)
    from lefschetz_lab.sasakian import contact_structure
    other = contact_structure(S1.complex, e(3, 3, c=2))
    with pytest.raises(PreconditionError):
        metric_independence_check(S1.complex, other, 0, S1, S1)


def _random_unitriangular(k, rng):
    rows = [[0] * k for _ in range(k)]
    for i in range(k):
        rows[i][i] = rng.choice([1, -1, 2])
        for j in range(i + 1, k):
            rows[i][j] = rng.randint(-3, 3)
    return QMatrix.from_dense(rows)


@settings(max_examples=20, deadline=None)
@given(st.sampled_from(["heis3", "heis5", "n5"]), st.integers(0, 2), st.integers(0, 10 ** 6))
def test_relation_representative_independent(name, p, seed):
    if name == "n5":
        C, contact = n5_complex(), n5_contact()
    else:
        C, contact, _ = _ctx(name)
    if p > contact.n:
        return
    base = relation(C, contact, p)
    V = base.constraint_basis
    T = _random_unitriangular(V.ncols, random.Random(seed))
    orig = lef.constraint_space
    lef.constraint_space = lambda *a: orig(*a) @ T
    try:
        other = relation(C, contact, p)
    finally:
        lef.constraint_space = orig
    assert other.classification == base.classification
    assert other.matrix == base.matrix


def test_bilinear_heis3():
    C, contact, _ = _ctx("heis3")
    B = bilinear_form(C, contact, 1, [e(3, 1), e(3, 2)])
    assert B.to_dense() == [[0, 1], [-1, 0]]
    with pytest.raises(PreconditionError):
        bilinear_form(C, contact, 1, [e(3, 3)])
    with pytest.raises(PreconditionError):
        bilinear_form(C, contact, 1, [e(3, 1, 2)])


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis7"])
def test_bilinear_symmetry_and_nondegeneracy(name):
    C, contact, _ = _ctx(name)
    for p in range(contact.n + 1):
        r = relation(C, contact, p)
        B = bilinear_form(C, contact, p, r.representatives)
        assert B == B.T.scale((-1) ** p)
        if B.nrows:
            assert det(B.to_dense()) != 0


def test_bilinear_heis5_p1_antisymmetric():
    C, contact, _ = _ctx("heis5")
    r = relation(C, contact, 1)
    B = bilinear_form(C, contact, 1, r.representatives)
    assert B.shape == (4, 4) and B == B.T.scale(-1) and rank(B) == 4


def test_betti_parity():
    assert betti_parity(*_ctx("heis3")[:2]) == {1: (2, True)}
    assert betti_parity(*_ctx("heis5")[:2]) == {1: (4, True)}
    assert betti_parity(n5_complex(), n5_contact()) == {1: (3, False)}


def test_n5_betti_oracle():
    assert oracles.betti(n5_complex().spec)[1] == 3


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis7"])
def test_verdict_positive(name):
    C, contact, S = _ctx(name)
    v = verdict(C, contact, S)
    assert v.overall == LEFSCHETZ_CONTACT and v.crosschecked and not v.reasons


def test_verdict_n5():
    v = verdict(n5_complex(), n5_contact())
    assert v.overall == OBSTRUCTED
    assert "relation at p=1: non_bijective" in v.reasons
    assert "parity at p=1: b1=3 odd" in v.reasons
    assert not v.crosschecked


def test_verdict_diagnostic_structure_not_crosschecked():
    S = fixture_structure("n5_contact")
    v = verdict(S.complex, S.contact, S)
    assert v.overall == OBSTRUCTED and not v.crosschecked


def test_route_disagreement_is_hard_error():
    C, contact, S = _ctx("heis3")
    reports = {p: relation(C, contact, p) for p in range(2)}
    reports[1].matrix = reports[1].matrix.scale(2)
    with pytest.raises(InvariantViolation):
        verdict(C, contact, S, reports)


def test_constraint_space_is_metric_free():
    import inspect

    src = inspect.getsource(lef.relation) + inspect.getsource(lef.constraint_space)
    assert "metric" not in src and "hodge" not in src
