import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from lefschetz_lab.errors import PreconditionError
from lefschetz_lab.exterior import Form, GradedOperator, commutator
from lefschetz_lab.identities import (
    CATALOG,
    CORE_IDS,
    aux_check,
    aux_map,
    aux_operator,
    crosscheck_a_vs_i1,
    verify_catalog,
    verify_identity,
    verify_tachibana,
)
from lefschetz_lab.sasakian import SasakianStructure

from conftest import e, fixture_structure, heis_structure


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis3_alt", "heis5_alt"])
def test_full_catalog_passes(name):
    S = fixture_structure(name)
    for rep in verify_catalog(S):
        assert rep.passed, (rep.id, rep.counterexample)
        assert rep.counterexample is None


def test_heis7_core_identities():
    S = heis_structure(3)
    assert all(r.passed for r in verify_catalog(S, CORE_IDS))


def test_identity_h_example():
    S = heis_structure(1)
    # {delta, eps_eta} e1 = delta(e3 ^ e1), and -lie_xi e1 = 0
    assert S.delta.apply(S.eps_eta.apply(e(3, 1))).is_zero()
    assert S.lie_xi.apply(e(3, 1)).is_zero()


def test_identity_d_example():
    S = heis_structure(1)
    lhs = commutator(S.laplacian, S.eps_eta).apply(Form.constant(3))
    assert lhs == e(3, 3, c=4)


def test_lie_xi_commutes_with_d():
    for n in (1, 2):
        S = heis_structure(n)
        assert commutator(S.lie_xi, S.d) == GradedOperator.zero(S.dim, 1)


def test_unknown_identity():
    with pytest.raises(KeyError):
        verify_identity(heis_structure(1), "z")


def test_unverified_structure_refused():
    S = fixture_structure("n5_contact")
    strict = SasakianStructure(S.contact, S.metric, S.phi, S.report, diagnostic=False)
    with pytest.raises(PreconditionError):
        verify_identity(strict, "a")


def test_n5_diagnostic_failures_reported():
    S = fixture_structure("n5_contact")
    reps = {r.id: r for r in verify_catalog(S, CORE_IDS)}
    failed = {i for i, r in reps.items() if not r.passed}
    assert failed == set("abcdgi")
    for i in failed:
        cx = reps[i].counterexample
        assert cx is not None and not cx.residual.is_zero()


def test_counterexample_points_at_nonzero_residual():
    S = fixture_structure("n5_contact")
    rep = verify_identity(S, "a")
    cx = rep.counterexample
    assert rep.per_degree[cx.label][cx.degree] is False
    assert len(cx.basis_form) == cx.degree


def test_catalog_ids_cover_core_entries():
    assert set(CORE_IDS) <= set(CATALOG)
    for id_, entry in CATALOG.items():
        assert entry.id == id_ and entry.statement


@pytest.mark.parametrize("n", [1, 2, 3])
def test_a_and_i1_are_adjoint(n):
    assert crosscheck_a_vs_i1(heis_structure(n))


@pytest.mark.parametrize("name", ["heis3", "heis5", "heis7", "heis5_alt"])
def test_tachibana(name):
    S = fixture_structure(name)
    for p in range(S.dim + 1):
        res = verify_tachibana(S, p)
        assert all(res.values()), (p, res)


def test_tachibana_heis5_p1_checks_all_conclusions():
    # Lambda lowers degree by two, so it only enters from p = 2
    res = verify_tachibana(heis_structure(2), 1)
    assert set(res) == {"i_phi harmonic", "i_xi w = 0"}
    res = verify_tachibana(heis_structure(2), 2)
    assert set(res) == {"i_phi harmonic", "i_xi w = 0", "Lambda w = 0", "L w = 0"}


def test_aux_map_trivial_cases():
    S = heis_structure(2)
    assert aux_map(S, 1, Form.constant(5, 7)).is_zero()
    for w in S.hodge.harmonic_basis(1):
        assert aux_map(S, 2, w).is_zero()
    with pytest.raises(PreconditionError):
        aux_map(S, 2, e(5, 1, 2))
    with pytest.raises(PreconditionError):
        aux_operator(S, 3)
    with pytest.raises(PreconditionError):
        aux_operator(S, 0)


def _invariant_coclosed(S, p, rng):
    """Random alpha of degree p-1 with lie_xi alpha = 0 and delta alpha = 0 (kernel sample)."""
    from lefschetz_lab.linalg import kernel, vstack

    deg = p - 1
    blocks = [S.lie_xi[deg]]
    if deg > 0:
        blocks.append(S.delta[deg])
    K = kernel(vstack(blocks))
    vec = {}
    for j in range(K.ncols):
        c = Fraction(rng.randint(-5, 5), rng.randint(1, 4))
        for i, v in K.col(j).items():
            vec[i] = vec.get(i, 0) + c * v
    return Form.from_vector(S.dim, deg, vec)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2 ** 32 - 1), st.sampled_from([1, 2]))
def test_aux_coclosed_property_heis5(seed, p):
    S = heis_structure(2)
    alpha = _invariant_coclosed(S, p, random.Random(seed))
    res = aux_check(S, p, alpha)
    assert res["lie_xi alpha = 0"] and res["delta alpha = 0"]
    assert res["delta A alpha = 0"] and res["Lap A alpha = A Lap alpha"]
    if res["L^(n-p+1) d Lap alpha = 0"]:
        assert res["A alpha = 0"]


def test_aux_check_skips_conclusions_without_hypotheses():
    S = heis_structure(3)
    alpha = e(7, 1, 2)  # delta e12 = -2 e7
    res = aux_check(S, 3, alpha)
    assert not (res["lie_xi alpha = 0"] and res["delta alpha = 0"])
    assert "delta A alpha = 0" not in res


@pytest.mark.parametrize("p", [1, 2, 3])
def test_aux_heis7_seeded(p):
    S = heis_structure(3)
    rng = random.Random(p)
    for _ in range(5):
        res = aux_check(S, p, _invariant_coclosed(S, p, rng))
        assert res["delta A alpha = 0"] and res["Lap A alpha = A Lap alpha"]
