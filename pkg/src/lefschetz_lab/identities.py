"""Exact per-degree verification of the Sasakian operator identities."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import PreconditionError
from .exterior import Form, GradedOperator, anticommutator, basis, commutator
from .linalg import QMatrix
from .sasakian import SasakianStructure

Pair = tuple[str, GradedOperator, GradedOperator]


@dataclass(frozen=True)
class IdentityCatalogEntry:
    id: str
    statement: str
    build: Callable[[SasakianStructure], list[Pair]]


def _a(S):
    return [("[d,Lambda]", commutator(S.d, S.Lambda),
             commutator(S.i_phi, S.delta) - 2 * (S.n_minus_deg @ S.i_xi))]


def _b(S):
    return [("[Lap,i_xi]", commutator(S.laplacian, S.i_xi),
             2 * commutator(S.i_phi, S.delta) - 4 * (S.n_minus_deg @ S.i_xi))]


def _c(S):
    return [("[Lap,i_phi]", commutator(S.laplacian, S.i_phi),
             -2 * (S.lie_xi - S.i_xi @ S.d + S.eps_eta @ S.delta))]


def _d(S):
    return [("[Lap,eps_eta]", commutator(S.laplacian, S.eps_eta),
             -2 * S.lie_phi + 4 * (S.eps_eta @ S.n_minus_deg))]


def _e(S):
    out = []
    for name in ("eps_eta", "i_xi", "L", "Lambda"):
        op = getattr(S, name)
        out.append((f"[i_phi,{name}]", commutator(S.i_phi, op), GradedOperator.zero(S.dim, op.shift)))
    for name in ("d", "delta", "eps_eta", "i_xi", "L", "Lambda", "i_phi"):
        op = getattr(S, name)
        out.append((f"[lie_xi,{name}]", commutator(S.lie_xi, op), GradedOperator.zero(S.dim, op.shift)))
    return out


def _f(S):
    return [
        ("[i_phi,eps_eta]", commutator(S.i_phi, S.eps_eta), GradedOperator.zero(S.dim, 1)),
        ("[i_phi,i_xi]", commutator(S.i_phi, S.i_xi), GradedOperator.zero(S.dim, -1)),
    ]


def _g(S):
    return [("lie_phi^2", S.lie_phi @ S.lie_phi, -2 * (S.L @ S.lie_xi))]


def _h(S):
    return [("{delta,eps_eta}", anticommutator(S.delta, S.eps_eta), -S.lie_xi)]


def delta_Lk_sides(S: SasakianStructure, k: int) -> tuple[GradedOperator, GradedOperator]:
    n = S.n
    Lk1 = S.L_power(k - 1)
    shifted = GradedOperator.diagonal(S.dim, lambda p: n - p - (k - 1))
    lhs = commutator(S.delta, S.L_power(k))
    rhs = -k * (Lk1 @ S.lie_phi) + 2 * k * (S.eps_eta @ Lk1 @ shifted)
    return lhs, rhs


def _i(S):
    out = []
    for k in range(1, S.n + 1):
        lhs, rhs = delta_Lk_sides(S, k)
        out.append((f"[delta,L^{k}]", lhs, rhs))
    return out


def _lambdal(S):
    return [("{i_xi,eps_eta}", anticommutator(S.i_xi, S.eps_eta), GradedOperator.identity(S.dim))]


def _dl(S):
    return [("{d,eps_eta}", anticommutator(S.d, S.eps_eta), 2 * S.L)]


def _deltalambda(S):
    return [("{i_xi,delta}", anticommutator(S.i_xi, S.delta), 2 * S.Lambda)]


CATALOG: dict[str, IdentityCatalogEntry] = {
    e.id: e
    for e in [
        IdentityCatalogEntry("a", "[d, Lambda] = [i_phi, delta] - 2 (n - deg) i_xi", _a),
        IdentityCatalogEntry("b", "[Lap, i_xi] = 2 [i_phi, delta] - 4 (n - deg) i_xi", _b),
        IdentityCatalogEntry("c", "[Lap, i_phi] = -2 (lie_xi - i_xi d + eps_eta delta)", _c),
        IdentityCatalogEntry("d", "[Lap, eps_eta] = -2 lie_phi + 4 eps_eta (n - deg)", _d),
        IdentityCatalogEntry("e", "i_phi commutes with eps_eta, i_xi, L, Lambda; lie_xi with d, delta, eps_eta, "
                                  "i_xi, L, Lambda, i_phi", _e),
        IdentityCatalogEntry("f", "[i_phi, eps_eta] = 0 and [i_phi, i_xi] = 0", _f),
        IdentityCatalogEntry("g", "lie_phi^2 = -2 L lie_xi", _g),
        IdentityCatalogEntry("h", "{delta, eps_eta} = -lie_xi", _h),
        IdentityCatalogEntry("i", "[delta, L^k] = -k L^(k-1) lie_phi + 2k eps_eta L^(k-1) (n - deg - (k-1)), "
                                  "1 <= k <= n", _i),
        IdentityCatalogEntry("lambdal", "{i_xi, eps_eta} = I", _lambdal),
        IdentityCatalogEntry("dl", "{d, eps_eta} = 2 L", _dl),
        IdentityCatalogEntry("deltalambda", "{i_xi, delta} = 2 Lambda", _deltalambda),
    ]
}

CORE_IDS = tuple("abcdefghi")


@dataclass
class Counterexample:
    label: str
    degree: int
    basis_form: tuple
    residual: Form


@dataclass
class ResidualReport:
    id: str
    statement: str
    # label -> {degree: residual is exactly zero}
    per_degree: dict[str, dict[int, bool]] = field(default_factory=dict)
    counterexample: Counterexample | None = None

    @property
    def passed(self) -> bool:
        return all(all(v.values()) for v in self.per_degree.values())


def _compare(label: str, lhs: GradedOperator, rhs: GradedOperator, rep: ResidualReport):
    if lhs.shift != rhs.shift:
        raise PreconditionError(f"{label}: sides have shifts {lhs.shift} and {rhs.shift}")
    flags = {}
    for p in lhs.degrees():
        R: QMatrix = lhs[p] - rhs[p]
        flags[p] = R.is_zero()
        if not flags[p] and rep.counterexample is None:
            _, j, _ = R.first_nonzero()
            mono = basis(lhs.dim, p)[j]
            rep.counterexample = Counterexample(label, p, mono,
                                                Form.from_vector(lhs.dim, p + lhs.shift, R.col(j)))
    rep.per_degree[label] = flags


def verify_identity(S: SasakianStructure, id: str) -> ResidualReport:
    if id not in CATALOG:
        raise KeyError(f"unknown identity {id!r}")
    if not (S.verified or S.diagnostic):
        raise PreconditionError("identity checks need a verified Sasakian structure")
    entry = CATALOG[id]
    rep = ResidualReport(entry.id, entry.statement)
    for label, lhs, rhs in entry.build(S):
        _compare(label, lhs, rhs, rep)
    return rep


def verify_catalog(S: SasakianStructure, ids=None) -> list[ResidualReport]:
    return [verify_identity(S, i) for i in (ids or CATALOG)]


def adjoint_operator(S: SasakianStructure, A: GradedOperator) -> GradedOperator:
    """Inner-product adjoint, degree by degree."""
    mats = {}
    for p in A.degrees():
        q_ = p + A.shift
        mats[q_] = S.metric.adjoint(A[p], p, q_)
    return GradedOperator(S.dim, -A.shift, mats)


def crosscheck_a_vs_i1(S: SasakianStructure) -> bool:
    """(i) at k=1 is the adjoint of (a): [d,Lambda]^* = -[delta,L] on both sides."""
    (_, la, ra), = _a(S)
    li, ri = delta_Lk_sides(S, 1)
    return adjoint_operator(S, la) == -li and adjoint_operator(S, ra) == -ri


# -- harmonic-form properties ---------------------------------------------

def verify_tachibana(S: SasakianStructure, p: int) -> dict[str, bool]:
    n = S.n
    H = S.hodge.harmonic_basis(p)
    out = {"i_phi harmonic": all(S.hodge.laplace(S.i_phi.apply(w)).is_zero() for w in H)}
    if p <= n and p >= 1:
        out["i_xi w = 0"] = all(S.i_xi.apply(w).is_zero() for w in H)
    if p >= n + 1 and p < S.dim:
        out["eps_eta w = 0"] = all(S.eps_eta.apply(w).is_zero() for w in H)
    if p <= n + 1 and p >= 2:
        out["Lambda w = 0"] = all(S.Lambda.apply(w).is_zero() for w in H)
    if p >= n and p + 2 <= S.dim:
        out["L w = 0"] = all(S.L.apply(w).is_zero() for w in H)
    return out


def aux_operator(S: SasakianStructure, p: int) -> GradedOperator:
    """A_p = (n-p+1) L^{n-p} d i_phi d + L^{n-p+1} Lap, restricted to degree p-1."""
    n = S.n
    if not 1 <= p <= n:
        raise PreconditionError(f"aux map needs 1 <= p <= n, got p={p}")
    A = (n - p + 1) * (S.L_power(n - p) @ S.d @ S.i_phi @ S.d) + S.L_power(n - p + 1) @ S.laplacian
    return A.restrict([p - 1])


def aux_map(S: SasakianStructure, p: int, alpha: Form) -> Form:
    if alpha.degree != p - 1:
        raise PreconditionError(f"aux map A_{p} acts on {p - 1}-forms, got degree {alpha.degree}")
    return aux_operator(S, p).apply(alpha)


def aux_check(S: SasakianStructure, p: int, alpha: Form) -> dict[str, bool]:
    """Hypotheses and conclusions of the coclosedness / vanishing statements for A_p."""
    lap = S.hodge.laplace
    A = aux_operator(S, p)
    Aa = A.apply(alpha)
    out = {
        "lie_xi alpha = 0": S.lie_xi.apply(alpha).is_zero(),
        "delta alpha = 0": alpha.degree == 0 or S.delta.apply(alpha).is_zero(),
    }
    if out["lie_xi alpha = 0"] and out["delta alpha = 0"]:
        out["delta A alpha = 0"] = S.delta.apply(Aa).is_zero()
        out["Lap A alpha = A Lap alpha"] = lap(Aa) == A.apply(lap(alpha))
        extra = S.L_power(S.n - p + 1).apply(S.d.apply(lap(alpha))).is_zero()
        out["L^(n-p+1) d Lap alpha = 0"] = extra
        if extra:
            out["A alpha = 0"] = Aa.is_zero()
    return out
