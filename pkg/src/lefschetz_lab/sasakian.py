"""Contact and Sasakian structures on an invariant complex and their operators."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from numbers import Rational
from typing import Sequence

from .complex import InvariantComplex
from .errors import ContactError, PreconditionError, SasakianError
from .exterior import (
    Form,
    GradedOperator,
    endo_operator,
    interior_operator,
    power,
    wedge,
    wedge_operator,
)
from .hodge import HodgePackage, MetricStructure
from .linalg import InconsistentSystem, QMatrix, dense_mul, q, rank, solve

OPERATOR_NAMES = (
    "eps_eta", "i_xi", "i_phi", "L", "Lambda", "lie_xi", "lie_phi", "deg", "d", "delta", "laplacian",
)


def pair(omega: Form, i: int, j: int) -> Rational:
    """omega(E_i, E_j) for a 2-form (1-based indices)."""
    if i == j:
        return 0
    if i < j:
        return omega.coeffs.get((i, j), 0)
    return -omega.coeffs.get((j, i), 0)


def two_form_matrix(omega: Form) -> list[list[Rational]]:
    return [[pair(omega, i, j) for j in range(1, omega.dim + 1)] for i in range(1, omega.dim + 1)]


@dataclass
class ContactStructure:
    complex: InvariantComplex
    eta: Form
    xi: tuple
    d_eta: Form

    @property
    def dim(self) -> int:
        return self.complex.dim

    @property
    def n(self) -> int:
        return (self.dim - 1) // 2

    @cached_property
    def Phi(self) -> Form:
        return Fraction(1, 2) * self.d_eta

    @cached_property
    def eps_eta(self) -> GradedOperator:
        return wedge_operator(self.eta)

    @cached_property
    def i_xi(self) -> GradedOperator:
        return interior_operator(self.xi)

    @cached_property
    def L(self) -> GradedOperator:
        return wedge_operator(self.Phi)

    def L_power(self, k: int) -> GradedOperator:
        return wedge_operator(power(self.Phi, k))


def reeb(C: InvariantComplex, eta: Form) -> tuple:
    """The unique xi with i_xi eta = 1 and i_xi d eta = 0."""
    if eta.degree != 1 or eta.dim != C.dim:
        raise PreconditionError("eta must be a 1-form on the complex's frame")
    dim = C.dim
    if dim % 2 == 0:
        raise ContactError(f"contact structures need odd dimension, got {dim}")
    n = (dim - 1) // 2
    d_eta = C.differential(eta)
    if wedge(eta, power(d_eta, n)).is_zero():
        raise ContactError("eta ^ (d eta)^n = 0: eta is not a contact form")
    rows = [[eta.coeffs.get((k,), 0) for k in range(1, dim + 1)]]
    for j in range(1, dim + 1):
        rows.append([pair(d_eta, k, j) for k in range(1, dim + 1)])
    A = QMatrix.from_dense(rows)
    if rank(A) != dim:
        raise ContactError("Reeb system is singular")
    rhs = QMatrix.from_dense([[1]] + [[0]] * dim)
    try:
        X = solve(A, rhs)
    except InconsistentSystem as exc:
        raise ContactError("Reeb system has no solution") from exc
    return tuple(X[k, 0] for k in range(dim))


def contact_structure(C: InvariantComplex, eta: Form) -> ContactStructure:
    xi = reeb(C, eta)
    return ContactStructure(C, eta, xi, C.differential(eta))


@dataclass
class AxiomResult:
    name: str
    passed: bool
    witness: str | None = None


@dataclass
class AxiomReport:
    results: list[AxiomResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failed(self) -> list[str]:
        return [r.name for r in self.results if not r.passed]

    def __getitem__(self, name: str) -> AxiomResult:
        for r in self.results:
            if r.name == name:
                return r
        raise KeyError(name)


def _mat_vec(M, v):
    return [q(sum(M[i][k] * v[k] for k in range(len(v)))) for i in range(len(M))]


def _first_bad(A, B, label):
    for i in range(len(A)):
        for j in range(len(A[0])):
            if A[i][j] != B[i][j]:
                return f"{label} at (E{i + 1}, E{j + 1}): {A[i][j]} != {B[i][j]}"
    return None


def derive_phi(contact: ContactStructure, metric: MetricStructure) -> list[list[Rational]]:
    """phi from Phi(X, Y) = g(X, phi Y), i.e. phi = g^{-1} Phi_mat = gram1 Phi_mat."""
    return dense_mul([list(r) for r in metric.gram1], two_form_matrix(contact.Phi))


def nijenhuis(C: InvariantComplex, phi, X, Y) -> list[Rational]:
    """N_phi(X, Y) = phi^2[X,Y] + [phiX, phiY] - phi[phiX, Y] - phi[X, phiY]."""
    br = lie_bracket(C, X, Y)
    pX, pY = _mat_vec(phi, X), _mat_vec(phi, Y)
    t1 = _mat_vec(phi, _mat_vec(phi, br))
    t2 = lie_bracket(C, pX, pY)
    t3 = _mat_vec(phi, lie_bracket(C, pX, Y))
    t4 = _mat_vec(phi, lie_bracket(C, X, pY))
    return [q(a + b - c - d) for a, b, c, d in zip(t1, t2, t3, t4)]


def lie_bracket(C: InvariantComplex, X, Y) -> list[Rational]:
    dim = C.dim
    out = [0] * dim
    for i in range(dim):
        if not X[i]:
            continue
        for j in range(dim):
            if not Y[j] or i == j:
                continue
            b = C.spec.bracket(i + 1, j + 1)
            for k in range(dim):
                if b[k]:
                    out[k] += X[i] * Y[j] * b[k]
    return [q(v) for v in out]


def check_axioms(contact: ContactStructure, metric: MetricStructure, phi) -> AxiomReport:
    C = contact.complex
    dim = C.dim
    g = [list(r) for r in metric.vector_metric]
    eta = [contact.eta.coeffs.get((k,), 0) for k in range(1, dim + 1)]
    xi = list(contact.xi)
    rep = AxiomReport()

    gxi = _mat_vec(g, xi)
    bad = next((k for k in range(dim) if gxi[k] != eta[k]), None)
    rep.results.append(AxiomResult("g(xi,-)=eta", bad is None,
                                   None if bad is None else f"component e{bad + 1}: {gxi[bad]} != {eta[bad]}"))

    Phi_mat = two_form_matrix(contact.Phi)
    g_phi = dense_mul(g, phi)
    w = _first_bad(Phi_mat, g_phi, "Phi vs g(.,phi.)")
    rep.results.append(AxiomResult("Phi(X,Y)=g(X,phiY)", w is None, w))

    phi2 = dense_mul(phi, phi)
    target = [[q((-1 if i == j else 0) + xi[i] * eta[j]) for j in range(dim)] for i in range(dim)]
    w = _first_bad(phi2, target, "phi^2 vs -I + eta(x)xi")
    rep.results.append(AxiomResult("phi^2=-I+eta(x)xi", w is None, w))

    phiT = [list(r) for r in zip(*phi)]
    lhs = dense_mul(phiT, dense_mul(g, phi))
    rhs = [[q(g[i][j] - eta[i] * eta[j]) for j in range(dim)] for i in range(dim)]
    w = _first_bad(lhs, rhs, "g(phiX,phiY) vs g(X,Y)-eta(X)eta(Y)")
    rep.results.append(AxiomResult("g(phiX,phiY)=g-eta(x)eta", w is None, w))

    w = None
    for i in range(dim):
        for j in range(i + 1, dim):
            X = [1 if k == i else 0 for k in range(dim)]
            Y = [1 if k == j else 0 for k in range(dim)]
            N = nijenhuis(C, phi, X, Y)
            de = pair(contact.d_eta, i + 1, j + 1)
            tot = [q(N[k] + de * xi[k]) for k in range(dim)]
            if any(tot):
                w = f"N_phi(E{i + 1},E{j + 1}) + d eta(E{i + 1},E{j + 1}) xi = {tot}"
                break
        if w:
            break
    rep.results.append(AxiomResult("normality", w is None, w))

    pxi = _mat_vec(phi, xi)
    rep.results.append(AxiomResult("phi(xi)=0", not any(pxi), None if not any(pxi) else f"phi xi = {pxi}"))
    eta_phi = [q(sum(eta[k] * phi[k][j] for k in range(dim))) for j in range(dim)]
    rep.results.append(AxiomResult("eta o phi=0", not any(eta_phi),
                                   None if not any(eta_phi) else f"eta o phi = {eta_phi}"))
    return rep


class SasakianStructure:
    """(eta, xi, phi, g) on an invariant complex, with its axiom report.

    Operators are only handed out for verified structures unless the
    structure was built in diagnostic mode.
    """

    def __init__(self, contact: ContactStructure, metric: MetricStructure, phi, report: AxiomReport,
                 diagnostic: bool = False):
        self.contact = contact
        self.metric = metric
        self.phi = tuple(tuple(q(x) for x in row) for row in phi)
        self.report = report
        self.diagnostic = diagnostic
        self.complex = contact.complex
        self.dim = contact.dim
        self.n = contact.n
        self.hodge = HodgePackage(self.complex, metric)
        self._Lpow: dict[int, GradedOperator] = {}

    @property
    def verified(self) -> bool:
        return self.report.passed

    @property
    def eta(self) -> Form:
        return self.contact.eta

    @property
    def xi(self) -> tuple:
        return self.contact.xi

    @property
    def Phi(self) -> Form:
        return self.contact.Phi

    def operator(self, name: str) -> GradedOperator:
        if not (self.verified or self.diagnostic):
            raise PreconditionError(f"structure is not verified Sasakian (failed: {', '.join(self.report.failed())})")
        if name not in OPERATOR_NAMES:
            raise KeyError(f"unknown operator {name!r}")
        return getattr(self, name)

    # operators ----------------------------------------------------------
    @property
    def d(self) -> GradedOperator:
        return self.complex.d

    @property
    def delta(self) -> GradedOperator:
        return self.hodge.delta

    @property
    def laplacian(self) -> GradedOperator:
        return self.hodge.laplacian

    @property
    def eps_eta(self) -> GradedOperator:
        return self.contact.eps_eta

    @property
    def i_xi(self) -> GradedOperator:
        return self.contact.i_xi

    @property
    def L(self) -> GradedOperator:
        return self.contact.L

    @cached_property
    def i_phi(self) -> GradedOperator:
        return endo_operator(self.phi)

    @cached_property
    def Lambda(self) -> GradedOperator:
        L = self.L
        mats = {p + 2: self.metric.adjoint(L[p], p, p + 2) for p in range(self.dim - 1)}
        return GradedOperator(self.dim, -2, mats)

    @cached_property
    def lie_xi(self) -> GradedOperator:
        return self.d @ self.i_xi + self.i_xi @ self.d

    @cached_property
    def lie_phi(self) -> GradedOperator:
        return self.i_phi @ self.d - self.d @ self.i_phi

    @cached_property
    def deg(self) -> GradedOperator:
        return GradedOperator.diagonal(self.dim, lambda p: p)

    @cached_property
    def n_minus_deg(self) -> GradedOperator:
        n = self.n
        return GradedOperator.diagonal(self.dim, lambda p: n - p)

    def L_power(self, k: int) -> GradedOperator:
        if k not in self._Lpow:
            self._Lpow[k] = self.L ** k
        return self._Lpow[k]

    def Lambda_power(self, k: int) -> GradedOperator:
        return self.Lambda ** k


def sasakian_check(C: InvariantComplex, eta: Form | ContactStructure, metric: MetricStructure,
                   phi: Sequence[Sequence] | None = None, strict: bool = True) -> SasakianStructure:
    """Verify every Sasakian axiom exactly.

    With ``strict`` a failing structure raises SasakianError carrying the
    report; otherwise a diagnostic (unverified) structure is returned.
    """
    contact = eta if isinstance(eta, ContactStructure) else contact_structure(C, eta)
    if metric.dim != C.dim:
        raise PreconditionError("metric dimension differs from the complex")
    if phi is None:
        phi = derive_phi(contact, metric)
    phi = [[q(x) for x in row] for row in phi]
    report = check_axioms(contact, metric, phi)
    if strict and not report.passed:
        raise SasakianError(f"not Sasakian: failed {', '.join(report.failed())}", report)
    return SasakianStructure(contact, metric, phi, report, diagnostic=not report.passed)


def adjoint_pairs_check(contact: ContactStructure, metric: MetricStructure) -> dict:
    """eps_eta = i_xi^* (adjoint formula) and Lambda = L^* (adjoint vs star route).

    Returns ``{name: {degree: residual QMatrix}}`` with only nonzero residuals.
    """
    from .hodge import star_matrix
    from .errors import MetricError

    dim = contact.dim
    out: dict[str, dict[int, QMatrix]] = {"eps_eta=i_xi*": {}, "Lambda=L*": {}}
    E, I = contact.eps_eta, contact.i_xi
    for p in range(dim):
        r = E[p] - metric.adjoint(I[p + 1], p + 1, p)
        if not r.is_zero():
            out["eps_eta=i_xi*"][p] = r
    L = contact.L
    try:
        stars = {p: star_matrix(metric, p) for p in range(dim + 1)}
    except MetricError:
        out["Lambda=L*"] = None
        return out
    for p in range(2, dim + 1):
        lam_adj = metric.adjoint(L[p - 2], p - 2, p)
        lam_star = stars[dim - p + 2] @ L[dim - p] @ stars[p]
        r = lam_adj - lam_star
        if not r.is_zero():
            out["Lambda=L*"][p] = r
    return out
