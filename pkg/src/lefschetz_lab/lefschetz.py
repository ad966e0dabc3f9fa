"""Cohomological Lefschetz maps, the metric-free relation and the obstruction verdict.

The relation route only uses the contact form: representatives are closed
p-forms beta with i_xi beta = 0 and L^{n-p+1} beta = 0, sent to
eps_eta L^{n-p} beta.  The harmonic route goes through the projection onto
Laplace-harmonic forms of a Sasakian metric.  Both are expressed in the
cohomology bases chosen by the complex, so their matrices are comparable.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from .complex import InvariantComplex, class_coordinates
from .errors import InvariantViolation, PreconditionError
from .exterior import Form, power, wedge, wedge_all
from .hodge import integrate_top
from .linalg import QMatrix, kernel, rank, rref_pivots, solve, vstack
from .sasakian import ContactStructure, SasakianStructure

GRAPH_OF_ISOMORPHISM = "graph_of_isomorphism"
NOT_WELL_DEFINED = "not_well_defined"
DOMAIN_DEFICIENT = "domain_deficient"
NON_BIJECTIVE = "non_bijective"

LEFSCHETZ_CONTACT = "lefschetz_contact"
OBSTRUCTED = "obstructed"


@dataclass
class LefschetzRelationReport:
    degree: int
    target_degree: int
    constraint_basis: QMatrix      # columns span V_p
    pr: QMatrix                    # V_p -> H^p coordinates
    psi: QMatrix                   # V_p -> H^{2n+1-p} coordinates
    domain_full: bool
    well_defined: bool
    bijective: bool
    matrix: QMatrix | None         # induced map H^p -> H^{2n+1-p}
    representatives: list[Form] = field(default_factory=list)

    @property
    def is_graph_of_isomorphism(self) -> bool:
        return self.well_defined and self.domain_full and self.bijective

    @property
    def classification(self) -> str:
        if not self.well_defined:
            return NOT_WELL_DEFINED
        if not self.domain_full:
            return DOMAIN_DEFICIENT
        if not self.bijective:
            return NON_BIJECTIVE
        return GRAPH_OF_ISOMORPHISM


def _coords_matrix(C: InvariantComplex, degree: int, cols: QMatrix) -> QMatrix:
    H = C.cohomology(degree)
    coords = class_coordinates(H, cols)
    return QMatrix.from_columns(H.betti, [{i: v for i, v in enumerate(c) if v} for c in coords])


def constraint_space(C: InvariantComplex, contact: ContactStructure, p: int) -> QMatrix:
    n = contact.n
    ops = [C.d, contact.i_xi, contact.L_power(n - p + 1)]
    mats = [op[p] for op in ops if op.has_degree(p) and op[p].nrows]
    return kernel(vstack(mats))


def relation(C: InvariantComplex, contact: ContactStructure, p: int) -> LefschetzRelationReport:
    n = contact.n
    if not 0 <= p <= n:
        raise PreconditionError(f"relation needs 0 <= p <= n = {n}, got {p}")
    q_ = 2 * n + 1 - p
    V = constraint_space(C, contact, p)
    images = (contact.eps_eta[p + 2 * (n - p)] @ contact.L_power(n - p)[p]) @ V
    if C.d.has_degree(q_) and not (C.d[q_] @ images).is_zero():
        raise InvariantViolation("eps_eta L^{n-p} sent a constrained form to a non-closed form")
    pr = _coords_matrix(C, p, V)
    psi = _coords_matrix(C, q_, images)
    bp, bq = pr.nrows, psi.nrows
    domain_full = rank(pr) == bp
    K = kernel(pr)
    well_defined = (psi @ K).is_zero()
    matrix = None
    bijective = False
    if well_defined and domain_full:
        # M pr = psi  <=>  pr^T M^T = psi^T
        matrix = solve(pr.T, psi.T).T
        bijective = bp == bq and rank(matrix) == bp
    # constrained representatives of a basis of H^p (pivot columns of pr)
    reps = [Form.from_vector(C.dim, p, V.col(j)) for j in rref_pivots(pr)]
    return LefschetzRelationReport(p, q_, V, pr, psi, domain_full, well_defined, bijective, matrix, reps)


def lef_matrix_harmonic(S: SasakianStructure, p: int) -> QMatrix:
    """[beta] -> [eps_eta L^{n-p} Pi beta] in the complex's cohomology bases."""
    if not S.verified:
        raise PreconditionError("lef_matrix_harmonic needs a verified Sasakian structure")
    n = S.n
    if not 0 <= p <= n:
        raise PreconditionError(f"needs 0 <= p <= n = {n}, got {p}")
    C = S.complex
    H = C.cohomology(p)
    reps = QMatrix.from_columns(H.quotient_basis.nrows, [w.to_vector() for w in H.representatives])
    F = S.eps_eta[2 * n - p] @ S.L_power(n - p)[p]
    return _coords_matrix(C, 2 * n + 1 - p, F @ S.hodge.projector(p) @ reps)


def _same_algebra(A: InvariantComplex, B: InvariantComplex) -> bool:
    # the fixture name is not part of the algebra
    return A.dim == B.dim and all(A.spec.differential_of(k) == B.spec.differential_of(k)
                                  for k in range(1, A.dim + 1))


def metric_independence_check(C: InvariantComplex, contact: ContactStructure, p: int,
                              S1: SasakianStructure, S2: SasakianStructure) -> tuple[bool, dict]:
    for S in (S1, S2):
        if S.eta != contact.eta:
            raise PreconditionError("structures must share the contact form eta")
        if S.complex is not C and not _same_algebra(S.complex, C):
            raise PreconditionError("structures live on a different complex")
    M1 = lef_matrix_harmonic(S1, p)
    M2 = lef_matrix_harmonic(S2, p)
    R = relation(C, contact, p).matrix
    residual = {
        "S1-S2": M1 - M2,
        "S1-relation": None if R is None else M1 - R,
    }
    ok = residual["S1-S2"].is_zero() and R is not None and residual["S1-relation"].is_zero()
    return ok, residual


def bilinear_form(C: InvariantComplex, contact: ContactStructure, p: int,
                  representatives: list[Form]) -> QMatrix:
    """B_ij = integral of eta ^ Phi^{n-p} ^ w_i ^ w_j (coordinate volume)."""
    n = contact.n
    Lp = contact.L_power(n - p + 1)
    for w in representatives:
        if w.degree != p:
            raise PreconditionError(f"representative of degree {w.degree}, expected {p}")
        bad = (not C.differential(w).is_zero()
               or (p > 0 and not contact.i_xi.apply(w).is_zero())
               or (Lp.has_degree(p) and not Lp.apply(w).is_zero()))
        if bad:
            raise PreconditionError("representative violates d w = 0, i_xi w = 0 or L^{n-p+1} w = 0")
    pre = wedge(contact.eta, power(contact.Phi, n - p))
    k = len(representatives)
    rows = [[integrate_top(wedge_all([pre, representatives[i], representatives[j]])) for j in range(k)]
            for i in range(k)]
    return QMatrix.from_dense(rows) if k else QMatrix(0, 0)


def betti_parity(C: InvariantComplex, contact: ContactStructure) -> dict[int, tuple[int, bool]]:
    """Odd p <= n -> (b_p, b_p even)."""
    return {p: (C.betti(p), C.betti(p) % 2 == 0) for p in range(1, contact.n + 1, 2)}


@dataclass
class ObstructionVerdict:
    relations: dict[int, str]
    parity: dict[int, tuple[int, bool]]
    reasons: list[str]
    crosschecked: bool = False

    @property
    def overall(self) -> str:
        return OBSTRUCTED if self.reasons else LEFSCHETZ_CONTACT


def verdict(C: InvariantComplex, contact: ContactStructure, S: SasakianStructure | None = None,
            reports: dict[int, LefschetzRelationReport] | None = None) -> ObstructionVerdict:
    reports = reports or {p: relation(C, contact, p) for p in range(contact.n + 1)}
    reasons = []
    for p, r in reports.items():
        if not r.is_graph_of_isomorphism:
            reasons.append(f"relation at p={p}: {r.classification}")
    parity = betti_parity(C, contact)
    for p, (b, even) in parity.items():
        if not even:
            reasons.append(f"parity at p={p}: b{p}={b} odd")
    v = ObstructionVerdict({p: r.classification for p, r in reports.items()}, parity, reasons)
    if S is not None and S.verified:
        # a Sasakian structure forces both routes to agree on an isomorphism
        for p, r in reports.items():
            if r.matrix is None or not r.is_graph_of_isomorphism:
                raise InvariantViolation(f"verified Sasakian structure but relation at p={p} is {r.classification}")
            if lef_matrix_harmonic(S, p) != r.matrix:
                raise InvariantViolation(f"harmonic and relation routes disagree at p={p}")
        v.crosschecked = True
    return v
