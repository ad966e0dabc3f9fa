"""Eigenform families of the Laplacian and the Lefschetz ladder between them."""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb, factorial, floor
from numbers import Rational

from .errors import PreconditionError, StructuralError
from .exterior import Form
from .linalg import QMatrix, kernel, q, vstack
from .sasakian import SasakianStructure


class FamilyTag(str, enum.Enum):
    CLOSED = "closed_family"      # killed by d, i_xi, eps_eta delta
    COCLOSED = "coclosed_family"  # killed by delta, eps_eta, i_xi d

    def __str__(self) -> str:
        return self.value


def nu(n: int, p: int, k: int) -> int:
    return k * (n - p - k + 1)


def _k_range(lo: Fraction, hi: Fraction) -> range:
    return range(max(0, ceil(lo)), floor(hi) + 1)


def allowed_nu(n: int, p: int, family: FamilyTag) -> set[tuple[int, int]]:
    """Admissible (k, nu) pairs for a nonzero family space in degree p."""
    if not 0 <= p <= 2 * n + 1:
        raise PreconditionError(f"degree {p} outside 0..{2 * n + 1}")
    family = FamilyTag(family)
    if family is FamilyTag.CLOSED:
        ks = _k_range(Fraction(p - n, 2), Fraction(p, 2))
        return {(k, nu(n, p - 2 * k, k)) for k in ks}
    ks = _k_range(Fraction(p + 1 - n, 2), Fraction(p + 1, 2))
    return {(k, nu(n, p + 1 - 2 * k, k)) for k in ks}


def admissible_values(n: int, p: int, family: FamilyTag) -> set[int]:
    return {v for _, v in allowed_nu(n, p, family)}


def annihilators(S: SasakianStructure, p: int, family: FamilyTag) -> list[QMatrix]:
    """Matrices (on degree p) of the three operators defining the family."""
    family = FamilyTag(family)
    if family is FamilyTag.CLOSED:
        ops = [S.d, S.i_xi, S.eps_eta @ S.delta]
    else:
        ops = [S.delta, S.eps_eta, S.i_xi @ S.d]
    return [op[p] for op in ops if op.has_degree(p)]


class FamilySpaces:
    """Cached exact family subspaces of one Sasakian structure."""

    def __init__(self, S: SasakianStructure):
        self.S = S
        self._base: dict[tuple[int, FamilyTag], QMatrix] = {}

    def base(self, p: int, family: FamilyTag) -> QMatrix:
        """Kernel of the three annihilators (before the eigen-equation)."""
        key = (p, FamilyTag(family))
        if key not in self._base:
            mats = annihilators(self.S, p, family)
            size = comb(self.S.dim, p)
            self._base[key] = kernel(vstack(mats)) if mats else QMatrix.identity(size)
        return self._base[key]

    def space(self, p: int, nu_: Rational, family: FamilyTag) -> QMatrix:
        W = self.base(p, family)
        if W.ncols == 0:
            return W
        size = W.nrows
        A = (self.S.hodge.laplacian_matrix(p) - QMatrix.identity(size, 4 * q(nu_))) @ W
        return W @ kernel(A)


def family_space(S: SasakianStructure, p: int, nu_: Rational, family: FamilyTag) -> QMatrix:
    """Basis (columns) of the family space of degree p with Laplace eigenvalue 4 nu."""
    mats = annihilators(S, p, family)
    size = comb(S.dim, p)
    mats.append(S.hodge.laplacian_matrix(p) - QMatrix.identity(size, 4 * q(nu_)))
    return kernel(vstack(mats))


def membership(S: SasakianStructure, omega: Form, family: FamilyTag) -> Rational | None:
    if omega.is_zero():
        raise PreconditionError("membership of the zero form is undetermined (every nu fits)")
    p = omega.degree
    v = omega.to_vector()
    for A in annihilators(S, p, family):
        if A.apply(v):
            return None
    lv = S.hodge.laplacian_matrix(p).apply(v)
    i = next(iter(v))
    lam = q(Fraction(lv.get(i, 0)) / v[i])
    if any(lv.get(j, 0) != lam * c for j, c in v.items()) or any(j not in v for j in lv):
        return None
    return q(Fraction(lam) / 4)


# -- ladder trace -----------------------------------------------------------

@dataclass
class LadderNode:
    degree: int
    nu: Rational
    family: FamilyTag
    form: Form


@dataclass
class LadderTrace:
    nodes: list[LadderNode]
    # steps[i] is the operator taking nodes[i] to nodes[i+1]
    steps: list[str]
    # (d, delta, eps_eta, i_xi) detours between consecutive closed nodes
    interleaved: list[LadderNode] = field(default_factory=list)
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


def _is_harmonic(S: SasakianStructure, omega: Form) -> bool:
    return S.hodge.laplace(omega).is_zero()


def _expect_member(S, form: Form, family: FamilyTag, nu_: Rational, what: str):
    if form.is_zero():
        raise StructuralError(f"{what}: vanished, expected a nonzero {family} member")
    got = membership(S, form, family)
    if got != nu_:
        raise StructuralError(f"{what}: expected {family} at nu={nu_}, found {got}")


def ladder_trace(S: SasakianStructure, omega: Form) -> LadderTrace:
    """Follow a harmonic p-form (p <= n) up the L-chain and across with eps_eta."""
    n, p = S.n, omega.degree
    if p > n:
        raise PreconditionError(f"ladder needs p <= n = {n}, got {p}")
    if omega.is_zero() or not _is_harmonic(S, omega):
        raise PreconditionError("ladder seed must be a nonzero harmonic form")
    nodes = [LadderNode(p, 0, FamilyTag.CLOSED, omega)]
    steps: list[str] = []
    inter: list[LadderNode] = []
    checks: dict[str, bool] = {}
    cur = omega
    for k in range(n - p):
        nxt_nu = nu(n, p, k + 1)
        # detour closed(p+2k) -> coclosed(p+2k+1) -> closed(p+2k+2)
        e = S.eps_eta.apply(cur)
        _expect_member(S, e, FamilyTag.COCLOSED, nxt_nu, f"eps_eta L^{k} omega")
        inter.append(LadderNode(p + 2 * k + 1, nxt_nu, FamilyTag.COCLOSED, e))
        checks[f"i_xi eps_eta = I at k={k}"] = S.i_xi.apply(e) == cur
        nxt = S.L.apply(cur)
        checks[f"2L = d eps_eta at k={k}"] = S.d.apply(e) == 2 * nxt
        checks[f"delta d = 4nu at k={k}"] = S.delta.apply(S.d.apply(e)) == (4 * nxt_nu) * e
        lap = S.hodge.laplace(nxt)
        if lap != (4 * nxt_nu) * nxt:
            raise StructuralError(f"Lap(L^{k + 1} omega) != 4*{nxt_nu} L^{k + 1} omega")
        _expect_member(S, nxt, FamilyTag.CLOSED, nxt_nu, f"L^{k + 1} omega")
        checks[f"Lambda L = nu at k={k}"] = S.Lambda.apply(nxt) == nxt_nu * cur
        checks[f"2 Lambda = i_xi delta at k={k + 1}"] = (
            2 * S.Lambda.apply(nxt) == S.i_xi.apply(S.delta.apply(nxt)))
        nodes.append(LadderNode(p + 2 * k + 2, nxt_nu, FamilyTag.CLOSED, nxt))
        steps.append("L")
        cur = nxt
    top = S.eps_eta.apply(cur)
    if top.is_zero() or not _is_harmonic(S, top):
        raise StructuralError("eps_eta L^{n-p} omega is not a nonzero harmonic form")
    _expect_member(S, top, FamilyTag.COCLOSED, 0, "eps_eta L^{n-p} omega")
    checks["i_xi eps_eta = I at top"] = S.i_xi.apply(top) == cur
    nodes.append(LadderNode(2 * n + 1 - p, 0, FamilyTag.COCLOSED, top))
    steps.append("eps_eta")
    return LadderTrace(nodes, steps, inter, checks)


# -- Lefschetz maps on harmonic forms --------------------------------------

def lefschetz_F(S: SasakianStructure, p: int, omega: Form) -> Form:
    if omega.degree != p or p > S.n:
        raise PreconditionError(f"F_p needs a p-form with p <= n, got degree {omega.degree}, p={p}")
    if not _is_harmonic(S, omega):
        raise PreconditionError("F_p: input is not harmonic")
    return S.eps_eta.apply(S.L_power(S.n - p).apply(omega))


def lefschetz_G(S: SasakianStructure, p: int, omega: Form) -> Form:
    q_ = 2 * S.n + 1 - p
    if omega.degree != q_ or p > S.n:
        raise PreconditionError(f"G_p needs a {q_}-form, got degree {omega.degree}")
    if not _is_harmonic(S, omega):
        raise PreconditionError("G_p: input is not harmonic")
    return S.Lambda_power(S.n - p).apply(S.i_xi.apply(omega))


def lefschetz_constant(n: int, p: int) -> int:
    return factorial(n - p) ** 2


# -- exhaustive scan and figure data -----------------------------------------

def _denominator(A: QMatrix) -> int:
    from math import lcm

    D = 1
    for col in A.cols.values():
        for v in col.values():
            if isinstance(v, Fraction):
                D = lcm(D, v.denominator)
    return D


def candidate_nus(S: SasakianStructure, p: int) -> list[Fraction]:
    """Every nu for which 4 nu could be a rational eigenvalue of Lap_p.

    D * Lap_p has integer entries, so its rational eigenvalues are integers
    bounded by the largest absolute column sum.
    """
    A = S.hodge.laplacian_matrix(p)
    D = _denominator(A)
    bound = max((sum(abs(v) for v in col.values()) for col in A.cols.values()), default=0)
    top = floor(D * bound)
    return [q(Fraction(m, 4 * D)) for m in range(0, top + 1)]


def scan_families(S: SasakianStructure, spaces: FamilySpaces | None = None) -> dict[tuple, int]:
    """(p, nu, family) -> dim for every nonzero space over the full candidate grid."""
    spaces = spaces or FamilySpaces(S)
    out = {}
    for p in range(S.dim + 1):
        cands = candidate_nus(S, p)
        for fam in FamilyTag:
            if spaces.base(p, fam).ncols == 0:
                continue
            for v in cands:
                dim = spaces.space(p, v, fam).ncols
                if dim:
                    out[(p, v, fam)] = dim
    return out


def figure_positions(n: int) -> tuple[set[tuple[int, int, FamilyTag]], set[tuple]]:
    """Positions and segments reachable from harmonic seeds in degrees q <= n.

    Every position lies in the allowed_nu grid; the grid also contains slots
    that no chain reaches (negative nu, and nu = 0 on the wrong side of n).
    """
    C, K = FamilyTag.CLOSED, FamilyTag.COCLOSED
    nodes, edges = set(), set()
    for q_ in range(n + 1):
        prev = (q_, 0, C)
        nodes.add(prev)
        for k in range(1, n - q_ + 1):
            v = nu(n, q_, k)
            a, b = (q_ + 2 * k - 1, v, K), (q_ + 2 * k, v, C)
            nodes |= {a, b}
            edges |= {(*prev, *a, "eps_eta/i_xi"), (*a, *b, "d/delta")}
            prev = b
        end = (2 * n + 1 - q_, 0, K)
        nodes.add(end)
        edges.add((*prev, *end, "eps_eta/i_xi"))
    return nodes, edges


@dataclass
class FigureData:
    n: int
    nodes: list[tuple[int, Rational, FamilyTag, int]]
    edges: list[tuple[int, Rational, FamilyTag, int, Rational, FamilyTag, str]]

    def node_set(self) -> set[tuple[int, Rational, FamilyTag]]:
        return {(p, v, f) for p, v, f, _ in self.nodes}


def figure_data(S: SasakianStructure, spaces: FamilySpaces | None = None) -> FigureData:
    if not S.verified:
        raise PreconditionError("figure data needs a verified Sasakian structure")
    spaces = spaces or FamilySpaces(S)
    n = S.n
    nodes = []
    for p in range(S.dim + 1):
        for fam in FamilyTag:
            for v in sorted(admissible_values(n, p, fam)):
                dim = spaces.space(p, v, fam).ncols
                if dim:
                    nodes.append((p, v, fam, dim))
    present = {(p, v, f) for p, v, f, _ in nodes}
    edges = []
    for p, v, fam, _ in nodes:
        if fam is FamilyTag.COCLOSED and v != 0 and (p + 1, v, FamilyTag.CLOSED) in present:
            edges.append((p, v, fam, p + 1, v, FamilyTag.CLOSED, "d/delta"))
        if fam is FamilyTag.CLOSED:
            tgt = (p + 1, v - p + n, FamilyTag.COCLOSED)
            if tgt in present:
                edges.append((p, v, fam, *tgt, "eps_eta/i_xi"))
    return FigureData(n, nodes, edges)
