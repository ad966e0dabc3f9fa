"""Chevalley-Eilenberg complex of invariant forms and its cohomology.

A Lie algebra is given by the differentials of its degree-one generators
(Salamon notation): ``de^k = sum a^k_ij e^i ^ e^j``.  With the convention
``dtheta(X, Y) = -theta([X, Y])`` on invariant forms this means
``[E_i, E_j] = -sum_k a^k_ij E_k``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational
from typing import Mapping, Sequence

from .errors import JacobiError, PreconditionError
from .exterior import Form, GradedOperator, basis, wedge
from .linalg import QMatrix, column_basis, hstack, kernel, q, rank, rref_pivots, solve


@dataclass(frozen=True)
class LieAlgebraSpec:
    name: str
    dim: int
    # generator k (1-based) -> list of (coeff, i, j), i < j
    diff1: Mapping[int, Sequence[tuple]] = field(default_factory=dict)

    def differential_of(self, k: int) -> Form:
        terms = {}
        for c, i, j in self.diff1.get(k, ()):
            if not (1 <= i < j <= self.dim):
                raise ValueError(f"de{k}: index pair ({i}, {j}) must satisfy 1 <= i < j <= {self.dim}")
            terms[(i, j)] = q(terms.get((i, j), 0) + q(c))
        return Form(self.dim, 2, terms)

    def bracket(self, i: int, j: int) -> list[Rational]:
        """[E_i, E_j] as a coefficient vector (1-based indices)."""
        out = [0] * self.dim
        if i == j:
            return out
        sign = 1
        if i > j:
            i, j, sign = j, i, -1
        for k in range(1, self.dim + 1):
            a = self.differential_of(k).coeffs.get((i, j), 0)
            out[k - 1] = -sign * a
        return out


def salamon(name: str, dim: int, diffs: Mapping[int, Sequence[tuple]]) -> LieAlgebraSpec:
    return LieAlgebraSpec(name, dim, {k: tuple(tuple(t) for t in v) for k, v in diffs.items()})


class InvariantComplex:
    """Exterior algebra of the dual of a Lie algebra with its differential."""

    def __init__(self, spec: LieAlgebraSpec, d: GradedOperator):
        self.spec = spec
        self.dim = spec.dim
        self.d = d
        self._cohomology: dict[int, CohomologySpace] = {}

    @property
    def n(self) -> int:
        return (self.dim - 1) // 2

    def dimensions(self) -> list[int]:
        return [len(basis(self.dim, p)) for p in range(self.dim + 1)]

    def differential(self, a: Form) -> Form:
        if a.degree >= self.dim:
            return Form(self.dim, a.degree + 1)
        return self.d.apply(a)

    def check_d_squared(self) -> None:
        for p in range(self.dim - 1):
            dd = self.d[p + 1] @ self.d[p]
            if not dd.is_zero():
                i, j, _ = dd.first_nonzero()
                src = basis(self.dim, p)[j]
                tgt = basis(self.dim, p + 2)[i]
                raise JacobiError(
                    f"d^2 != 0: d(d e^{_name(src)}) has coefficient on e^{_name(tgt)}",
                    generator=src[0] if len(src) == 1 else None,
                    triple=tgt if len(tgt) == 3 else None,
                )

    def betti(self, p: int) -> int:
        return self.cohomology(p).betti

    def betti_numbers(self) -> list[int]:
        return [self.betti(p) for p in range(self.dim + 1)]

    def cohomology(self, p: int) -> "CohomologySpace":
        if p not in self._cohomology:
            self._cohomology[p] = _cohomology(self, p)
        return self._cohomology[p]


def _name(idx) -> str:
    return "".join(map(str, idx)) if idx else "0"


def _leibniz_d(spec: LieAlgebraSpec, diffs: list[Form], a: Form) -> Form:
    dim = spec.dim
    out = Form(dim, a.degree + 1)
    for key, c in a.coeffs.items():
        for s, k in enumerate(key):
            dk = diffs[k - 1]
            if dk.is_zero():
                continue
            left = Form(dim, s, {key[:s]: 1})
            right = Form(dim, len(key) - s - 1, {key[s + 1:]: 1})
            term = wedge(wedge(left, dk), right)
            out = out + ((-1) ** s * c) * term
    return out


def build_complex(spec: LieAlgebraSpec) -> InvariantComplex:
    """Extend d from generators as an anti-derivation and verify d^2 = 0."""
    if spec.dim < 1:
        raise ValueError("dimension must be >= 1")
    diffs = [spec.differential_of(k) for k in range(1, spec.dim + 1)]
    # Jacobi first, on generators, so the error names the offending generator
    for k, dk in enumerate(diffs, start=1):
        dd = _leibniz_d(spec, diffs, dk)
        if not dd.is_zero():
            triple = min(dd.coeffs)
            raise JacobiError(
                f"Jacobi identity fails: d(d e^{k}) has coefficient {dd.coeffs[triple]} on e^{_name(triple)}",
                generator=k,
                triple=triple,
            )
    d = GradedOperator.from_callable(spec.dim, 1, lambda a: _leibniz_d(spec, diffs, a))
    C = InvariantComplex(spec, d)
    C.check_d_squared()
    return C


@dataclass
class CohomologySpace:
    degree: int
    representatives: list[Form]
    betti: int
    # [exact basis | representatives] as columns; class_of solves against it
    quotient_basis: QMatrix
    n_exact: int

    def coordinates(self, vec: Mapping[int, Rational]) -> tuple[Rational, ...]:
        return class_coordinates(self, QMatrix.from_columns(self.quotient_basis.nrows, [vec]))[0]


def _cohomology(C: InvariantComplex, p: int) -> CohomologySpace:
    dim = C.dim
    size = len(basis(dim, p))
    Z = kernel(C.d[p]) if p < dim else QMatrix.identity(size)
    B = column_basis(C.d[p - 1]) if p > 0 else QMatrix(size, 0)
    stacked = hstack([B, Z])
    piv = rref_pivots(stacked)
    nb = B.ncols
    rep_cols = [j - nb for j in piv if j >= nb]
    reps = Z.select_columns(rep_cols)
    betti = Z.ncols - nb
    assert len(rep_cols) == betti
    reps_forms = [Form.from_vector(dim, p, reps.col(j)) for j in range(reps.ncols)]
    return CohomologySpace(p, reps_forms, betti, hstack([B, reps]), nb)


def class_coordinates(H: CohomologySpace, vectors: QMatrix) -> list[tuple[Rational, ...]]:
    """Coordinates of the classes of the given closed forms (as columns)."""
    if vectors.ncols == 0:
        return []
    X = solve(H.quotient_basis, vectors)
    out = []
    for j in range(vectors.ncols):
        col = X.col(j)
        out.append(tuple(col.get(H.n_exact + i, 0) for i in range(H.betti)))
    return out


def cohomology(C: InvariantComplex, p: int) -> CohomologySpace:
    if not 0 <= p <= C.dim:
        raise PreconditionError(f"degree {p} outside 0..{C.dim}")
    return C.cohomology(p)


def class_of(C: InvariantComplex, H: CohomologySpace, omega: Form) -> tuple[Rational, ...]:
    """Coordinates of [omega] in the chosen basis of H^p."""
    if omega.degree != H.degree:
        raise PreconditionError(f"form of degree {omega.degree} vs H^{H.degree}")
    if not C.differential(omega).is_zero():
        raise PreconditionError("class_of: form is not closed")
    return class_coordinates(H, QMatrix.from_columns(H.quotient_basis.nrows, [omega.to_vector()]))[0]
