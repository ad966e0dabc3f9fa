"""Metric structure, Hodge star, codifferential, Laplacian and Green operator.

``gram1`` is the Gram matrix of the degree-one generators, i.e. the
inner products ``<e^i, e^j>``; the metric on vectors is its inverse.  The
global scalar product of invariant forms is the pointwise one with total
volume normalized to 1.
"""
from __future__ import annotations

from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import comb
from numbers import Rational
from typing import Sequence

from .complex import InvariantComplex
from .errors import MetricError, PreconditionError
from .exterior import Form, GradedOperator, basis, basis_index, merge_sign
from .linalg import QMatrix, dense_inverse, det, exact_sqrt, inverse, kernel, q


def _compound(M: Sequence[Sequence[Rational]], p: int) -> QMatrix:
    """p-th compound: entry (I, J) = det M[I, J]."""
    dim = len(M)
    b = basis(dim, p)
    diagonal = all(M[i][j] == 0 for i in range(dim) for j in range(dim) if i != j)
    if diagonal:
        cols = {}
        for k, I in enumerate(b):
            v = 1
            for i in I:
                v *= M[i - 1][i - 1]
            cols[k] = {k: v}
        return QMatrix(len(b), len(b), cols)
    cols = {}
    for kj, J in enumerate(b):
        col = {}
        for ki, I in enumerate(b):
            v = det([[M[i - 1][j - 1] for j in J] for i in I])
            if v:
                col[ki] = v
        cols[kj] = col
    return QMatrix(len(b), len(b), cols)


class MetricStructure:
    def __init__(self, gram1: Sequence[Sequence], orientation: int = 1):
        dim = len(gram1)
        self.dim = dim
        self.gram1 = tuple(tuple(q(x) for x in row) for row in gram1)
        if any(len(r) != dim for r in self.gram1):
            raise MetricError("gram1 must be square")
        if orientation not in (1, -1):
            raise MetricError("orientation must be +1 or -1")
        self.orientation = orientation
        for i in range(dim):
            for j in range(i):
                if self.gram1[i][j] != self.gram1[j][i]:
                    raise MetricError(f"gram1 not symmetric at ({i + 1}, {j + 1})")
        for k in range(1, dim + 1):
            m = det([row[:k] for row in self.gram1[:k]])
            if m <= 0:
                raise MetricError(f"gram1 not positive definite: leading minor {k} = {m}")
        self._gram: dict[int, QMatrix] = {}
        self._gram_inv: dict[int, QMatrix] = {}

    @classmethod
    def identity(cls, dim: int, orientation: int = 1) -> "MetricStructure":
        return cls([[1 if i == j else 0 for j in range(dim)] for i in range(dim)], orientation)

    @cached_property
    def vector_metric(self) -> tuple[tuple[Rational, ...], ...]:
        """g(E_i, E_j)."""
        return tuple(tuple(r) for r in dense_inverse(self.gram1))

    def gram(self, p: int) -> QMatrix:
        if p not in self._gram:
            self._gram[p] = _compound(self.gram1, p)
        return self._gram[p]

    def gram_inv(self, p: int) -> QMatrix:
        # inverse of a compound is the compound of the inverse
        if p not in self._gram_inv:
            self._gram_inv[p] = _compound(self.vector_metric, p)
        return self._gram_inv[p]

    @cached_property
    def volume_coefficient(self) -> Rational:
        """c with vol = c * e^{1..dim}; requires det(g) to be a rational square."""
        r = exact_sqrt(Fraction(1) / det(self.gram1))
        if r is None:
            raise MetricError("metric volume form is irrational (det g is not a rational square)")
        return self.orientation * r

    def volume_form(self) -> Form:
        return Form(self.dim, self.dim, {tuple(range(1, self.dim + 1)): self.volume_coefficient})

    def adjoint(self, A: QMatrix, p: int, target: int) -> QMatrix:
        """Adjoint of A: Omega^p -> Omega^target w.r.t. the induced inner products."""
        return self.gram_inv(p) @ A.T @ self.gram(target)

    def __eq__(self, other):
        if not isinstance(other, MetricStructure):
            return NotImplemented
        return self.gram1 == other.gram1 and self.orientation == other.orientation

    __hash__ = None


def inner(a: Form, b: Form, m: MetricStructure) -> Rational:
    if a.degree != b.degree:
        raise PreconditionError(f"inner product of forms of degree {a.degree} and {b.degree}")
    if a.dim != m.dim or b.dim != m.dim:
        raise PreconditionError("form and metric on different frames")
    G = m.gram(a.degree)
    gb = G.apply(b.to_vector())
    return q(sum(v * gb.get(i, 0) for i, v in a.to_vector().items()))


def star_matrix(m: MetricStructure, p: int) -> QMatrix:
    """Hodge star Omega^p -> Omega^{dim-p}, defined by a ^ *b = <a, b> vol."""
    dim = m.dim
    top = tuple(range(1, dim + 1))
    src = basis(dim, p)
    tgt_index = basis_index(dim, dim - p)
    c = m.volume_coefficient
    G = m.gram(p)
    row_of = []
    for I in src:
        comp = tuple(k for k in top if k not in I)
        _, s = merge_sign(I, comp)
        row_of.append((tgt_index[comp], s))
    cols = {}
    for j, col in G.cols.items():
        out = {}
        for i, g in col.items():
            r, s = row_of[i]
            out[r] = q(c * s * g)
        cols[j] = out
    return QMatrix(comb(dim, dim - p), len(src), cols)


def star(a: Form, m: MetricStructure) -> Form:
    return Form.from_vector(m.dim, m.dim - a.degree, star_matrix(m, a.degree).apply(a.to_vector()))


def integrate_top(omega: Form, m: MetricStructure | None = None) -> Rational:
    """Integral over the normalized-volume quotient: coefficient w.r.t. vol.

    Without a metric the oriented coordinate volume e^{1..dim} is used.
    """
    if omega.degree != omega.dim:
        raise PreconditionError(f"integrate_top needs a top-degree form, got degree {omega.degree}")
    coeff = omega.coeffs.get(tuple(range(1, omega.dim + 1)), 0)
    if m is None:
        return coeff
    return q(coeff / m.volume_coefficient) if coeff else 0


class HodgePackage:
    """Hodge theory of one (complex, metric) pair; matrices built lazily."""

    def __init__(self, C: InvariantComplex, metric: MetricStructure):
        if C.dim != metric.dim:
            raise PreconditionError("complex and metric dimensions differ")
        self.complex = C
        self.metric = metric
        self.dim = C.dim
        self._lap: dict[int, QMatrix] = {}
        self._harm: dict[int, QMatrix] = {}
        self._proj: dict[int, QMatrix] = {}
        self._green: dict[int, QMatrix] = {}

    @cached_property
    def delta(self) -> GradedOperator:
        """Codifferential as the inner-product adjoint of d (shift -1)."""
        d = self.complex.d
        mats = {p + 1: self.metric.adjoint(d[p], p, p + 1) for p in range(self.dim)}
        return GradedOperator(self.dim, -1, mats)

    def laplacian_matrix(self, p: int) -> QMatrix:
        if p not in self._lap:
            d, de = self.complex.d, self.delta
            size = comb(self.dim, p)
            L = QMatrix(size, size)
            if p > 0:
                L = L + d[p - 1] @ de[p]
            if p < self.dim:
                L = L + de[p + 1] @ d[p]
            self._lap[p] = L
        return self._lap[p]

    @cached_property
    def laplacian(self) -> GradedOperator:
        return GradedOperator(self.dim, 0, {p: self.laplacian_matrix(p) for p in range(self.dim + 1)})

    @cached_property
    def star(self) -> dict[int, QMatrix]:
        # shift depends on degree, so not a GradedOperator
        return {p: star_matrix(self.metric, p) for p in range(self.dim + 1)}

    def codifferential(self, a: Form) -> Form:
        if a.degree == 0:
            return Form(self.dim, 0)
        return self.delta.apply(a)

    def laplace(self, a: Form) -> Form:
        return Form.from_vector(self.dim, a.degree, self.laplacian_matrix(a.degree).apply(a.to_vector()))

    def harmonic_matrix(self, p: int) -> QMatrix:
        if p not in self._harm:
            self._harm[p] = kernel(self.laplacian_matrix(p))
        return self._harm[p]

    def harmonic_basis(self, p: int) -> list[Form]:
        H = self.harmonic_matrix(p)
        return [Form.from_vector(self.dim, p, H.col(j)) for j in range(H.ncols)]

    def projector(self, p: int) -> QMatrix:
        """Orthogonal projection onto ker Delta_p."""
        if p not in self._proj:
            H = self.harmonic_matrix(p)
            G = self.metric.gram(p)
            size = comb(self.dim, p)
            if H.ncols == 0:
                self._proj[p] = QMatrix(size, size)
            else:
                HtG = H.T @ G
                self._proj[p] = H @ inverse(HtG @ H) @ HtG
        return self._proj[p]

    def project_harmonic(self, a: Form) -> Form:
        return Form.from_vector(self.dim, a.degree, self.projector(a.degree).apply(a.to_vector()))

    def green_matrix(self, p: int) -> QMatrix:
        """G = (Delta + Pi)^{-1} - Pi: zero on harmonics, Delta^{-1} on their complement."""
        if p not in self._green:
            P = self.projector(p)
            self._green[p] = inverse(self.laplacian_matrix(p) + P) - P
        return self._green[p]

    @cached_property
    def green_operator(self) -> GradedOperator:
        return GradedOperator(self.dim, 0, {p: self.green_matrix(p) for p in range(self.dim + 1)})

    @cached_property
    def projector_operator(self) -> GradedOperator:
        return GradedOperator(self.dim, 0, {p: self.projector(p) for p in range(self.dim + 1)})

    def green(self, a: Form) -> Form:
        return Form.from_vector(self.dim, a.degree, self.green_matrix(a.degree).apply(a.to_vector()))

    def green_identities(self) -> dict[str, bool]:
        """I - Delta G = Pi, I - G Delta = Pi, dG = Gd, delta G = G delta."""
        I = GradedOperator.identity(self.dim)
        Lap, G, P = self.laplacian, self.green_operator, self.projector_operator
        d, de = self.complex.d, self.delta
        return {
            "I-LapG=Pi": I - Lap @ G == P,
            "I-GLap=Pi": I - G @ Lap == P,
            "dG=Gd": d @ G == G @ d,
            "deltaG=Gdelta": de @ G == G @ de,
        }

    def hodge_decomposition_dims(self, p: int) -> tuple[int, int, int]:
        from .linalg import rank

        exact = rank(self.complex.d[p - 1]) if p > 0 else 0
        coexact = rank(self.delta[p + 1]) if p < self.dim else 0
        return exact, coexact, self.harmonic_matrix(p).ncols

    def star_crosscheck_delta(self) -> dict[int, bool]:
        """delta * = (-1)^{p+1} * d on p-forms (star route vs adjoint route)."""
        out = {}
        S = self.star
        for p in range(self.dim):
            lhs = self.delta[self.dim - p] @ S[p]
            rhs = (S[p + 1] @ self.complex.d[p]).scale((-1) ** (p + 1))
            out[p] = lhs == rhs
        return out
