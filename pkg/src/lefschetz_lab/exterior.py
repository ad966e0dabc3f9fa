"""Exact exterior algebra on a frame of dimension ``dim``.

Generators are numbered 1..dim.  A basis monomial is a strictly increasing
tuple of generator indices; monomials of a fixed degree are ordered
lexicographically, which is also the row/column order of every matrix.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb
from numbers import Rational
from typing import Callable, Iterable, Mapping, Sequence

from .errors import ContractError, DimensionError
from .linalg import QMatrix, q

MultiIndex = tuple


@lru_cache(maxsize=None)
def basis(dim: int, p: int) -> tuple[MultiIndex, ...]:
    if p < 0 or p > dim:
        return ()
    return tuple(combinations(range(1, dim + 1), p))


@lru_cache(maxsize=None)
def basis_index(dim: int, p: int) -> dict[MultiIndex, int]:
    return {m: i for i, m in enumerate(basis(dim, p))}


def sort_sign(seq: Sequence[int]) -> tuple[MultiIndex | None, int]:
    """Sort generator indices, returning the permutation sign (0 on repeats)."""
    seq = list(seq)
    sign = 1
    # insertion sort: seq is short (<= dim)
    for i in range(1, len(seq)):
        j = i
        while j > 0 and seq[j - 1] > seq[j]:
            seq[j - 1], seq[j] = seq[j], seq[j - 1]
            sign = -sign
            j -= 1
        if j > 0 and seq[j - 1] == seq[j]:
            return None, 0
    return tuple(seq), sign


def merge_sign(a: MultiIndex, b: MultiIndex) -> tuple[MultiIndex | None, int]:
    """e_a ^ e_b = sign * e_{a u b}; transpositions counted during the merge."""
    i = j = 0
    out = []
    inv = 0
    la, lb = len(a), len(b)
    while i < la and j < lb:
        x, y = a[i], b[j]
        if x == y:
            return None, 0
        if x < y:
            out.append(x)
            i += 1
        else:
            out.append(y)
            inv += la - i
            j += 1
    out.extend(a[i:])
    out.extend(b[j:])
    return tuple(out), (-1 if inv & 1 else 1)


class Form:
    """Sparse exact p-form: ``{multi-index: coefficient}`` with no stored zeros."""

    __slots__ = ("dim", "degree", "coeffs")

    def __init__(self, dim: int, degree: int, coeffs: Mapping[MultiIndex, Rational] | None = None):
        if degree < 0:
            raise DimensionError(f"negative degree {degree}")
        self.dim = dim
        self.degree = degree
        self.coeffs: dict[MultiIndex, Rational] = {}
        if coeffs:
            for k, v in coeffs.items():
                v = q(v)
                if not v:
                    continue
                k = tuple(k)
                if len(k) != degree or any(b <= a for a, b in zip(k, k[1:])) or (k and (k[0] < 1 or k[-1] > dim)):
                    raise DimensionError(f"bad multi-index {k} for degree {degree} in dim {dim}")
                self.coeffs[k] = v

    # -- constructors -------------------------------------------------
    @classmethod
    def zero(cls, dim: int, degree: int) -> "Form":
        return cls(dim, degree)

    @classmethod
    def constant(cls, dim: int, c=1) -> "Form":
        return cls(dim, 0, {(): c})

    @classmethod
    def monomial(cls, dim: int, *idx: int, coeff=1) -> "Form":
        """``coeff * e^{i1} ^ ... ^ e^{ip}`` in any index order (sign applied)."""
        key, sign = sort_sign(idx)
        if key is None:
            return cls(dim, len(idx))
        return cls(dim, len(idx), {key: sign * q(coeff)})

    @classmethod
    def from_vector(cls, dim: int, degree: int, vec: Mapping[int, Rational]) -> "Form":
        b = basis(dim, degree)
        f = cls(dim, degree)
        f.coeffs = {b[i]: q(v) for i, v in vec.items() if v}
        return f

    def to_vector(self) -> dict[int, Rational]:
        idx = basis_index(self.dim, self.degree)
        return {idx[k]: v for k, v in self.coeffs.items()}

    def dense(self) -> list[Rational]:
        out = [0] * comb(self.dim, self.degree)
        for i, v in self.to_vector().items():
            out[i] = v
        return out

    # -- arithmetic ---------------------------------------------------
    def _check(self, other: "Form"):
        if self.dim != other.dim:
            raise DimensionError(f"frame dimensions differ: {self.dim} vs {other.dim}")
        if self.degree != other.degree:
            raise DimensionError(f"degrees differ: {self.degree} vs {other.degree}")

    def __add__(self, other: "Form") -> "Form":
        self._check(other)
        out = dict(self.coeffs)
        for k, v in other.coeffs.items():
            s = out.get(k, 0) + v
            if s:
                out[k] = q(s)
            else:
                out.pop(k, None)
        f = Form(self.dim, self.degree)
        f.coeffs = out
        return f

    def __neg__(self) -> "Form":
        f = Form(self.dim, self.degree)
        f.coeffs = {k: -v for k, v in self.coeffs.items()}
        return f

    def __sub__(self, other: "Form") -> "Form":
        return self + (-other)

    def __rmul__(self, s) -> "Form":
        s = q(s)
        f = Form(self.dim, self.degree)
        if s:
            f.coeffs = {k: q(v * s) for k, v in self.coeffs.items()}
        return f

    __mul__ = __rmul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, Form):
            return NotImplemented
        return (self.dim, self.degree, self.coeffs) == (other.dim, other.degree, other.coeffs)

    __hash__ = None

    def is_zero(self) -> bool:
        return not self.coeffs

    def __bool__(self) -> bool:
        return bool(self.coeffs)

    def __repr__(self) -> str:
        if not self.coeffs:
            return f"0[{self.degree}]"
        parts = []
        for k in sorted(self.coeffs):
            name = "e" + "".join(str(i) if self.dim < 10 else f"{i}," for i in k).rstrip(",") if k else "1"
            parts.append(f"{self.coeffs[k]}*{name}")
        return " + ".join(parts)


def _check_dim(*objs):
    dims = {o.dim if isinstance(o, Form) else len(o) for o in objs}
    if len(dims) != 1:
        raise DimensionError(f"frame dimensions differ: {sorted(dims)}")


def wedge(a: Form, b: Form) -> Form:
    _check_dim(a, b)
    deg = a.degree + b.degree
    if deg > a.dim:
        return Form(a.dim, deg)
    out: dict[MultiIndex, Rational] = {}
    for ka, va in a.coeffs.items():
        for kb, vb in b.coeffs.items():
            key, s = merge_sign(ka, kb)
            if key is None:
                continue
            out[key] = out.get(key, 0) + s * va * vb
    return Form(a.dim, deg, out)


def wedge_all(forms: Iterable[Form]) -> Form:
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def power(a: Form, k: int) -> Form:
    out = Form.constant(a.dim)
    for _ in range(k):
        out = wedge(out, a)
    return out


def interior(v: Sequence[Rational], a: Form) -> Form:
    """Contraction i_v a in the first slot."""
    _check_dim(v, a)
    if a.degree == 0:
        return Form(a.dim, 0)
    out: dict[MultiIndex, Rational] = {}
    for key, c in a.coeffs.items():
        for s, i in enumerate(key):
            vi = v[i - 1]
            if not vi:
                continue
            rest = key[:s] + key[s + 1:]
            val = c * vi
            out[rest] = out.get(rest, 0) + (val if s % 2 == 0 else -val)
    return Form(a.dim, a.degree - 1, out)


def insert_endo(psi: Sequence[Sequence[Rational]], a: Form) -> Form:
    """Degree-0 derivation i_psi with i_psi e^k = e^k o psi.

    ``psi[k][j]`` is the E_k component of psi(E_j) (column j = image of E_j).
    """
    _check_dim(psi, a)
    dim = a.dim
    rows = [[(j + 1, psi[k][j]) for j in range(dim) if psi[k][j]] for k in range(dim)]
    out: dict[MultiIndex, Rational] = {}
    for key, c in a.coeffs.items():
        for s, i in enumerate(key):
            for j, w in rows[i - 1]:
                new, sign = sort_sign(key[:s] + (j,) + key[s + 1:])
                if new is None:
                    continue
                out[new] = out.get(new, 0) + sign * c * w
    return Form(dim, a.degree, out)


def as_matrix(op: Callable[[Form], Form], dim: int, p: int, shift: int | None = None) -> QMatrix:
    """Matrix of a linear form map on degree p; column j is op(basis[j])."""
    src = basis(dim, p)
    images = [op(Form(dim, p, {m: 1})) for m in src]
    degs = {f.degree for f in images}
    if shift is not None:
        degs.add(p + shift)
    if len(degs) > 1:
        raise ContractError(f"operator output degree inconsistent on degree {p}: {sorted(degs)}")
    tgt = degs.pop() if degs else p
    return QMatrix.from_columns(comb(dim, tgt), (f.to_vector() for f in images))


class GradedOperator:
    """Degree-shifting family of exact matrices, one per source degree.

    Degrees with no stored matrix act as the zero map.
    """

    __slots__ = ("dim", "shift", "mats")

    def __init__(self, dim: int, shift: int, mats: Mapping[int, QMatrix] | None = None):
        self.dim = dim
        self.shift = shift
        self.mats: dict[int, QMatrix] = {}
        for p, m in (mats or {}).items():
            if not self.has_degree(p):
                continue
            want = (comb(dim, p + shift), comb(dim, p))
            if m.shape != want:
                raise DimensionError(f"degree {p}: matrix {m.shape}, expected {want}")
            self.mats[p] = m

    def has_degree(self, p: int) -> bool:
        return 0 <= p <= self.dim and 0 <= p + self.shift <= self.dim

    def degrees(self) -> list[int]:
        return [p for p in range(self.dim + 1) if self.has_degree(p)]

    def __getitem__(self, p: int) -> QMatrix:
        m = self.mats.get(p)
        if m is not None:
            return m
        if not self.has_degree(p):
            raise DimensionError(f"operator has no degree {p}")
        return QMatrix(comb(self.dim, p + self.shift), comb(self.dim, p))

    # -- constructors -------------------------------------------------
    @classmethod
    def from_callable(cls, dim: int, shift: int, fn: Callable[[Form], Form]) -> "GradedOperator":
        mats = {}
        for p in range(dim + 1):
            if 0 <= p + shift <= dim:
                mats[p] = as_matrix(fn, dim, p, shift)
        return cls(dim, shift, mats)

    @classmethod
    def diagonal(cls, dim: int, scalar: Callable[[int], Rational]) -> "GradedOperator":
        """``scalar(p) * I`` on degree p (e.g. deg, n - deg)."""
        return cls(dim, 0, {p: QMatrix.identity(comb(dim, p), scalar(p)) for p in range(dim + 1)})

    @classmethod
    def identity(cls, dim: int) -> "GradedOperator":
        return cls.diagonal(dim, lambda p: 1)

    @classmethod
    def zero(cls, dim: int, shift: int = 0) -> "GradedOperator":
        return cls(dim, shift)

    # -- algebra ------------------------------------------------------
    def _same(self, other: "GradedOperator"):
        if self.dim != other.dim:
            raise DimensionError("operators on different frames")
        if self.shift != other.shift:
            raise DimensionError(f"shift mismatch {self.shift} vs {other.shift}")

    def __add__(self, other: "GradedOperator") -> "GradedOperator":
        self._same(other)
        return GradedOperator(self.dim, self.shift, {p: self[p] + other[p] for p in self.degrees()})

    def __sub__(self, other: "GradedOperator") -> "GradedOperator":
        self._same(other)
        return GradedOperator(self.dim, self.shift, {p: self[p] - other[p] for p in self.degrees()})

    def __neg__(self) -> "GradedOperator":
        return GradedOperator(self.dim, self.shift, {p: -m for p, m in self.mats.items()})

    def __mul__(self, s) -> "GradedOperator":
        return GradedOperator(self.dim, self.shift, {p: m.scale(s) for p, m in self.mats.items()})

    __rmul__ = __mul__

    def __matmul__(self, other: "GradedOperator") -> "GradedOperator":
        """Composition ``self o other``."""
        if self.dim != other.dim:
            raise DimensionError("operators on different frames")
        mats = {}
        for p, m in other.mats.items():
            mid = p + other.shift
            if self.has_degree(mid) and mid in self.mats:
                mats[p] = self.mats[mid] @ m
        return GradedOperator(self.dim, self.shift + other.shift, mats)

    def __pow__(self, k: int) -> "GradedOperator":
        out = GradedOperator.identity(self.dim)
        for _ in range(k):
            out = self @ out
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedOperator):
            return NotImplemented
        if (self.dim, self.shift) != (other.dim, other.shift):
            return False
        return all(self[p] == other[p] for p in self.degrees())

    __hash__ = None

    def apply(self, form: Form) -> Form:
        p = form.degree
        if form.dim != self.dim:
            raise DimensionError("form and operator live on different frames")
        tgt = p + self.shift
        if not 0 <= tgt <= self.dim:
            raise DimensionError(f"no target degree for source degree {p}")
        m = self.mats.get(p)
        if m is None:
            return Form(self.dim, tgt)
        return Form.from_vector(self.dim, tgt, m.apply(form.to_vector()))

    __call__ = apply

    def restrict(self, degrees: Iterable[int]) -> "GradedOperator":
        keep = set(degrees)
        return GradedOperator(self.dim, self.shift, {p: m for p, m in self.mats.items() if p in keep})

    def __repr__(self) -> str:
        return f"GradedOperator(dim={self.dim}, shift={self.shift:+d})"


def commutator(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    return a @ b - b @ a


def anticommutator(a: GradedOperator, b: GradedOperator) -> GradedOperator:
    return a @ b + b @ a


def wedge_operator(alpha: Form) -> GradedOperator:
    """epsilon_alpha: beta -> alpha ^ beta."""
    return GradedOperator.from_callable(alpha.dim, alpha.degree, lambda b: wedge(alpha, b))


def interior_operator(v: Sequence[Rational]) -> GradedOperator:
    return GradedOperator.from_callable(len(v), -1, lambda a: interior(v, a))


def endo_operator(psi: Sequence[Sequence[Rational]]) -> GradedOperator:
    return GradedOperator.from_callable(len(psi), 0, lambda a: insert_endo(psi, a))


def frame_vector(dim: int, i: int) -> tuple[Rational, ...]:
    """E_i as a coefficient vector (1-based)."""
    return tuple(1 if k == i else 0 for k in range(1, dim + 1))
