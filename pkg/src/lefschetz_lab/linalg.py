"""Sparse exact linear algebra over the rationals.

Entries are Python ``int`` whenever the value is integral and
``fractions.Fraction`` otherwise; mixing the two keeps the common integer
case fast without giving up exactness.  Elimination runs fraction-free on
primitive integer rows and only divides when reading results back out.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd
from numbers import Rational
from typing import Iterable, Mapping

Scalar = Rational  # int or Fraction


def q(x) -> Rational:
    """Canonical exact scalar: ``int`` if integral, else reduced ``Fraction``."""
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, str):
        return q(Fraction(x))
    if isinstance(x, Rational):
        return q(Fraction(x.numerator, x.denominator))
    raise TypeError(f"not an exact rational: {x!r}")


def qstr(x) -> str:
    return str(q(x))


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


def _primitive(row: dict) -> dict:
    """Scale a rational row to a primitive integer row (same span)."""
    den = 1
    for v in row.values():
        if isinstance(v, Fraction):
            den = _lcm(den, v.denominator)
    if den != 1:
        row = {k: int(v * den) for k, v in row.items()}
    g = 0
    for v in row.values():
        g = gcd(g, v)
        if g == 1:
            return row
    if g > 1:
        row = {k: v // g for k, v in row.items()}
    return row


class QMatrix:
    """Sparse exact matrix stored column-wise: ``cols[j][i] = A[i, j]``."""

    __slots__ = ("nrows", "ncols", "cols")

    def __init__(self, nrows: int, ncols: int, cols: Mapping[int, Mapping[int, Rational]] | None = None):
        self.nrows = nrows
        self.ncols = ncols
        self.cols: dict[int, dict[int, Rational]] = {}
        if cols:
            for j, col in cols.items():
                c = {i: q(v) for i, v in col.items() if v}
                if c:
                    self.cols[j] = c

    # -- constructors -------------------------------------------------
    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "QMatrix":
        return cls(nrows, ncols)

    @classmethod
    def identity(cls, n: int, scale=1) -> "QMatrix":
        m = cls(n, n)
        s = q(scale)
        if s:
            m.cols = {j: {j: s} for j in range(n)}
        return m

    @classmethod
    def from_dense(cls, rows: Iterable[Iterable]) -> "QMatrix":
        rows = [list(r) for r in rows]
        nrows = len(rows)
        ncols = len(rows[0]) if rows else 0
        cols: dict[int, dict[int, Rational]] = {}
        for i, r in enumerate(rows):
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            for j, v in enumerate(r):
                v = q(v)
                if v:
                    cols.setdefault(j, {})[i] = v
        m = cls(nrows, ncols)
        m.cols = cols
        return m

    @classmethod
    def from_columns(cls, nrows: int, columns: Iterable[Mapping[int, Rational]]) -> "QMatrix":
        columns = list(columns)
        return cls(nrows, len(columns), dict(enumerate(columns)))

    # -- access -------------------------------------------------------
    @property
    def shape(self) -> tuple[int, int]:
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.cols.get(j, {}).get(i, 0)

    def col(self, j: int) -> dict[int, Rational]:
        return dict(self.cols.get(j, {}))

    def rows(self) -> dict[int, dict[int, Rational]]:
        out: dict[int, dict[int, Rational]] = {}
        for j, col in self.cols.items():
            for i, v in col.items():
                out.setdefault(i, {})[j] = v
        return out

    def to_dense(self) -> list[list[Rational]]:
        out = [[0] * self.ncols for _ in range(self.nrows)]
        for j, col in self.cols.items():
            for i, v in col.items():
                out[i][j] = v
        return out

    def nnz(self) -> int:
        return sum(len(c) for c in self.cols.values())

    def is_zero(self) -> bool:
        return not self.cols

    def first_nonzero(self):
        """(row, col, value) of the nonzero entry with smallest column, then row."""
        if not self.cols:
            return None
        j = min(self.cols)
        i = min(self.cols[j])
        return (i, j, self.cols[j][i])

    # -- algebra ------------------------------------------------------
    @property
    def T(self) -> "QMatrix":
        m = QMatrix(self.ncols, self.nrows)
        m.cols = self.rows()
        return m

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def __hash__(self):  # pragma: no cover - mutable-by-convention container
        raise TypeError("QMatrix is unhashable")

    def _check_same(self, other: "QMatrix"):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        cols = {j: dict(c) for j, c in self.cols.items()}
        for j, col in other.cols.items():
            tgt = cols.setdefault(j, {})
            for i, v in col.items():
                s = tgt.get(i, 0) + v
                if s:
                    tgt[i] = q(s)
                else:
                    tgt.pop(i, None)
            if not tgt:
                del cols[j]
        m = QMatrix(self.nrows, self.ncols)
        m.cols = cols
        return m

    def __neg__(self) -> "QMatrix":
        m = QMatrix(self.nrows, self.ncols)
        m.cols = {j: {i: -v for i, v in c.items()} for j, c in self.cols.items()}
        return m

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return self + (-other)

    def scale(self, s) -> "QMatrix":
        s = q(s)
        m = QMatrix(self.nrows, self.ncols)
        if s:
            m.cols = {j: {i: q(v * s) for i, v in c.items()} for j, c in self.cols.items()}
        return m

    def __mul__(self, s) -> "QMatrix":
        return self.scale(s)

    __rmul__ = __mul__

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.ncols != other.nrows:
            raise ValueError(f"cannot compose {self.shape} @ {other.shape}")
        A = self.cols
        cols: dict[int, dict[int, Rational]] = {}
        for j, bcol in other.cols.items():
            acc: dict[int, Rational] = {}
            for k, b in bcol.items():
                acol = A.get(k)
                if acol is None:
                    continue
                for i, a in acol.items():
                    acc[i] = acc.get(i, 0) + a * b
            acc = {i: q(v) for i, v in acc.items() if v}
            if acc:
                cols[j] = acc
        m = QMatrix(self.nrows, other.ncols)
        m.cols = cols
        return m

    def apply(self, vec: Mapping[int, Rational]) -> dict[int, Rational]:
        """Matrix times sparse vector ``{index: value}``."""
        acc: dict[int, Rational] = {}
        for k, b in vec.items():
            acol = self.cols.get(k)
            if acol is None:
                continue
            for i, a in acol.items():
                acc[i] = acc.get(i, 0) + a * b
        return {i: q(v) for i, v in acc.items() if v}

    def select_columns(self, idx: Iterable[int]) -> "QMatrix":
        idx = list(idx)
        return QMatrix.from_columns(self.nrows, (self.cols.get(j, {}) for j in idx))

    def __repr__(self) -> str:
        return f"QMatrix({self.nrows}x{self.ncols}, nnz={self.nnz()})"


def vstack(mats: list[QMatrix]) -> QMatrix:
    ncols = mats[0].ncols
    off = 0
    cols: dict[int, dict[int, Rational]] = {}
    for m in mats:
        if m.ncols != ncols:
            raise ValueError("vstack column mismatch")
        for j, c in m.cols.items():
            tgt = cols.setdefault(j, {})
            for i, v in c.items():
                tgt[i + off] = v
        off += m.nrows
    out = QMatrix(off, ncols)
    out.cols = cols
    return out


def hstack(mats: list[QMatrix]) -> QMatrix:
    nrows = mats[0].nrows
    off = 0
    cols: dict[int, dict[int, Rational]] = {}
    for m in mats:
        if m.nrows != nrows:
            raise ValueError("hstack row mismatch")
        for j, c in m.cols.items():
            cols[j + off] = dict(c)
        off += m.ncols
    out = QMatrix(nrows, off)
    out.cols = cols
    return out


# -- elimination -------------------------------------------------------

def _eliminate(rows: list[dict], pivot_limit: int) -> dict[int, dict]:
    """Fraction-free Gauss-Jordan on primitive integer rows.

    Pivots are taken in increasing column order among columns ``< pivot_limit``.
    Returns ``{pivot_col: row}`` with every pivot column cleared from all other
    pivot rows.  Rows left without a pivot are appended under negative keys so
    callers can inspect inconsistency in augmented columns.
    """
    rows = [_primitive(r) for r in rows if r]
    index: dict[int, set[int]] = {}
    for rid, r in enumerate(rows):
        for c in r:
            index.setdefault(c, set()).add(rid)
    used: set[int] = set()
    pivots: dict[int, int] = {}
    for c in range(pivot_limit):
        holders = index.get(c)
        if not holders:
            continue
        cand = [rid for rid in holders if rid not in used]
        if not cand:
            continue
        pid = min(cand, key=lambda rid: (len(rows[rid]), rid))
        prow = rows[pid]
        used.add(pid)
        pivots[c] = pid
        a0 = prow[c]
        for rid in list(holders):
            if rid == pid:
                continue
            r = rows[rid]
            b0 = r[c]
            g = gcd(a0, b0)
            a, b = a0 // g, b0 // g
            if a != 1:
                new = {k: a * v for k, v in r.items()}
            else:
                new = dict(r)
            for k, v in prow.items():
                nv = new.get(k, 0) - b * v
                if nv:
                    new[k] = nv
                else:
                    new.pop(k, None)
            gg = 0
            for v in new.values():
                gg = gcd(gg, v)
                if gg == 1:
                    break
            if gg > 1:
                new = {k: v // gg for k, v in new.items()}
            old_keys = r.keys()
            for k in old_keys - new.keys():
                index[k].discard(rid)
            for k in new.keys() - old_keys:
                index.setdefault(k, set()).add(rid)
            rows[rid] = new
    out = {c: rows[pid] for c, pid in pivots.items()}
    extra = [rows[rid] for rid in range(len(rows)) if rid not in used and rows[rid]]
    for k, r in enumerate(extra):
        out[-1 - k] = r
    return out


def rref_pivots(A: QMatrix) -> list[int]:
    """Pivot columns of the reduced row-echelon form of ``A``."""
    red = _eliminate(list(A.rows().values()), A.ncols)
    return sorted(c for c in red if c >= 0)


def rank(A: QMatrix) -> int:
    return len(rref_pivots(A))


def kernel(A: QMatrix) -> QMatrix:
    """Basis of ker A as columns: the standard RREF basis, one vector per free
    column with that free variable set to 1."""
    red = _eliminate(list(A.rows().values()), A.ncols)
    piv = {c: r for c, r in red.items() if c >= 0}
    free = [j for j in range(A.ncols) if j not in piv]
    # invert pivot map: for each free column, which pivot rows mention it
    by_free: dict[int, list[int]] = {}
    for c, r in piv.items():
        for k in r:
            if k != c:
                by_free.setdefault(k, []).append(c)
    columns = []
    for f in free:
        vec = {f: 1}
        for c in by_free.get(f, ()):
            r = piv[c]
            vec[c] = q(Fraction(-r[f], r[c]))
        columns.append(vec)
    return QMatrix.from_columns(A.ncols, columns)


def column_basis(A: QMatrix) -> QMatrix:
    """Columns of ``A`` at its RREF pivot positions (a basis of the image)."""
    return A.select_columns(rref_pivots(A))


class InconsistentSystem(ValueError):
    pass


def solve(A: QMatrix, B: QMatrix) -> QMatrix:
    """A particular exact solution X of A X = B (free variables set to 0).

    Raises InconsistentSystem naming the first right-hand side column that
    has no solution.
    """
    if A.nrows != B.nrows:
        raise ValueError("solve: row mismatch")
    n = A.ncols
    aug = hstack([A, B])
    red = _eliminate(list(aug.rows().values()), n)
    for c, r in red.items():
        if c < 0:
            bad = min(r)
            raise InconsistentSystem(f"no solution for right-hand side column {bad - n}")
    cols: dict[int, dict[int, Rational]] = {}
    for c, r in red.items():
        pc = r[c]
        for k, v in r.items():
            if k >= n:
                cols.setdefault(k - n, {})[c] = q(Fraction(v, pc))
    return QMatrix(n, B.ncols, cols)


def inverse(A: QMatrix) -> QMatrix:
    if A.nrows != A.ncols:
        raise ValueError("inverse of non-square matrix")
    if rank(A) != A.nrows:
        raise ZeroDivisionError("singular matrix")
    return solve(A, QMatrix.identity(A.nrows))


# -- small dense helpers (frame-sized matrices) -------------------------

def det(M: list[list]) -> Rational:
    """Exact determinant of a small dense matrix by Gaussian elimination."""
    n = len(M)
    if n == 0:
        return 1
    A = [[Fraction(x) for x in row] for row in M]
    sign = 1
    for c in range(n):
        p = next((r for r in range(c, n) if A[r][c] != 0), None)
        if p is None:
            return 0
        if p != c:
            A[c], A[p] = A[p], A[c]
            sign = -sign
        for r in range(c + 1, n):
            if A[r][c]:
                f = A[r][c] / A[c][c]
                for k in range(c, n):
                    A[r][k] -= f * A[c][k]
    out = Fraction(sign)
    for c in range(n):
        out *= A[c][c]
    return q(out)


def dense_inverse(M: list[list]) -> list[list[Rational]]:
    return inverse(QMatrix.from_dense(M)).to_dense()


def dense_mul(A: list[list], B: list[list]) -> list[list[Rational]]:
    return [[q(sum(A[i][k] * B[k][j] for k in range(len(B)))) for j in range(len(B[0]))] for i in range(len(A))]


def exact_sqrt(x) -> Rational | None:
    """Square root of a non-negative rational if it is rational, else None."""
    from math import isqrt

    x = Fraction(x)
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return q(Fraction(rn, rd))
    return None
