"""Exact rational linear algebra.

Scalars are :class:`fractions.Fraction` (always reduced, positive
denominator, zero is ``0/1``), vectors are tuples of fractions and
matrices are immutable :class:`RatMatrix` instances.  Everything here is
exact; there is deliberately no floating-point fallback.

Matrix text format::

    # comment
    m k
    a11 a12 ... a1k
    ...
    am1 am2 ... amk

Entries are integers ``p`` or fractions ``p/q``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Sequence, Union

from .errors import ParseError

Rational = Fraction
RatVector = tuple  # tuple[Fraction, ...]
RationalLike = Union[int, str, Fraction]


def as_rational(x: RationalLike) -> Fraction:
    """Coerce ``x`` to a Fraction; floats are refused because they are not exact."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return parse_rational(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact rational")


def vector(entries: Iterable[RationalLike]) -> tuple[Fraction, ...]:
    return tuple(as_rational(e) for e in entries)


def parse_rational(token: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"``.  Raises ValueError on anything else."""
    token = token.strip()
    num, sep, den = token.partition("/")
    try:
        p = int(num)
        q = int(den) if sep else 1
    except ValueError:
        raise ValueError(f"not a rational: {token!r}") from None
    if q == 0:
        raise ValueError(f"zero denominator in {token!r}")
    return Fraction(p, q)


def format_rational(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def common_denominator(values: Iterable[Fraction]) -> int:
    return reduce(lcm, (v.denominator for v in values), 1)


@dataclass(frozen=True)
class RatMatrix:
    """An ``m x k`` matrix of fractions.  Column ``i`` is the image of ``e_i``."""

    rows: tuple[tuple[Fraction, ...], ...]

    def __post_init__(self) -> None:
        rows = tuple(vector(r) for r in self.rows)
        if not rows or not rows[0]:
            raise ValueError("matrix dimensions must be positive")
        k = len(rows[0])
        if any(len(r) != k for r in rows):
            raise ValueError("ragged matrix rows")
        object.__setattr__(self, "rows", rows)

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence[RationalLike]]) -> RatMatrix:
        if not columns:
            raise ValueError("matrix dimensions must be positive")
        m = len(columns[0])
        if any(len(c) != m for c in columns):
            raise ValueError("columns of unequal length")
        return cls(tuple(tuple(col[i] for col in columns) for i in range(m)))

    @classmethod
    def identity(cls, n: int) -> RatMatrix:
        return cls(tuple(tuple(Fraction(int(i == j)) for j in range(n)) for i in range(n)))

    @classmethod
    def zeros(cls, m: int, k: int) -> RatMatrix:
        return cls(tuple((Fraction(0),) * k for _ in range(m)))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def k(self) -> int:
        return len(self.rows[0])

    @property
    def shape(self) -> tuple[int, int]:
        return self.m, self.k

    def column(self, i: int) -> tuple[Fraction, ...]:
        return tuple(r[i] for r in self.rows)

    def columns(self) -> list[tuple[Fraction, ...]]:
        return [self.column(i) for i in range(self.k)]

    def support(self, i: int) -> frozenset[int]:
        """Row indices where column ``i`` is nonzero."""
        return frozenset(j for j, r in enumerate(self.rows) if r[i] != 0)

    @property
    def T(self) -> RatMatrix:
        return RatMatrix(tuple(zip(*self.rows)))

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.k != other.m:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        cols = other.columns()
        return RatMatrix(tuple(tuple(sum(a * b for a, b in zip(r, c)) for c in cols) for r in self.rows))

    def apply(self, v: Sequence[Fraction]) -> tuple[Fraction, ...]:
        if len(v) != self.k:
            raise ValueError(f"vector of length {len(v)} for a matrix with {self.k} columns")
        return tuple(sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows)

    def scale(self, s: RationalLike) -> RatMatrix:
        s = as_rational(s)
        return RatMatrix(tuple(tuple(s * a for a in r) for r in self.rows))

    def __neg__(self) -> RatMatrix:
        return self.scale(-1)

    def denominator(self) -> int:
        """LCM of all entry denominators."""
        return common_denominator(a for r in self.rows for a in r)

    def to_text(self) -> str:
        lines = [f"{self.m} {self.k}"]
        lines += [" ".join(format_rational(a) for a in r) for r in self.rows]
        return "\n".join(lines) + "\n"

    def __str__(self) -> str:
        return "[" + "; ".join(" ".join(format_rational(a) for a in r) for r in self.rows) + "]"


def _strip_comment(line: str) -> str:
    return line.split("#", 1)[0]


def _tokens(line: str) -> list[tuple[int, str]]:
    """Whitespace-separated tokens with their 1-based starting column."""
    out = []
    col = 0
    n = len(line)
    while col < n:
        while col < n and line[col].isspace():
            col += 1
        start = col
        while col < n and not line[col].isspace():
            col += 1
        if start < col:
            out.append((start + 1, line[start:col]))
    return out


def _parse_row(line: str, lineno: int, source: str) -> list[Fraction]:
    row = []
    for col, tok in _tokens(_strip_comment(line)):
        try:
            row.append(parse_rational(tok))
        except ValueError as exc:
            raise ParseError(str(exc), lineno, col, source) from None
    return row


def parse_matrix_text(text: str, source: str = "<input>") -> RatMatrix:
    """Parse the shared matrix text format, reporting errors with line/column."""
    content = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if _strip_comment(ln).strip()]
    if not content:
        raise ParseError("empty matrix file", 1, 1, source)
    lineno, header = content[0]
    toks = _tokens(_strip_comment(header))
    if len(toks) != 2:
        raise ParseError("header must be 'm k'", lineno, 1, source)
    dims = []
    for col, tok in toks:
        try:
            d = int(tok)
        except ValueError:
            raise ParseError(f"bad dimension {tok!r}", lineno, col, source) from None
        if d < 1:
            raise ParseError(f"dimension must be positive, got {d}", lineno, col, source)
        dims.append(d)
    m, k = dims
    body = content[1:]
    if len(body) != m:
        where = body[m][0] if len(body) > m else (body[-1][0] + 1 if body else lineno + 1)
        raise ParseError(f"expected {m} rows, found {len(body)}", where, 1, source)
    rows = []
    for lineno, ln in body:
        row = _parse_row(ln, lineno, source)
        if len(row) != k:
            raise ParseError(f"expected {k} entries, found {len(row)}", lineno, 1, source)
        rows.append(tuple(row))
    return RatMatrix(tuple(rows))


def parse_vector_text(text: str, source: str = "<input>") -> tuple[Fraction, ...]:
    """Parse an offset file: one non-comment line of rationals."""
    content = [(i + 1, ln) for i, ln in enumerate(text.splitlines()) if _strip_comment(ln).strip()]
    if len(content) != 1:
        raise ParseError("offset file must hold exactly one line of rationals", 1, 1, source)
    lineno, ln = content[0]
    return tuple(_parse_row(ln, lineno, source))


# -- elimination ------------------------------------------------------------


def _integer_rows(rows: Sequence[Sequence[Fraction]]) -> list[list[int]]:
    """Scale each row by its own common denominator; rank and kernel are unchanged."""
    out = []
    for r in rows:
        d = common_denominator(r)
        out.append([int(a * d) for a in r])
    return out


def _bareiss_rank(a: list[list[int]]) -> int:
    """Fraction-free Gaussian elimination; ``a`` is modified in place."""
    if not a:
        return 0
    m, n = len(a), len(a[0])
    rank = 0
    prev = 1
    for col in range(n):
        piv = next((i for i in range(rank, m) if a[i][col] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        p = a[rank][col]
        for i in range(rank + 1, m):
            ai = a[i][col]
            a[i] = [(p * a[i][j] - ai * a[rank][j]) // prev for j in range(n)]
        prev = p
        rank += 1
        if rank == m:
            break
    return rank


def rank(M: RatMatrix | Sequence[Sequence[RationalLike]]) -> int:
    """Exact rank over the rationals."""
    rows = M.rows if isinstance(M, RatMatrix) else [vector(r) for r in M]
    return _bareiss_rank(_integer_rows(rows))


def coords_in_basis(
    basis: Sequence[Sequence[RationalLike]], v: Sequence[RationalLike]
) -> tuple[Fraction, ...] | None:
    """Coefficients ``a`` with ``v = sum(a_i * basis_i)``, or ``None`` if ``v`` is outside the span.

    The basis vectors must be linearly independent and share the dimension of ``v``.
    """
    basis = [vector(b) for b in basis]
    v = vector(v)
    if any(len(b) != len(v) for b in basis):
        raise ValueError("basis vectors and v must have the same dimension")
    r = len(basis)
    if r == 0:
        return () if all(x == 0 for x in v) else None
    # augmented system: rows are coordinates, columns are basis vectors plus v
    aug = [[b[i] for b in basis] + [v[i]] for i in range(len(v))]
    pivots = []
    row = 0
    for col in range(r):
        piv = next((i for i in range(row, len(aug)) if aug[i][col] != 0), None)
        if piv is None:
            raise ValueError("basis vectors are linearly dependent")
        aug[row], aug[piv] = aug[piv], aug[row]
        p = aug[row][col]
        aug[row] = [x / p for x in aug[row]]
        for i in range(len(aug)):
            if i != row and aug[i][col] != 0:
                f = aug[i][col]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[row])]
        pivots.append(col)
        row += 1
    if any(aug[i][r] != 0 for i in range(row, len(aug))):
        return None
    return tuple(aug[i][r] for i in range(r))


def inverse(M: RatMatrix) -> RatMatrix:
    """Exact inverse of a square matrix (Gauss-Jordan)."""
    n = M.m
    if M.k != n:
        raise ValueError("inverse of a non-square matrix")
    a = [list(r) + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(M.rows)]
    for col in range(n):
        piv = next((i for i in range(col, n) if a[i][col] != 0), None)
        if piv is None:
            raise ZeroDivisionError("matrix is singular")
        a[col], a[piv] = a[piv], a[col]
        p = a[col][col]
        a[col] = [x / p for x in a[col]]
        for i in range(n):
            if i != col and a[i][col] != 0:
                f = a[i][col]
                a[i] = [x - f * y for x, y in zip(a[i], a[col])]
    return RatMatrix(tuple(tuple(r[n:]) for r in a))


# -- isometry / contraction -------------------------------------------------


def gram(L: RatMatrix) -> RatMatrix:
    """``L^T L``."""
    cols = L.columns()
    return RatMatrix(tuple(tuple(sum(a * b for a, b in zip(ci, cj)) for cj in cols) for ci in cols))


def is_isometry(L: RatMatrix) -> bool:
    if L.m < L.k:
        return False
    return gram(L) == RatMatrix.identity(L.k)


def charpoly(A: Sequence[Sequence[int]]) -> list[int]:
    """Coefficients of ``det(xI - A)``, leading first, via Berkowitz.

    Division-free, so integer input stays integer.
    """
    n = len(A)
    p = [1]
    for r in range(n):
        row = A[r][:r]
        v = [A[i][r] for i in range(r)]
        t = [1, -A[r][r]]
        for _ in range(r):
            t.append(-sum(x * y for x, y in zip(row, v)))
            v = [sum(A[i][j] * v[j] for j in range(r)) for i in range(r)]
        p = [sum(t[i - j] * p[j] for j in range(len(p)) if 0 <= i - j < len(t)) for i in range(r + 2)]
    return p


def is_psd(A: RatMatrix) -> bool:
    """Exact positive-semidefiniteness of a symmetric matrix.

    For a real-rooted polynomial, all roots are nonnegative iff the
    coefficients of ``det(xI - A)`` alternate in sign, i.e. every sum of
    principal minors of each order is nonnegative.
    """
    n = A.m
    if any(A.rows[i][i] < 0 for i in range(n)):
        return False
    d = A.denominator()
    scaled = [[int(a * d) for a in r] for r in A.rows]
    coeffs = charpoly(scaled)
    return all((-1) ** i * c >= 0 for i, c in enumerate(coeffs))


def is_contraction(L: RatMatrix) -> bool:
    """True iff ``I - L^T L`` is positive semidefinite."""
    g = gram(L)
    k = L.k
    return is_psd(RatMatrix(tuple(tuple(Fraction(int(i == j)) - g.rows[i][j] for j in range(k)) for i in range(k))))
