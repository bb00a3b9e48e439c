"""Exact rational linear algebra for integral and rational lattices.

Everything here works over `fractions.Fraction`; no floating point is used
anywhere.  Matrices are immutable tuples of tuples, vectors are tuples.
The module provides Hermite and Smith normal forms with their unimodular
transforms, integer and mixed rational/integer linear solvers, canonical
lattice and subspace types, and Gram-orthogonal complements.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Rat = Fraction

__all__ = [
    "Rat",
    "QMat",
    "ZLattice",
    "QSubspace",
    "rat",
    "format_rat",
    "parse_rat",
    "hnf",
    "snf",
    "row_hnf_rational",
    "rref",
    "left_kernel_int",
    "kernel_int",
    "kernel_rational",
    "solve_rational",
    "solve_integer_linear",
    "solve_mixed_integer",
    "g_orthogonal_complement",
    "lattice_intersection",
    "lattice_sum",
    "saturation",
    "quotient_invariants",
    "denominator_lattice",
]

ZERO = Fraction(0)
ONE = Fraction(1)


def rat(x: int | str | Fraction) -> Fraction:
    """Coerces ints, Fractions and "p/q" strings to Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    return parse_rat(x)


def parse_rat(s: str) -> Fraction:
    """Parses "p/q" or "p" into a reduced Fraction."""
    s = s.strip()
    if "/" in s:
        p, q = s.split("/", 1)
        return Fraction(int(p), int(q))
    return Fraction(int(s))


def format_rat(x: Fraction | int) -> str:
    """Formats a rational as "p/q", or "p" when the denominator is 1."""
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


Row = tuple[Fraction, ...]


def _freeze_rows(rows: Iterable[Iterable[int | str | Fraction]]) -> tuple[Row, ...]:
    return tuple(tuple(rat(x) for x in row) for row in rows)


@dataclass(frozen=True)
class QMat:
    """Immutable rational matrix.

    Rows are stored as tuples of Fractions.  The zero-row count is allowed,
    in which case the column count must be supplied explicitly so that shape
    information survives degenerate intermediate results.
    """

    rows: tuple[Row, ...]
    cols: int

    def __init__(self, rows: Iterable[Iterable[int | str | Fraction]], cols: int | None = None):
        frozen = _freeze_rows(rows)
        if frozen:
            ncols = len(frozen[0])
            if any(len(r) != ncols for r in frozen):
                raise ValueError("ragged matrix")
            if cols is not None and cols != ncols:
                raise ValueError("explicit column count disagrees with rows")
            cols = ncols
        elif cols is None:
            cols = 0
        object.__setattr__(self, "rows", frozen)
        object.__setattr__(self, "cols", cols)

    # -- shape and access ---------------------------------------------------

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.cols)

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        return self.rows[ij[0]][ij[1]]

    def row(self, i: int) -> Row:
        return self.rows[i]

    def col(self, j: int) -> Row:
        return tuple(r[j] for r in self.rows)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def identity(n: int) -> "QMat":
        return QMat([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], n)

    @staticmethod
    def zero(m: int, n: int) -> "QMat":
        return QMat([[ZERO] * n for _ in range(m)], n)

    @staticmethod
    def from_cols(cols: Sequence[Sequence[Fraction]], nrows: int | None = None) -> "QMat":
        if not cols:
            return QMat([], 0) if nrows is None else QMat([() for _ in range(nrows)], 0)
        n = len(cols[0])
        return QMat([[cols[j][i] for j in range(len(cols))] for i in range(n)], len(cols))

    @staticmethod
    def diag(entries: Sequence[int | Fraction]) -> "QMat":
        n = len(entries)
        return QMat(
            [[rat(entries[i]) if i == j else ZERO for j in range(n)] for i in range(n)], n
        )

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "QMat") -> "QMat":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return QMat(
            [
                [a + b for a, b in zip(ra, rb)]
                for ra, rb in zip(self.rows, other.rows)
            ],
            self.cols,
        )

    def __sub__(self, other: "QMat") -> "QMat":
        return self + (-other)

    def __neg__(self) -> "QMat":
        return QMat([[-a for a in r] for r in self.rows], self.cols)

    def __mul__(self, other: "QMat | int | Fraction") -> "QMat":
        if isinstance(other, (int, Fraction)):
            c = rat(other)
            return QMat([[a * c for a in r] for r in self.rows], self.cols)
        if self.cols != other.nrows:
            raise ValueError("shape mismatch in product")
        ocols = other.cols
        orows = other.rows
        out = []
        for r in self.rows:
            row = [ZERO] * ocols
            for k, a in enumerate(r):
                if a:
                    ork = orows[k]
                    for j in range(ocols):
                        if ork[j]:
                            row[j] += a * ork[j]
            out.append(row)
        return QMat(out, ocols)

    def __rmul__(self, other: int | Fraction) -> "QMat":
        return self * other

    def matvec(self, v: Sequence[Fraction]) -> Row:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        return tuple(sum((a * x for a, x in zip(r, v) if a), ZERO) for r in self.rows)

    def vecmat(self, v: Sequence[Fraction]) -> Row:
        if len(v) != self.nrows:
            raise ValueError("vector length mismatch")
        out = [ZERO] * self.cols
        for x, r in zip(v, self.rows):
            if x:
                for j, a in enumerate(r):
                    if a:
                        out[j] += x * a
        return tuple(out)

    def transpose(self) -> "QMat":
        return QMat([self.col(j) for j in range(self.cols)], len(self.rows))

    def is_integral(self) -> bool:
        return all(a.denominator == 1 for r in self.rows for a in r)

    def is_zero(self) -> bool:
        return all(not a for r in self.rows for a in r)

    def denominator(self) -> int:
        d = 1
        for r in self.rows:
            for a in r:
                d = lcm(d, a.denominator)
        return d

    def det(self) -> Fraction:
        if self.nrows != self.cols:
            raise ValueError("determinant of non-square matrix")
        n = self.nrows
        m = [list(r) for r in self.rows]
        det = ONE
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c]), None)
            if piv is None:
                return ZERO
            if piv != c:
                m[c], m[piv] = m[piv], m[c]
                det = -det
            det *= m[c][c]
            inv = ONE / m[c][c]
            for r in range(c + 1, n):
                if m[r][c]:
                    f = m[r][c] * inv
                    for j in range(c, n):
                        m[r][j] -= f * m[c][j]
        return det

    def inverse(self) -> "QMat":
        if self.nrows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.nrows
        m = [list(r) + [ONE if i == j else ZERO for j in range(n)] for i, r in enumerate(self.rows)]
        for c in range(n):
            piv = next((r for r in range(c, n) if m[r][c]), None)
            if piv is None:
                raise ValueError("singular matrix")
            m[c], m[piv] = m[piv], m[c]
            inv = ONE / m[c][c]
            m[c] = [a * inv for a in m[c]]
            for r in range(n):
                if r != c and m[r][c]:
                    f = m[r][c]
                    m[r] = [a - f * b for a, b in zip(m[r], m[c])]
        return QMat([r[n:] for r in m], n)

    def rank(self) -> int:
        return len(rref(self).rows)

    def to_lists(self) -> list[list[Fraction]]:
        return [list(r) for r in self.rows]


# ---------------------------------------------------------------------------
# Echelon forms
# ---------------------------------------------------------------------------


def rref(m: QMat) -> QMat:
    """Reduced row echelon form with zero rows dropped.

    The result is the canonical basis-in-echelon of the row space, used for
    comparing rational subspaces.
    """
    rows = [list(r) for r in m.rows]
    nr, nc = len(rows), m.cols
    pr = 0
    for c in range(nc):
        piv = next((r for r in range(pr, nr) if rows[r][c]), None)
        if piv is None:
            continue
        rows[pr], rows[piv] = rows[piv], rows[pr]
        inv = ONE / rows[pr][c]
        rows[pr] = [a * inv for a in rows[pr]]
        for r in range(nr):
            if r != pr and rows[r][c]:
                f = rows[r][c]
                rows[r] = [a - f * b for a, b in zip(rows[r], rows[pr])]
        pr += 1
        if pr == nr:
            break
    return QMat([r for r in rows[:pr]], nc)


def hnf(m: QMat) -> tuple[QMat, QMat]:
    """Row Hermite normal form of an integer matrix.

    Returns (H, U) with U unimodular and U*M = H.  Pivots are positive,
    entries above each pivot are reduced into [0, pivot), and zero rows
    sink to the bottom.
    """
    if not m.is_integral():
        raise ValueError("hnf requires an integer matrix")
    nr, nc = m.shape
    a = [[int(x) for x in r] for r in m.rows]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    pr = 0
    for c in range(nc):
        # Clears the column below the pivot row with gcd row operations.
        while True:
            nz = [r for r in range(pr, nr) if a[r][c]]
            if not nz:
                break
            piv = min(nz, key=lambda r: abs(a[r][c]))
            if piv != pr:
                a[pr], a[piv] = a[piv], a[pr]
                u[pr], u[piv] = u[piv], u[pr]
            done = True
            for r in range(pr + 1, nr):
                if a[r][c]:
                    q = a[r][c] // a[pr][c]
                    a[r] = [x - q * y for x, y in zip(a[r], a[pr])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[pr])]
                    if a[r][c]:
                        done = False
            if done:
                break
        if pr < nr and a[pr][c]:
            if a[pr][c] < 0:
                a[pr] = [-x for x in a[pr]]
                u[pr] = [-x for x in u[pr]]
            for r in range(pr):
                q = a[r][c] // a[pr][c]
                if q:
                    a[r] = [x - q * y for x, y in zip(a[r], a[pr])]
                    u[r] = [x - q * y for x, y in zip(u[r], u[pr])]
            pr += 1
        if pr == nr:
            break
    return QMat(a, nc), QMat(u, nr)


def snf(m: QMat) -> tuple[QMat, QMat, QMat]:
    """Smith normal form of an integer matrix.

    Returns (U, S, V) with U, V unimodular and U*M*V = S, S diagonal with
    d1 | d2 | ... and all diagonal entries nonnegative.
    """
    if not m.is_integral():
        raise ValueError("snf requires an integer matrix")
    nr, nc = m.shape
    a = [[int(x) for x in r] for r in m.rows]
    u = [[1 if i == j else 0 for j in range(nr)] for i in range(nr)]
    v = [[1 if i == j else 0 for j in range(nc)] for i in range(nc)]

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def addmul_row(dst, src, q):
        a[dst] = [x + q * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + q * y for x, y in zip(u[dst], u[src])]

    def addmul_col(dst, src, q):
        for r in a:
            r[dst] += q * r[src]
        for r in v:
            r[dst] += q * r[src]

    t = 0
    while t < min(nr, nc):
        # Finds the smallest nonzero entry in the remaining block.
        best = None
        for i in range(t, nr):
            for j in range(t, nc):
                if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        swap_rows(t, best[0])
        swap_cols(t, best[1])
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, nr):
                if a[i][t]:
                    q = a[i][t] // a[t][t]
                    addmul_row(i, t, -q)
                    if a[i][t]:
                        swap_rows(t, i)
                        dirty = True
            for j in range(t + 1, nc):
                if a[t][j]:
                    q = a[t][j] // a[t][t]
                    addmul_col(j, t, -q)
                    if a[t][j]:
                        swap_cols(t, j)
                        dirty = True
        # Enforces divisibility of the remaining block by the pivot.
        fixed = False
        for i in range(t + 1, nr):
            for j in range(t + 1, nc):
                if a[i][j] % a[t][t]:
                    addmul_row(t, i, 1)
                    fixed = True
                    break
            if fixed:
                break
        if fixed:
            continue
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
        t += 1
    return QMat(u, nr), QMat(a, nc), QMat(v, nc)


def row_hnf_rational(rows: Sequence[Sequence[Fraction]], cols: int) -> QMat:
    """Canonical HNF-style basis of the subgroup of Q^cols generated by rows.

    Scales by the common denominator, takes the integer HNF, and scales back.
    Zero rows are dropped.  The result rows are a canonical basis of the
    (discrete) subgroup generated by the input rows.
    """
    m = QMat(rows, cols)
    if m.nrows == 0:
        return QMat([], cols)
    d = m.denominator()
    h, _ = hnf(m * d)
    kept = [r for r in h.rows if any(r)]
    return QMat([[x / d for x in r] for r in kept], cols)


# ---------------------------------------------------------------------------
# Kernels and solvers
# ---------------------------------------------------------------------------


def left_kernel_int(m: QMat) -> QMat:
    """Basis of the left integer kernel {x : x*M = 0} of an integer matrix."""
    h, u = hnf(m)
    rows = [u.row(i) for i in range(m.nrows) if not any(h.row(i))]
    if not rows:
        return QMat([], m.nrows)
    hk, _ = hnf(QMat(rows, m.nrows))
    return QMat([r for r in hk.rows if any(r)], m.nrows)


def kernel_int(m: QMat) -> QMat:
    """Basis (as rows) of the integer kernel {x : M*x = 0}."""
    return left_kernel_int(m.transpose())


def kernel_rational(m: QMat) -> QMat:
    """Basis rows of the rational kernel {x : M*x = 0}, in RREF-derived form."""
    r = rref(m)
    nc = m.cols
    pivots = []
    for row in r.rows:
        j = next(j for j in range(nc) if row[j])
        pivots.append(j)
    free = [j for j in range(nc) if j not in pivots]
    basis = []
    for f in free:
        vec = [ZERO] * nc
        vec[f] = ONE
        for row, p in zip(r.rows, pivots):
            vec[p] = -row[f]
        basis.append(vec)
    return QMat(basis, nc)


def solve_rational(m: QMat, b: Sequence[Fraction]) -> Row | None:
    """One rational solution x of M*x = b, or None when inconsistent."""
    nr, nc = m.shape
    aug = QMat([list(m.row(i)) + [b[i]] for i in range(nr)], nc + 1)
    r = rref(aug)
    x = [ZERO] * nc
    for row in r.rows:
        j = next(j for j in range(nc + 1) if row[j])
        if j == nc:
            return None
        x[j] = row[nc]
    return tuple(x)


def solve_integer_linear(m: QMat, b: Sequence[Fraction]) -> tuple[Row, QMat] | None:
    """Integer solutions of M*x = b for rational M, b.

    Returns (particular, kernel_basis) where kernel_basis rows span
    {x in Z^n : M*x = 0}, or None when no integer solution exists.
    """
    nr, nc = m.shape
    if nr == 0:
        return tuple([ZERO] * nc), QMat.identity(nc)
    d = 1
    for r in m.rows:
        for a in r:
            d = lcm(d, a.denominator)
    for x in b:
        d = lcm(d, Fraction(x).denominator)
    mi = m * d
    bi = [Fraction(x) * d for x in b]
    u, s, v = snf(mi)
    c = u.matvec(bi)
    rank = sum(1 for i in range(min(nr, nc)) if s[i, i])
    y = [ZERO] * nc
    for i in range(nr):
        si = s[i, i] if i < min(nr, nc) else ZERO
        if i < rank:
            q = c[i] / si
            if q.denominator != 1:
                return None
            y[i] = q
        else:
            if c[i]:
                return None
    x = v.matvec(y)
    kern = [v.col(j) for j in range(rank, nc)]
    kb = QMat(kern, nc) if kern else QMat([], nc)
    return tuple(x), kb


def solve_mixed_integer(
    m_rat: QMat, m_int: QMat, b: Sequence[Fraction]
) -> tuple[Row, Row] | None:
    """Solves M_rat*x + M_int*t = b with x rational and t integral.

    Returns one solution (x, t) or None.  Both coefficient matrices must
    share the row count; either may have zero columns.
    """
    nr = m_rat.nrows if m_rat.nrows else m_int.nrows
    p, q = m_rat.cols, m_int.cols
    if p == 0:
        sol = solve_integer_linear(m_int, b)
        if sol is None:
            return None
        return (), sol[0]
    # Left-annihilator of the rational block reduces the system to integer-only
    # conditions on t.
    w = kernel_rational(m_rat.transpose())  # rows y with y*M_rat = 0
    if w.nrows:
        cond = QMat([w.row(i) for i in range(w.nrows)], nr) * m_int if q else QMat([], 0)
        rhs = tuple(
            sum(w[i, r] * Fraction(b[r]) for r in range(nr)) for i in range(w.nrows)
        )
        if q:
            sol = solve_integer_linear(cond, rhs)
            if sol is None:
                return None
            t = sol[0]
        else:
            if any(rhs):
                return None
            t = ()
    else:
        t = tuple([ZERO] * q)
    resid = [Fraction(b[r]) - sum(m_int[r, j] * t[j] for j in range(q)) for r in range(nr)]
    x = solve_rational(m_rat, resid)
    if x is None:
        return None
    return x, t


# ---------------------------------------------------------------------------
# Lattices
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ZLattice:
    """Finitely generated subgroup of Z^n in canonical row Hermite form."""

    basis: QMat  # integral rows, HNF canonical, zero rows removed
    ambient_dim: int

    def __init__(self, basis: QMat | Iterable[Iterable[int | Fraction]], ambient_dim: int | None = None):
        if not isinstance(basis, QMat):
            basis = QMat(basis, ambient_dim)
        if ambient_dim is None:
            ambient_dim = basis.cols
        if basis.cols != ambient_dim:
            raise ValueError("basis column count disagrees with ambient dimension")
        if not basis.is_integral():
            raise ValueError("lattice basis must be integral")
        h, _ = hnf(basis)
        rows = [r for r in h.rows if any(r)]
        object.__setattr__(self, "basis", QMat(rows, ambient_dim))
        object.__setattr__(self, "ambient_dim", ambient_dim)

    @property
    def rank(self) -> int:
        return self.basis.nrows

    def contains(self, v: Sequence[Fraction]) -> bool:
        c = coordinates_in_rowspace(self.basis, v)
        return c is not None and all(x.denominator == 1 for x in c)

    def contains_lattice(self, other: "ZLattice") -> bool:
        return all(self.contains(other.basis.row(i)) for i in range(other.rank))

    @staticmethod
    def standard(n: int) -> "ZLattice":
        return ZLattice(QMat.identity(n), n)


def coordinates_in_rowspace(basis: QMat, v: Sequence[Fraction]) -> Row | None:
    """Coordinates c with c*basis = v, or None when v is outside the row space."""
    sol = solve_rational(basis.transpose(), list(v))
    return sol


def lattice_intersection(a: ZLattice, b: ZLattice) -> ZLattice:
    """Intersection of two sublattices of the same Z^n."""
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    if a.rank == 0 or b.rank == 0:
        return ZLattice(QMat([], a.ambient_dim), a.ambient_dim)
    # x = p*A = q*B; solve (p | q) * [A; -B] = 0 over Z.
    stacked = QMat(list(a.basis.rows) + [tuple(-x for x in r) for r in b.basis.rows], a.ambient_dim)
    kern = left_kernel_int(stacked)
    rows = []
    for i in range(kern.nrows):
        p = kern.row(i)[: a.rank]
        rows.append(QMat([p], a.rank).__mul__(a.basis).row(0))
    return ZLattice(QMat(rows, a.ambient_dim) if rows else QMat([], a.ambient_dim), a.ambient_dim)


def lattice_sum(a: ZLattice, b: ZLattice) -> ZLattice:
    if a.ambient_dim != b.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    return ZLattice(QMat(list(a.basis.rows) + list(b.basis.rows), a.ambient_dim), a.ambient_dim)


def saturation(a: ZLattice, subspace: "QSubspace") -> ZLattice:
    """Saturated sublattice of `a` inside a rational subspace: {x in a : x in span}.

    The result is the largest sublattice of `a` whose rational span lies in
    `subspace`; it is saturated in `a` (the quotient is torsion free).
    """
    if a.ambient_dim != subspace.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    # Integer points of the subspace: solve the annihilator system over Z.
    ann = subspace.annihilator()
    if ann.nrows == 0:
        return a
    sol = solve_integer_linear(ann, [ZERO] * ann.nrows)
    assert sol is not None
    _, kern = sol
    rows = [r for r in kern.rows]
    lat = ZLattice(QMat(rows, a.ambient_dim) if rows else QMat([], a.ambient_dim), a.ambient_dim)
    if a.basis.rows == QMat.identity(a.ambient_dim).rows:
        return lat
    return lattice_intersection(lat, a)


def quotient_invariants(outer: ZLattice, inner: ZLattice) -> tuple[int, list[int]]:
    """Structure of outer/inner for inner a sublattice of outer.

    Returns (free_rank, invariant_factors) with factors sorted by
    divisibility and trivial factors removed.  Raises ValueError("not a
    sublattice") when inner is not contained in outer.
    """
    if outer.ambient_dim != inner.ambient_dim:
        raise ValueError("ambient dimension mismatch")
    coords = []
    for i in range(inner.rank):
        c = coordinates_in_rowspace(outer.basis, inner.basis.row(i))
        if c is None or any(x.denominator != 1 for x in c):
            raise ValueError("not a sublattice")
        coords.append(c)
    free_rank = outer.rank - inner.rank
    if not coords:
        return free_rank, []
    _, s, _ = snf(QMat(coords, outer.rank))
    factors = [int(s[i, i]) for i in range(min(s.shape)) if s[i, i] > 1]
    return free_rank, factors


def denominator_lattice(m: QMat) -> QMat:
    """Canonical basis rows of {x in Q^n : M*x in Z^rows}.

    The result is returned as rational rows (a full-rank "dual scale"
    lattice containing Z^n whenever M is integral).  Rows are canonical.
    """
    nr, nc = m.shape
    if nr == 0 or m.is_zero():
        # No constraint in the integral directions; the solution set is all
        # of Q^n, which has no lattice basis.  Callers must special-case.
        raise ValueError("constraint matrix has no nonzero rows")
    d = m.denominator()
    mi = m * d
    u, s, v = snf(mi)
    rank = sum(1 for i in range(min(nr, nc)) if s[i, i])
    if rank < nc:
        raise ValueError("constraint matrix has nontrivial rational kernel")
    rows = []
    for j in range(nc):
        dj = s[j, j] / d
        rows.append(tuple(v[i, j] / dj for i in range(nc)))
    return row_hnf_rational(rows, nc)


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QSubspace:
    """Rational subspace of Q^n with canonical RREF basis rows."""

    basis: QMat
    ambient_dim: int

    def __init__(self, basis: QMat | Iterable[Iterable[int | Fraction]], ambient_dim: int | None = None):
        if not isinstance(basis, QMat):
            basis = QMat(basis, ambient_dim)
        if ambient_dim is None:
            ambient_dim = basis.cols
        if basis.cols != ambient_dim:
            raise ValueError("basis column count disagrees with ambient dimension")
        object.__setattr__(self, "basis", rref(basis))
        object.__setattr__(self, "ambient_dim", ambient_dim)

    @property
    def dim(self) -> int:
        return self.basis.nrows

    def contains(self, v: Sequence[Fraction]) -> bool:
        return coordinates_in_rowspace(self.basis, v) is not None

    def contains_space(self, other: "QSubspace") -> bool:
        return all(self.contains(other.basis.row(i)) for i in range(other.dim))

    def annihilator(self) -> QMat:
        """Matrix E with the subspace equal to {x : E*x = 0}."""
        if self.dim == 0:
            return QMat.identity(self.ambient_dim)
        return kernel_rational(self.basis)

    @staticmethod
    def full(n: int) -> "QSubspace":
        return QSubspace(QMat.identity(n), n)

    @staticmethod
    def zero(n: int) -> "QSubspace":
        return QSubspace(QMat([], n), n)


def g_orthogonal_complement(space: QSubspace, gram: QMat) -> QSubspace:
    """Orthogonal complement of a subspace with respect to a Gram form.

    The Gram matrix must be symmetric positive definite; otherwise a
    ValueError("invalid Gram form") is raised.
    """
    n = space.ambient_dim
    if gram.shape != (n, n):
        raise ValueError("invalid Gram form")
    if gram.transpose().rows != gram.rows:
        raise ValueError("invalid Gram form")
    # Leading principal minors positive is equivalent to positive definiteness.
    for k in range(1, n + 1):
        minor = QMat([[gram[i, j] for j in range(k)] for i in range(k)], k)
        if minor.det() <= 0:
            raise ValueError("invalid Gram form")
    if space.dim == 0:
        return QSubspace.full(n)
    constraints = space.basis * gram
    return QSubspace(kernel_rational(constraints), n)
