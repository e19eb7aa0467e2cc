"""Exact integer matrix arithmetic: Smith/Hermite normal forms, kernels,
integer linear solves and lattice membership.

Everything here works over Python's arbitrary-precision ints.  No floats,
no numpy: the downstream homology computations need exact witnesses
(unimodular transforms, canonical lattice bases), and entries can grow well
past 64 bits during elimination.
"""

from __future__ import annotations

from dataclasses import dataclass


def xgcd(a, b):
    """Extended gcd.

    Returns (g, x, y) with g = gcd(a, b) >= 0 and x*a + y*b == g.

    >>> xgcd(12, 18)
    (6, -1, 1)
    >>> xgcd(0, 0)
    (0, 1, 0)
    """
    # Invariants maintained below:  x0*a0 + y0*b0 == a  and  x1*a0 + y1*b0 == b
    # for the original arguments (a0, b0).
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


class Mat:
    """Immutable integer matrix, stored as a tuple of row tuples.

    Supports the handful of operations the homology code needs; anything
    heavier (normal forms, solving) lives in module functions that work on
    mutable row lists internally.
    """

    __slots__ = ("rows", "cols", "data")

    def __init__(self, data, cols=None):
        rows = tuple(tuple(int(x) for x in row) for row in data)
        object.__setattr__(self, "data", rows)
        object.__setattr__(self, "rows", len(rows))
        if rows:
            width = len(rows[0])
            if any(len(r) != width for r in rows):
                raise ValueError("ragged rows")
            if cols is not None and cols != width:
                raise ValueError("cols mismatch")
            object.__setattr__(self, "cols", width)
        else:
            object.__setattr__(self, "cols", 0 if cols is None else cols)

    def __setattr__(self, name, value):
        raise AttributeError("Mat is immutable")

    # -- constructors ------------------------------------------------

    @classmethod
    def zero(cls, rows, cols):
        return cls(((0,) * cols for _ in range(rows)), cols=cols)

    @classmethod
    def identity(cls, n):
        return cls((tuple(1 if i == j else 0 for j in range(n)) for i in range(n)), cols=n)

    @classmethod
    def from_cols(cls, columns, rows):
        """Matrix whose j-th column is columns[j]; `rows` fixes the height
        even when the column list is empty."""
        columns = [tuple(c) for c in columns]
        for c in columns:
            if len(c) != rows:
                raise ValueError("column of wrong height")
        return cls((tuple(c[i] for c in columns) for i in range(rows)), cols=len(columns))

    # -- basic queries -----------------------------------------------

    def col(self, j):
        return tuple(self.data[i][j] for i in range(self.rows))

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    def row(self, i):
        return self.data[i]

    @property
    def is_zero(self):
        return all(x == 0 for row in self.data for x in row)

    # -- arithmetic --------------------------------------------------

    def __mul__(self, other):
        if isinstance(other, Mat):
            if self.cols != other.rows:
                raise ValueError("shape mismatch %sx%s * %sx%s"
                                 % (self.rows, self.cols, other.rows, other.cols))
            bT = [other.col(j) for j in range(other.cols)]
            return Mat(
                (tuple(sum(a * b for a, b in zip(row, col)) for col in bT)
                 for row in self.data),
                cols=other.cols)
        return Mat((tuple(x * other for x in row) for row in self.data), cols=self.cols)

    __rmul__ = __mul__

    def __add__(self, other):
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return Mat((tuple(a + b for a, b in zip(r1, r2))
                    for r1, r2 in zip(self.data, other.data)), cols=self.cols)

    def __sub__(self, other):
        return self + (-1) * other

    def __neg__(self):
        return (-1) * self

    def apply(self, vec):
        """Matrix * column vector, as a tuple."""
        vec = tuple(vec)
        if len(vec) != self.cols:
            raise ValueError("vector of wrong length")
        return tuple(sum(a * v for a, v in zip(row, vec)) for row in self.data)

    def transpose(self):
        return Mat((self.col(j) for j in range(self.cols)), cols=self.rows)

    def hstack(self, other):
        if self.rows != other.rows:
            raise ValueError("row mismatch")
        return Mat((r1 + r2 for r1, r2 in zip(self.data, other.data)),
                   cols=self.cols + other.cols)

    def vstack(self, other):
        if self.cols != other.cols:
            raise ValueError("col mismatch")
        return Mat(self.data + other.data, cols=self.cols)

    def submatrix(self, row_idx, col_idx):
        row_idx = list(row_idx)
        col_idx = list(col_idx)
        return Mat((tuple(self.data[i][j] for j in col_idx) for i in row_idx),
                   cols=len(col_idx))

    # -- comparison --------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.rows == other.rows
                and self.cols == other.cols and self.data == other.data)

    def __hash__(self):
        return hash((self.rows, self.cols, self.data))

    def __repr__(self):
        if self.rows == 0 or self.cols == 0:
            return "Mat.zero(%d, %d)" % (self.rows, self.cols)
        return "Mat(%r)" % (list(list(r) for r in self.data),)


def det(A):
    """Determinant by the Bareiss fraction-free algorithm.

    >>> det(Mat([[2, 1], [1, 1]]))
    1
    """
    if A.rows != A.cols:
        raise ValueError("determinant of a non-square matrix")
    n = A.rows
    if n == 0:
        return 1
    M = [list(r) for r in A.data]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        pk = M[k][k]
        for i in range(k + 1, n):
            Mi = M[i]
            Mk = M[k]
            mik = Mi[k]
            for j in range(k + 1, n):
                # Exact division: this quotient is an integer (Bareiss).
                Mi[j] = (Mi[j] * pk - mik * Mk[j]) // prev
            Mi[k] = 0
        prev = pk
    return sign * M[n - 1][n - 1]


class ColumnReduction:
    """Column echelon data E = A*V for a matrix A, cached for repeated solves.

    E is in column echelon form: each nonzero column has its topmost nonzero
    entry (the pivot, made positive) in a row strictly below the previous
    column's pivot row, and to the right of the pivot everything in its row
    is zero.  Columns past the pivot count are identically zero, and the
    corresponding columns of the unimodular V form a basis of ker(A) -- a
    saturated sublattice, as kernels always are.
    """

    __slots__ = ("matrix", "E", "V", "pivots")

    def __init__(self, A):
        m, n = A.rows, A.cols
        E = [list(A.col(j)) for j in range(n)]   # column-major
        V = [[1 if i == j else 0 for i in range(n)] for j in range(n)]  # column-major
        pivots = []
        c = 0
        for i in range(m):
            if c == n:
                break
            while True:
                best = -1
                for j in range(c, n):
                    v = E[j][i]
                    if v and (best < 0 or abs(v) < abs(E[best][i])):
                        best = j
                if best < 0:
                    break
                if best != c:
                    E[c], E[best] = E[best], E[c]
                    V[c], V[best] = V[best], V[c]
                if E[c][i] < 0:
                    E[c] = [-x for x in E[c]]
                    V[c] = [-x for x in V[c]]
                p = E[c][i]
                clean = True
                for j in range(c + 1, n):
                    v = E[j][i]
                    if v:
                        q = v // p
                        if q:
                            Ej, Ec = E[j], E[c]
                            for k in range(m):
                                Ej[k] -= q * Ec[k]
                            Vj, Vc = V[j], V[c]
                            for k in range(n):
                                Vj[k] -= q * Vc[k]
                        if E[j][i]:
                            clean = False
                if clean:
                    pivots.append((i, c))
                    c += 1
                    break
        self.matrix = A
        self.E = E
        self.V = V
        self.pivots = pivots

    @property
    def rank(self):
        return len(self.pivots)

    def kernel(self):
        """Basis of {x : A x = 0} as a Mat with basis vectors in columns.

        Normalized through the Hermite form so the answer is canonical for
        the kernel lattice, not an artifact of the elimination order.
        """
        n = self.matrix.cols
        raw = Mat.from_cols([self.V[j] for j in range(self.rank, n)], rows=n)
        return hermite_column_basis(raw)

    def solve(self, b):
        """One integer solution x of A x = b, or None."""
        b = list(b)
        if len(b) != self.matrix.rows:
            raise ValueError("rhs of wrong length")
        m = self.matrix.rows
        n = self.matrix.cols
        y = [0] * n
        for (i, j) in self.pivots:
            p = self.E[j][i]
            t, r = divmod(b[i], p)
            if r:
                return None
            if t:
                y[j] = t
                Ej = self.E[j]
                for k in range(m):
                    b[k] -= t * Ej[k]
        if any(b):
            return None
        x = [0] * n
        for j in range(n):
            t = y[j]
            if t:
                Vj = self.V[j]
                for k in range(n):
                    x[k] += t * Vj[k]
        return tuple(x)

    def contains(self, b):
        """Is b in the column span (the lattice generated by A's columns)?"""
        return self.solve(b) is not None


def kernel_basis(A):
    """Basis of the integer kernel of A, columns of the result.

    >>> kernel_basis(Mat([[1, 1]]))
    Mat([[1], [-1]])
    """
    return ColumnReduction(A).kernel()


def solve_integer(A, b):
    """Some x with A x = b over the integers, or None.

    >>> solve_integer(Mat([[1, 2], [0, 2]]), (3, 2))
    (1, 1)
    >>> solve_integer(Mat([[2]]), (1,)) is None
    True
    """
    return ColumnReduction(A).solve(b)


def solve_matrix(A, B):
    """X with A X = B over the integers (columnwise), or None."""
    red = ColumnReduction(A)
    cols = []
    for j in range(B.cols):
        x = red.solve(B.col(j))
        if x is None:
            return None
        cols.append(x)
    return Mat.from_cols(cols, rows=A.cols)


def lattice_coordinates(L, v):
    """Coordinates of v in terms of the columns of L, or None.

    >>> lattice_coordinates(Mat([[1, 0], [1, 2]]), (1, 3))
    (1, 1)
    """
    return ColumnReduction(L).solve(v)


def lattice_contains(L, v):
    return lattice_coordinates(L, v) is not None


def hermite_column_basis(A):
    """The canonical (column-style Hermite) basis of the lattice spanned by
    the columns of A.  Zero columns are dropped; pivots are positive; each
    pivot's row is reduced to lie in [0, pivot) at the earlier columns.

    Two generating sets span the same lattice iff they produce equal output.

    >>> hermite_column_basis(Mat([[2, 1], [0, 3]]))
    Mat([[1, 0], [3, 6]])
    """
    red = ColumnReduction(A)
    E = red.E
    m = A.rows
    for k, (i, c) in enumerate(red.pivots):
        p = E[c][i]
        for jj in range(c):
            q = E[jj][i] // p
            if q:
                Ej, Ec = E[jj], E[c]
                for t in range(m):
                    Ej[t] -= q * Ec[t]
    return Mat.from_cols([E[c] for (_, c) in red.pivots], rows=m)


@dataclass(frozen=True)
class SmithDecomposition:
    """U*A*V == S with U, V unimodular and S diagonal, d1 | d2 | ... | dr.

    Uinv and Vinv are the exact inverses, tracked during elimination so that
    callers never have to invert a unimodular matrix themselves.
    """

    U: Mat
    S: Mat
    V: Mat
    Uinv: Mat
    Vinv: Mat
    rank: int

    @property
    def invariant_factors(self):
        return tuple(self.S.data[i][i] for i in range(self.rank))


def smith_normal_form(A):
    """Smith normal form with full transform witnesses.

    >>> smith_normal_form(Mat([[4, 0], [0, 6]])).invariant_factors
    (2, 12)
    """
    m, n = A.rows, A.cols
    M = [list(r) for r in A.data]
    U = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    Ui = [[1 if i == j else 0 for j in range(m)] for i in range(m)]
    V = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    Vi = [[1 if i == j else 0 for j in range(n)] for i in range(n)]

    def row_add(i, j, q):          # row_i += q * row_j ; inverse: col_j -= q * col_i
        Mi, Mj = M[i], M[j]
        for k in range(n):
            Mi[k] += q * Mj[k]
        Uiq, Ujq = U[i], U[j]
        for k in range(m):
            Uiq[k] += q * Ujq[k]
        for r in range(m):
            Ui[r][j] -= q * Ui[r][i]

    def row_swap(i, j):
        M[i], M[j] = M[j], M[i]
        U[i], U[j] = U[j], U[i]
        for r in range(m):
            Ui[r][i], Ui[r][j] = Ui[r][j], Ui[r][i]

    def row_neg(i):
        M[i] = [-x for x in M[i]]
        U[i] = [-x for x in U[i]]
        for r in range(m):
            Ui[r][i] = -Ui[r][i]

    def col_add(j, k, q):          # col_j += q * col_k ; inverse: row_k -= q * row_j
        for r in range(m):
            M[r][j] += q * M[r][k]
        for r in range(n):
            V[r][j] += q * V[r][k]
        Vk, Vj = Vi[k], Vi[j]
        for c in range(n):
            Vk[c] -= q * Vj[c]

    def col_swap(j, k):
        for r in range(m):
            M[r][j], M[r][k] = M[r][k], M[r][j]
        for r in range(n):
            V[r][j], V[r][k] = V[r][k], V[r][j]
        Vi[j], Vi[k] = Vi[k], Vi[j]

    def col_neg(j):
        for r in range(m):
            M[r][j] = -M[r][j]
        for r in range(n):
            V[r][j] = -V[r][j]
        Vi[j] = [-x for x in Vi[j]]

    t = 0
    while t < min(m, n):
        # Bring the entry of smallest nonzero magnitude in the trailing
        # block to position (t, t); small pivots keep coefficient growth down.
        pi = pj = -1
        best = 0
        for i in range(t, m):
            Mi = M[i]
            for j in range(t, n):
                v = Mi[j]
                if v and (pi < 0 or abs(v) < best):
                    pi, pj, best = i, j, abs(v)
        if pi < 0:
            break
        if pi != t:
            row_swap(t, pi)
        if pj != t:
            col_swap(t, pj)
        p = M[t][t]
        clean = True
        for i in range(t + 1, m):
            v = M[i][t]
            if v:
                q = v // p
                if q:
                    row_add(i, t, -q)
                if M[i][t]:
                    clean = False
        for j in range(t + 1, n):
            v = M[t][j]
            if v:
                q = v // p
                if q:
                    col_add(j, t, -q)
                if M[t][j]:
                    clean = False
        if not clean:
            continue
        # Row and column t are clear.  Enforce that the pivot divides the
        # whole trailing block, so the diagonal comes out as a divisor chain.
        bad = None
        for i in range(t + 1, m):
            Mi = M[i]
            for j in range(t + 1, n):
                if Mi[j] % p:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            row_add(t, bad, 1)
            continue
        if p < 0:
            row_neg(t)
        t += 1

    return SmithDecomposition(U=Mat(U, cols=m), S=Mat(M, cols=n), V=Mat(V, cols=n),
                              Uinv=Mat(Ui, cols=m), Vinv=Mat(Vi, cols=n), rank=t)
