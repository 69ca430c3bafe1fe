"""Exact integer and rational lattice algebra.

Bases are lists of COLUMN vectors (``cols[j][i]`` is row i of column j).
Everything is exact: integers stay integers, rational work uses Fraction;
no floating point enters any computation here.

The LLL implementation is the all-integer variant that tracks the scaled
Gram-Schmidt data (d_i, lambda_{i,j}) instead of rational mu's; tests check
its state against an independent Fraction Gram-Schmidt.  Shortest vectors
for oracles come from exact Fincke-Pohst enumeration.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Iterator, Sequence

Vec = list
Cols = list


class LatticeError(ValueError):
    pass


def dot(u: Sequence, v: Sequence):
    return sum(a * b for a, b in zip(u, v))


def norm_sq(v: Sequence):
    return dot(v, v)


def cols_to_rows(cols: Cols) -> list[list]:
    return [list(row) for row in zip(*cols)] if cols else []


def rows_to_cols(rows: Sequence[Sequence]) -> Cols:
    return [list(col) for col in zip(*rows)] if rows else []


def identity_cols(n: int) -> Cols:
    return [[1 if i == j else 0 for i in range(n)] for j in range(n)]


def format_matrix(cols: Cols) -> str:
    """Debug text format: ``rows cols`` header, then row-major entries."""
    rows = cols_to_rows(cols)
    head = f"{len(rows)} {len(cols)}"
    return "\n".join([head] + [" ".join(str(x) for x in r) for r in rows]) + "\n"


def parse_matrix(text: str) -> Cols:
    lines = [ln for ln in text.strip().splitlines() if ln.strip()]
    r, c = map(int, lines[0].split())
    rows = [[int(x) for x in ln.split()] for ln in lines[1 : 1 + r]]
    if len(rows) != r or any(len(row) != c for row in rows):
        raise LatticeError("matrix text does not match its header")
    return rows_to_cols(rows)


# ---------------------------------------------------------------------------
# Gram-Schmidt (exact rational)


def gram_schmidt(cols: Cols) -> tuple[Cols, list[list[Fraction]]]:
    """Exact GSO of independent columns: returns (Q, R) with B = Q*R.

    Q's columns are orthogonal; R is unit upper triangular with
    R[i][j] = mu_{j,i} (the coefficient of q_i in b_j).
    """
    n = len(cols)
    q: Cols = []
    r = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for j, b in enumerate(cols):
        v = [Fraction(x) for x in b]
        for i in range(j):
            qn = norm_sq(q[i])
            mu = Fraction(dot(q[i], b), 1) / qn
            r[i][j] = mu
            v = [x - mu * y for x, y in zip(v, q[i])]
        if not any(v):
            raise LatticeError("columns are linearly dependent")
        q.append(v)
    return q, r


# ---------------------------------------------------------------------------
# all-integer LLL


class _LLLState:
    def __init__(self, cols: Cols, transform: bool):
        self.b = [list(c) for c in cols]
        self.n = len(cols)
        self.u = identity_cols(self.n) if transform else None
        self.dd: list[int] = [0] * self.n
        self.lam = [[0] * self.n for _ in range(self.n)]
        for i in range(self.n):
            for j in range(i + 1):
                u = dot(self.b[i], self.b[j])
                for k in range(j):
                    prev = self.dd[k - 1] if k else 1
                    u = (self.dd[k] * u - self.lam[i][k] * self.lam[j][k]) // prev
                if j < i:
                    self.lam[i][j] = u
                else:
                    if u <= 0:
                        raise LatticeError("columns are linearly dependent")
                    self.dd[i] = u

    def _d(self, i: int) -> int:
        return self.dd[i] if i >= 0 else 1

    def redi(self, k: int, l: int) -> None:
        if 2 * abs(self.lam[k][l]) <= self.dd[l]:
            return
        num, den = self.lam[k][l], self.dd[l]
        q = (2 * num + den) // (2 * den)  # nearest integer (den > 0)
        self.b[k] = [x - q * y for x, y in zip(self.b[k], self.b[l])]
        if self.u is not None:
            self.u[k] = [x - q * y for x, y in zip(self.u[k], self.u[l])]
        self.lam[k][l] -= q * self.dd[l]
        for i in range(l):
            self.lam[k][i] -= q * self.lam[l][i]

    def swapi(self, k: int) -> None:
        self.b[k], self.b[k - 1] = self.b[k - 1], self.b[k]
        if self.u is not None:
            self.u[k], self.u[k - 1] = self.u[k - 1], self.u[k]
        for j in range(k - 1):
            self.lam[k][j], self.lam[k - 1][j] = self.lam[k - 1][j], self.lam[k][j]
        lam = self.lam[k][k - 1]
        B = (self._d(k - 2) * self.dd[k] + lam * lam) // self.dd[k - 1]
        for i in range(k + 1, self.n):
            t = self.lam[i][k]
            self.lam[i][k] = (self.dd[k] * self.lam[i][k - 1] - lam * t) // self.dd[k - 1]
            self.lam[i][k - 1] = (B * t + lam * self.lam[i][k]) // self.dd[k]
        self.dd[k - 1] = B

    def reduce(self, delta: Fraction) -> None:
        p, q = delta.numerator, delta.denominator
        k = 1
        while k < self.n:
            self.redi(k, k - 1)
            lhs = q * (self._d(k - 2) * self.dd[k] + self.lam[k][k - 1] ** 2)
            if lhs < p * self.dd[k - 1] ** 2:
                self.swapi(k)
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    self.redi(k, l)
                k += 1

    def gso_norms_sq(self) -> list[Fraction]:
        return [Fraction(self.dd[i], self._d(i - 1)) for i in range(self.n)]


def lll_reduce(cols: Cols, delta: Fraction = Fraction(3, 4)) -> Cols:
    """LLL-reduce independent integer columns (same lattice, size-reduced,
    Lovasz condition at delta; default 3/4)."""
    basis, _, _ = lll_with_data(cols, delta, transform=False)
    return basis


def lll_with_data(cols: Cols, delta: Fraction = Fraction(3, 4), transform: bool = True
                  ) -> tuple[Cols, Cols | None, list[Fraction]]:
    """LLL with the unimodular transform U (out = in * U) and GSO norms^2."""
    if not Fraction(1, 4) < delta < 1:
        raise LatticeError("delta must lie in (1/4, 1)")
    if not cols:
        return [], [], []
    st = _LLLState(cols, transform)
    st.reduce(delta)
    return st.b, st.u, st.gso_norms_sq()


# ---------------------------------------------------------------------------
# Hermite and Smith normal forms


def hnf_with_transform(cols: Cols) -> tuple[Cols, Cols]:
    """Column-style HNF: returns (H, V) with B*V = [H | 0], V unimodular.

    H is the canonical generator matrix: pivots positive, zero above each
    pivot (in earlier-pivot columns' rows, entries reduced into [0, pivot)).
    Zero columns of B*V are dropped from H but kept in V (kernel vectors).
    """
    work = [list(c) for c in cols]
    n = len(work)
    rows = len(work[0]) if work else 0
    v = identity_cols(n)
    pivot = 0
    for row in range(rows):
        if pivot >= n:
            break
        # gcd-eliminate this row across columns pivot..n-1
        while True:
            nz = [j for j in range(pivot, n) if work[j][row] != 0]
            if len(nz) <= 1:
                break
            j0 = min(nz, key=lambda j: abs(work[j][row]))
            for j in nz:
                if j == j0:
                    continue
                q = work[j][row] // work[j0][row]
                work[j] = [a - q * b for a, b in zip(work[j], work[j0])]
                v[j] = [a - q * b for a, b in zip(v[j], v[j0])]
        nz = [j for j in range(pivot, n) if work[j][row] != 0]
        if not nz:
            continue
        j0 = nz[0]
        work[pivot], work[j0] = work[j0], work[pivot]
        v[pivot], v[j0] = v[j0], v[pivot]
        if work[pivot][row] < 0:
            work[pivot] = [-a for a in work[pivot]]
            v[pivot] = [-a for a in v[pivot]]
        for j in range(pivot):
            q = work[j][row] // work[pivot][row]
            if q:
                work[j] = [a - q * b for a, b in zip(work[j], work[pivot])]
                v[j] = [a - q * b for a, b in zip(v[j], v[pivot])]
        pivot += 1
    head = [c for c in work[:pivot]]
    assert all(not any(c) for c in work[pivot:]), "nonzero column after rank"
    return head, v


def hnf(cols: Cols) -> Cols:
    return hnf_with_transform(cols)[0]


def kernel_basis(cols: Cols) -> Cols:
    """Integer vectors y with sum_j y_j * cols[j] = 0 (basis of the kernel)."""
    h, v = hnf_with_transform(cols)
    rank = len(h)
    return v[rank:]


def lattices_equal(a: Cols, b: Cols) -> bool:
    return hnf(a) == hnf(b)


def snf(cols: Cols) -> tuple[Cols, Cols, Cols]:
    """Smith normal form: (U, S, V) with U*B*V = S, U and V unimodular,
    S diagonal with each divisor dividing the next."""
    b = cols_to_rows(cols)  # row-major working copy
    rows = len(b)
    colc = len(b[0]) if rows else 0
    u_rows = [[1 if i == j else 0 for j in range(rows)] for i in range(rows)]
    v_cols = identity_cols(colc)

    def row_op(i, j, q):  # row_i -= q * row_j
        b[i] = [x - q * y for x, y in zip(b[i], b[j])]
        u_rows[i] = [x - q * y for x, y in zip(u_rows[i], u_rows[j])]

    def col_op(i, j, q):  # col_i -= q * col_j
        for r in range(rows):
            b[r][i] -= q * b[r][j]
        v_cols[i] = [x - q * y for x, y in zip(v_cols[i], v_cols[j])]

    def row_swap(i, j):
        b[i], b[j] = b[j], b[i]
        u_rows[i], u_rows[j] = u_rows[j], u_rows[i]

    def col_swap(i, j):
        for r in range(rows):
            b[r][i], b[r][j] = b[r][j], b[r][i]
        v_cols[i], v_cols[j] = v_cols[j], v_cols[i]

    t = 0
    while t < min(rows, colc):
        found = [(i, j) for i in range(t, rows) for j in range(t, colc) if b[i][j]]
        if not found:
            break
        i0, j0 = min(found, key=lambda ij: abs(b[ij[0]][ij[1]]))
        row_swap(t, i0)
        col_swap(t, j0)
        dirty = True
        while dirty:
            dirty = False
            for i in range(t + 1, rows):
                q = b[i][t] // b[t][t]
                if q or b[i][t]:
                    row_op(i, t, q)
                    if b[i][t]:
                        row_swap(t, i)
                        dirty = True
            for j in range(t + 1, colc):
                q = b[t][j] // b[t][t]
                if q or b[t][j]:
                    col_op(j, t, q)
                    if b[t][j]:
                        col_swap(t, j)
                        dirty = True
        # enforce divisibility of the remaining block
        retry = False
        for i in range(t + 1, rows):
            for j in range(t + 1, colc):
                if b[i][j] % b[t][t]:
                    row_op(t, i, -1)  # add row i into row t
                    retry = True
                    break
            if retry:
                break
        if retry:
            continue
        if b[t][t] < 0:
            b[t] = [-x for x in b[t]]
            u_rows[t] = [-x for x in u_rows[t]]
        t += 1
    return rows_to_cols(u_rows), rows_to_cols(b), v_cols


def snf_diagonal(cols: Cols) -> list[int]:
    _, s, _ = snf(cols)
    srows = cols_to_rows(s)
    return [srows[i][i] for i in range(min(len(srows), len(s))) if srows[i][i]]


# ---------------------------------------------------------------------------
# determinants, inverses, duals


def det_int(cols: Cols) -> int:
    """Exact determinant of a square integer matrix (Bareiss)."""
    n = len(cols)
    if n == 0:
        return 1
    a = [row[:] for row in cols_to_rows(cols)]
    assert all(len(r) == n for r in a), "determinant needs a square matrix"
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def det_lattice(cols: Cols) -> int:
    d = det_int(cols)
    if d == 0:
        raise LatticeError("basis is singular")
    return abs(d)


def invert_rational(cols: Cols) -> Cols:
    """Exact inverse of a square nonsingular matrix, as columns of Fractions."""
    n = len(cols)
    a = [[Fraction(x) for x in row] for row in cols_to_rows(cols)]
    inv = [[Fraction(1) if i == j else Fraction(0) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            raise LatticeError("matrix is singular")
        a[k], a[piv] = a[piv], a[k]
        inv[k], inv[piv] = inv[piv], inv[k]
        f = a[k][k]
        a[k] = [x / f for x in a[k]]
        inv[k] = [x / f for x in inv[k]]
        for i in range(n):
            if i != k and a[i][k]:
                f = a[i][k]
                a[i] = [x - f * y for x, y in zip(a[i], a[k])]
                inv[i] = [x - f * y for x, y in zip(inv[i], inv[k])]
    return rows_to_cols(inv)


def dual_basis(cols: Cols) -> Cols:
    """Columns D with D^T * B = I; they span the dual lattice."""
    inv = invert_rational(cols)   # columns of B^-1
    return cols_to_rows(inv)      # transpose: D = (B^-1)^T


# ---------------------------------------------------------------------------
# membership and enumeration


def in_lattice(gens: Cols, v: Sequence[int]) -> bool:
    """Is v an integer combination of the generator columns?"""
    h = hnf(gens)
    r = list(v)
    rows = len(r)
    pivots = []
    for c in h:
        row = next(i for i in range(rows) if c[i])
        pivots.append((row, c))
    for row, c in pivots:
        if r[row] % c[row]:
            return False
        q = r[row] // c[row]
        if q:
            r = [x - q * y for x, y in zip(r, c)]
    return not any(r)


def _floor_sqrt_fraction(x: Fraction) -> int:
    """floor(sqrt(x)) for x >= 0."""
    import math

    if x < 0:
        return -1
    return math.isqrt(x.numerator * x.denominator) // x.denominator


def enumerate_short_vectors(cols: Cols, bound_sq) -> Iterator[tuple[list[int], list[int]]]:
    """Yield (coeffs, vector) for nonzero lattice vectors with |v|^2 <= bound_sq.

    Fincke-Pohst over the exact GSO; one representative per +-pair (the
    first nonzero coefficient is positive).
    """
    n = len(cols)
    q, r = gram_schmidt(cols)
    bstar = [norm_sq(qi) for qi in q]
    bound_sq = Fraction(bound_sq)
    mu = r  # mu[i][j] = coefficient of q_i in b_j (i < j)
    x = [0] * n

    def rec(level: int, remaining: Fraction) -> Iterator[tuple[list[int], list[int]]]:
        if level < 0:
            if any(x):
                vec = [0] * len(cols[0])
                for xi, col in zip(x, cols):
                    if xi:
                        vec = [a + xi * b for a, b in zip(vec, col)]
                yield (list(x), vec)
            return
        c = -sum((mu[level][j] * x[j] for j in range(level + 1, n)), Fraction(0))
        s = _floor_sqrt_fraction(remaining / bstar[level])
        # integer window padded around the center; the exact norm test prunes
        lo = int(c) - s - 2
        hi = int(c) + s + 2
        for xi in range(lo, hi + 1):
            diff = Fraction(xi) - c
            used = diff * diff * bstar[level]
            if used > remaining:
                continue
            x[level] = xi
            yield from rec(level - 1, remaining - used)
        x[level] = 0

    for coeffs, vec in rec(n - 1, bound_sq):
        nz = next((v for v in coeffs if v), 0)
        if nz > 0:
            yield coeffs, vec


def shortest_vector(cols: Cols) -> tuple[list[int], int]:
    """Exact shortest nonzero vector by enumeration: (vector, norm^2)."""
    best_vec = min(cols, key=norm_sq)
    best = norm_sq(best_vec)
    for _, vec in enumerate_short_vectors(cols, best):
        ns = norm_sq(vec)
        if ns and ns < best:
            best, best_vec = ns, vec
    return list(best_vec), best
