"""Dense exact linear algebra over Q_p / Q_{p^2} scalars.

Matrices are lists of row lists of :class:`PadicElement`.  Pivoting always
selects the entry of minimal valuation, which keeps precision loss equal to
the theoretical minimum (the valuation of the determinant, for inverses).
"""

from __future__ import annotations

from .errors import PrecisionExhausted
from .padic import PadicElement


def mat_copy(a):
    return [list(row) for row in a]


def identity(p, n, f=1, prec=None):
    from .padic import DEFAULT_PREC
    prec = prec or DEFAULT_PREC
    one = PadicElement.from_int(1, p, f, prec)
    zero = PadicElement.zero(p, f)
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def transpose(a):
    return [list(col) for col in zip(*a)]


def mat_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = a[i][0] * b[0][j]
            for t in range(1, k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_vec(a, v):
    out = []
    for row in a:
        acc = row[0] * v[0]
        for t in range(1, len(v)):
            acc = acc + row[t] * v[t]
        out.append(acc)
    return out


def dot(x, g, y):
    """x^T g y for a symmetric Gram matrix g."""
    acc = None
    for i, xi in enumerate(x):
        if xi.is_exact_zero:
            continue
        for j, yj in enumerate(y):
            if yj.is_exact_zero:
                continue
            term = xi * g[i][j] * yj
            acc = term if acc is None else acc + term
    if acc is None:
        acc = PadicElement.zero(g[0][0].p, g[0][0].f)
    return acc


def _pivot(rows, r0, col):
    """Row index >= r0 with minimal valuation in the column, or None."""
    best, bestval = None, None
    for i in range(r0, len(rows)):
        e = rows[i][col]
        if e.is_zeroish:
            continue
        if bestval is None or e.val < bestval:
            best, bestval = i, e.val
    return best


def mat_inverse(a):
    """Inverse of a square matrix; PrecisionExhausted if it looks singular."""
    n = len(a)
    m = mat_copy(a)
    p, f = m[0][0].p, m[0][0].f
    inv = identity(p, n, f)
    for col in range(n):
        piv = _pivot(m, col, col)
        if piv is None:
            raise PrecisionExhausted("singular matrix (no usable pivot)")
        m[col], m[piv] = m[piv], m[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        d = m[col][col].inverse()
        m[col] = [e * d for e in m[col]]
        inv[col] = [e * d for e in inv[col]]
        for i in range(n):
            if i == col:
                continue
            c = m[i][col]
            if c.is_zeroish and c.is_exact_zero:
                continue
            m[i] = [m[i][j] - c * m[col][j] for j in range(n)]
            inv[i] = [inv[i][j] - c * inv[col][j] for j in range(n)]
    return inv


def solve(a, b):
    """Solve a x = b for square nonsingular a."""
    return mat_vec(mat_inverse(a), b)


def right_kernel(a):
    """Basis of the right kernel of the matrix (list of vectors)."""
    rows = mat_copy(a)
    nrows, ncols = len(rows), len(rows[0])
    p, f = rows[0][0].p, rows[0][0].f
    zero = PadicElement.zero(p, f)
    one = PadicElement.from_int(1, p, f)
    pivots = {}
    r = 0
    for col in range(ncols):
        piv = _pivot(rows, r, col)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        d = rows[r][col].inverse()
        rows[r] = [e * d for e in rows[r]]
        for i in range(nrows):
            if i == r:
                continue
            c = rows[i][col]
            if c.is_exact_zero:
                continue
            rows[i] = [rows[i][j] - c * rows[r][j] for j in range(ncols)]
        pivots[col] = r
        r += 1
        if r == nrows:
            break
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fc in free:
        v = [zero] * ncols
        v[fc] = one
        for col, prow in pivots.items():
            v[col] = -rows[prow][fc]
        basis.append(v)
    return basis


def valuation_of_det(a):
    """Valuation of det(a) by triangularization (a nonsingular)."""
    m = mat_copy(a)
    n = len(m)
    total = 0
    for col in range(n):
        piv = _pivot(m, col, col)
        if piv is None:
            raise PrecisionExhausted("singular matrix in det valuation")
        m[col], m[piv] = m[piv], m[col]
        total += m[col][col].val
        d = m[col][col].inverse()
        for i in range(col + 1, n):
            c = m[i][col]
            if c.is_exact_zero:
                continue
            c = c * d
            m[i] = [m[i][j] - c * m[col][j] for j in range(n)]
    return total
