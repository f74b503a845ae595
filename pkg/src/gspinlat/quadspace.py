"""Quadratic spaces over Q_p: invariants, isotropy, Witt splitting, twisting.

The bilinear form convention throughout is [x,y] = Q(x+y) - Q(x) - Q(y),
so the Gram matrix has [e_i,e_i] = 2 Q(e_i) on the diagonal.  Invariants
are (dimension, determinant square class, Hasse invariant); these classify
spaces completely, and the Witt index is recomputed by explicit hyperbolic
splitting because downstream lattice code needs the vectors.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import linalg
from .errors import DimensionTooSmall, PrecisionExhausted, SearchExhausted
from .padic import (
    DEFAULT_PREC,
    PadicElement,
    SquareClass,
    hilbert_classes,
    least_nonsquare,
    padic,
    square_class,
)


@dataclass(frozen=True)
class QuadInvariants:
    """Complete isometry invariants of a nondegenerate space over Q_p."""

    p: int
    n: int
    det: SquareClass
    hasse: int
    witt: int

    def same_class(self, other: "QuadInvariants") -> bool:
        return (self.p, self.n, self.det, self.hasse) == (other.p, other.n, other.det, other.hasse)

    @property
    def label(self) -> str:
        sign = "+" if self.hasse == 1 else "-"
        return f"Qp(p={self.p},n={self.n},det={self.det.label},hasse={sign}1,witt={self.witt})"


class QpQuadSpace:
    """A nondegenerate quadratic space given by its Gram matrix over Q_p."""

    def __init__(self, p: int, gram, prec: int = DEFAULT_PREC):
        self.p = p
        self.n = len(gram)
        self.prec = prec
        self.gram = [[padic(e, p, 1, prec) for e in row] for row in gram]
        # exact raw entries allow precision-doubling retries downstream
        exact = all(not isinstance(e, PadicElement) for row in gram for e in row)
        self._raw = [list(row) for row in gram] if exact else None
        self._invariants = None
        self._diag = None
        # symmetry is structural; nondegeneracy is checked on first pivot use
        for i in range(self.n):
            for j in range(i):
                if not (self.gram[i][j] == self.gram[j][i]):
                    raise ValueError("Gram matrix must be symmetric")

    def with_precision(self, prec: int) -> "QpQuadSpace":
        """Rebuild at a different working precision (exact raw data only)."""
        if self._raw is None:
            raise PrecisionExhausted("space was built from inexact scalars")
        return QpQuadSpace(self.p, self._raw, prec)

    @classmethod
    def from_elements(cls, p: int, gram) -> "QpQuadSpace":
        """Wrap an already-computed Gram matrix of PadicElements."""
        precs = [e.prec for row in gram for e in row if not e.is_zeroish]
        sub = cls.__new__(cls)
        sub.p = p
        sub.n = len(gram)
        sub.prec = min(precs) if precs else DEFAULT_PREC
        sub.gram = [list(row) for row in gram]
        sub._raw = None
        sub._invariants = None
        sub._diag = None
        return sub

    # -- evaluation ------------------------------------------------------

    def bilinear(self, x, y) -> PadicElement:
        return linalg.dot(x, self.gram, y)

    def qvalue(self, x) -> PadicElement:
        two_inv = padic(Fraction(1, 2), self.p, 1, self.prec)
        return self.bilinear(x, x) * two_inv

    def vector(self, coeffs):
        return [padic(c, self.p, 1, self.prec) for c in coeffs]

    def zero_vector(self):
        return [PadicElement.zero(self.p) for _ in range(self.n)]

    def basis_vector(self, i: int):
        v = self.zero_vector()
        v[i] = padic(1, self.p, 1, self.prec)
        return v

    def __repr__(self):
        return f"QpQuadSpace(p={self.p}, n={self.n})"


def standard_space(p: int, n: int, det_class: str = "plus",
                   prec: int = DEFAULT_PREC) -> QpQuadSpace:
    """The self-dual reference space: a hyperbolic pair x1, x2 plus an
    orthogonal unit-length tail, with the last tail entry adjusted so the
    determinant class is (-1)^(n/2) mod squares for ``plus`` (n even) and
    the opposite unit class for ``minus``.  For odd n, plus/minus select the
    two unit determinant classes directly."""
    if n < 3:
        raise DimensionTooSmall("reference space needs n >= 3")
    if det_class not in ("plus", "minus"):
        raise ValueError("det_class must be 'plus' or 'minus'")
    u = least_nonsquare(p)
    for c in (1, u):
        gram = _standard_gram(p, n, c)
        space = QpQuadSpace(p, gram, prec)
        det = invariants(space).det
        if n % 2 == 0:
            target = SquareClass.of_int((-1) ** (n // 2), p)
            matches = det == target
        else:
            matches = c == 1
        if matches == (det_class == "plus"):
            return space
    raise SearchExhausted("no tail choice produced the requested determinant class")


def _standard_gram(p: int, n: int, c: int):
    gram = [[0] * n for _ in range(n)]
    gram[0][1] = gram[1][0] = 1
    for i in range(2, n - 1):
        gram[i][i] = 2
    gram[n - 1][n - 1] = 2 * c
    return gram


# ---------------------------------------------------------------------------
# diagonalization and invariants
# ---------------------------------------------------------------------------


def diagonalize(space: QpQuadSpace):
    """Orthogonal basis: returns (square classes of Q-values, basis columns).

    The basis columns B satisfy B^T Gram B diagonal; pivots are chosen by
    minimal valuation so the answer is precision-stable.
    """
    if space._diag is not None:
        return space._diag
    n, p = space.n, space.p
    basis = [space.basis_vector(i) for i in range(n)]  # columns

    def b(i, j):
        return space.bilinear(basis[i], basis[j])

    for k in range(n):
        # locate the minimal-valuation entry of the residual block
        best = None
        for i in range(k, n):
            for j in range(i, n):
                e = b(i, j)
                if e.is_zeroish:
                    continue
                val = e.val
                if best is None or val < best[0] or (val == best[0] and i == j and best[1] != best[2]):
                    best = (val, i, j)
        if best is None:
            raise PrecisionExhausted("Gram matrix is singular at working precision")
        _, i, j = best
        if i != j:
            # p odd: e_i + e_j picks up the off-diagonal valuation
            basis[i] = [a + c for a, c in zip(basis[i], basis[j])]
            if b(i, i).is_zeroish or b(i, i).val > best[0]:
                raise PrecisionExhausted("unstable pivot in diagonalization")
        basis[k], basis[i] = basis[i], basis[k]
        d = b(k, k)
        dinv = d.inverse()
        for t in range(k + 1, n):
            coef = b(k, t) * dinv
            if coef.is_zeroish:
                continue
            basis[t] = [a - coef * c for a, c in zip(basis[t], basis[k])]
    two_inv = padic(Fraction(1, 2), p, 1, space.prec)
    qvals = [space.bilinear(col, col) * two_inv for col in basis]
    classes = tuple(square_class(q) for q in qvals)
    space._diag = (classes, basis)
    return space._diag


def _det_hasse(space: QpQuadSpace):
    """(determinant class, Hasse invariant) without the Witt index."""
    classes, _ = diagonalize(space)
    p = space.p
    det = SquareClass.one(p)
    # determinant of the Gram of [ , ] = 2^n * prod(a_i) mod squares
    two = SquareClass.of_int(2, p)
    for c in classes:
        det = det * c * two
    eps = 1
    for i in range(len(classes)):
        for j in range(i + 1, len(classes)):
            eps *= hilbert_classes(classes[i], classes[j])
    return det, eps


def invariants(space: QpQuadSpace) -> QuadInvariants:
    if space._invariants is not None:
        return space._invariants
    try:
        det, eps = _det_hasse(space)
        witt = len(witt_decompose(space)[0])
    except PrecisionExhausted:
        if space._raw is None or space.prec >= 16 * DEFAULT_PREC:
            raise
        space._invariants = invariants(space.with_precision(2 * space.prec))
        return space._invariants
    space._invariants = QuadInvariants(space.p, space.n, det, eps, witt)
    return space._invariants


def isometric(a: QpQuadSpace, b: QpQuadSpace) -> bool:
    """Spaces over Q_p are isometric iff (n, det, hasse) agree."""
    return invariants(a).same_class(invariants(b))


# ---------------------------------------------------------------------------
# isotropy
# ---------------------------------------------------------------------------


@lru_cache(maxsize=None)
def _anisotropic_ternary_invariants(p: int):
    """(det class, hasse) of the four anisotropic ternary spaces c*Nrd0,
    where Nrd0 is the trace-zero quaternion norm form <-u, -p, up>."""
    u = least_nonsquare(p)
    out = set()
    for c in (1, u, p, u * p):
        diag = [-u * c, -p * c, u * p * c]
        classes = [SquareClass.of_int(x, p) for x in diag]
        det = SquareClass.one(p)
        two = SquareClass.of_int(2, p)
        for cl in classes:
            det = det * cl * two
        eps = 1
        for i in range(3):
            for j in range(i + 1, 3):
                eps *= hilbert_classes(classes[i], classes[j])
        out.add((det, eps))
    assert len(out) == 4
    return frozenset(out)


def is_isotropic(space: QpQuadSpace) -> bool:
    """Isotropy decided from invariants (dim <= 4 tables; always true above)."""
    n, p = space.n, space.p
    if n >= 5:
        return True
    if n == 1:
        return False
    det, hasse = _det_hasse(space)
    if n == 2:
        return det == SquareClass.of_int(-1, p)
    if n == 3:
        return (det, hasse) not in _anisotropic_ternary_invariants(p)
    # n == 4: the unique anisotropic space is the quaternion norm form
    minus_one = SquareClass.of_int(-1, p)
    return not (det.is_square and hasse == -hilbert_classes(minus_one, minus_one))


def find_isotropic_vector(space: QpQuadSpace):
    """A primitive vector with Q(v) = 0 at working precision, or None."""
    try:
        for v in find_isotropic_vectors(space):
            return v
        return None
    except (SearchExhausted, PrecisionExhausted):
        if space._raw is None or space.prec >= 16 * DEFAULT_PREC:
            raise
        return find_isotropic_vector(space.with_precision(2 * space.prec))


def find_isotropic_vectors(space: QpQuadSpace):
    """Generator of isotropic vectors (deterministic order, possibly with
    repeats up to scaling); empty iff the space is anisotropic."""
    if not is_isotropic(space):
        return
    p = space.p
    classes, basis = diagonalize(space)
    two_inv = padic(Fraction(1, 2), p, 1, space.prec)
    qvals = [space.bilinear(col, col) * two_inv for col in basis]
    # normalize each direction so its Q-valuation is 0 or 1
    cols, units, parity = [], [], []
    for col, q in zip(basis, qvals):
        v = q.val
        shift = -(v // 2)
        scale = padic(Fraction(1, p**-shift) if shift < 0 else p**shift, p, 1, space.prec)
        cols.append([scale * e for e in col])
        units.append(q * scale * scale)
        parity.append(v % 2)
    found = False
    for level in (0, 1):
        idx = [i for i in range(space.n) if parity[i] == level]
        if len(idx) < 2:
            continue
        us = [units[i] for i in idx]
        scale_inv = padic(p, p, 1, space.prec).inverse() if level else None
        for sol in _unit_diag_zeros_mod_p([u if level == 0 else u * scale_inv for u in us], p):
            vec = _hensel_diag([u if level == 0 else u * scale_inv for u in us], sol, p, space.prec)
            full = space.zero_vector()
            for t, i in enumerate(idx):
                full = [a + vec[t] * c for a, c in zip(full, cols[i])]
            full = _primitive(full, p)
            full = _polish_isotropic(space, full)
            q = space.qvalue(full)
            if q.is_zeroish and q.zero_bound() >= space.prec - 6:
                found = True
                yield full
    if not found:
        raise SearchExhausted("isotropic space but smooth mod-p search failed")


def _polish_isotropic(space, v):
    """Newton-correct an approximate isotropic vector in the original
    coordinates, recovering precision lost in the diagonalized chart."""
    for _ in range(12):
        q = space.qvalue(v)
        if q.is_zeroish:
            break
        # steepest usable direction: minimal valuation of [v, e_i]
        best, grad = None, None
        for i in range(space.n):
            g = space.bilinear(v, space.basis_vector(i))
            if g.is_zeroish:
                continue
            if best is None or g.val < grad.val:
                best, grad = i, g
        if best is None:
            break
        t = q * grad.inverse()
        cand = list(v)
        cand[best] = cand[best] - t
        qc = space.qvalue(cand)
        if qc.is_zeroish or qc.val > q.val:
            v = cand
        else:
            break  # step does not contract; keep the better iterate
    return _primitive(v, space.p)


def _unit_diag_zeros_mod_p(units, p):
    """Primitive zeros mod p of a unit diagonal form, lexicographically.
    Every nontrivial zero is smooth since the gradient 2 u_i v_i has a unit
    coordinate."""
    k = len(units)
    us = [u.unit[0] % p for u in units]
    for lead in range(k):
        # leading coordinate normalized to 1, earlier coordinates zero
        for rest in itertools.product(range(p), repeat=k - lead - 1):
            v = (0,) * lead + (1,) + rest
            if sum(us[i] * v[i] * v[i] for i in range(k)) % p == 0:
                yield v


def _hensel_diag(units, sol, p, prec):
    """Newton-lift a smooth zero of sum(u_i x_i^2) to the working precision."""
    xs = [padic(s, p, 1, prec) for s in sol]
    i0 = next(i for i, s in enumerate(sol) if s % p != 0)
    for _ in range(prec + 2):
        q = None
        for u, x in zip(units, xs):
            term = u * x * x
            q = term if q is None else q + term
        if q.is_zeroish:
            if q.zero_bound() >= prec - 2:
                break
            # refresh: nothing more to gain at this precision
            break
        grad = padic(2, p, 1, prec) * units[i0] * xs[i0]
        xs[i0] = xs[i0] - q * grad.inverse()
    return xs


def _primitive(vec, p):
    vals = [e.val for e in vec if not e.is_zeroish]
    if not vals:
        raise PrecisionExhausted("cannot normalize a zero vector")
    m = min(vals)
    scale = padic(Fraction(1, p**m) if m > 0 else p**-m, p)
    return [scale * e for e in vec]


# ---------------------------------------------------------------------------
# Witt decomposition
# ---------------------------------------------------------------------------


def witt_decompose(space: QpQuadSpace):
    """Split off hyperbolic pairs until the rest is anisotropic.

    Returns (pairs, kernel_space, kernel_basis): pairs is a list of (e, f)
    with Q(e) = Q(f) = 0 and [e, f] = 1; kernel_basis gives the anisotropic
    complement inside the original coordinates.  Precision exhaustion on
    exact inputs triggers a silent retry at doubled working precision.
    """
    try:
        return _witt_decompose(space)
    except PrecisionExhausted:
        if space._raw is None or space.prec >= 16 * DEFAULT_PREC:
            raise
        return witt_decompose(space.with_precision(2 * space.prec))


def _witt_decompose(space: QpQuadSpace):
    p = space.p
    pairs = []
    basis = [space.basis_vector(i) for i in range(space.n)]

    while basis:
        sub = _restricted_space(space, basis)
        v = find_isotropic_vector(sub)
        if v is None:
            break
        e = _combine(basis, v)
        f = _complete_hyperbolic(space, basis, e)
        pairs.append((e, f))
        basis = _orthogonal_complement(space, basis, e, f)
    kernel = _restricted_space(space, basis) if basis else None
    return pairs, kernel, basis


def _restricted_space(space, basis):
    if not basis:
        return None
    gram = [[space.bilinear(x, y) for y in basis] for x in basis]
    return QpQuadSpace.from_elements(space.p, gram)


def _combine(basis, coeffs):
    out = [coeffs[0] * e for e in basis[0]]
    for c, col in zip(coeffs[1:], basis[1:]):
        out = [a + c * e for a, e in zip(out, col)]
    return out


def _complete_hyperbolic(space, basis, e):
    """Given isotropic e in the span of basis, produce f in the same span
    with [e,f] = 1 and Q(f) = 0."""
    w = None
    best = None
    for col in basis:
        val = space.bilinear(e, col)
        if val.is_zeroish:
            continue
        if best is None or val.val < best:
            w, best = col, val.val
    if w is None:
        raise SearchExhausted("isotropic vector pairs to nothing (degenerate?)")
    f0 = [space.bilinear(e, w).inverse() * c for c in w]
    qf = space.qvalue(f0)
    if qf.is_zeroish:
        return f0
    return [a - qf * b for a, b in zip(f0, e)]


def _orthogonal_complement(space, basis, e, f):
    """Project the basis away from the hyperbolic plane (e, f) and select a
    maximal independent subset."""
    projected = []
    for u in basis:
        bue = space.bilinear(u, e)
        buf = space.bilinear(u, f)
        w = [a - buf * b - bue * c for a, b, c in zip(u, e, f)]
        projected.append(w)
    # rank selection by valuation pivoting on coordinates
    chosen = []
    rows = []
    for w in projected:
        cand = rows + [list(w)]
        if _rank(cand, space.p) == len(cand):
            rows = cand
            chosen.append(w)
    return chosen


def _rank(rows, p):
    m = [list(r) for r in rows]
    nrows, ncols = len(m), len(m[0])
    r = 0
    for col in range(ncols):
        piv = None
        best = None
        for i in range(r, nrows):
            e = m[i][col]
            if e.is_zeroish:
                continue
            if best is None or e.val < best:
                piv, best = i, e.val
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        d = m[r][col].inverse()
        for i in range(r + 1, nrows):
            c = m[i][col]
            if c.is_exact_zero:
                continue
            c = c * d
            m[i] = [m[i][j] - c * m[r][j] for j in range(ncols)]
        r += 1
        if r == nrows:
            break
    return r


# ---------------------------------------------------------------------------
# the Hasse flip
# ---------------------------------------------------------------------------


def flip_hasse(space: QpQuadSpace) -> QpQuadSpace:
    """The space with the same (n, det) and opposite Hasse invariant.

    One ternary diagonal block is swapped for its twin with equal
    determinant class and flipped epsilon; for n <= 2 no such twin exists.
    """
    if space.n <= 2:
        raise DimensionTooSmall("Hasse flip needs dimension >= 3")
    p = space.p
    classes, _ = diagonalize(space)
    block = classes[:3]
    det_block = block[0] * block[1] * block[2]
    eps_block = (hilbert_classes(block[0], block[1])
                 * hilbert_classes(block[0], block[2])
                 * hilbert_classes(block[1], block[2]))
    u = least_nonsquare(p)
    reps = [1, u, p, u * p]
    for triple in itertools.product(reps, repeat=3):
        cls = [SquareClass.of_int(t, p) for t in triple]
        if cls[0] * cls[1] * cls[2] != det_block:
            continue
        eps = (hilbert_classes(cls[0], cls[1])
               * hilbert_classes(cls[0], cls[2])
               * hilbert_classes(cls[1], cls[2]))
        if eps == -eps_block:
            diag = list(triple) + [c.representative() for c in classes[3:]]
            gram = [[0] * space.n for _ in range(space.n)]
            for i, d in enumerate(diag):
                gram[i][i] = 2 * d
            out = QpQuadSpace(p, gram, space.prec)
            got = invariants(out)
            want = invariants(space)
            assert got.n == want.n and got.det == want.det and got.hasse == -want.hasse
            return out
    raise SearchExhausted("no ternary twin found (impossible for p odd)")
