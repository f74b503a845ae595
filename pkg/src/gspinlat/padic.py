"""Exact arithmetic in Q_p and its unramified quadratic extension.

Elements carry an explicit precision: a nonzero element is known modulo
p^(val + prec), i.e. ``prec`` significant base-p digits of the unit part.
Zeros come in two flavours:

* the exact zero (``val is None``), produced only by explicit construction
  and by multiplication with an exact zero;
* a *bounded* zero, the outcome of full digit cancellation: all we know is
  that the value is divisible by p^bound.  Operations that need a leading
  digit raise :class:`PrecisionExhausted` on bounded zeros.

The residue degree f is 1 (Q_p itself) or 2 (Q_{p^2}); the f = 1 case
embeds into f = 2 compatibly with every operation.  Only odd primes are
supported.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import MixedField, PrecisionExhausted

DEFAULT_PREC = 24

#: Digits an invariant decision must stay clear of, per the stability policy:
#: discrete answers may not depend on the last STABILITY_DIGITS known digits.
STABILITY_DIGITS = 4


def _valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of 0")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


_POW_CACHE: dict = {}


def _ppow(p: int, k: int) -> int:
    """Cached p**k (k >= 0); the hot path of every arithmetic operation."""
    key = (p, k)
    v = _POW_CACHE.get(key)
    if v is None:
        v = p**k
        _POW_CACHE[key] = v
    return v


@lru_cache(maxsize=None)
def quad_ext_poly(p: int) -> tuple[int, int]:
    """Coefficients (b, c) of the lexicographically least monic irreducible
    x^2 + b x + c over F_p.  Defines Z_{p^2} = Z_p[w]/(w^2 + b w + c)."""
    squares = {(x * x) % p for x in range(p)}
    for b in range(p):
        for c in range(p):
            disc = (b * b - 4 * c) % p
            if disc not in squares:
                return b, c
    raise ValueError(f"no irreducible quadratic mod {p}")  # unreachable for p prime


class PadicElement:
    """An element of Q_{p^f} at finite precision.

    ``unit`` is a tuple of f nonnegative ints, the coordinates of the unit
    part in the basis (1, w), each reduced mod p^prec; at least one
    coordinate is a p-adic unit.  The value represented is
    p^val * (unit[0] + unit[1] w).
    """

    __slots__ = ("p", "f", "val", "unit", "prec")

    def __init__(self, p: int, f: int, val, unit: tuple, prec: int):
        self.p = p
        self.f = f
        self.val = val
        self.unit = unit
        self.prec = prec

    # -- constructors -------------------------------------------------

    @staticmethod
    def zero(p: int, f: int = 1) -> "PadicElement":
        return PadicElement(p, f, None, (0,) * f, 0)

    @staticmethod
    def zero_mod(p: int, bound: int, f: int = 1) -> "PadicElement":
        """The bounded zero O(p^bound): divisible by p^bound, else unknown."""
        return PadicElement(p, f, bound, (0,) * f, 0)

    @staticmethod
    def from_int(n: int, p: int, f: int = 1, prec: int = DEFAULT_PREC) -> "PadicElement":
        if n == 0:
            return PadicElement.zero(p, f)
        v = _valuation(n, p)
        u = (n // _ppow(p, v)) % _ppow(p, prec)
        return PadicElement(p, f, v, (u,) + (0,) * (f - 1), prec)

    @staticmethod
    def from_fraction(x, p: int, f: int = 1, prec: int = DEFAULT_PREC) -> "PadicElement":
        x = Fraction(x)
        if x == 0:
            return PadicElement.zero(p, f)
        num, den = x.numerator, x.denominator
        v = _valuation(num, p) - _valuation(den, p)
        num //= p ** max(_valuation(num, p), 0)
        den //= p ** max(_valuation(den, p), 0)
        u = (num * pow(den, -1, _ppow(p, prec))) % _ppow(p, prec)
        return PadicElement(p, f, v, (u,) + (0,) * (f - 1), prec)

    @staticmethod
    def from_unit(p: int, f: int, val: int, unit: tuple, prec: int) -> "PadicElement":
        return _normalize(p, f, val, unit, val + prec)

    # -- basic predicates ----------------------------------------------

    @property
    def is_exact_zero(self) -> bool:
        return self.val is None

    @property
    def is_bounded_zero(self) -> bool:
        return self.val is not None and self.prec == 0

    @property
    def is_zeroish(self) -> bool:
        return self.prec == 0 or self.val is None

    def valuation(self) -> int:
        """Exact valuation of a nonzero element; raises on zeros."""
        if self.is_zeroish:
            raise PrecisionExhausted("valuation of a (possible) zero")
        return self.val

    def zero_bound(self) -> int:
        """For zeros: the proven divisibility exponent (p^bound | value)."""
        if self.is_exact_zero:
            return 1 << 62
        if self.is_bounded_zero:
            return self.val
        raise ValueError("not a zero")

    def is_zero_mod(self, k: int) -> bool:
        """True if the element is provably divisible by p^k."""
        if self.is_zeroish:
            return self.zero_bound() >= k
        if self.val >= k:
            return True
        if self.val + self.prec < k:
            raise PrecisionExhausted(f"cannot decide divisibility by p^{k}")
        return False

    def digits(self, k: int) -> tuple:
        """First k digit vectors of the unit part (little-endian)."""
        if self.is_zeroish:
            raise PrecisionExhausted("digits of a (possible) zero")
        if k > self.prec:
            raise PrecisionExhausted(f"need {k} digits, have {self.prec}")
        out = []
        cs = list(self.unit)
        for _ in range(k):
            out.append(tuple(c % self.p for c in cs))
            cs = [c // self.p for c in cs]
        return tuple(out)

    def unit_mod(self, k: int) -> tuple:
        if self.is_zeroish:
            raise PrecisionExhausted("unit part of a (possible) zero")
        if k > self.prec:
            raise PrecisionExhausted(f"need {k} digits, have {self.prec}")
        return tuple(c % _ppow(self.p, k) for c in self.unit)

    def key(self, k: int) -> tuple:
        """Hashable canonical key: value modulo p^(val+k), or zero marker."""
        if self.is_zeroish:
            if self.zero_bound() < k:
                raise PrecisionExhausted("zero bound below key precision")
            return ("0",)
        return (self.val, self.unit_mod(k))

    # -- arithmetic -----------------------------------------------------

    def _check(self, other: "PadicElement") -> None:
        if self.p != other.p or self.f != other.f:
            raise MixedField(f"({self.p},{self.f}) vs ({other.p},{other.f})")

    def __add__(self, other: "PadicElement") -> "PadicElement":
        self._check(other)
        p, f = self.p, self.f
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        # absolute precision of each operand: value known mod p^abs
        abs_a = self.val + self.prec
        abs_b = other.val + other.prec
        abs_prec = min(abs_a, abs_b)
        v = min(self.val, other.val)
        if abs_prec <= v:
            return PadicElement.zero_mod(p, abs_prec, f)
        m = _ppow(p, abs_prec - v)
        sa = _ppow(p, self.val - v)
        sb = _ppow(p, other.val - v)
        coeffs = tuple(
            ((self.unit[i] * sa if not self.is_bounded_zero else 0)
             + (other.unit[i] * sb if not other.is_bounded_zero else 0)) % m
            for i in range(f)
        )
        return _normalize(p, f, v, coeffs, abs_prec)

    def __neg__(self) -> "PadicElement":
        if self.is_zeroish:
            return self
        m = _ppow(self.p, self.prec)
        return PadicElement(self.p, self.f, self.val,
                            tuple((-c) % m for c in self.unit), self.prec)

    def __sub__(self, other: "PadicElement") -> "PadicElement":
        return self + (-other)

    def __mul__(self, other: "PadicElement") -> "PadicElement":
        self._check(other)
        p, f = self.p, self.f
        if self.is_exact_zero or other.is_exact_zero:
            return PadicElement.zero(p, f)
        if self.is_bounded_zero or other.is_bounded_zero:
            bound_a = self.val if self.is_bounded_zero else self.val
            bound_b = other.val if other.is_bounded_zero else other.val
            return PadicElement.zero_mod(p, bound_a + bound_b, f)
        prec = min(self.prec, other.prec)
        m = _ppow(p, prec)
        if f == 1:
            u = (self.unit[0] * other.unit[0]) % m
            unit = (u,)
        else:
            b, c = quad_ext_poly(p)
            a0, a1 = self.unit
            b0, b1 = other.unit
            # (a0 + a1 w)(b0 + b1 w) with w^2 = -c - b w
            w2 = a1 * b1
            unit = ((a0 * b0 - c * w2) % m, (a0 * b1 + a1 * b0 - b * w2) % m)
        return PadicElement(p, f, self.val + other.val, unit, prec)

    def inverse(self) -> "PadicElement":
        if self.is_zeroish:
            raise PrecisionExhausted("inverse of a (possible) zero")
        p, f, prec = self.p, self.f, self.prec
        m = _ppow(p, prec)
        if f == 1:
            inv = pow(self.unit[0], -1, m)
            return PadicElement(p, f, -self.val, (inv,), prec)
        conj = self.frobenius()
        norm = self * conj
        assert norm.unit[1] == 0, "norm must land in Q_p"
        ninv = pow(norm.unit[0], -1, _ppow(p, norm.prec))
        return conj * PadicElement(p, f, -2 * self.val, (ninv, 0), norm.prec)

    def __truediv__(self, other: "PadicElement") -> "PadicElement":
        return self * other.inverse()

    def frobenius(self) -> "PadicElement":
        """The nontrivial automorphism of Q_{p^2} over Q_p (identity digits
        on the residue field become p-th powers)."""
        if self.f != 2:
            raise MixedField("frobenius needs residue degree 2")
        if self.is_zeroish:
            return self
        b, _ = quad_ext_poly(self.p)
        m = _ppow(self.p, self.prec)
        c0, c1 = self.unit
        # sigma(w) = -b - w, the other root of the defining quadratic
        return PadicElement(self.p, 2, self.val,
                            ((c0 - b * c1) % m, (-c1) % m), self.prec)

    def lift_quadratic(self) -> "PadicElement":
        """Embed an f = 1 element into Q_{p^2}."""
        if self.f == 2:
            return self
        return PadicElement(self.p, 2, self.val, (self.unit[0], 0), self.prec)

    def restrict_rational(self) -> "PadicElement":
        """Project an f = 2 element known to lie in Q_p back to f = 1."""
        if self.f == 1:
            return self
        if self.is_zeroish:
            return PadicElement(self.p, 1, self.val, (0,), self.prec)
        if self.unit[1] % _ppow(self.p, self.prec) != 0:
            raise ValueError("element has a nonzero w-component")
        return PadicElement(self.p, 1, self.val, (self.unit[0],), self.prec)

    # -- presentation -----------------------------------------------------

    def encode(self) -> str:
        """Textual form ``digit,digit,...@v`` (unit digits little-endian)."""
        if self.is_exact_zero:
            return "0"
        if self.is_bounded_zero:
            return f"O@{self.val}"
        digs = self.digits(min(self.prec, DEFAULT_PREC))
        if self.f == 1:
            body = ",".join(str(d[0]) for d in digs)
        else:
            body = ",".join(f"{d[0]}:{d[1]}" for d in digs)
        return f"{body}@{self.val}"

    @staticmethod
    def decode(text: str, p: int, f: int = 1, prec: int = DEFAULT_PREC) -> "PadicElement":
        text = text.strip()
        if text == "0":
            return PadicElement.zero(p, f)
        if "/" in text or "@" not in text:
            return PadicElement.from_fraction(Fraction(text), p, f, prec)
        body, v = text.rsplit("@", 1)
        digs = body.split(",")
        coeffs = [0] * f
        for k, d in enumerate(digs):
            parts = d.split(":") if f == 2 else [d]
            for i, s in enumerate(parts):
                coeffs[i] += int(s) * p**k
        return PadicElement.from_unit(p, f, int(v), tuple(coeffs), len(digs))

    def __repr__(self) -> str:
        return f"PadicElement({self.p}^{self.f}, {self.encode()}, prec={self.prec})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, PadicElement):
            return NotImplemented
        self._check(other)
        d = self - other
        if d.is_exact_zero:
            return True
        if d.is_bounded_zero:
            return True  # indistinguishable at available precision
        return False

    def __hash__(self):  # pragma: no cover - elements are not meant as dict keys
        raise TypeError("PadicElement is not hashable; use .key(k)")


def _normalize(p: int, f: int, val: int, coeffs: tuple, abs_prec: int) -> PadicElement:
    """Strip the common p-power from the coordinates and retag precision."""
    coeffs = tuple(c % _ppow(p, abs_prec - val) for c in coeffs)
    if all(c == 0 for c in coeffs):
        return PadicElement.zero_mod(p, abs_prec, f)
    shift = min(_valuation(c, p) for c in coeffs if c)
    v = val + shift
    m = _ppow(p, abs_prec - v)
    ps = _ppow(p, shift)
    unit = tuple((c // ps) % m for c in coeffs)
    return PadicElement(p, f, v, unit, abs_prec - v)


def padic(x, p: int, f: int = 1, prec: int = DEFAULT_PREC) -> PadicElement:
    """Convenience constructor from int, Fraction or textual encoding."""
    if isinstance(x, PadicElement):
        if x.p != p or x.f != f:
            raise MixedField("wrong field for existing element")
        return x
    if isinstance(x, str):
        return PadicElement.decode(x, p, f, prec)
    if isinstance(x, int):
        return PadicElement.from_int(x, p, f, prec)
    return PadicElement.from_fraction(x, p, f, prec)


def teichmueller_generator(p: int, prec: int = DEFAULT_PREC) -> PadicElement:
    """The class of w itself: a generator of the residue extension."""
    return PadicElement(p, 2, 0, (0, 1), prec)


# ---------------------------------------------------------------------------
# square classes and the Hilbert symbol (odd p)
# ---------------------------------------------------------------------------


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a|p) for p odd, a not divisible by p."""
    s = pow(a % p, (p - 1) // 2, p)
    return -1 if s == p - 1 else 1


@dataclass(frozen=True)
class SquareClass:
    """One of the four classes of Q_p^x modulo squares: 1, u, p, up."""

    p: int
    odd_val: bool
    nonsquare_unit: bool

    def __mul__(self, other: "SquareClass") -> "SquareClass":
        if self.p != other.p:
            raise MixedField("square classes over different primes")
        return SquareClass(self.p, self.odd_val ^ other.odd_val,
                           self.nonsquare_unit ^ other.nonsquare_unit)

    @property
    def label(self) -> str:
        return {(False, False): "1", (False, True): "u",
                (True, False): "p", (True, True): "up"}[(self.odd_val, self.nonsquare_unit)]

    @property
    def is_square(self) -> bool:
        return not self.odd_val and not self.nonsquare_unit

    def representative(self) -> int:
        """The canonical integer representative 1, u, p or up, where u is the
        least nonsquare unit."""
        u = least_nonsquare(self.p)
        r = 1
        if self.nonsquare_unit:
            r *= u
        if self.odd_val:
            r *= self.p
        return r

    @staticmethod
    def one(p: int) -> "SquareClass":
        return SquareClass(p, False, False)

    @staticmethod
    def of_int(n: int, p: int) -> "SquareClass":
        if n == 0:
            raise ValueError("square class of 0")
        v = _valuation(n, p)
        return SquareClass(p, v % 2 == 1, legendre(n // p**v, p) == -1)

    @staticmethod
    def of_fraction(x, p: int) -> "SquareClass":
        x = Fraction(x)
        return SquareClass.of_int(x.numerator, p) * SquareClass.of_int(x.denominator, p)


@lru_cache(maxsize=None)
def least_nonsquare(p: int) -> int:
    for u in range(2, p):
        if legendre(u, p) == -1:
            return u
    raise ValueError(f"{p} is not an odd prime")


def square_class(a: PadicElement) -> SquareClass:
    """Class of a nonzero element of Q_p modulo squares.

    The decision reads only the valuation parity and the leading unit digit;
    the precondition prec >= 2 (with the stability margin folded in by the
    arithmetic layer) certifies the digit is not an artifact.
    """
    if a.f != 1:
        raise MixedField("square classes are defined over Q_p (f = 1)")
    if a.is_zeroish:
        raise PrecisionExhausted("square class of a (possible) zero")
    if a.prec < 2:
        raise PrecisionExhausted("square class needs at least 2 significant digits")
    lead = a.unit[0] % a.p
    return SquareClass(a.p, a.val % 2 == 1, legendre(lead, a.p) == -1)


def hilbert_symbol(a: PadicElement, b: PadicElement) -> int:
    """Hilbert symbol (a, b)_p for odd p, via the Legendre closed form."""
    if a.p != b.p:
        raise MixedField("mixed primes")
    return hilbert_classes(square_class(a), square_class(b))


def hilbert_classes(ca: SquareClass, cb: SquareClass) -> int:
    """(a,b)_p from square classes: with a = p^alpha u, b = p^beta w,
    (a,b) = (-1|p)^(alpha beta) (u|p)^beta (w|p)^alpha."""
    if ca.p != cb.p:
        raise MixedField("mixed primes")
    p = ca.p
    alpha, beta = int(ca.odd_val), int(cb.odd_val)
    lu = -1 if ca.nonsquare_unit else 1
    lw = -1 if cb.nonsquare_unit else 1
    sign = legendre(-1, p) ** (alpha * beta) * lu**beta * lw**alpha
    return sign
