"""Exception taxonomy shared by all modules."""


class GspinlatError(Exception):
    """Base class for all package errors."""


class PrecisionExhausted(GspinlatError):
    """A result would have fewer significant digits than the operation needs."""


class MixedField(GspinlatError):
    """Operands live over different primes or residue degrees."""


class SearchExhausted(GspinlatError):
    """An isotropic-vector search failed at the configured depth (signals a bug)."""


class DimensionTooSmall(GspinlatError):
    """The requested construction needs a higher-dimensional space."""


class TooLarge(GspinlatError):
    """An enumeration would exceed the configured budget."""


class NotMaximal(GspinlatError):
    """An operation required a maximal lattice but got a non-maximal one."""


class NotContained(GspinlatError):
    """Expected lattice containment does not hold."""


class Degenerate(GspinlatError):
    """A quadratic space or reduction that must be nondegenerate is singular."""


class ChainOverflow(GspinlatError):
    """A Frobenius chain grew past its provable bound (signals a bug)."""


class SlopeNotZero(GspinlatError):
    """A fixed-point computation found the wrong kernel dimension."""


class NotIsoclinic(GspinlatError):
    """Elementary divisors of an operator power are not all equal."""


class BadDelta(GspinlatError):
    """The symplectic twist element does not satisfy delta* = -delta."""


class GSpinReject(GspinlatError):
    """An element failed a spinor-similitude membership condition.

    The offending condition is named in ``condition``.
    """

    def __init__(self, condition: str):
        super().__init__(condition)
        self.condition = condition


class VertexReject(GspinlatError):
    """A lattice failed one of the two vertex-lattice inclusions."""

    def __init__(self, condition: str):
        super().__init__(condition)
        self.condition = condition
