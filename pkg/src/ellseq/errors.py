"""Exception hierarchy shared by all ellseq modules.

Every computational failure mode gets its own class so callers (and the
CLI exit-code logic) can distinguish "you violated an assumption" from
"the engine found an internal inconsistency".
"""


class EllseqError(Exception):
    """Base class for all ellseq errors."""


class AssumptionViolation(EllseqError):
    """Input violates a standing assumption of the pipeline (CLI exit 2)."""


# -- field tower ------------------------------------------------------------

class ZeroInput(EllseqError):
    pass


class NonUniformPlace(EllseqError):
    """A place class does not have uniform multiplicity in the argument."""


class IncoherentPlaces(EllseqError):
    """Two distinct place classes share a polynomial factor."""


class ParseError(EllseqError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


# -- curve model ------------------------------------------------------------

class SingularCurve(EllseqError):
    pass


class BadCharacteristic(AssumptionViolation):
    pass


class NotMinimal(EllseqError):
    pass


class InconsistentValuations(EllseqError):
    pass


class EverywhereGoodReduction(AssumptionViolation):
    pass


# -- group law / EDS --------------------------------------------------------

class PointNotOnCurve(EllseqError):
    pass


class ZeroSection(EllseqError):
    pass


class ParityViolation(EllseqError):
    """Pole order of x is odd, or ord(y) != (3/2) ord(x): minimal-model bug."""


class TorsionPoint(EllseqError):
    pass


# -- heights ----------------------------------------------------------------

class InvalidComponent(EllseqError):
    pass


class RangeViolation(EllseqError):
    pass


class NoSolution(EllseqError):
    """No component assignment satisfies the height identity (upstream bug)."""


# -- characteristic p -------------------------------------------------------

class NegativeHasseValuation(EllseqError):
    pass


class SumMismatch(EllseqError):
    pass


class RecursionViolation(EllseqError):
    pass


class ConstraintViolation(EllseqError):
    pass


class NotOrdinary(AssumptionViolation):
    """Hasse invariant vanishes; ordinary-curve theory does not apply."""


# -- arithmetic functions / bounds -------------------------------------------

class IdentityViolation(EllseqError):
    pass


class Overflow(EllseqError):
    pass


class BoundViolation(EllseqError):
    """A computed quantity violates a proved bound (must never fire)."""


class NoCrossover(EllseqError):
    pass


class WildWithoutFiniteField(EllseqError):
    pass
