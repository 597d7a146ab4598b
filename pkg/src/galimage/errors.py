"""Exception hierarchy.  Every error raised on purpose derives from GalImageError."""


class GalImageError(Exception):
    """Base class; certify() folds these into a PRECONDITION_FAILED verdict."""


class NotSquarefree(GalImageError):
    pass


class IndexObstruction(GalImageError):
    """ell divides disc(m): the (ell, beta - c) dictionary may miss primes."""


class DenominatorAtEll(GalImageError):
    pass


class NotCoprime(GalImageError):
    pass


class OrderCollision(GalImageError):
    """Character order does not divide ell - 1."""


class NoDescent(GalImageError):
    pass


class NotFound(GalImageError):
    pass


class ValidationFailed(GalImageError):
    def __init__(self, invariant, detail=""):
        self.invariant = invariant
        super().__init__(f"{invariant}: {detail}" if detail else invariant)


class NetworkUnavailable(GalImageError):
    pass


class InsufficientCoefficients(GalImageError):
    def __init__(self, label, needed, have):
        self.label, self.needed, self.have = label, needed, have
        super().__init__(f"{label}: coefficient a_{needed} requested but only a_n for n <= {have} stored")


class InsufficientPrecision(GalImageError):
    def __init__(self, required, have):
        self.required, self.have = required, have
        super().__init__(f"q-expansion precision {have} too small, need {required}")


class OddWeight(GalImageError):
    pass


class PreconditionFailed(GalImageError):
    pass


class CertificateParseError(GalImageError):
    pass
