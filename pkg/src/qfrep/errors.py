"""Exception hierarchy shared by every module of the package."""


class QFRepError(Exception):
    """Base class for all package errors."""


class MalformedForm(QFRepError, ValueError):
    """Input could not be parsed as a square matrix of exact integers."""


class NotSymmetric(QFRepError, ValueError):
    pass


class NotPositiveDefinite(QFRepError, ValueError):
    def __init__(self, index, minor):
        self.index = index
        self.minor = minor
        super().__init__(f"leading minor {index} is {minor} (must be > 0)")


class UnsupportedDimension(QFRepError, ValueError):
    pass


class NotReduced(QFRepError, ValueError):
    pass


class DegenerateGamma(QFRepError, ValueError):
    """B_11 = 1 < B_ii for some i, so the exponent profile is unbounded."""


class DimensionRegime(QFRepError, ValueError):
    pass


class NotPrime(QFRepError, ValueError):
    pass


class CapExceeded(QFRepError, RuntimeError):
    pass


class OracleTooLarge(CapExceeded):
    pass


class StabilizationNotReached(QFRepError, RuntimeError):
    def __init__(self, t_cap, p=None):
        self.t_cap = t_cap
        self.p = p
        where = f" at p={p}" if p is not None else ""
        super().__init__(f"local density did not stabilize{where} within t_cap={t_cap}")
