"""Exception types.

Every error carries a ``detail`` dict so the CLI can emit it as JSON.
State indices are 0-based; operator (array) indices are 1-based, as in U_1..U_n.
"""

from __future__ import annotations


class QsdError(Exception):
    """Base class for all errors raised by qsdisc."""

    def __init__(self, message: str = "", **detail):
        super().__init__(message or self.__class__.__name__)
        self.detail = detail

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), "detail": self.detail}


class NonHermitian(QsdError):
    pass


class NotUnitary(QsdError):
    pass


class DimensionMismatch(QsdError):
    pass


class BadCardinality(QsdError):
    pass


class NotNormalized(QsdError):
    pass


class NotOrthonormal(QsdError):
    def __init__(self, pair: tuple[int, int], overlap: float):
        super().__init__(
            f"states {pair[0]} and {pair[1]} are not orthonormal (|overlap| = {overlap:.3g})",
            pair=list(pair),
            overlap=overlap,
        )
        self.pair = pair
        self.overlap = overlap


class MalformedArrays(QsdError):
    pass


class UnbalancedArray(QsdError):
    def __init__(self, j: int):
        super().__init__(f"eigenvalue array {j} does not hold equal numbers of +1 and -1", j=j)
        self.j = j


class DuplicateOrComplement(QsdError):
    def __init__(self, j: int, m: int):
        super().__init__(f"eigenvalue array {j} equals array {m} or its complement", j=j, m=m)
        self.j = j
        self.m = m


class NonInjectiveSignatures(QsdError):
    def __init__(self, i: int, i2: int):
        super().__init__(f"states {i} and {i2} share the same eigenvalue signature", i=i, i2=i2)
        self.i = i
        self.i2 = i2


class UnsupportedFamily(QsdError):
    pass


class NotAMember(QsdError):
    pass


class InvalidDensityMatrix(QsdError):
    pass


class UnknownSpin(QsdError):
    pass


class UnknownPreset(QsdError):
    pass


class PulseSyntaxError(QsdError):
    pass
