"""Exception types raised by the simulation modules."""


class CiaError(Exception):
    """Base class for all errors raised by ``cia_sim``."""


class DegenerateChannel(CiaError):
    """The interference channel has a kernel larger than the CP length."""


class VfdmFailure(CiaError):
    """The root-based VFDM construction could not produce a valid precoder."""


class RepeatedRoots(VfdmFailure):
    """Coinciding channel roots whose confluent columns are also degenerate."""


class GramSchmidtBreakdown(VfdmFailure):
    """A Gram-Schmidt pivot underflowed after projection."""

    def __init__(self, column: int, pivot: float):
        super().__init__(f"pivot of column {column} underflowed ({pivot:.3e})")
        self.column = column
        self.pivot = pivot


class AlignmentFailure(VfdmFailure):
    """The orthonormalized precoder leaks into the primary's signal space."""


class NotPositiveDefinite(CiaError):
    pass


class AllZeroEigenvalues(CiaError):
    pass


class DimensionMismatch(CiaError, ValueError):
    pass
