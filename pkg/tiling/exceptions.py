"""
Error hierarchy for the tiling app.

Library code raises these; views and management commands translate them
into HTTP 400 bodies and exit statuses.
"""


class TilingError(Exception):
    """Base class for every error raised by the tiling app."""


class InvalidGraphError(TilingError):
    """Adjacency is malformed (index out of range, broken mirror)."""


class GraphFormatError(TilingError):
    """Text input could not be parsed."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class EmptyPartError(TilingError):
    """A vertex subset that must be nonempty was empty."""


class MixedPartError(TilingError):
    """A vertex subset mixes U-vertices and V-vertices."""


class ThresholdRangeError(TilingError):
    """Threshold parameters fall outside the admissible range."""


class GadgetError(TilingError):
    """A generator could not build the requested instance."""


class NoSidonSetError(GadgetError):
    def __init__(self, m, p):
        self.m = m
        self.p = p
        super().__init__(f"no Sidon set of size {p} found modulo {m}")


class InfeasibleDeletionError(GadgetError):
    """More deletions requested than the source block holds."""


class FloorViolationError(GadgetError):
    def __init__(self, floor, achieved):
        self.floor = floor
        self.achieved = achieved
        super().__init__(f"minimum degree floor {floor} violated (achieved {achieved})")


class CapacityError(GadgetError):
    """A block is too small to host the private neighbourhoods it must carry."""


class RetryExhaustedError(GadgetError):
    def __init__(self, report, attempts):
        self.report = report
        self.attempts = attempts
        super().__init__(f"property checks failed on all {attempts} attempts")


class SelfCheckError(GadgetError):
    """A generator's claimed identity did not hold on the built graph."""


class BlockPartitionError(TilingError):
    """A four-block partition is malformed."""


class PipelineError(TilingError):
    """A stage of the extremal pipeline could not proceed."""

    stage = 'pipeline'


class ClaimViolationError(PipelineError):
    stage = 'preprocess'

    def __init__(self, item, detail):
        self.item = item
        self.detail = detail
        super().__init__(f"claim item {item} violated: {detail}")


class BalanceError(PipelineError):
    stage = 'balance'


class AbsorptionError(PipelineError):
    stage = 'absorb'


class BlockTilingError(PipelineError):
    stage = 'tile-blocks'


class InvalidParameterError(TilingError):
    """A numeric parameter is outside its admissible range."""


class CertificateError(TilingError):
    """A tiling or refutation produced here failed its own re-check."""
