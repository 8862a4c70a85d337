"""Exception hierarchy shared across the package.

Everything raised on purpose derives from AntidiceError so callers (and
the CLI) can fence library failures off from genuine bugs.
"""


class AntidiceError(Exception):
    """Base class for all domain errors raised by this package."""


class DieParseError(AntidiceError, ValueError):
    """Malformed die literal: empty face list, bad token, zero denominator."""


class SingletonSupportError(AntidiceError, ValueError):
    """Span/shift decomposition demands at least two distinct support points."""


class UnbalancedDistributionError(AntidiceError, ValueError):
    """Operation requires a distribution with exact mean zero."""


class NoLeadingTermError(AntidiceError, ValueError):
    """Vanishing third moment leaves no 1/sqrt(n) leading term to certify."""


class CertificateUnavailableError(AntidiceError, ValueError):
    """Certified threshold is restricted to span 1, shift 0 difference dice."""


class OperationCancelled(AntidiceError, RuntimeError):
    """A caller-supplied cancellation flag tripped between convolution steps."""


class CheckpointError(AntidiceError, ValueError):
    """Checkpoint file is malformed or belongs to a different computation."""


class DegenerateFitError(AntidiceError, ValueError):
    """Too few distinct abscissae for the requested polynomial fit."""


class GridError(AntidiceError, ValueError):
    """Records do not form the rectangular grid a bitmap writer needs."""
