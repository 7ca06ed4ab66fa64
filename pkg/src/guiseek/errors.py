"""Exception hierarchy shared across the package."""


class GuiseekError(Exception):
    """Base class for every domain error raised by this package."""


class ManifestError(GuiseekError):
    """Dataset manifest is missing, malformed, or violates an invariant."""


class StoreError(GuiseekError):
    """Annotation store file is malformed or inconsistent."""


class IndexFormatError(GuiseekError):
    """Embedding index file has a bad magic value or unsupported version."""


class IndexTruncatedError(IndexFormatError):
    """Embedding index file ends before the declared payload."""


class GatewayError(GuiseekError):
    """Base class for model-gateway failures.

    Carries the usage consumed across all attempts so callers can still
    account for tokens spent on a failed request.
    """

    def __init__(self, message, meter=None):
        super().__init__(message)
        self.meter = meter


class TransportError(GatewayError):
    """Provider unreachable or returned a transport-level failure."""


class SchemaViolationError(GatewayError):
    """Provider reply did not conform to the expected schema.

    ``raw`` holds the offending reply for diagnostics.
    """

    def __init__(self, message, raw=None, meter=None):
        super().__init__(message, meter=meter)
        self.raw = raw


class CapabilityError(GatewayError):
    """Provider does not support the requested operation."""


class UnknownModelError(GuiseekError):
    """Model name absent from the price table."""


class AnnotationError(GuiseekError):
    """Annotation run aborted: failure rate exceeded the threshold."""

    def __init__(self, message, failures=()):
        super().__init__(message)
        self.failures = list(failures)


class NoActiveDimensionError(GuiseekError):
    """No dimension has both constraints and a positive weight."""


class EvaluationError(GuiseekError):
    """Gold standard and rankings disagree or a metric precondition fails."""


class ConfigError(GuiseekError):
    """Service or CLI configuration is invalid."""
