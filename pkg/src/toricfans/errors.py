"""Exception hierarchy shared by all toricfans modules."""


class ToricError(Exception):
    """Base class for all domain errors raised by this package."""


class ShapeError(ToricError):
    """Matrix/vector dimensions do not match."""


class PreconditionError(ToricError):
    """An operation was called on input violating its documented preconditions."""


class FanValidationError(ToricError):
    """A fan failed structural validation (primitivity, unimodularity, completeness)."""


class ContractionError(ToricError):
    """A blowdown produced an invalid fan (the relation was not a smooth blowdown)."""


class FlipError(ToricError):
    """A flip could not be carried out (intermediate contraction failed)."""


class DisjointnessError(ToricError):
    """Simultaneous flips were requested with overlapping centers."""


class PipelineError(ToricError):
    """The reduction pipeline aborted; ``kind`` names the failing check."""

    def __init__(self, kind: str, message: str):
        super().__init__(f"{kind}: {message}")
        self.kind = kind


class UnsupportedError(ToricError):
    """The requested case is outside the implemented range (e.g. m not in {2,3})."""


class ParseError(ToricError):
    """Malformed input text; carries a 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)
        self.line = line


class ReconstructionError(ToricError):
    """Fan reconstruction from a relation presentation failed."""


class CertificateError(ToricError):
    """A certificate is malformed or its coefficients are outside the allowed set."""
