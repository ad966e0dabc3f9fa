class LefschetzLabError(Exception):
    """Base class for all errors raised by lefschetz_lab."""


class DimensionError(LefschetzLabError):
    pass


class ContractError(LefschetzLabError):
    """An operator or map broke its stated contract (e.g. inconsistent output degree)."""


class PreconditionError(LefschetzLabError):
    pass


class JacobiError(LefschetzLabError):
    def __init__(self, message: str, generator: int | None = None, triple: tuple | None = None):
        super().__init__(message)
        self.generator = generator
        self.triple = triple


class ContactError(LefschetzLabError):
    pass


class MetricError(LefschetzLabError):
    pass


class SasakianError(LefschetzLabError):
    def __init__(self, message: str, report=None):
        super().__init__(message)
        self.report = report


class StructuralError(LefschetzLabError):
    """A spectral relation that must hold on Sasakian input failed."""


class InvariantViolation(LefschetzLabError):
    """An internal cross-check disagreed (e.g. metric route vs relation route)."""


class FixtureError(LefschetzLabError):
    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path
