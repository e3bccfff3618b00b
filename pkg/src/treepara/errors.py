"""Exception types raised by treepara."""


class TreeParaError(Exception):
    """Base class for all library errors."""


class NotPowerOfTwo(TreeParaError, ValueError):
    pass


class MissingCoordinates(TreeParaError, ValueError):
    pass


class DegenerateMetric(UserWarning):
    """Warned (not raised) when every pairwise distance is zero."""


class SchemaError(TreeParaError, ValueError):
    pass


class PartitionViolation(TreeParaError, ValueError):
    def __init__(self, report):
        self.report = report
        lines = "; ".join(str(v) for v in report.violations[:5])
        super().__init__(f"{len(report.violations)} partition violation(s): {lines}")


class UnknownId(TreeParaError, KeyError):
    pass


class SizeMismatch(TreeParaError, ValueError):
    pass


class LevelOutOfRange(TreeParaError, IndexError):
    pass


class TooSmall(TreeParaError, ValueError):
    pass


class TooLarge(TreeParaError, ValueError):
    pass


class MissingDerivative(TreeParaError, ValueError):
    pass


class NotC2(TreeParaError, ValueError):
    pass


class NotDyadic(TreeParaError, ValueError):
    pass
