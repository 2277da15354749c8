"""Exception taxonomy shared across the package.

Exit-code mapping used by the CLI: UsageError -> 2, ScenarioError and
BundleInvalidError -> 3, everything else is a bug.
"""


class CoreSchedError(Exception):
    """Base class for all package errors."""


class UsageError(CoreSchedError):
    """Caller violated an operation's precondition (bad argument, bad call)."""


class CurveValidationError(CoreSchedError):
    """Learning-curve parameters are invalid; message names the offending field."""

    def __init__(self, field: str, message: str):
        self.field = field
        super().__init__(f"{field}: {message}")


class BundleInvalidError(CoreSchedError):
    """A bundle failed validation where a valid one is required."""

    def __init__(self, report):
        self.report = report
        super().__init__(f"invalid bundle: {report}")


class ConfigError(CoreSchedError):
    """A strategy or scenario configuration is unusable."""


class BudgetViolationError(CoreSchedError):
    """A strategy emitted allocations that exceed the data-throughput cap."""


class ScenarioError(CoreSchedError):
    """A scenario document failed to parse or validate.

    ``path`` locates the offending field ("bundle.threads[2].curve.rate");
    ``line``/``column`` are set for syntax errors.
    """

    def __init__(self, message: str, path: str = "", line: int | None = None,
                 column: int | None = None):
        self.path = path
        self.line = line
        self.column = column
        loc = ""
        if path:
            loc = f" at {path}"
        if line is not None:
            loc += f" (line {line}, column {column})"
        super().__init__(f"{message}{loc}")


class OracleLimitError(CoreSchedError):
    """Instance exceeds the exhaustive-search limits; message reports sizes."""
