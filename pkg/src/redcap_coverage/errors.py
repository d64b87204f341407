"""Exception types shared across the package."""


class CoverageError(Exception):
    """Base class for all toolkit errors."""


class ConfigurationError(CoverageError, ValueError):
    """Invalid or inconsistent configuration values."""


class SinrLookupError(CoverageError, LookupError):
    """No required-SINR entry for a (scenario, profile, channel) triple."""


class UnsupportedOperationError(CoverageError):
    """Operation not applicable to the given channel or configuration."""


class BundleError(CoverageError):
    """Dataset bundle could not be loaded; carries every problem found."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
