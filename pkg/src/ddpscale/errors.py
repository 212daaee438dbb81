"""Exception hierarchy shared by the simulator, the fitting toolkit and the CLI."""


class DdpscaleError(Exception):
    """Base class for all package errors."""


class ValidationError(DdpscaleError, ValueError):
    """An input violates a documented invariant (bad config, bad curve, bad spec)."""


class AnalysisError(DdpscaleError, ValueError):
    """An analysis step cannot produce a meaningful answer for valid inputs."""
