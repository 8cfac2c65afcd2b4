"""Exception hierarchy shared by the library and the command line."""


class TsrvLabError(Exception):
    """Base class for every error raised by tsrvlab."""


class ModelError(TsrvLabError, ValueError):
    """Invalid process model (non-positive or non-finite coefficients)."""


class CapacityError(TsrvLabError, OverflowError):
    """Requested grid does not fit in the platform's index range."""


class GridError(TsrvLabError, ValueError):
    """Invalid grid, index list or subgrid allocation."""


class UnsupportedKernelError(TsrvLabError, TypeError):
    """Operation is undefined for the given contamination kernel."""


class ConfigError(TsrvLabError, ValueError):
    """Invalid experiment configuration. ``field`` names the offending key."""

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field


class DataError(TsrvLabError, ValueError):
    """Malformed tick data. ``row`` is the 1-based data row, when known."""

    def __init__(self, message, row=None):
        super().__init__(message)
        self.row = row
