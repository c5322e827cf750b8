class MCFLIError(Exception):
    """Base error. ``detail`` is the message shown to CLI users."""

    def __init__(self, detail: str):
        super().__init__(detail)
        self.detail = detail


class InvalidGridError(MCFLIError):
    pass


class LayoutError(MCFLIError):
    pass


class GridMismatchError(MCFLIError):
    pass


class NotHermitianError(MCFLIError):
    pass


class DimensionError(MCFLIError):
    pass


class MeasurementCountError(MCFLIError):
    pass


class UnknownNoiseModelError(MCFLIError):
    pass


class CalibrationError(MCFLIError):
    pass


class ConfigError(MCFLIError):
    pass
