# exit codes: 1 bad input / config, 2 numeric failure


class Error(Exception):
    exit_code = 1

    def __init__(self, *args, **kwargs):
        self.msg = kwargs.get("msg", args[0] if args else "")
        super().__init__(self.msg)

    def __str__(self):
        details = "" if self.__cause__ is None else repr(self.__cause__)
        return f"spdc_herald_error: msg {self.msg}. details: {details}"


class InputError(Error):
    exit_code = 1

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class DomainError(InputError):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class ConfigError(InputError):
    def __init__(self, *args, **kwargs):
        self.path = kwargs.get("path", "")
        super().__init__(*args, **kwargs)


class CatalogError(InputError):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class PhasematchingSignError(InputError):
    """k_p - k_s - k_i has the wrong sign (or is zero) for the grating."""

    def __init__(self, *args, **kwargs):
        self.mismatch = kwargs.get("mismatch", 0.0)
        super().__init__(*args, **kwargs)


class NumericError(Error):
    exit_code = 2

    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class ConvergenceError(NumericError):
    def __init__(self, *args, **kwargs):
        self.endpoints = kwargs.get("endpoints", ())
        super().__init__(*args, **kwargs)


class DegenerateCouplingError(NumericError):
    def __init__(self, *args, **kwargs):
        self.arm = kwargs.get("arm", "")
        super().__init__(*args, **kwargs)


class NoPlateauError(NumericError):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)


class StageError(Error):
    """Raised by the design pipeline, names the failing stage."""

    def __init__(self, *args, **kwargs):
        self.stage = kwargs.get("stage", "")
        cause = kwargs.get("cause")
        if cause is not None:
            self.exit_code = getattr(cause, "exit_code", 2)
        super().__init__(*args, **kwargs)


__all__ = [
    "Error",
    "InputError",
    "DomainError",
    "ConfigError",
    "CatalogError",
    "PhasematchingSignError",
    "NumericError",
    "ConvergenceError",
    "DegenerateCouplingError",
    "NoPlateauError",
    "StageError",
]
