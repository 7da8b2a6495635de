"""Exception hierarchy shared by every chipfire module."""


class ChipFireError(ValueError):
    """Base class for all errors raised by chipfire."""


class UnboundedFiringError(ChipFireError):
    """Raised for k = 1, where firing never terminates."""


class InvalidConfigurationError(ChipFireError):
    pass


class IllegalFiringError(ChipFireError):
    """A firing event (or a strategy's choice) violates the firing rule."""


class SizeGuardError(ChipFireError):
    """An enumeration would exceed the configured size guard."""
