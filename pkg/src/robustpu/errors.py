"""Exception types shared across the package."""


class RobustPUError(Exception):
    """Base class so callers can catch every package-raised failure at once."""


class ConfigurationError(RobustPUError, ValueError):
    """Invalid configuration: bad shapes, unknown options, inconsistent fields."""


class IngestionError(RobustPUError, RuntimeError):
    """Raw dataset file missing, malformed, or inconsistent with its schema."""


class SizingError(RobustPUError, ValueError):
    """A class pool is too small for the requested split sizes."""


class IntegrityError(RobustPUError, RuntimeError):
    """Split manifest does not match the raw data it references."""


class TrainingDiverged(RobustPUError, RuntimeError):
    """Non-finite loss or gradient encountered during training."""


class ScheduleTooStrict(RobustPUError, RuntimeError):
    """Every sample weight collapsed to zero; no effective training set."""


class UsageError(RobustPUError, ValueError):
    """API called with arguments that make the requested quantity undefined."""
