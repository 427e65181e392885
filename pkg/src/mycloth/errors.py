"""Exception hierarchy shared by every mycloth subsystem."""


class MyClothError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(MyClothError):
    """An argument violated a documented precondition."""


class NotFoundError(MyClothError):
    """A referenced entity (pattern, session, asset, avatar) does not exist."""


class InvalidStateError(MyClothError):
    """A mutation would leave a design session in an inconsistent state."""


class ConfigurationError(MyClothError):
    """A catalog, config file, or manifest is missing or malformed."""


class StorageError(MyClothError):
    """A persistence operation could not be completed."""


class BackendUnavailableError(MyClothError):
    """A remote generation backend failed after exhausting retries."""


class RevisionConflictError(MyClothError):
    """Optimistic concurrency check failed: the session moved on."""


class ShapeError(ValidationError):
    """Tensor or raster dimensions do not satisfy an operation's contract."""


class ContractError(MyClothError):
    """A structural contract between components was violated."""


class TrainingDiverged(MyClothError):
    """The training loss became non-finite; a diagnostic dump was written."""


class ParseError(MyClothError):
    """A data file (pair list, pose annotation) could not be parsed."""


class LoadError(MyClothError):
    """A dataset file referenced by a pair list is missing or unreadable."""

