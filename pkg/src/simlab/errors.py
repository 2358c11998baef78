"""Exception hierarchy shared by every layer of the lab."""


class SimlabError(Exception):
    """Base class for all lab errors."""


class InputError(SimlabError, ValueError):
    """An argument is malformed or out of its documented range."""


class ModelError(SimlabError, ValueError):
    """The model parameters violate a structural requirement."""


class NotGradientError(ModelError):
    """No gradient solution exists on the requested search window."""


class PreconditionError(SimlabError, ValueError):
    """An experiment's hypotheses are not met, so it refuses to run."""


class ResourceError(SimlabError, RuntimeError):
    """The requested exact computation is too large."""


class PositivityLossError(SimlabError, RuntimeError):
    """The stochastic heat equation solver produced a nonpositive value."""
