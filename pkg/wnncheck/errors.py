class WnnCheckError(ValueError):
    """Base class for every error raised by wnncheck"""


class NotClosed(WnnCheckError):
    """A commutator leaves the span it should stay in"""


class Degenerate(WnnCheckError):
    """The trace form is not positive-definite on the span (non-compact input)"""


class DimensionMismatch(WnnCheckError):
    pass


class NotInP(WnnCheckError):
    """Vector has a component along the isotropy algebra"""


class NotHorizontal(WnnCheckError):
    pass


class NotVertical(WnnCheckError):
    pass


class ZeroVector(WnnCheckError):
    pass


class StepTooSmall(WnnCheckError):
    pass


class InvalidFlatPair(WnnCheckError):
    """A*_x ν0 is not numerically zero, so (x, ν0) spans no flat plane"""


class InvalidP(WnnCheckError):
    """Vertical tensor P is not symmetric, positive-definite and Ad(K)-invariant"""


class ConfigError(WnnCheckError):
    pass
