"""Exception types shared across the package."""


class LinDFTError(Exception):
    """Base class for all errors raised by lindft."""


class SignalSpecError(LinDFTError, ValueError):
    """Invalid signal description (aliasing, empty component list, bad SNR)."""


class PoleProximityError(LinDFTError, ValueError):
    """A model pole sits on (or numerically at) an evaluation bin."""


class IllConditionedSystemError(LinDFTError):
    """The per-cluster linear system is singular or too poorly conditioned."""

    def __init__(self, message: str, condition: float):
        super().__init__(f"{message} (cond={condition:.3g})")
        self.condition = condition


class DenseInterharmonicError(LinDFTError):
    """Two recovered poles are closer than the separation floor."""

    def __init__(self, message: str, separation: float):
        super().__init__(f"{message} (separation={separation:.3g} bins)")
        self.separation = separation


class StencilError(LinDFTError, ValueError):
    """An interpolation stencil does not fit inside the usable spectrum."""
