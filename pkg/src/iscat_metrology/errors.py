"""Exception types shared across the package."""


class EnergyBudgetError(ValueError):
    """An arm amplitude exceeds the photon budget of the input field."""


class NotEstimableError(ValueError):
    """The configuration carries no information about the requested parameter."""


class VacuumPhaseError(NotEstimableError):
    """The detector field vanishes; its phase (and the CFI) is undefined."""


class TruncationError(ValueError):
    """A Fock-space truncation leaves more than the allowed tail mass."""


class BracketError(RuntimeError):
    """A likelihood maximum could not be located inside the search bracket."""


class DegenerateFieldError(ValueError):
    """A signal-to-noise denominator vanishes (total destructive interference)."""
