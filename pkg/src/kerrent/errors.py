"""Exception hierarchy for kerrent."""


class KerrentError(Exception):
    """Base class for all package errors."""


class CutoffTooSmall(KerrentError):
    """No admissible Fock cutoff reaches the requested tail tolerance."""


class CutoffOverflow(KerrentError):
    """A raising operator pushed a mode above its Fock cutoff."""


class ModeMismatch(KerrentError, ValueError):
    """Two states (or a state and an index) disagree on the mode count."""


class AmbiguousOutcomeLabeling(KerrentError):
    """Outcomes cannot be labeled by total photon number (unequal couplings)."""


class DegenerateReadout(KerrentError):
    """All pointer quadrature means coincide, so the readout carries no information."""


class NotApplicable(KerrentError):
    """Operation is undefined for the selected readout model."""


class ConfigError(KerrentError, ValueError):
    """Invalid protocol configuration."""


class OverlapError(KerrentError):
    """Pointer states are not distinguishable at the configured tolerance."""


class GridTooLarge(KerrentError):
    """Sweep grid exceeds the point budget."""
