"""Exception taxonomy shared across the package.

The CLI maps these onto its exit codes, so solver code should raise one of
these rather than a bare ValueError whenever the failure is meaningful to a
batch caller.
"""


class CrosswaveError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(CrosswaveError):
    """Invalid or inconsistent configuration (bad key, bad value, bad range)."""


class ResolutionError(CrosswaveError):
    """Grid or step size cannot resolve the requested scales."""


class ToleranceError(CrosswaveError):
    """A verified quantity missed its documented tolerance."""


class NumericalGuardError(CrosswaveError):
    """A runtime conservation/locality guard tripped (result not trustworthy)."""


class MassDriftError(NumericalGuardError):
    """L2 mass moved more than the allowed drift per unit time."""


class EnergyDriftError(NumericalGuardError):
    """Classical energy drifted; the ODE step is too coarse for this gap."""


class NormDriftError(NumericalGuardError):
    """Pointwise two-level norm was not preserved by the ODE integrator."""


class WronskianError(NumericalGuardError):
    """Oscillator pair lost its Wronskian normalization."""


class BoundaryLeakError(NumericalGuardError):
    """Field amplitude reached the edge of the periodic box."""


class HorizonError(NumericalGuardError):
    """Oscillator solution left its validity window (nu too small)."""
