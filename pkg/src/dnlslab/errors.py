"""Exception taxonomy for the lattice toolkit.

Two families matter to callers: configuration/validation problems (bad
parameters, malformed scenario files, violated preconditions) and runtime
integration failures (blow-up, step-size underflow).  The CLI maps the
former to exit code 2 and the latter to exit code 3.
"""


class DnlsError(Exception):
    """Base class for all toolkit errors."""


class ValidationFailure(DnlsError):
    """A precondition or configuration contract was violated."""


class RuntimeFailure(DnlsError):
    """The computation itself failed while running."""


class DomainError(ValidationFailure):
    """Parameter outside its mathematical domain (e.g. gain/loss signs)."""


class ConfigError(ValidationFailure):
    """Inconsistent lattice or scenario configuration."""


class LengthMismatch(ValidationFailure):
    """State length does not match the lattice node count."""


class WavenumberError(ValidationFailure):
    """Mode index outside the admissible integer range [0, N/2]."""


class NeedThreeSamples(ValidationFailure):
    """Centered differences require at least three trajectory samples."""


class GridMismatch(ValidationFailure):
    """Paired trajectories were not sampled on identical grids."""


class HypothesisViolated(ValidationFailure):
    """An estimate's hypothesis does not hold for the supplied data."""


class WindowTooShort(ValidationFailure):
    """Trajectory does not span the requested analysis window."""


class ParseError(ValidationFailure):
    """Scenario file could not be parsed."""


class ValidationError(ValidationFailure):
    """Scenario contents violate a module precondition."""


class BlowUpDetected(RuntimeFailure):
    """A node modulus exceeded the blow-up guard threshold."""


class StepFailure(RuntimeFailure):
    """Adaptive step size underflowed; integration cannot proceed."""


class NoLinearWindow(RuntimeFailure):
    """Growth-rate fit found too few samples in the linear window."""
