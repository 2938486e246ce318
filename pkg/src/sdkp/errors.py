"""Exception hierarchy shared by all modules."""


class DkpError(Exception):
    """Base class for every error raised by this package."""


class KinematicsError(DkpError, ValueError):
    """Momenta violate on-shell, conservation or angular-domain requirements."""


class OffShellError(KinematicsError):
    pass


class PoleError(DkpError, ArithmeticError):
    """A propagator was evaluated within the pole guard."""


class PipelineMismatch(DkpError):
    """Two independent evaluations of the same observable disagree."""

    def __init__(self, what, values, rel_spread, tolerance):
        self.values = values
        self.rel_spread = rel_spread
        self.tolerance = tolerance
        super().__init__(
            f"{what}: pipelines disagree, relative spread {rel_spread:.3e} > {tolerance:.1e} ({values})"
        )


class UnsupportedDistribution(DkpError, ValueError):
    pass


class GaugeError(DkpError, ValueError):
    """Splitting constant inconsistent with second-order gauge invariance."""
