"""Exception types raised across the package."""


class WeakOptomechError(Exception):
    """Base class for all package errors."""


class DegenerateNorm(WeakOptomechError, ZeroDivisionError):
    """Postselected norm is (numerically) zero, so a normalised expectation is 0/0."""


class DomainError(WeakOptomechError, ValueError):
    """Argument lies outside the validity window of a series expansion."""


class NoRoot(WeakOptomechError, ValueError):
    """The extremal-amplification condition has no admissible positive solution."""


class ZeroProbability(WeakOptomechError, ZeroDivisionError):
    """Overall postselection probability vanishes (e.g. zero coupling)."""


class CutoffTooSmall(WeakOptomechError, RuntimeError):
    """Truncated number basis holds too much population in its top levels."""


class StepTooLarge(WeakOptomechError, RuntimeError):
    """Fixed-step integration drifted in trace beyond tolerance."""


class UnknownFigure(WeakOptomechError, KeyError):
    pass


class ConfigParse(WeakOptomechError, ValueError):
    pass
