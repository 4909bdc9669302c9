"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line front end:
2 for usage/configuration problems, 3 for unreadable or invalid input,
4 for numeric degeneracies.
"""


class GlobvertError(Exception):
    exit_code = 1


class ConfigError(GlobvertError, ValueError):
    exit_code = 2


class InputError(GlobvertError, ValueError):
    exit_code = 3


class NumericError(GlobvertError, ArithmeticError):
    exit_code = 4


# contour
class FewerThanThreePoints(InputError):
    pass


class ZeroPerimeter(NumericError):
    pass


class NTooSmall(ConfigError):
    pass


class DegenerateTangent(NumericError):
    pass


class NoForeground(InputError):
    pass


class MultipleComponents(InputError):
    pass


class TouchesBorder(InputError):
    pass


# shapes
class InvalidSpec(ConfigError):
    pass


class UnsupportedKind(ConfigError):
    pass


# descriptors
class CoincidentSamples(NumericError):
    pass


class AllUndefined(NumericError):
    pass


# local algebra
class AmbiguousWindow(NumericError):
    pass


# vertices
class EmptyProfile(InputError):
    pass


class MismatchedN(ConfigError):
    pass


# perturb
class RhoTooSmall(ConfigError):
    pass


class DegenerateSegment(NumericError):
    pass


class BadWindow(ConfigError):
    pass


# laii
class SampleOutsideRaster(InputError):
    pass


class ScaleTooSmallWarning(UserWarning):
    pass


# cli
class InputUnresolvable(InputError):
    pass


class WriteFailure(InputError):
    pass
