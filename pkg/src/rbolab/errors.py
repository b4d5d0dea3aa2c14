"""Exception hierarchy shared by every module of the package."""


class RboError(Exception):
    """Base class for all package errors."""


class NonZeroMean(RboError):
    """An antiderivative was requested of a field with nonzero mean."""


class NonHermitianSymbol(RboError):
    """A Fourier multiplier would map real fields to complex ones."""


class NonPositiveK(RboError):
    """The cubic constraint functional is not strictly positive."""


class ZeroField(RboError):
    """An operation needs a nonzero field."""


class ScaleOutOfRange(RboError):
    """A dilation would leave the profile under-resolved."""


class NumericalFailure(RboError):
    """Base for failures of an iterative or time-stepping computation."""


class NonConvergence(NumericalFailure):
    pass


class Blowup(NumericalFailure):
    pass


class DegenerateSeed(NumericalFailure):
    pass


class EigSolverFailure(NumericalFailure):
    pass


class AssemblyTooLarge(RboError):
    pass


class StepTooLarge(UserWarning):
    """Advisory: the time step exceeds the advective stability estimate."""


class ConfigError(RboError):
    pass


class MalformedConfig(ConfigError):
    pass


class UnknownKey(MalformedConfig):
    pass


class FieldFileError(RboError):
    pass


class SchemaMismatch(FieldFileError):
    pass


class VersionUnsupported(FieldFileError):
    pass


class NonFiniteSample(FieldFileError):
    pass


class IoFailure(RboError):
    pass
