"""Exception hierarchy shared by every twptr module."""


class TwptrError(Exception):
    """Base class for all errors raised by this package."""


class SingularDenominator(TwptrError, ZeroDivisionError):
    """The chassis-acceleration quotient has a (near) zero denominator."""


class DegenerateElimination(TwptrError):
    """Torque elimination has no unique solution (zero slope)."""


class NonFiniteDerivative(TwptrError, ArithmeticError):
    """An integrator stage produced inf or nan."""


class SequenceGap(TwptrError):
    """A gyro sample arrived out of order."""


class EmptyTrajectory(TwptrError, ValueError):
    pass


class DivisionByZeroBase(TwptrError, ZeroDivisionError):
    pass


class ScenarioAborted(TwptrError):
    """A closed-loop run hit a numeric failure.

    ``step`` is the sample index at which the failure occurred.
    """

    def __init__(self, step, cause):
        self.step = step
        self.cause = cause
        super().__init__(f"scenario aborted at step {step}: {cause}")


class ProtocolError(TwptrError):
    pass


class MalformedFrame(ProtocolError, ValueError):
    pass


class SequenceMismatch(ProtocolError):
    pass


class HilTimeout(ProtocolError, TimeoutError):
    pass


class ConfigError(TwptrError, ValueError):
    pass


class ParseError(ConfigError):
    def __init__(self, lineno, message):
        self.lineno = lineno
        super().__init__(f"line {lineno}: {message}")


class ValidationError(ConfigError):
    def __init__(self, key, message):
        self.key = key
        self.message = message
        super().__init__(f"{key}: {message}")


class UnknownKey(ConfigError):
    def __init__(self, key, lineno=None):
        self.key = key
        self.lineno = lineno
        where = f"line {lineno}: " if lineno is not None else ""
        super().__init__(f"{where}unknown key {key!r}")
