"""Exception hierarchy shared by every module."""


class SigmaqError(Exception):
    """Base class for all library errors."""


class InvalidScenario(SigmaqError, ValueError):
    pass


class ScenarioTooLarge(SigmaqError, ValueError):
    pass


class UnknownVariable(SigmaqError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class NotAContext(SigmaqError, ValueError):
    pass


class InvalidTable(SigmaqError, ValueError):
    pass


class InfeasibleMoments(SigmaqError, ValueError):
    pass


class WrongScenarioShape(SigmaqError, ValueError):
    pass


class SignalingDetected(SigmaqError, ValueError):
    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class InconsistentSystem(SigmaqError, ArithmeticError):
    pass


class NegativeMarginal(SigmaqError, ArithmeticError):
    pass


class InvalidKSSet(SigmaqError, ValueError):
    pass


class TooManyVectors(SigmaqError, ValueError):
    pass


class BiasOutOfRange(SigmaqError, ValueError):
    pass
