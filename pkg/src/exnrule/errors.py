"""Exception hierarchy. Every error raised by the package derives from ExNRuleError."""


class ExNRuleError(ValueError):
    pass


# dataset
class ParseError(ExNRuleError):
    pass


class MissingValueError(ExNRuleError):
    pass


class NonBinaryLabelError(ExNRuleError):
    pass


class DegenerateSplitError(ExNRuleError):
    pass


class InvalidSubsetSizeError(ExNRuleError):
    pass


# distance
class DimensionMismatchError(ExNRuleError):
    pass


class EmptyPoolError(ExNRuleError):
    pass


# models
class ConfigInvalidError(ExNRuleError):
    pass


class SingleClassTrainingError(ExNRuleError):
    pass


class ChainExhaustedError(ExNRuleError):
    pass


class DegenerateFoldsError(ExNRuleError):
    pass


# metrics
class LengthMismatchError(ExNRuleError):
    pass


class ProbOutOfRangeError(ExNRuleError):
    pass


# bench
class UnknownMetricError(ExNRuleError):
    pass


class UnknownScenarioError(ExNRuleError):
    pass
