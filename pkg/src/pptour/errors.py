"""Exception hierarchy shared by all modules.

Every error carries an ``exit_code`` so the CLI can map failures to the
documented process exit status without a lookup table.
"""


class PPTourError(Exception):
    exit_code = 1


class ConfigError(PPTourError):
    exit_code = 2


class DataError(PPTourError):
    exit_code = 3


class EvaluationError(PPTourError):
    exit_code = 4


class ShapeError(DataError, ValueError):
    pass


class DegeneratePlane(DataError, ValueError):
    pass


class DegenerateColumn(DataError, ValueError):
    pass


class DegenerateSpread(EvaluationError, ValueError):
    pass


class CollinearInput(EvaluationError, ValueError):
    pass


class TooFewPoints(EvaluationError, ValueError):
    pass


class InvalidParameter(ConfigError, ValueError):
    pass


class UnknownIndex(ConfigError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class CalibrationRequired(EvaluationError):
    pass


class IndexEvaluationError(EvaluationError):
    pass


class NoStructureAtTarget(EvaluationError):
    pass


class EmptyTrace(DataError):
    pass
