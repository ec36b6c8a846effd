"""Exception taxonomy for the suggestion engine."""


class EngineError(Exception):
    """Base class for model and pool failures."""


class NonFiniteInput(EngineError):
    pass


class UnknownTask(EngineError):
    pass


class UnknownLabel(EngineError):
    pass


class MissingAlpha(EngineError):
    pass


class EmptyPool(EngineError):
    pass


class NoLabeledData(EngineError):
    pass


class UntrainedModel(EngineError):
    pass
