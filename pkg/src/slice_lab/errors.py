class SliceLabError(Exception):
    """Base class for errors raised by slice_lab."""


class InvalidInput(SliceLabError, ValueError):
    pass


class ConstructionFailure(SliceLabError, RuntimeError):
    """An internal bound of the witness construction did not hold.

    This should never fire on valid input; seeing it means a bug.
    """

    def __init__(self, message, coord=None, case=None):
        super().__init__(message)
        self.coord = coord
        self.case = case


class FeasibilityError(InvalidInput):
    def __init__(self, message, deficient=()):
        super().__init__(message)
        self.deficient = tuple(deficient)
