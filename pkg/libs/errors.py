class LabError(Exception):
    """Base class for every failure raised by the library."""


class DomainError(LabError, ValueError):
    """An argument lies outside the range an operation is defined on."""


class QuadratureError(LabError):
    pass


class FactorizationError(LabError):
    pass


class DegenerateWeightError(LabError):
    pass


class NonFinitePotentialError(LabError):
    def __init__(self, index: int, radius: float, value: float):
        super().__init__(f'potential is not finite at node {index} (r={radius!r}): {value!r}')
        self.index = index
        self.radius = radius
        self.value = value
