class BetheException(Exception):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class ConstructionError(BetheException):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class ZeroArgument(BetheException):
    """The logarithm of an exactly or numerically vanishing quantity was requested."""

    def __init__(self, term: str, index: int, *args: object) -> None:
        self.term: str = term
        self.index: int = index
        super().__init__(f"log of zero in {term} of equation {index}", *args)


class NoConvergence(BetheException):
    def __init__(self, message: str, seed_index: int | None = None, step_index: int | None = None, *args: object) -> None:
        self.seed_index: int | None = seed_index
        self.step_index: int | None = step_index
        super().__init__(message, *args)


class SingularJacobian(BetheException):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)
