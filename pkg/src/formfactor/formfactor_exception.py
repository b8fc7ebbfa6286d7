class FormFactorException(Exception):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class AllZero(FormFactorException):
    """Every component of the Omega vector vanishes: the two states share all their roots."""

    def __init__(self, max_abs: float, *args: object) -> None:
        self.max_abs: float = max_abs
        super().__init__(f"Omega vector vanishes (max |Omega| = {max_abs:.3e}); off-diagonal formula does not apply", *args)


class SiteOutOfRange(FormFactorException):
    def __init__(self, m: int, L: int, *args: object) -> None:
        self.m: int = m
        self.L: int = L
        super().__init__(f"site {m} outside 1..{L}", *args)


class StateMismatch(FormFactorException):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)
