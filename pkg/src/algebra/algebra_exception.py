class AlgebraException(Exception):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class PoleError(AlgebraException):
    """A rational factor was evaluated too close to one of its poles."""

    def __init__(self, factor: str, x: complex, y: complex, *args: object) -> None:
        self.factor: str = factor
        self.x: complex = x
        self.y: complex = y
        super().__init__(f"pole of {factor} at ({x}, {y})", *args)


class SizeMismatch(AlgebraException):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class SizeLimit(AlgebraException):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class DistinctnessError(AlgebraException):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)
