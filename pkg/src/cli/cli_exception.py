class CliException(Exception):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class ConfigError(CliException):
    """Invalid run configuration; path points at the offending field, e.g. $.model.xi[2]."""

    def __init__(self, path: str, message: str, *args: object) -> None:
        self.path: str = path
        super().__init__(f"{path}: {message}", *args)


class StateNotFound(CliException):
    def __init__(self, label: str, known: list[str], *args: object) -> None:
        self.label: str = label
        self.known: list[str] = known
        super().__init__(f"no state labelled {label!r}; known states: {', '.join(known) or 'none'}", *args)
