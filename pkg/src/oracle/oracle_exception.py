class OracleException(Exception):
    def __init__(self, *args: object) -> None:
        super().__init__(*args)


class NoMatch(OracleException):
    """No eigenvalue of the sector transfer matrix follows the Bethe eigenvalue at every sample point."""

    def __init__(self, label: str, samples: int, *args: object) -> None:
        self.label: str = label
        self.samples: int = samples
        super().__init__(f"no transfer-matrix eigenvalue matches state {label or '?'} at {samples} sample points", *args)


class Degenerate(OracleException):
    def __init__(self, label: str, candidates: int, *args: object) -> None:
        self.label: str = label
        self.candidates: int = candidates
        super().__init__(f"{candidates} eigenvalues match state {label or '?'} at every sample point", *args)
