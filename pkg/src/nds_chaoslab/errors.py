"""Exception types raised across the package."""


class NDSError(Exception):
    """Base class for every error raised by nds_chaoslab."""


class NonInvertibleMap(NDSError):
    """An inverse (backward shift, negative power) was requested of a non-homeomorphism."""


class DomainViolation(NDSError):
    """A point does not belong to the space a map or metric acts on."""


class EmptyInput(NDSError):
    pass


class HorizonExceeded(NDSError):
    pass


class HorizonTooSmall(NDSError):
    pass


class EmptyGrid(NDSError):
    pass


class UnsupportedSystem(NDSError):
    pass


class HypothesisUnmet(NDSError):
    """A theorem's hypothesis could not be confirmed numerically.

    Distinct from an experiment failure: the experiment was not run.
    """


class ParseError(NDSError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        loc = f"line {line}, column {column}: " if line is not None else ""
        super().__init__(f"{loc}{message}")


class ValidationError(NDSError):
    """Collects every problem found in a configuration, not only the first."""

    def __init__(self, problems):
        # problems: list of (field, message)
        self.problems = list(problems)
        text = "; ".join(f"{field}: {msg}" for field, msg in self.problems)
        super().__init__(text)
