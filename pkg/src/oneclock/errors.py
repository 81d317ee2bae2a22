"""Exception types shared across the package."""


class OneClockError(Exception):
    """Base class for all package errors."""


class InputError(OneClockError, ValueError):
    """Malformed input: bad syntax, bad letters, broken invariants."""

    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)


class PreconditionError(OneClockError):
    """An operation was called on an argument outside its domain."""


class NotLoopFreeError(PreconditionError):
    """The automaton has a cycle of reset edges between islands."""

    def __init__(self, cycle):
        self.cycle = list(cycle)
        super().__init__("reset cycle between islands: " + " -> ".join(self.cycle))


class NotConjunctiveDisjunctiveError(PreconditionError):
    """The automaton admits no conjunctive/disjunctive location partition."""

    def __init__(self, location, letter=None, reason=""):
        self.location = location
        self.letter = letter
        if location is None:
            msg = "no conjunctive/disjunctive partition of the locations exists"
        else:
            msg = f"location {location!r} fits neither shape"
        if letter is not None:
            msg += f" on letter {sorted(letter)}"
        if reason:
            msg += f": {reason}"
        super().__init__(msg)


class UnguardedError(PreconditionError):
    """A recursion variable is used without a strict-future modality above it."""


class ResourceError(OneClockError):
    """A configured cap was exceeded; this is not a verdict."""
