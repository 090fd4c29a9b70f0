"""Exceptions raised by ``voronav``.

Every error carries a ``code`` which the command line uses as its exit status.
"""


class VoroNavError(Exception):
    """Base class for all errors raised by ``voronav``.

    Args:
        *args: Passed to ``Exception()``
        code (int): Exit status used by the command line. Defaults to 1.
    """
    def __init__(self, *args, code=1):
        super().__init__(*args)
        self.code = code


class ParseError(VoroNavError):
    """A file or action name could not be parsed."""


class ValidationError(VoroNavError):
    """Input parsed correctly but violates a scene or config invariant."""
    def __init__(self, *args, code=2):
        super().__init__(*args, code=code)


class OutOfBounds(VoroNavError):
    """An observed cell falls outside the semantic map."""


class EmptyFreeSpace(VoroNavError):
    """A free mask contains no free cells."""


class EmptySkeleton(VoroNavError):
    """A skeleton mask contains no pixels."""


class DegenerateRay(VoroNavError):
    """A neighbor node coincides with the agent node."""


class MissingObservation(VoroNavError):
    """No observation was stored for a panorama sector."""


class RemoteError(VoroNavError):
    """The remote chat-completion endpoint failed."""


class ScoreParseError(ParseError):
    """A scorer reply did not contain a usable ``scores: [...]`` line."""


class NoNeighbors(VoroNavError):
    """The agent node has no neighbor nodes to choose from."""


class UnreachableGoal(VoroNavError):
    """The fast marching field is infinite at the agent cell."""


class GenerationFailure(VoroNavError):
    """The scene generator could not produce a valid scene."""
