"""Exception hierarchy shared across the toolkit."""


class DriveQAError(Exception):
    """Base class for all toolkit errors."""


class MalformedInput(DriveQAError):
    """Input bytes are not syntactically valid (e.g. broken JSON)."""


class SchemaViolation(DriveQAError):
    """Input parses but breaks a schema invariant.

    Carries the path of the offending field so callers can report
    exactly where a scene file went wrong.
    """

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class UnknownObject(DriveQAError):
    """Requested object id is not present at the given frame."""


class HorizonOutOfRange(DriveQAError):
    """Frame index plus horizon exceeds the scene length."""


class TrackGap(DriveQAError):
    """Object is missing at an intermediate frame of the requested window."""


class EmptyScene(DriveQAError):
    """Scene has no frames eligible for generation."""


class TemplateInputMismatch(DriveQAError):
    """Chain builder inputs are inconsistent with the template's task."""


class EmptyInput(DriveQAError):
    """Chain text is empty or whitespace-only."""


class MalformedToken(DriveQAError):
    """A visual-element token does not match the canonical grammar."""


class EmptyChain(DriveQAError):
    """A reasoning chain with zero steps was passed to the scorer."""


class ProviderUnavailable(DriveQAError):
    """Remote embedding service cannot be reached or returned an error."""


class DimensionMismatch(DriveQAError):
    """Embedding vectors disagree on provider or dimension."""


class LengthMismatch(DriveQAError):
    """Trajectories passed to the displacement metric differ in length."""


class KindMismatch(DriveQAError):
    """Visual elements of different kinds cannot be compared."""


class CorpusTooSmall(DriveQAError):
    """Corpus-level metric needs at least two entries."""


class SingleScene(DriveQAError):
    """A dataset with a single scene cannot be split by scene."""
