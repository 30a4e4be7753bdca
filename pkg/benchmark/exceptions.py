"""
Exception hierarchy for the benchmark toolkit.

Every error carries an ``exit_code`` so management commands can map it onto
the CLI contract:

- 1: I/O or data error (unreadable dataset, unusable image, ...)
- 2: usage error (unknown estimator, invalid option value, ...)
- 3: validation error (submission coverage, arity, invalid estimate, ...)
"""


class BenchmarkError(Exception):
    """Root of all toolkit errors."""

    exit_code = 1


# --- Data errors (exit code 1) ---

class DataError(BenchmarkError):
    exit_code = 1


class MissingFile(DataError):
    pass


class CorruptRaster(DataError):
    pass


class SchemaMismatch(DataError):
    """The JSON sidecar lacks required fields or has malformed values."""


class GroundTruthInvalid(DataError):
    """A SpyderCube face ground truth is zero or has non-positive components."""


class EmptyUsableRegion(DataError):
    """No pixel survives masking, black-level and saturation clipping."""


class DegenerateGradient(DataError):
    pass


class EmptySample(DataError):
    pass


class EmptyDataset(DataError):
    pass


class EmptyTrack(DataError):
    """A track has no images, so there is nothing to estimate or score."""


class MalformedLeaderboard(DataError):
    pass


# --- Usage errors (exit code 2) ---

class UsageError(BenchmarkError):
    exit_code = 2


class UnknownEstimator(UsageError):
    pass


class InvalidFraction(UsageError):
    pass


class InvalidConfig(UsageError):
    pass


# --- Validation errors (exit code 3) ---

class ValidationFailure(BenchmarkError):
    exit_code = 3


class ZeroVector(ValidationFailure):
    pass


class NonPositiveComponent(ValidationFailure):
    pass


class ArityMismatch(ValidationFailure):
    pass


class MissingImageId(ValidationFailure):
    pass


class ExtraImageId(ValidationFailure):
    pass


class MalformedSubmission(ValidationFailure):
    pass


class SubmissionLimitExceeded(ValidationFailure):
    pass
