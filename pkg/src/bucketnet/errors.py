"""Exception types shared across the package.

Every error raised by bucketnet code derives from :class:`BucketNetError`,
so callers (the CLI, the service) can map failures to exit codes and HTTP
statuses in one place.
"""

from __future__ import annotations


class BucketNetError(Exception):
    """Base class for all bucketnet errors."""


# --- graph -----------------------------------------------------------------

class InvalidBucketId(BucketNetError):
    """Bucket id is empty or contains characters outside [A-Za-z0-9_-]."""


class UnknownBucket(BucketNetError):
    """An operation referenced a bucket that is not in the network."""


class SelfLink(BucketNetError):
    """A link from a bucket to itself was requested; self-links are forbidden."""


class NonPositiveDelta(BucketNetError):
    """Reinforcement amounts must be strictly positive."""


# --- reinforcement engine --------------------------------------------------

class SessionMismatch(BucketNetError):
    """Event carries a session id different from the session it was applied to."""


class SelfHop(BucketNetError):
    """A traversal event names the same bucket as origin and destination."""


# --- hierarchy / correlation -----------------------------------------------

class EmptyTree(BucketNetError):
    """The hierarchy has no edges, so weights cannot be normalized."""


class TargetNotInTree(BucketNetError):
    """Relationship weight requested for a bucket absent from the hierarchy."""


class InsufficientData(BucketNetError):
    """Not enough shared data points to compute a meaningful statistic."""


class ConstantSeries(BucketNetError):
    """Correlation is undefined when one of the series has zero variance."""


# --- bucket store ----------------------------------------------------------

class StoreError(BucketNetError):
    """Base class for persistence failures."""


class NotFound(StoreError):
    """Bucket file does not exist."""


class MalformedXml(StoreError):
    """Bucket file is not well-formed XML."""


class SchemaViolation(StoreError):
    """Bucket file is valid XML but breaks the bucket schema."""


class DuplicateElement(StoreError):
    """Element id already present in the bucket."""


class IoFailure(StoreError):
    """Underlying filesystem write failed."""


# --- service ---------------------------------------------------------------

class RequestParseError(BucketNetError):
    """A raw URL could not be parsed into a method request."""


class MalformedRedirect(RequestParseError):
    """Redirect argument is unparseable or nested too deeply."""


class UnknownMethod(RequestParseError):
    """Request names a bucket method that does not exist."""


# --- simulator / cli -------------------------------------------------------

class InvalidParameters(BucketNetError):
    """Configuration values are out of range or mutually inconsistent."""
