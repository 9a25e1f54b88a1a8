"""Shared exception types. The API layer maps these onto HTTP status codes."""

from __future__ import annotations


class CmsError(Exception):
    """Base class for all service errors."""


class ValidationError(CmsError):
    """Caller supplied an invalid argument; surfaced synchronously."""


class NotFoundError(CmsError):
    """The addressed entity does not exist."""


class ConflictError(CmsError):
    """The mutation would violate a uniqueness or lineage invariant."""


class AuthenticationError(CmsError):
    """Bad credentials or missing/expired session token."""


class ConfigurationError(CmsError):
    """Broken service configuration detected at startup."""


class StorageError(CmsError):
    """Persistence layer I/O failure."""


class FeedError(CmsError):
    """Base class for feed retrieval/parsing failures."""


class FeedUnreachableError(FeedError):
    """The feed URL could not be fetched."""


class NotAFeedError(FeedError):
    """The payload is not parseable XML."""


class UnsupportedFeedError(FeedError):
    """Parseable XML, but not an RSS 2.0 or ATOM 1.0 document."""


class TranscodeError(CmsError):
    """The transcoder backend reported failure."""


class SinkError(CmsError):
    """A deployment sink refused or failed the operation."""
