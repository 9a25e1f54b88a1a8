"""Path resolution between registry storage locations and the data directory."""

from __future__ import annotations

import hashlib
import urllib.parse
import urllib.request
from pathlib import Path

from .errors import NotFoundError, ValidationError

MEDIA_URL_PREFIX = "/media/"


def resolve_storage_path(data_dir: Path, location: str) -> Path:
    """Map a storageLocation (absolute path, file:// URL, or public /media URL)
    onto the local filesystem."""
    if location.startswith(MEDIA_URL_PREFIX):
        candidate = (Path(data_dir) / location.lstrip("/")).resolve()
        media_root = (Path(data_dir) / "media").resolve()
        if media_root not in candidate.parents and candidate != media_root:
            raise ValidationError(f"media location escapes the media store: {location!r}")
        return candidate
    parsed = urllib.parse.urlparse(location)
    if parsed.scheme == "file":
        return Path(urllib.request.url2pathname(parsed.path))
    if parsed.scheme in ("http", "https"):
        raise ValidationError(f"remote location not resolvable locally: {location!r}")
    return Path(location)


def require_file(path: Path, what: str) -> Path:
    if not path.is_file():
        raise NotFoundError(f"{what} not found: {path}")
    return path


def file_checksum(path: Path) -> str:
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            digest.update(chunk)
    return digest.hexdigest()
