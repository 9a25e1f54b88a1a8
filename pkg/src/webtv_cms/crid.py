"""Content reference identifiers (CRIDs) and the transcoded-filename convention.

A CRID is the system-wide content key, rendered as
``crid://<authority>/<service>/<serial>`` where the serial is the creation
date (YYYYMMDD) followed by a 4-digit per-day counter.
"""

from __future__ import annotations

import datetime as dt
import re
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import ValidationError

CRID_SCHEME = "crid"
MAX_DAILY_COUNTER = 9999

_AUTHORITY_RE = re.compile(r"^[A-Za-z0-9]([A-Za-z0-9.-]*[A-Za-z0-9])?$")
_SERVICE_RE = re.compile(r"^[A-Za-z0-9._~-]+$")
_SERIAL_RE = re.compile(r"^[0-9]{8,}$")
_CRID_RE = re.compile(r"^(?P<scheme>[a-z][a-z0-9+.-]*)://(?P<authority>[^/]*)/(?P<service>[^/]*)/(?P<serial>[^/]*)$")


class CridParseError(ValidationError):
    """Text does not match the CRID grammar; ``part`` names the offender."""

    def __init__(self, part: str, message: str):
        super().__init__(f"invalid CRID {part}: {message}")
        self.part = part


class CridOverflowError(ValidationError):
    """More than MAX_DAILY_COUNTER identifiers requested in one day."""


@dataclass(frozen=True, order=True)
class Crid:
    authority: str
    service: str
    serial: str

    def render(self) -> str:
        return f"{CRID_SCHEME}://{self.authority}/{self.service}/{self.serial}"

    def __str__(self) -> str:
        return self.render()


def generate_crid(authority: str, service: str, date: dt.date, counter: int) -> Crid:
    """Build the CRID for the given day and per-day counter value.

    The counter starts at 1 each day; values above MAX_DAILY_COUNTER do not
    fit the 4-digit serial suffix and raise CridOverflowError.
    """
    if not _AUTHORITY_RE.match(authority):
        raise ValidationError(f"invalid CRID authority: {authority!r}")
    if not _SERVICE_RE.match(service):
        raise ValidationError(f"invalid CRID service: {service!r}")
    if counter < 1:
        raise ValidationError(f"CRID counter must be >= 1, got {counter}")
    if counter > MAX_DAILY_COUNTER:
        raise CridOverflowError(
            f"per-day CRID counter exhausted: {counter} > {MAX_DAILY_COUNTER}"
        )
    serial = f"{date:%Y%m%d}{counter:04d}"
    return Crid(authority=authority, service=service, serial=serial)


def parse_crid(text: str) -> Crid:
    """Parse canonical CRID text; raises CridParseError naming the bad part."""
    m = _CRID_RE.match(text)
    if m is None:
        if "://" not in text:
            raise CridParseError("scheme", f"missing '<scheme>://' in {text!r}")
        raise CridParseError("structure", f"expected crid://<authority>/<service>/<serial>, got {text!r}")
    if m.group("scheme") != CRID_SCHEME:
        raise CridParseError("scheme", f"expected '{CRID_SCHEME}', got {m.group('scheme')!r}")
    authority = m.group("authority")
    if not _AUTHORITY_RE.match(authority):
        raise CridParseError("authority", f"not a DNS name: {authority!r}")
    service = m.group("service")
    if not _SERVICE_RE.match(service):
        raise CridParseError("service", f"not a path segment: {service!r}")
    serial = m.group("serial")
    if not serial:
        raise CridParseError("serial", "empty serial")
    if not _SERIAL_RE.match(serial):
        raise CridParseError("serial", f"expected YYYYMMDD-prefixed digits, got {serial!r}")
    return Crid(authority=authority, service=service, serial=serial)


def normalize_codec(codec: str) -> str:
    """Lowercase alphanumeric form of a codec name ("H.264" -> "h264")."""
    return re.sub(r"[^a-z0-9]", "", codec.lower())


def transcoded_filename(original_filename: str, crid: Crid, video_encoding: str) -> str:
    """Name a transcoded file: stem, CRID serial, and codec joined by underscores.

    Only the last extension is split off and preserved; extensionless names
    stay extensionless.
    """
    if not original_filename:
        raise ValidationError("original filename must be nonempty")
    stem, dot, ext = original_filename.rpartition(".")
    if not stem:
        stem, ext = original_filename, ""
    codec = normalize_codec(video_encoding)
    base = f"{stem}_{crid.serial}_{codec}"
    return f"{base}.{ext}" if ext else base


class CridAllocator:
    """Thread-safe per-day counters with a small persisted state file.

    The state file keeps one "YYYYMMDD:last-counter" line per day seen, so
    identifiers stay unique across process restarts.
    """

    def __init__(self, authority: str, service: str, state_path: Path | None = None):
        self.authority = authority
        self.service = service
        self._state_path = state_path
        self._lock = threading.Lock()
        self._counters: dict[str, int] = {}
        if state_path is not None and state_path.exists():
            self._load(state_path)

    def _load(self, path: Path) -> None:
        for line in path.read_text(encoding="utf-8").splitlines():
            line = line.strip()
            if not line:
                continue
            day, _, count = line.partition(":")
            self._counters[day] = int(count)

    def _persist(self) -> None:
        if self._state_path is None:
            return
        self._state_path.parent.mkdir(parents=True, exist_ok=True)
        body = "".join(f"{day}:{count}\n" for day, count in sorted(self._counters.items()))
        tmp = self._state_path.with_suffix(".tmp")
        tmp.write_text(body, encoding="utf-8")
        tmp.replace(self._state_path)

    def allocate(self, date: dt.date | None = None) -> Crid:
        """Return the next unused CRID for the given (default today's) date."""
        day = date if date is not None else dt.date.today()
        key = f"{day:%Y%m%d}"
        with self._lock:
            counter = self._counters.get(key, 0) + 1
            crid = generate_crid(self.authority, self.service, day, counter)
            self._counters[key] = counter
            self._persist()
            return crid
