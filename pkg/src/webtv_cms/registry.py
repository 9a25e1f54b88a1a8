"""Device profiles, content records, and their XML-backed registry.

Each profile and record is one XML document under the data directory; an
append-only journal records every committed mutation. The registry serializes
writes internally, so the dedup check-and-insert for transcoded variants is a
single atomic step.
"""

from __future__ import annotations

import datetime as dt
import enum
import re
import threading
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field, replace
from pathlib import Path

from .crid import Crid, normalize_codec, parse_crid
from .errors import ConflictError, NotFoundError, StorageError, ValidationError

_DEVICE_ID_RE = re.compile(r"^[A-Za-z0-9._-]+$")


class DeviceClass(str, enum.Enum):
    PC = "PC"
    IPAD = "iPad"
    IPHONE = "iPhone"

    @classmethod
    def from_text(cls, text: str) -> "DeviceClass":
        for member in cls:
            if member.value.lower() == text.lower():
                return member
        raise ValidationError(f"unknown device class: {text!r}")


@dataclass(frozen=True)
class DeviceProfile:
    device_id: str
    device_class: DeviceClass
    width: int
    height: int
    video_encoding: str
    audio_encoding: str

    def __post_init__(self) -> None:
        if not _DEVICE_ID_RE.match(self.device_id):
            raise ValidationError(f"deviceId must match [A-Za-z0-9._-]+, got {self.device_id!r}")
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(
                f"profile resolution must be positive, got {self.width}x{self.height}"
            )
        if not self.video_encoding or not self.audio_encoding:
            raise ValidationError("video/audio encodings must be nonempty")

    @property
    def profile_hash(self) -> str:
        """Dedup identity: resolution plus normalized codec pair."""
        return profile_hash(self.width, self.height, self.video_encoding, self.audio_encoding)


def profile_hash(width: int, height: int, video_encoding: str, audio_encoding: str) -> str:
    return f"{width}x{height}-{normalize_codec(video_encoding)}-{normalize_codec(audio_encoding)}"


@dataclass(frozen=True)
class ContentRecord:
    crid: Crid
    title: str
    source_url: str
    storage_location: str
    original_crid: Crid | None = None
    profile_hash: str | None = None
    created_at: dt.datetime = field(default_factory=lambda: dt.datetime.now(dt.timezone.utc))
    updated_at: dt.datetime | None = None
    view_count: int = 0
    mediation_count: int = 0

    def __post_init__(self) -> None:
        if (self.original_crid is None) != (self.profile_hash is None):
            raise ValidationError(
                "transcoded records carry both originalCrid and profileHash; originals neither"
            )
        if self.view_count < 0 or self.mediation_count < 0:
            raise ValidationError("counters must be non-negative")

    @property
    def is_variant(self) -> bool:
        return self.original_crid is not None


def _text(parent: ET.Element, tag: str, value: str) -> None:
    el = ET.SubElement(parent, tag)
    el.text = value


def _require(root: ET.Element, tag: str) -> str:
    el = root.find(tag)
    if el is None or el.text is None:
        raise StorageError(f"document missing <{tag}>")
    return el.text


def profile_to_xml(profile: DeviceProfile) -> bytes:
    root = ET.Element("DeviceProfile")
    _text(root, "DeviceID", profile.device_id)
    _text(root, "DeviceClass", profile.device_class.value)
    _text(root, "Width", str(profile.width))
    _text(root, "Height", str(profile.height))
    _text(root, "VideoEncoding", profile.video_encoding)
    _text(root, "AudioEncoding", profile.audio_encoding)
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def profile_from_xml(data: bytes) -> DeviceProfile:
    root = ET.fromstring(data)
    return DeviceProfile(
        device_id=_require(root, "DeviceID"),
        device_class=DeviceClass.from_text(_require(root, "DeviceClass")),
        width=int(_require(root, "Width")),
        height=int(_require(root, "Height")),
        video_encoding=_require(root, "VideoEncoding"),
        audio_encoding=_require(root, "AudioEncoding"),
    )


def record_to_xml(record: ContentRecord) -> bytes:
    root = ET.Element("ContentRecord")
    _text(root, "Crid", record.crid.render())
    _text(root, "Title", record.title)
    _text(root, "SourceURL", record.source_url)
    _text(root, "StorageLocation", record.storage_location)
    if record.original_crid is not None:
        _text(root, "OriginalCrid", record.original_crid.render())
        _text(root, "ProfileHash", record.profile_hash or "")
    _text(root, "CreatedAt", record.created_at.isoformat())
    if record.updated_at is not None:
        _text(root, "UpdatedAt", record.updated_at.isoformat())
    _text(root, "ViewCount", str(record.view_count))
    _text(root, "MediationCount", str(record.mediation_count))
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def record_from_xml(data: bytes) -> ContentRecord:
    root = ET.fromstring(data)
    original = root.findtext("OriginalCrid")
    updated = root.findtext("UpdatedAt")
    return ContentRecord(
        crid=parse_crid(_require(root, "Crid")),
        title=root.findtext("Title") or "",
        source_url=root.findtext("SourceURL") or "",
        storage_location=root.findtext("StorageLocation") or "",
        original_crid=parse_crid(original) if original else None,
        profile_hash=root.findtext("ProfileHash") if original else None,
        created_at=dt.datetime.fromisoformat(_require(root, "CreatedAt")),
        updated_at=dt.datetime.fromisoformat(updated) if updated else None,
        view_count=int(root.findtext("ViewCount") or 0),
        mediation_count=int(root.findtext("MediationCount") or 0),
    )


def _record_key(crid: Crid) -> str:
    return f"{crid.authority}__{crid.service}__{crid.serial}"


def _atomic_write(path: Path, data: bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_bytes(data)
    tmp.replace(path)


class Registry:
    """In-memory maps over a directory of XML documents.

    All mutations run under one lock; every committed change lands on disk
    before the call returns, so a restarted process sees the same state.
    """

    def __init__(self, data_dir: Path):
        self.data_dir = Path(data_dir)
        self._profiles_dir = self.data_dir / "profiles"
        self._records_dir = self.data_dir / "records"
        self._journal_path = self.data_dir / "registry-journal.log"
        self._lock = threading.RLock()
        self._profiles: dict[str, DeviceProfile] = {}
        self._records: dict[str, ContentRecord] = {}
        self._variant_index: dict[tuple[str, str], str] = {}
        self._load()

    def _load(self) -> None:
        if self._profiles_dir.is_dir():
            for doc in sorted(self._profiles_dir.glob("*.xml")):
                profile = profile_from_xml(doc.read_bytes())
                self._profiles[profile.device_id] = profile
        if self._records_dir.is_dir():
            for doc in sorted(self._records_dir.glob("*.xml")):
                record = record_from_xml(doc.read_bytes())
                key = _record_key(record.crid)
                self._records[key] = record
                if record.is_variant:
                    pair = (record.original_crid.render(), record.profile_hash)  # type: ignore[union-attr]
                    self._variant_index[pair] = key

    def _journal(self, action: str, subject: str) -> None:
        self.data_dir.mkdir(parents=True, exist_ok=True)
        stamp = dt.datetime.now(dt.timezone.utc).isoformat()
        with self._journal_path.open("a", encoding="utf-8") as fh:
            fh.write(f"{stamp}\t{action}\t{subject}\n")

    # ---- device profiles ----

    def put_device_profile(self, profile: DeviceProfile) -> DeviceProfile:
        """Upsert by deviceId; the XML document replaces any prior one."""
        with self._lock:
            _atomic_write(self._profiles_dir / f"{profile.device_id}.xml", profile_to_xml(profile))
            self._profiles[profile.device_id] = profile
            self._journal("PUT-PROFILE", profile.device_id)
            return profile

    def get_device_profile(self, device_id: str) -> DeviceProfile:
        with self._lock:
            profile = self._profiles.get(device_id)
            if profile is None:
                raise NotFoundError(f"no device profile {device_id!r}")
            return profile

    def delete_device_profile(self, device_id: str) -> None:
        with self._lock:
            if device_id not in self._profiles:
                raise NotFoundError(f"no device profile {device_id!r}")
            del self._profiles[device_id]
            doc = self._profiles_dir / f"{device_id}.xml"
            if doc.exists():
                doc.unlink()
            self._journal("DELETE-PROFILE", device_id)

    def list_device_profiles(self) -> list[DeviceProfile]:
        with self._lock:
            return sorted(self._profiles.values(), key=lambda p: p.device_id)

    # ---- content records ----

    def upsert_content_record(self, record: ContentRecord) -> ContentRecord:
        """Insert or replace by CRID, enforcing variant-pair uniqueness atomically."""
        with self._lock:
            key = _record_key(record.crid)
            if record.is_variant:
                pair = (record.original_crid.render(), record.profile_hash)  # type: ignore[union-attr]
                holder = self._variant_index.get(pair)
                if holder is not None and holder != key:
                    raise ConflictError(
                        f"variant for {pair[0]} with profile {pair[1]} already registered"
                    )
            previous = self._records.get(key)
            _atomic_write(self._records_dir / f"{key}.xml", record_to_xml(record))
            self._records[key] = record
            if previous is not None and previous.is_variant:
                self._variant_index.pop(
                    (previous.original_crid.render(), previous.profile_hash), None  # type: ignore[union-attr]
                )
            if record.is_variant:
                self._variant_index[(record.original_crid.render(), record.profile_hash)] = key  # type: ignore[union-attr]
            self._journal("UPSERT-RECORD", record.crid.render())
            return record

    def get_content_record(self, crid: Crid) -> ContentRecord:
        with self._lock:
            record = self._records.get(_record_key(crid))
            if record is None:
                raise NotFoundError(f"no content record for {crid.render()}")
            return record

    def delete_content_record(self, crid: Crid) -> None:
        with self._lock:
            key = _record_key(crid)
            record = self._records.get(key)
            if record is None:
                raise NotFoundError(f"no content record for {crid.render()}")
            del self._records[key]
            if record.is_variant:
                self._variant_index.pop(
                    (record.original_crid.render(), record.profile_hash), None  # type: ignore[union-attr]
                )
            doc = self._records_dir / f"{key}.xml"
            if doc.exists():
                doc.unlink()
            self._journal("DELETE-RECORD", crid.render())

    def list_content_records(self) -> list[ContentRecord]:
        with self._lock:
            return sorted(self._records.values(), key=lambda r: r.crid.render())

    def find_variant(self, original: Crid, profile_hash_value: str) -> ContentRecord | None:
        with self._lock:
            key = self._variant_index.get((original.render(), profile_hash_value))
            return self._records.get(key) if key is not None else None

    def variants_of(self, original: Crid) -> list[ContentRecord]:
        with self._lock:
            rendered = original.render()
            return [
                r for r in self._records.values()
                if r.original_crid is not None and r.original_crid.render() == rendered
            ]

    def find_by_location(self, location: str) -> ContentRecord | None:
        """Exact match on storageLocation, falling back to sourceUrl."""
        with self._lock:
            for record in self._records.values():
                if record.storage_location == location:
                    return record
            for record in self._records.values():
                if record.source_url == location:
                    return record
            return None

    def find_by_serial(self, serial: str) -> ContentRecord | None:
        with self._lock:
            for record in self._records.values():
                if record.crid.serial == serial:
                    return record
            return None

    # ---- counters / field updates ----

    def _mutate(self, crid: Crid, **changes) -> ContentRecord:
        with self._lock:
            record = self.get_content_record(crid)
            updated = replace(record, **changes)
            _atomic_write(self._records_dir / f"{_record_key(crid)}.xml", record_to_xml(updated))
            self._records[_record_key(crid)] = updated
            self._journal("UPSERT-RECORD", crid.render())
            return updated

    def increment_mediation_count(self, crid: Crid) -> ContentRecord:
        with self._lock:
            record = self.get_content_record(crid)
            return self._mutate(crid, mediation_count=record.mediation_count + 1)

    def increment_view_count(self, crid: Crid) -> ContentRecord:
        with self._lock:
            record = self.get_content_record(crid)
            return self._mutate(crid, view_count=record.view_count + 1)

    def set_storage_location(self, crid: Crid, location: str) -> ContentRecord:
        return self._mutate(
            crid, storage_location=location, updated_at=dt.datetime.now(dt.timezone.utc)
        )

    def touch(self, crid: Crid) -> ContentRecord:
        return self._mutate(crid, updated_at=dt.datetime.now(dt.timezone.utc))
