"""Content mediation enabler: on-demand transcoding keyed by device profile.

A variant is identified by (original CRID, profile hash). The pair is claimed
in-process before the backend starts, so concurrent requests for the same
variant share one job and the backend runs exactly once; requests arriving
after completion short-circuit on the registry without touching the backend.
"""

from __future__ import annotations

import threading
import urllib.parse
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path

from .crid import Crid, CridAllocator, CridParseError, parse_crid, transcoded_filename
from .errors import NotFoundError, TranscodeError, ValidationError
from .feeds import fetch_bytes
from .jobs import JobKind, JobRecord, JobStore, WorkerPool
from .registry import ContentRecord, Registry
from .storage import require_file, resolve_storage_path
from .transcode import TranscodeTarget, TranscoderBackend


@dataclass(frozen=True)
class TranscodingInfo:
    """Either a registered deviceId or an inline profile; never both."""

    device_id: str | None = None
    width: int | None = None
    height: int | None = None
    video_encoding: str | None = None
    audio_encoding: str | None = None

    def resolve(self, registry: Registry) -> TranscodeTarget:
        inline = (self.width, self.height, self.video_encoding, self.audio_encoding)
        if self.device_id is not None:
            if any(v is not None for v in inline):
                raise ValidationError("transcodingInfo: give deviceId or inline fields, not both")
            try:
                profile = registry.get_device_profile(self.device_id)
            except NotFoundError as exc:
                raise ValidationError(f"transcodingInfo: unknown deviceId {self.device_id!r}") from exc
            return TranscodeTarget(
                width=profile.width,
                height=profile.height,
                video_encoding=profile.video_encoding,
                audio_encoding=profile.audio_encoding,
                device_class=profile.device_class,
                device_id=profile.device_id,
            )
        if any(v is None for v in inline):
            raise ValidationError(
                "transcodingInfo: inline form needs width, height, videoEncoding, audioEncoding"
            )
        return TranscodeTarget(
            width=self.width,  # type: ignore[arg-type]
            height=self.height,  # type: ignore[arg-type]
            video_encoding=self.video_encoding,  # type: ignore[arg-type]
            audio_encoding=self.audio_encoding,  # type: ignore[arg-type]
        )


@dataclass(frozen=True)
class ExistenceResult:
    exists: bool
    location: str | None = None
    crid: Crid | None = None


def canonicalize_xml(payload: bytes) -> bytes:
    """The one serialization used for all transformed metadata output."""
    root = ET.fromstring(payload)
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


def apply_transformation_rule(source_xml: bytes, rule_xml: str) -> bytes:
    """Apply a flat rename/drop rule document to metadata XML.

    Rule grammar: <Rules><Rename from=".." to=".."/><Drop name=".."/></Rules>,
    applied in rule order; mappings naming absent elements are no-ops.
    """
    try:
        rules = ET.fromstring(rule_xml)
    except ET.ParseError as exc:
        raise ValidationError(f"malformed transformation rule: {exc}") from exc
    if rules.tag != "Rules":
        raise ValidationError(f"transformation rule root must be <Rules>, got <{rules.tag}>")
    root = ET.fromstring(source_xml)
    for rule in rules:
        if rule.tag == "Rename":
            source_tag, target_tag = rule.get("from"), rule.get("to")
            if not source_tag or not target_tag:
                raise ValidationError("<Rename> needs 'from' and 'to' attributes")
            for el in root.iter(source_tag):
                el.tag = target_tag
            if root.tag == source_tag:
                root.tag = target_tag
        elif rule.tag == "Drop":
            name = rule.get("name")
            if not name:
                raise ValidationError("<Drop> needs a 'name' attribute")
            for parent in root.iter():
                for child in list(parent):
                    if child.tag == name:
                        parent.remove(child)
        else:
            raise ValidationError(f"unknown transformation rule <{rule.tag}>")
    ET.indent(root)
    return ET.tostring(root, encoding="utf-8", xml_declaration=True)


class MediationService:
    def __init__(
        self,
        registry: Registry,
        allocator: CridAllocator,
        job_store: JobStore,
        pool: WorkerPool,
        data_dir: Path,
        backend: TranscoderBackend,
    ):
        self.registry = registry
        self.allocator = allocator
        self.job_store = job_store
        self.pool = pool
        self.data_dir = Path(data_dir)
        self.temp_root = self.data_dir / "mediator-tmp"
        self.backend = backend
        self._claims: dict[tuple[str, str], str] = {}
        self._claim_lock = threading.Lock()

    def _resolve_original(self, src: str) -> ContentRecord:
        """Map a CRID or storage/source URL to the original content record."""
        record: ContentRecord | None
        try:
            record = self.registry.get_content_record(parse_crid(src))
        except CridParseError:
            record = self.registry.find_by_location(src)
            if record is None:
                raise NotFoundError(f"no registered content for {src!r}")
        if record.is_variant:
            record = self.registry.get_content_record(record.original_crid)  # type: ignore[arg-type]
        return record

    def is_exist_content(self, src: str, info: TranscodingInfo) -> ExistenceResult:
        original = self._resolve_original(src)
        target = info.resolve(self.registry)
        variant = self.registry.find_variant(original.crid, target.profile_hash)
        if variant is None:
            return ExistenceResult(exists=False)
        return ExistenceResult(exists=True, location=variant.storage_location, crid=variant.crid)

    def transcode_content(self, reference: str, src: str, info: TranscodingInfo) -> str:
        original = self._resolve_original(src)
        target = info.resolve(self.registry)
        source_path = require_file(
            resolve_storage_path(self.data_dir, original.storage_location),
            f"source content for {original.crid.render()}",
        )
        key = (original.crid.render(), target.profile_hash)
        with self._claim_lock:
            variant = self.registry.find_variant(original.crid, target.profile_hash)
            if variant is not None:
                job = self.job_store.create(
                    JobKind.TRANSCODE, reference=reference, detail="variant already mediated"
                )
                self.job_store.mark_running(job.event_identifier)
                self.job_store.mark_succeeded(
                    job.event_identifier,
                    detail=f"existing variant {variant.crid.render()}",
                    result_location=variant.storage_location,
                )
                return job.event_identifier
            claimed = self._claims.get(key)
            if claimed is not None:
                return claimed
            job = self.job_store.create(
                JobKind.TRANSCODE,
                reference=reference,
                detail=f"transcoding {original.crid.render()} for {target.profile_hash}",
            )
            self._claims[key] = job.event_identifier

        def body() -> tuple[str, str]:
            try:
                return self._run_transcode(original, source_path, target)
            finally:
                with self._claim_lock:
                    self._claims.pop(key, None)

        self.pool.submit(job, body)
        return job.event_identifier

    def _run_transcode(
        self, original: ContentRecord, source_path: Path, target: TranscodeTarget
    ) -> tuple[str, str]:
        crid = self.allocator.allocate()
        filename = transcoded_filename(source_path.name, crid, target.video_encoding)
        destination = self.temp_root / crid.serial / filename
        try:
            self.backend.transcode(source_path, destination, target)
        except TranscodeError:
            destination.unlink(missing_ok=True)
            raise
        self.registry.upsert_content_record(
            ContentRecord(
                crid=crid,
                title=original.title,
                source_url=original.storage_location,
                storage_location=str(destination),
                original_crid=original.crid,
                profile_hash=target.profile_hash,
            )
        )
        self.registry.increment_mediation_count(original.crid)
        return f"mediated {original.crid.render()} into {crid.render()}", str(destination)

    def transcoding_status(self, event_identifier: str) -> JobRecord:
        return self.job_store.get(event_identifier)

    def transform_metadata(self, reference: str, src_metadata_url: str, rule_xml: str) -> str:
        job = self.job_store.create(
            JobKind.METADATA_TRANSFORM,
            reference=reference,
            detail=f"transforming {src_metadata_url}",
        )

        def body() -> tuple[str, str]:
            path = resolve_storage_path(self.data_dir, src_metadata_url)
            source = (
                fetch_bytes(src_metadata_url)
                if urllib.parse.urlparse(src_metadata_url).scheme == "file"
                else require_file(path, "metadata document").read_bytes()
            )
            try:
                transformed = apply_transformation_rule(source, rule_xml)
            except ET.ParseError as exc:
                raise ValidationError(f"malformed metadata document: {exc}") from exc
            output = path.with_suffix(".transformed.xml")
            output.write_bytes(transformed)
            return f"transformed {src_metadata_url}", str(output)

        self.pool.submit(job, body)
        return job.event_identifier
