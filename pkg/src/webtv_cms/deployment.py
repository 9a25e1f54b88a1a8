"""Content deployment enabler: publish to the media store, mock remote sinks,
and share links over mock SNS accounts.

The media store is a directory served by the HTTP layer under /media. Remote
FTP and SNS deliveries are mocks that record every call, so tests can audit
exactly what would have left the system.
"""

from __future__ import annotations

import datetime as dt
import enum
import random
import shutil
import threading
from dataclasses import dataclass
from pathlib import Path

from .crid import Crid, CridAllocator, CridParseError, parse_crid
from .errors import ConflictError, NotFoundError, SinkError, ValidationError
from .jobs import JobKind, JobRecord, JobStore, WorkerPool
from .registry import ContentRecord, Registry
from .storage import MEDIA_URL_PREFIX, file_checksum, require_file, resolve_storage_path


class SinkKind(str, enum.Enum):
    MEDIA_STORE = "media"
    FTP_REMOTE = "ftp"
    SNS_TWITTER_LIKE = "twitter"
    SNS_ME2DAY_LIKE = "me2day"


class NothingToUpdateError(NotFoundError):
    """updateContent addressed a CRID that was never published."""


@dataclass(frozen=True)
class SharePost:
    account: str
    review: str
    content_url: str
    posted_at: dt.datetime
    post_id: str


class MediaStoreSink:
    """Local directory behind the public /media HTTP route."""

    def __init__(self, data_dir: Path):
        self.root = Path(data_dir) / "media"

    def put(self, src: Path, subpath: str) -> str:
        target = self.root / subpath
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_suffix(target.suffix + ".part")
        shutil.copyfile(src, tmp)
        tmp.replace(target)
        return MEDIA_URL_PREFIX + subpath

    def path_for(self, subpath: str) -> Path:
        return self.root / subpath


class FtpRemoteSink:
    """Mock FTP delivery: writes to a second directory and logs a transcript."""

    def __init__(self, data_dir: Path, host: str = "remote.mock"):
        self.root = Path(data_dir) / "ftp-remote"
        self.transcript_path = Path(data_dir) / "ftp-transcript.log"
        self.host = host

    def put(self, src: Path, subpath: str) -> str:
        target = self.root / subpath
        target.parent.mkdir(parents=True, exist_ok=True)
        shutil.copyfile(src, target)
        self.transcript_path.parent.mkdir(parents=True, exist_ok=True)
        with self.transcript_path.open("a", encoding="utf-8") as fh:
            fh.write(f"CONNECT {self.host}\n")
            fh.write(f"STOR {subpath} ({src.stat().st_size} bytes)\n")
            fh.write("QUIT\n")
        return f"ftp://{self.host}/{subpath}"


class MockSnsSink:
    """Records share posts in memory; post identifiers come from a seeded source."""

    def __init__(self, kind: SinkKind, rng: random.Random):
        self.kind = kind
        self._rng = rng
        self.posts: list[SharePost] = []
        self.fail_next: str | None = None

    def post(self, account: str, review: str, content_url: str) -> SharePost:
        if self.fail_next is not None:
            reason, self.fail_next = self.fail_next, None
            raise SinkError(f"{self.kind.value} sink failure: {reason}")
        share = SharePost(
            account=account,
            review=review,
            content_url=content_url,
            posted_at=dt.datetime.now(dt.timezone.utc),
            post_id=f"{self.kind.value}-{self._rng.getrandbits(48):012x}",
        )
        self.posts.append(share)
        return share


def parse_destination(dst_location: str) -> tuple[SinkKind, str | None]:
    """Split "media" / "ftp:some/path" style destinations into sink and subpath."""
    sink_name, _, subpath = dst_location.partition(":")
    try:
        kind = SinkKind(sink_name)
    except ValueError:
        raise ValidationError(f"unknown deployment sink {sink_name!r}") from None
    if kind in (SinkKind.SNS_TWITTER_LIKE, SinkKind.SNS_ME2DAY_LIKE):
        raise ValidationError("SNS sinks take shares, not uploads; use the share operation")
    return kind, subpath or None


class DeploymentService:
    def __init__(
        self,
        registry: Registry,
        allocator: CridAllocator,
        job_store: JobStore,
        pool: WorkerPool,
        data_dir: Path,
        sns_seed: int = 0,
    ):
        self.registry = registry
        self.allocator = allocator
        self.job_store = job_store
        self.pool = pool
        self.data_dir = Path(data_dir)
        self.media_store = MediaStoreSink(self.data_dir)
        self.ftp_remote = FtpRemoteSink(self.data_dir)
        rng = random.Random(sns_seed)
        self.sns_sinks = {
            SinkKind.SNS_TWITTER_LIKE: MockSnsSink(SinkKind.SNS_TWITTER_LIKE, rng),
            SinkKind.SNS_ME2DAY_LIKE: MockSnsSink(SinkKind.SNS_ME2DAY_LIKE, rng),
        }
        self.ledger_path = self.data_dir / "sns-ledger.log"
        self._publish_locks: dict[str, threading.Lock] = {}
        self._locks_guard = threading.Lock()

    def _publish_lock(self, key: Crid | str) -> threading.Lock:
        name = key.render() if isinstance(key, Crid) else key
        with self._locks_guard:
            return self._publish_locks.setdefault(name, threading.Lock())

    def _find_record_for_file(self, src_location: str, src_path: Path) -> ContentRecord | None:
        """Match a source file to its record: by exact location, then by content
        checksum (published records first, so re-uploads find the live object)."""
        record = self.registry.find_by_location(src_location)
        if record is None:
            record = self.registry.find_by_location(str(src_path))
        if record is not None:
            return record
        src_size = src_path.stat().st_size
        src_digest: str | None = None
        candidates = sorted(
            self.registry.list_content_records(),
            key=lambda r: not r.storage_location.startswith(MEDIA_URL_PREFIX),
        )
        for candidate in candidates:
            try:
                stored = resolve_storage_path(self.data_dir, candidate.storage_location)
            except ValidationError:
                continue
            if not stored.is_file() or stored.stat().st_size != src_size:
                continue
            if src_digest is None:
                src_digest = file_checksum(src_path)
            if file_checksum(stored) == src_digest:
                return candidate
        return None

    def _record_for_source(self, src_location: str, src_path: Path) -> ContentRecord:
        """Find the record behind a source file, registering one on first publication."""
        record = self._find_record_for_file(src_location, src_path)
        if record is not None:
            return record
        crid = self.allocator.allocate()
        return self.registry.upsert_content_record(
            ContentRecord(
                crid=crid,
                title=src_path.stem,
                source_url=str(src_path),
                storage_location=str(src_path),
            )
        )

    # ---- uploadContent ----

    def upload_content(self, reference: str, src_location: str, dst_location: str) -> str:
        src_path = require_file(
            resolve_storage_path(self.data_dir, src_location), "upload source"
        )
        kind, subpath = parse_destination(dst_location)
        job = self.job_store.create(
            JobKind.UPLOAD, reference=reference, detail=f"uploading {src_location} to {dst_location}"
        )
        self.pool.submit(job, lambda: self._run_upload(src_location, src_path, kind, subpath))
        return job.event_identifier

    def _run_upload(
        self, src_location: str, src_path: Path, kind: SinkKind, subpath: str | None
    ) -> tuple[str, str]:
        record = self._record_for_source(src_location, src_path)
        with self._publish_lock(record.crid):
            resolved_subpath = subpath or f"{record.crid.serial}/{src_path.name}"
            if kind is SinkKind.FTP_REMOTE:
                url = self.ftp_remote.put(src_path, resolved_subpath)
                return f"delivered {record.crid.render()} over ftp", url
            existing = self.media_store.path_for(resolved_subpath)
            if existing.is_file():
                if file_checksum(existing) == file_checksum(src_path):
                    return (
                        f"already published {record.crid.render()}",
                        MEDIA_URL_PREFIX + resolved_subpath,
                    )
                raise ConflictError(
                    f"{resolved_subpath} already published with different content; use updateContent"
                )
            url = self.media_store.put(src_path, resolved_subpath)
            self.registry.set_storage_location(record.crid, url)
            return f"published {record.crid.render()}", url

    def uploading_status(self, event_identifier: str) -> JobRecord:
        return self.job_store.get(event_identifier)

    # ---- updateContent ----

    def update_content(self, reference: str, src_location: str, dst_location: str) -> str:
        src_path = require_file(
            resolve_storage_path(self.data_dir, src_location), "update source"
        )
        kind, subpath = parse_destination(dst_location)
        if kind is not SinkKind.MEDIA_STORE:
            raise ValidationError("updateContent only replaces media-store objects")
        record = self._find_record_for_file(src_location, src_path)
        if subpath is None:
            if record is None or not record.storage_location.startswith(MEDIA_URL_PREFIX):
                raise NothingToUpdateError(
                    f"nothing to update: {src_location!r} has no published object"
                )
            subpath = record.storage_location[len(MEDIA_URL_PREFIX):]
        published = self.media_store.path_for(subpath)
        if not published.is_file():
            raise NothingToUpdateError(f"nothing to update at {MEDIA_URL_PREFIX}{subpath}")
        job = self.job_store.create(
            JobKind.UPDATE, reference=reference, detail=f"updating {MEDIA_URL_PREFIX}{subpath}"
        )
        self.pool.submit(job, lambda: self._run_update(record, src_path, subpath))
        return job.event_identifier

    def _run_update(
        self, record: ContentRecord | None, src_path: Path, subpath: str
    ) -> tuple[str, str]:
        url = MEDIA_URL_PREFIX + subpath
        published = self.media_store.path_for(subpath)
        lock = self._publish_lock(record.crid if record is not None else url)
        with lock:
            if file_checksum(published) == file_checksum(src_path):
                return f"already up to date: {url}", url
            self.media_store.put(src_path, subpath)
            if record is not None:
                self.registry.touch(record.crid)
        return f"replaced {url}", url

    def updating_status(self, event_identifier: str) -> JobRecord:
        return self.job_store.get(event_identifier)

    # ---- deleteContent ----

    def delete_content(self, reference: str, crid: Crid | str) -> dict:
        """Synchronous removal of the published bytes and the registry record."""
        if isinstance(crid, str):
            crid = parse_crid(crid)
        record = self.registry.get_content_record(crid)
        if not record.is_variant:
            survivors = self.registry.variants_of(crid)
            if survivors:
                names = ", ".join(v.crid.render() for v in survivors)
                raise ConflictError(
                    f"cannot delete original {crid.render()} with live variants: {names}"
                )
        with self._publish_lock(crid):
            try:
                path = resolve_storage_path(self.data_dir, record.storage_location)
            except ValidationError:
                path = None
            if path is not None and path.is_file() and self._inside_data_dir(path):
                path.unlink()
            self.registry.delete_content_record(crid)
        return {"deleted": crid.render(), "reference": reference}

    def _inside_data_dir(self, path: Path) -> bool:
        try:
            path.resolve().relative_to(self.data_dir.resolve())
            return True
        except ValueError:
            return False

    # ---- SNS sharing ----

    def share_to_sns(self, sink_kind: SinkKind | str, account: str, review: str, content_url: str) -> SharePost:
        if isinstance(sink_kind, str):
            try:
                sink_kind = SinkKind(sink_kind)
            except ValueError:
                raise ValidationError(f"unknown SNS sink {sink_kind!r}") from None
        sink = self.sns_sinks.get(sink_kind)
        if sink is None:
            raise ValidationError(f"{sink_kind.value} is not an SNS sink")
        if self.registry.find_by_location(content_url) is None:
            raise ValidationError(f"contentUrl is not registered content: {content_url!r}")
        share = sink.post(account, review, content_url)
        self.ledger_path.parent.mkdir(parents=True, exist_ok=True)
        with self.ledger_path.open("a", encoding="utf-8") as fh:
            fh.write(
                f"{share.posted_at.isoformat()}\t{sink.kind.value}\t{share.account}"
                f"\t{share.post_id}\t{share.content_url}\n"
            )
        return share
