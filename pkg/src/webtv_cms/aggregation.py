"""Content aggregation enabler: pull selected feed items into mediator storage.

Aggregation is asynchronous and all-or-nothing: a failed download aborts the
whole job, removing any files it already wrote and committing no records.
"""

from __future__ import annotations

import shutil
import urllib.parse
from dataclasses import dataclass, field
from pathlib import Path

from .crid import Crid, CridAllocator
from .errors import ValidationError
from .feeds import FeedEntry, fetch_bytes, fetch_feed
from .jobs import JobKind, JobRecord, JobStore, WorkerPool
from .registry import ContentRecord, Registry


@dataclass(frozen=True)
class AggregationRequest:
    reference: str
    feed_url: str
    credentials: tuple[str, str] | None = None
    selection: list[int | str] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.selection:
            raise ValidationError("selection must be nonempty")


def filename_from_url(url: str) -> str:
    name = Path(urllib.parse.urlparse(url).path).name
    return urllib.parse.unquote(name) or "content"


class AggregationService:
    def __init__(
        self,
        registry: Registry,
        allocator: CridAllocator,
        job_store: JobStore,
        pool: WorkerPool,
        data_dir: Path,
    ):
        self.registry = registry
        self.allocator = allocator
        self.job_store = job_store
        self.pool = pool
        self.temp_root = Path(data_dir) / "mediator-tmp"

    def fetch_feed(self, feed_url: str, credentials: tuple[str, str] | None = None) -> list[FeedEntry]:
        return fetch_feed(feed_url, credentials)

    def _resolve_selection(self, entries: list[FeedEntry], selection: list[int | str]) -> list[FeedEntry]:
        resolved = []
        by_url = {entry.content_url: entry for entry in entries}
        for item in selection:
            if isinstance(item, int):
                if not 0 <= item < len(entries):
                    raise ValidationError(
                        f"selection index {item} out of range (feed has {len(entries)} entries)"
                    )
                resolved.append(entries[item])
            else:
                entry = by_url.get(item)
                if entry is None:
                    raise ValidationError(f"selection URL not in feed: {item!r}")
                resolved.append(entry)
        return resolved

    def aggregate_content(self, request: AggregationRequest) -> str:
        """Validate the request, enqueue the download job, return its identifier."""
        entries = self.fetch_feed(request.feed_url, request.credentials)
        selected = self._resolve_selection(entries, request.selection)
        job = self.job_store.create(
            JobKind.AGGREGATION,
            reference=request.reference,
            detail=f"aggregating {len(selected)} items from {request.feed_url}",
        )
        self.pool.submit(job, lambda: self._run(request, selected))
        return job.event_identifier

    def _run(self, request: AggregationRequest, selected: list[FeedEntry]) -> tuple[str, str]:
        staged: list[tuple[Crid, FeedEntry, Path]] = []
        failures: list[str] = []
        for entry in selected:
            crid = self.allocator.allocate()
            target_dir = self.temp_root / crid.serial
            target = target_dir / filename_from_url(entry.content_url)
            try:
                payload = fetch_bytes(entry.content_url, request.credentials)
                target_dir.mkdir(parents=True, exist_ok=True)
                target.write_bytes(payload)
            except Exception as exc:
                failures.append(f"{entry.content_url}: {exc}")
                continue
            staged.append((crid, entry, target))
        if failures:
            for _, _, path in staged:
                shutil.rmtree(path.parent, ignore_errors=True)
            raise ValidationError(
                f"aggregation failed for {len(failures)} item(s): " + "; ".join(failures)
            )
        for crid, entry, target in staged:
            self.registry.upsert_content_record(
                ContentRecord(
                    crid=crid,
                    title=entry.title,
                    source_url=entry.content_url,
                    storage_location=str(target),
                )
            )
        crids = ", ".join(crid.render() for crid, _, _ in staged)
        return f"aggregated {len(staged)} items: {crids}", str(self.temp_root)

    def aggregation_status(self, event_identifier: str) -> JobRecord:
        return self.job_store.get(event_identifier)
