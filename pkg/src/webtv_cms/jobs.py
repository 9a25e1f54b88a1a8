"""Asynchronous job records, their store, and the enabler worker pools.

Every long-running enabler operation returns an opaque event identifier the
caller polls. Job state only moves Pending -> Running -> Succeeded | Failed;
terminal states are immutable.
"""

from __future__ import annotations

import enum
import json
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable

from .errors import ConflictError, NotFoundError


class JobKind(str, enum.Enum):
    AGGREGATION = "Aggregation"
    TRANSCODE = "Transcode"
    METADATA_TRANSFORM = "MetadataTransform"
    UPLOAD = "Upload"
    UPDATE = "Update"


class JobState(str, enum.Enum):
    PENDING = "Pending"
    RUNNING = "Running"
    SUCCEEDED = "Succeeded"
    FAILED = "Failed"


TERMINAL_STATES = frozenset({JobState.SUCCEEDED, JobState.FAILED})

_ALLOWED_TRANSITIONS = {
    JobState.PENDING: {JobState.RUNNING},
    JobState.RUNNING: {JobState.SUCCEEDED, JobState.FAILED},
}


@dataclass(frozen=True)
class JobRecord:
    event_identifier: str
    kind: JobKind
    state: JobState
    reference: str
    detail: str = ""
    result_location: str | None = None

    @property
    def is_terminal(self) -> bool:
        return self.state in TERMINAL_STATES


def new_event_identifier() -> str:
    return uuid.uuid4().hex


class JobStore:
    """Thread-safe job map with snapshot persistence for restart recovery."""

    def __init__(self, snapshot_path: Path | None = None):
        self._snapshot_path = snapshot_path
        self._lock = threading.Lock()
        self._jobs: dict[str, JobRecord] = {}
        if snapshot_path is not None and snapshot_path.exists():
            self._load(snapshot_path)

    def _load(self, path: Path) -> None:
        for item in json.loads(path.read_text(encoding="utf-8")):
            record = JobRecord(
                event_identifier=item["eventIdentifier"],
                kind=JobKind(item["kind"]),
                state=JobState(item["state"]),
                reference=item["reference"],
                detail=item.get("detail", ""),
                result_location=item.get("resultLocation"),
            )
            self._jobs[record.event_identifier] = record

    def save(self) -> None:
        """Flush current job states; called on service shutdown."""
        if self._snapshot_path is None:
            return
        with self._lock:
            items = [
                {
                    "eventIdentifier": j.event_identifier,
                    "kind": j.kind.value,
                    "state": j.state.value,
                    "reference": j.reference,
                    "detail": j.detail,
                    "resultLocation": j.result_location,
                }
                for j in self._jobs.values()
            ]
        self._snapshot_path.parent.mkdir(parents=True, exist_ok=True)
        tmp = self._snapshot_path.with_suffix(".tmp")
        tmp.write_text(json.dumps(items, indent=2), encoding="utf-8")
        tmp.replace(self._snapshot_path)

    def fail_interrupted(self) -> int:
        """Mark every non-terminal job Failed("interrupted"); restart policy."""
        count = 0
        with self._lock:
            for ident, job in list(self._jobs.items()):
                if not job.is_terminal:
                    self._jobs[ident] = replace(
                        job, state=JobState.FAILED, detail="interrupted"
                    )
                    count += 1
        return count

    def create(self, kind: JobKind, reference: str, detail: str = "") -> JobRecord:
        job = JobRecord(
            event_identifier=new_event_identifier(),
            kind=kind,
            state=JobState.PENDING,
            reference=reference,
            detail=detail,
        )
        with self._lock:
            self._jobs[job.event_identifier] = job
        return job

    def get(self, event_identifier: str) -> JobRecord:
        with self._lock:
            job = self._jobs.get(event_identifier)
            if job is None:
                raise NotFoundError(f"no job {event_identifier!r}")
            return job

    def _transition(self, event_identifier: str, state: JobState, **changes) -> JobRecord:
        with self._lock:
            job = self._jobs.get(event_identifier)
            if job is None:
                raise NotFoundError(f"no job {event_identifier!r}")
            if state not in _ALLOWED_TRANSITIONS.get(job.state, set()):
                raise ConflictError(
                    f"job {event_identifier} cannot move {job.state.value} -> {state.value}"
                )
            updated = replace(job, state=state, **changes)
            self._jobs[event_identifier] = updated
            return updated

    def mark_running(self, event_identifier: str) -> JobRecord:
        return self._transition(event_identifier, JobState.RUNNING)

    def mark_succeeded(
        self, event_identifier: str, detail: str = "", result_location: str | None = None
    ) -> JobRecord:
        return self._transition(
            event_identifier, JobState.SUCCEEDED, detail=detail, result_location=result_location
        )

    def mark_failed(self, event_identifier: str, detail: str) -> JobRecord:
        return self._transition(event_identifier, JobState.FAILED, detail=detail)


class WorkerPool:
    """Bounded thread pool that runs a job body and records the outcome.

    The body either returns (detail, result_location) or raises; any raised
    CmsError (or other exception) fails the job with its message.
    """

    def __init__(self, store: JobStore, size: int, name: str):
        self.store = store
        self._executor = ThreadPoolExecutor(max_workers=size, thread_name_prefix=name)

    def submit(self, job: JobRecord, body: Callable[[], tuple[str, str | None]]) -> JobRecord:
        def run() -> None:
            try:
                self.store.mark_running(job.event_identifier)
                detail, result_location = body()
                self.store.mark_succeeded(
                    job.event_identifier, detail=detail, result_location=result_location
                )
            except Exception as exc:  # job outcome, not a crash
                try:
                    self.store.mark_failed(job.event_identifier, detail=str(exc))
                except ConflictError:
                    pass

        self._executor.submit(run)
        return job

    def shutdown(self, wait: bool = True) -> None:
        self._executor.shutdown(wait=wait)
