from __future__ import annotations

import functools
import http.server
import threading

import pytest

from webtv_cms.config import AppConfig, Services
from webtv_cms.crid import CridAllocator
from webtv_cms.jobs import JobStore, WorkerPool
from webtv_cms.registry import DeviceClass, DeviceProfile, Registry
from webtv_cms.sessions import UserStore

ACCEPTANCE_RESULTS: list[tuple[str, bool]] = []


def record_acceptance(criterion: str, passed: bool) -> None:
    ACCEPTANCE_RESULTS.append((criterion, passed))


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, passed in ACCEPTANCE_RESULTS:
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{verdict}] {criterion}")


class _QuietHandler(http.server.SimpleHTTPRequestHandler):
    def log_message(self, format, *args):  # noqa: A002 - stdlib signature
        pass


@pytest.fixture()
def file_server(tmp_path_factory):
    """Serve a temp directory over loopback HTTP; yields (root, base_url)."""
    root = tmp_path_factory.mktemp("served")
    handler = functools.partial(_QuietHandler, directory=str(root))
    server = http.server.ThreadingHTTPServer(("127.0.0.1", 0), handler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    yield root, f"http://127.0.0.1:{server.server_port}"
    server.shutdown()
    thread.join(timeout=5)


@pytest.fixture()
def data_dir(tmp_path):
    d = tmp_path / "data"
    d.mkdir()
    return d


@pytest.fixture()
def registry(data_dir):
    return Registry(data_dir)


@pytest.fixture()
def allocator(data_dir):
    return CridAllocator("etri.re.kr", "webtv", data_dir / "crid-counter.txt")


@pytest.fixture()
def job_store(data_dir):
    return JobStore(data_dir / "jobs.json")


@pytest.fixture()
def worker_pool(job_store):
    pool = WorkerPool(job_store, size=2, name="test")
    yield pool
    pool.shutdown(wait=True)


IPAD = DeviceProfile("ipad-1", DeviceClass.IPAD, 1024, 768, "H.264", "faac")
IPHONE = DeviceProfile("iphone-1", DeviceClass.IPHONE, 960, 640, "H.264", "faac")
PC = DeviceProfile("pc-1", DeviceClass.PC, 1280, 768, "H.264", "faac")


@pytest.fixture()
def seeded_registry(registry):
    for profile in (PC, IPAD, IPHONE):
        registry.put_device_profile(profile)
    return registry


@pytest.fixture()
def app_config(data_dir):
    UserStore.write(data_dir / "users.txt", {"alice": "wonderland"})
    return AppConfig(
        data_dir=data_dir,
        user_file=data_dir / "users.txt",
        simulated_delay_scale=0.002,
        sns_seed=7,
    )


@pytest.fixture()
def services(app_config):
    svc = Services(app_config)
    for profile in (PC, IPAD, IPHONE):
        svc.registry.put_device_profile(profile)
    yield svc
    svc.shutdown()


def wait_for_job(store: JobStore, event_identifier: str, timeout: float = 10.0):
    """Poll until the job reaches a terminal state."""
    import time

    deadline = time.monotonic() + timeout
    while time.monotonic() < deadline:
        job = store.get(event_identifier)
        if job.is_terminal:
            return job
        time.sleep(0.005)
    raise AssertionError(f"job {event_identifier} did not finish within {timeout}s")
