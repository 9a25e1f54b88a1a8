"""Service configuration and the wiring of all enablers onto shared stores."""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from pathlib import Path

from .aggregation import AggregationService
from .crid import CridAllocator
from .deployment import DeploymentService
from .errors import ConfigurationError
from .jobs import JobStore, WorkerPool
from .mediation import MediationService
from .registry import Registry
from .sessions import SessionStore, UserStore
from .transcode import ExternalCommandTranscoder, SimulatedTranscoder, TranscoderBackend


@dataclass
class AppConfig:
    data_dir: Path = Path("./data")
    host: str = "127.0.0.1"
    port: int = 8642
    user_file: Path | None = None
    crid_authority: str = "webtv.local"
    crid_service: str = "webtv"
    aggregation_workers: int = 2
    mediation_workers: int = 2
    deployment_workers: int = 2
    transcoder: str = "simulated"
    external_encoder_template: str = ""
    simulated_delay_scale: float = 0.05
    session_ttl_seconds: float = 3600.0
    sns_seed: int = 0
    ui_dir: Path | None = None

    def __post_init__(self) -> None:
        self.data_dir = Path(self.data_dir)
        if self.user_file is not None:
            self.user_file = Path(self.user_file)
        if self.ui_dir is not None:
            self.ui_dir = Path(self.ui_dir)
        if self.transcoder not in ("simulated", "external"):
            raise ConfigurationError(
                f"transcoder must be 'simulated' or 'external', got {self.transcoder!r}"
            )
        if self.transcoder == "external" and not self.external_encoder_template.strip():
            raise ConfigurationError("external transcoder needs external_encoder_template")
        for name in ("aggregation_workers", "mediation_workers", "deployment_workers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be >= 1")

    @classmethod
    def load(cls, path: Path) -> "AppConfig":
        """Read a JSON config file; unknown keys are configuration errors."""
        try:
            raw = json.loads(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigurationError(f"config {path} must be a JSON object")
        known = {f.name for f in fields(cls)}
        unknown = set(raw) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        return cls(**raw)


class Services:
    """All enablers sharing one registry, job store, and CRID allocator."""

    def __init__(self, config: AppConfig):
        self.config = config
        data_dir = config.data_dir
        data_dir.mkdir(parents=True, exist_ok=True)
        self.registry = Registry(data_dir)
        self.allocator = CridAllocator(
            config.crid_authority, config.crid_service, data_dir / "crid-counter.txt"
        )
        self.job_store = JobStore(data_dir / "jobs.json")
        self.interrupted_jobs = self.job_store.fail_interrupted()
        self.backend: TranscoderBackend
        if config.transcoder == "external":
            self.backend = ExternalCommandTranscoder(config.external_encoder_template)
        else:
            self.backend = SimulatedTranscoder(delay_scale=config.simulated_delay_scale)
        self.aggregation = AggregationService(
            self.registry,
            self.allocator,
            self.job_store,
            WorkerPool(self.job_store, config.aggregation_workers, "aggregation"),
            data_dir,
        )
        self.mediation = MediationService(
            self.registry,
            self.allocator,
            self.job_store,
            WorkerPool(self.job_store, config.mediation_workers, "mediation"),
            data_dir,
            self.backend,
        )
        self.deployment = DeploymentService(
            self.registry,
            self.allocator,
            self.job_store,
            WorkerPool(self.job_store, config.deployment_workers, "deployment"),
            data_dir,
            sns_seed=config.sns_seed,
        )
        if config.user_file is None:
            raise ConfigurationError("user_file is required to start the service")
        self.sessions = SessionStore(UserStore(config.user_file), config.session_ttl_seconds)

    def shutdown(self) -> None:
        """Flush the job store; in-flight jobs stay Running in the snapshot."""
        self.job_store.save()
        for service in (self.aggregation, self.mediation, self.deployment):
            service.pool.shutdown(wait=False)
