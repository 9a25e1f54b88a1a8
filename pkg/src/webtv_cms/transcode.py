"""Transcoder backends behind one contract.

A backend produces the target file and returns the run duration in seconds;
on failure it raises TranscodeError and leaves no target file behind. The
simulated backend stands in for a real encoder at desk scale; the external
backend shells out to a system-installed encoder via an argument template.
"""

from __future__ import annotations

import shlex
import shutil
import subprocess
import time
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from pathlib import Path
from typing import Protocol

from .errors import TranscodeError, ValidationError
from .registry import DeviceClass, profile_hash

# Relative CPU load per target class: shrinking PC-sized sources to a tablet
# costs the most, tablet-to-phone the least.
DEFAULT_LOAD_SHARES = {
    DeviceClass.IPAD: 0.5,
    DeviceClass.IPHONE: 0.3,
    DeviceClass.PC: 0.2,
}
FALLBACK_LOAD_SHARE = 0.5


@dataclass(frozen=True)
class TranscodeTarget:
    width: int
    height: int
    video_encoding: str
    audio_encoding: str
    device_class: DeviceClass | None = None
    device_id: str | None = None

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValidationError(
                f"target resolution must be positive, got {self.width}x{self.height}"
            )

    @property
    def profile_hash(self) -> str:
        return profile_hash(self.width, self.height, self.video_encoding, self.audio_encoding)


class TranscoderBackend(Protocol):
    def transcode(self, source: Path, target: Path, profile: TranscodeTarget) -> float:
        """Produce target from source; return duration seconds or raise."""
        ...


class SimulatedTranscoder:
    """Copies the source bytes, writes a sidecar describing the target profile,
    and sleeps for a time proportional to the target's load share."""

    def __init__(
        self,
        load_shares: dict[DeviceClass, float] | None = None,
        delay_scale: float = 0.05,
    ):
        self.load_shares = dict(DEFAULT_LOAD_SHARES if load_shares is None else load_shares)
        self.delay_scale = delay_scale

    def load_share(self, profile: TranscodeTarget) -> float:
        if profile.device_class is not None:
            return self.load_shares.get(profile.device_class, FALLBACK_LOAD_SHARE)
        return FALLBACK_LOAD_SHARE

    def transcode(self, source: Path, target: Path, profile: TranscodeTarget) -> float:
        if not source.is_file():
            raise TranscodeError(f"source file missing: {source}")
        duration = self.load_share(profile) * self.delay_scale
        time.sleep(duration)
        target.parent.mkdir(parents=True, exist_ok=True)
        tmp = target.with_suffix(target.suffix + ".part")
        try:
            shutil.copyfile(source, tmp)
            tmp.replace(target)
        except OSError as exc:
            tmp.unlink(missing_ok=True)
            raise TranscodeError(f"cannot write target {target}: {exc}") from exc
        _write_sidecar(target, profile)
        return duration


def _write_sidecar(target: Path, profile: TranscodeTarget) -> None:
    root = ET.Element("TranscodeInfo")
    for tag, value in (
        ("Width", str(profile.width)),
        ("Height", str(profile.height)),
        ("VideoEncoding", profile.video_encoding),
        ("AudioEncoding", profile.audio_encoding),
    ):
        el = ET.SubElement(root, tag)
        el.text = value
    ET.indent(root)
    sidecar = target.with_name(target.name + ".info.xml")
    sidecar.write_bytes(ET.tostring(root, encoding="utf-8", xml_declaration=True))


class ExternalCommandTranscoder:
    """Runs a configured encoder command with placeholder substitution.

    Template placeholders: {src} {dst} {w} {h} {vcodec} {acodec}.
    """

    def __init__(self, template: str, timeout: float = 600.0):
        if not template.strip():
            raise ValidationError("external transcoder template must be nonempty")
        self.template = template
        self.timeout = timeout

    def build_argv(self, source: Path, target: Path, profile: TranscodeTarget) -> list[str]:
        values = {
            "src": str(source),
            "dst": str(target),
            "w": str(profile.width),
            "h": str(profile.height),
            "vcodec": profile.video_encoding,
            "acodec": profile.audio_encoding,
        }
        return [token.format(**values) for token in shlex.split(self.template)]

    def transcode(self, source: Path, target: Path, profile: TranscodeTarget) -> float:
        if not source.is_file():
            raise TranscodeError(f"source file missing: {source}")
        target.parent.mkdir(parents=True, exist_ok=True)
        argv = self.build_argv(source, target, profile)
        started = time.monotonic()
        try:
            completed = subprocess.run(
                argv, capture_output=True, text=True, timeout=self.timeout
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            target.unlink(missing_ok=True)
            raise TranscodeError(f"encoder invocation failed: {exc}") from exc
        duration = time.monotonic() - started
        if completed.returncode != 0:
            target.unlink(missing_ok=True)
            stderr = completed.stderr.strip()[:500]
            raise TranscodeError(
                f"encoder exited {completed.returncode}" + (f": {stderr}" if stderr else "")
            )
        if not target.is_file():
            raise TranscodeError(f"encoder succeeded but produced no {target}")
        return duration
