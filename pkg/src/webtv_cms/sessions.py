"""Login sessions and the device-aware classification of requests.

Device type is recognized from the HTTP user-agent at login; iPhone-class
devices get the mobile page variant, PC and iPad share the full one.
"""

from __future__ import annotations

import datetime as dt
import hashlib
import secrets
import threading
from dataclasses import dataclass
from pathlib import Path

from .errors import AuthenticationError, ConfigurationError
from .registry import DeviceClass


def classify_device(user_agent: str) -> DeviceClass:
    """Total, case-insensitive substring rule over the user-agent string."""
    ua = user_agent.lower()
    if "iphone" in ua or "ipod" in ua:
        return DeviceClass.IPHONE
    if "ipad" in ua:
        return DeviceClass.IPAD
    return DeviceClass.PC


def page_variant(device_class: DeviceClass) -> str:
    """"mobile" for iPhone-class devices, "full" for everything else."""
    return "mobile" if device_class is DeviceClass.IPHONE else "full"


def hash_password(password: str) -> str:
    return hashlib.sha256(password.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class Session:
    token: str
    user_id: str
    issued_at: dt.datetime
    device_class: DeviceClass


class UserStore:
    """Static credential file: one "userId:password-sha256" line per user."""

    def __init__(self, path: Path):
        self.path = Path(path)
        if not self.path.is_file():
            raise ConfigurationError(f"user file not found: {self.path}")
        self._users: dict[str, str] = {}
        for lineno, line in enumerate(self.path.read_text(encoding="utf-8").splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            user_id, sep, digest = line.partition(":")
            if not sep or not user_id or not digest:
                raise ConfigurationError(f"{self.path}:{lineno}: expected userId:password-hash")
            self._users[user_id] = digest

    def verify(self, user_id: str, password: str) -> bool:
        expected = self._users.get(user_id)
        return expected is not None and secrets.compare_digest(expected, hash_password(password))

    @staticmethod
    def write(path: Path, credentials: dict[str, str]) -> None:
        """Write a user file from plaintext passwords (for seeding/demos)."""
        path.parent.mkdir(parents=True, exist_ok=True)
        body = "".join(f"{user}:{hash_password(pw)}\n" for user, pw in sorted(credentials.items()))
        path.write_text(body, encoding="utf-8")


class SessionStore:
    """Concurrent token map with opportunistic expiry sweeps."""

    def __init__(self, users: UserStore, ttl_seconds: float = 3600.0):
        self.users = users
        self.ttl = dt.timedelta(seconds=ttl_seconds)
        self._lock = threading.Lock()
        self._sessions: dict[str, Session] = {}

    def login(self, user_id: str, password: str, user_agent: str = "") -> Session:
        if not self.users.verify(user_id, password):
            raise AuthenticationError(f"bad credentials for {user_id!r}")
        session = Session(
            token=secrets.token_urlsafe(32),
            user_id=user_id,
            issued_at=dt.datetime.now(dt.timezone.utc),
            device_class=classify_device(user_agent),
        )
        with self._lock:
            self._sweep()
            self._sessions[session.token] = session
        return session

    def authenticate(self, token: str | None) -> Session:
        if not token:
            raise AuthenticationError("missing session token")
        now = dt.datetime.now(dt.timezone.utc)
        with self._lock:
            self._sweep(now)
            session = self._sessions.get(token)
        if session is None:
            raise AuthenticationError("invalid or expired session token")
        return session

    def logout(self, token: str) -> None:
        with self._lock:
            self._sessions.pop(token, None)

    def _sweep(self, now: dt.datetime | None = None) -> None:
        now = now or dt.datetime.now(dt.timezone.utc)
        expired = [t for t, s in self._sessions.items() if now - s.issued_at > self.ttl]
        for token in expired:
            del self._sessions[token]
