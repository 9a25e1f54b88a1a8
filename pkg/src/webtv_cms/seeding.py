"""Demo fixtures: feeds, media files, device profiles, and a demo user.

Everything is written idempotently under the data directory. Feed enclosure
URLs point at the service's own /fixtures route, so a running instance can
aggregate from itself over loopback HTTP.
"""

from __future__ import annotations

import random
from pathlib import Path

from .registry import DeviceClass, DeviceProfile, Registry
from .sessions import UserStore

DEMO_USER = "demo"
DEMO_PASSWORD = "demo1234"

# Optimal target resolutions per device class, shared H.264/faac encodings.
DEMO_PROFILES = (
    DeviceProfile("pc-1", DeviceClass.PC, 1280, 768, "H.264", "faac"),
    DeviceProfile("ipad-1", DeviceClass.IPAD, 1024, 768, "H.264", "faac"),
    DeviceProfile("iphone-1", DeviceClass.IPHONE, 960, 640, "H.264", "faac"),
)

FIXTURE_CLIPS = ("sunrise.mp4", "harbor.mp4", "market.mp4")
ATOM_CLIP = "skyline.mp4"


def _clip_bytes(name: str, size: int = 4096) -> bytes:
    rng = random.Random(name)
    return bytes(rng.getrandbits(8) for _ in range(size))


def _rss_feed(base_url: str) -> str:
    items = []
    for clip in FIXTURE_CLIPS:
        title = clip.rsplit(".", 1)[0].title()
        url = f"{base_url}/fixtures/media/{clip}"
        items.append(
            f"    <item>\n"
            f"      <title>{title}</title>\n"
            f"      <link>{url}</link>\n"
            f'      <enclosure url="{url}" type="video/mp4" length="4096"/>\n'
            f"    </item>\n"
        )
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<rss version="2.0">\n'
        "  <channel>\n"
        "    <title>Demo clips</title>\n"
        f"    <link>{base_url}/fixtures/feed.xml</link>\n"
        "    <description>Seeded demo clips</description>\n"
        + "".join(items)
        + "  </channel>\n</rss>\n"
    )


def _atom_feed(base_url: str) -> str:
    url = f"{base_url}/fixtures/media/{ATOM_CLIP}"
    return (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        '<feed xmlns="http://www.w3.org/2005/Atom">\n'
        "  <title>Demo skyline</title>\n"
        f"  <id>{base_url}/fixtures/atom.xml</id>\n"
        "  <updated>2024-01-01T00:00:00Z</updated>\n"
        "  <entry>\n"
        "    <title>Skyline</title>\n"
        f"    <id>{url}</id>\n"
        "    <updated>2024-01-01T00:00:00Z</updated>\n"
        f'    <link rel="enclosure" type="video/mp4" href="{url}"/>\n'
        "  </entry>\n"
        "</feed>\n"
    )


def seed_demo(data_dir: Path, base_url: str = "http://127.0.0.1:8642") -> dict:
    """Install demo fixtures; safe to run repeatedly."""
    data_dir = Path(data_dir)
    base_url = base_url.rstrip("/")
    fixtures = data_dir / "fixtures"
    media_dir = fixtures / "media"
    media_dir.mkdir(parents=True, exist_ok=True)
    for clip in (*FIXTURE_CLIPS, ATOM_CLIP):
        target = media_dir / clip
        if not target.exists():
            target.write_bytes(_clip_bytes(clip))
    (fixtures / "feed.xml").write_text(_rss_feed(base_url), encoding="utf-8")
    (fixtures / "atom.xml").write_text(_atom_feed(base_url), encoding="utf-8")

    registry = Registry(data_dir)
    for profile in DEMO_PROFILES:
        registry.put_device_profile(profile)

    user_file = data_dir / "users.txt"
    if not user_file.exists():
        UserStore.write(user_file, {DEMO_USER: DEMO_PASSWORD})

    return {
        "data_dir": str(data_dir),
        "feed_url": f"{base_url}/fixtures/feed.xml",
        "atom_url": f"{base_url}/fixtures/atom.xml",
        "profiles": [p.device_id for p in DEMO_PROFILES],
        "user": DEMO_USER,
        "user_file": str(user_file),
    }
