"""RSS 2.0 / ATOM 1.0 fetching and entry extraction.

Supported subset: RSS items with an enclosure URL (falling back to the item
link), ATOM entries with a rel="enclosure" link (falling back to the first
link). Anything else is rejected with a distinct error kind.
"""

from __future__ import annotations

import urllib.parse
import urllib.request
import xml.etree.ElementTree as ET
from dataclasses import dataclass

import httpx

from .errors import FeedUnreachableError, NotAFeedError, UnsupportedFeedError, ValidationError

ATOM_NS = "http://www.w3.org/2005/Atom"


@dataclass(frozen=True)
class FeedEntry:
    title: str
    content_url: str
    mime_type_hint: str | None = None
    size_hint: int | None = None

    def __post_init__(self) -> None:
        if not self.content_url or not urllib.parse.urlparse(self.content_url).scheme:
            raise ValidationError(f"entry content URL must be absolute, got {self.content_url!r}")


def fetch_bytes(url: str, credentials: tuple[str, str] | None = None, timeout: float = 10.0) -> bytes:
    """GET a URL; file:// is read directly, http(s) goes through httpx."""
    parsed = urllib.parse.urlparse(url)
    if parsed.scheme == "file":
        try:
            with urllib.request.urlopen(url) as fh:
                return fh.read()
        except OSError as exc:
            raise FeedUnreachableError(f"cannot read {url}: {exc}") from exc
    if parsed.scheme not in ("http", "https"):
        raise ValidationError(f"unsupported URL scheme {parsed.scheme!r} in {url}")
    auth = credentials if credentials else None
    try:
        response = httpx.get(url, auth=auth, timeout=timeout, follow_redirects=True)
        response.raise_for_status()
    except httpx.HTTPError as exc:
        raise FeedUnreachableError(f"cannot fetch {url}: {exc}") from exc
    return response.content


def parse_feed(payload: bytes) -> list[FeedEntry]:
    """Extract entries from feed XML, in document order."""
    try:
        root = ET.fromstring(payload)
    except ET.ParseError as exc:
        raise NotAFeedError(f"payload is not well-formed XML: {exc}") from exc
    if root.tag == "rss":
        return _parse_rss(root)
    if root.tag == f"{{{ATOM_NS}}}feed":
        return _parse_atom(root)
    raise UnsupportedFeedError(f"unsupported feed root element {root.tag!r}")


def _parse_rss(root: ET.Element) -> list[FeedEntry]:
    entries = []
    for item in root.iter("item"):
        title = item.findtext("title") or ""
        enclosure = item.find("enclosure")
        if enclosure is not None and enclosure.get("url"):
            url = enclosure.get("url", "")
            mime = enclosure.get("type")
            length = enclosure.get("length")
        else:
            url = item.findtext("link") or ""
            mime = None
            length = None
        if not url:
            continue
        entries.append(
            FeedEntry(
                title=title,
                content_url=url,
                mime_type_hint=mime,
                size_hint=int(length) if length and length.isdigit() else None,
            )
        )
    return entries


def _parse_atom(root: ET.Element) -> list[FeedEntry]:
    entries = []
    for entry in root.findall(f"{{{ATOM_NS}}}entry"):
        title = entry.findtext(f"{{{ATOM_NS}}}title") or ""
        links = entry.findall(f"{{{ATOM_NS}}}link")
        chosen = next((l for l in links if l.get("rel") == "enclosure"), None)
        if chosen is None and links:
            chosen = links[0]
        if chosen is None or not chosen.get("href"):
            continue
        length = chosen.get("length")
        entries.append(
            FeedEntry(
                title=title,
                content_url=chosen.get("href", ""),
                mime_type_hint=chosen.get("type"),
                size_hint=int(length) if length and length.isdigit() else None,
            )
        )
    return entries


def fetch_feed(feed_url: str, credentials: tuple[str, str] | None = None) -> list[FeedEntry]:
    """Fetch and parse a feed URL into its entry list."""
    return parse_feed(fetch_bytes(feed_url, credentials))
