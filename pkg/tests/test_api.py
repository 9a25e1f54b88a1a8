from __future__ import annotations

import pytest
from fastapi.testclient import TestClient
from hypothesis import given, strategies as st

from webtv_cms.api import create_app
from webtv_cms.registry import DeviceClass
from webtv_cms.sessions import classify_device, page_variant

from .conftest import wait_for_job

RSS_ONE = """<?xml version="1.0"?>
<rss version="2.0"><channel><title>t</title>
<item><title>clip</title><enclosure url="{url}" type="video/mp4"/></item>
</channel></rss>"""


class TestClassifyDevice:
    def test_iphone(self):
        ua = "Mozilla/5.0 (iPhone; CPU iPhone OS 5_0 like Mac OS X) AppleWebKit/534.46"
        assert classify_device(ua) is DeviceClass.IPHONE

    def test_ipod_counts_as_iphone_class(self):
        assert classify_device("Mozilla/5.0 (iPod touch)") is DeviceClass.IPHONE

    def test_ipad(self):
        assert classify_device("Mozilla/5.0 (iPad; CPU OS 5_0)") is DeviceClass.IPAD

    def test_default_pc(self):
        assert classify_device("") is DeviceClass.PC
        assert classify_device("Mozilla/5.0 (Windows NT 10.0)") is DeviceClass.PC

    def test_case_insensitive(self):
        assert classify_device("IPHONE") is DeviceClass.IPHONE

    @given(st.text(max_size=200))
    def test_total_over_text(self, ua):
        result = classify_device(ua)
        lowered = ua.lower()
        if "iphone" in lowered or "ipod" in lowered:
            assert result is DeviceClass.IPHONE
        elif "ipad" in lowered:
            assert result is DeviceClass.IPAD
        else:
            assert result is DeviceClass.PC

    @given(st.binary(max_size=200))
    def test_total_over_arbitrary_bytes(self, raw):
        assert classify_device(raw.decode("latin-1")) in DeviceClass

    def test_variant_rule(self):
        assert page_variant(DeviceClass.IPHONE) == "mobile"
        assert page_variant(DeviceClass.IPAD) == "full"
        assert page_variant(DeviceClass.PC) == "full"


@pytest.fixture()
def client(app_config, services):
    app = create_app(app_config, services)
    with TestClient(app) as c:
        yield c


def login(client, user_agent="Mozilla/5.0 (Windows NT 10.0)") -> dict:
    response = client.post(
        "/api/v1/login",
        json={"userId": "alice", "password": "wonderland"},
        headers={"User-Agent": user_agent},
    )
    assert response.status_code == 200
    return response.json()


def auth(session: dict) -> dict:
    return {"Authorization": f"Bearer {session['token']}"}


class TestLogin:
    def test_valid_credentials(self, client):
        session = login(client)
        assert session["userId"] == "alice"
        assert session["deviceClass"] == "PC"
        assert session["variant"] == "full"
        assert len(session["token"]) >= 32

    def test_iphone_login_gets_mobile_variant(self, client):
        session = login(client, user_agent="Mozilla/5.0 (iPhone)")
        assert session["deviceClass"] == "iPhone"
        assert session["variant"] == "mobile"

    def test_wrong_password(self, client):
        response = client.post("/api/v1/login", json={"userId": "alice", "password": "nope"})
        assert response.status_code == 401

    def test_two_logins_distinct_tokens(self, client):
        assert login(client)["token"] != login(client)["token"]

    def test_malformed_body(self, client):
        response = client.post("/api/v1/login", json={"user": "alice"})
        assert response.status_code == 400
        assert response.json()["detail"]


class TestAuthGate:
    def test_every_mutating_endpoint_rejects_anonymous(self, client):
        routes = [
            route
            for route in client.app.routes
            if getattr(route, "path", "").startswith("/api/v1")
            and getattr(route, "methods", set()) & {"POST", "PUT", "DELETE"}
            and route.path != "/api/v1/login"
        ]
        assert routes, "no mutating endpoints found"
        for route in routes:
            for method in route.methods & {"POST", "PUT", "DELETE"}:
                path = route.path.replace("{event_identifier}", "x").replace(
                    "{device_id}", "x"
                ).replace("{crid_text:path}", "x")
                response = client.request(method, path, json={})
                assert response.status_code == 401, f"{method} {path} -> {response.status_code}"

    def test_bogus_token_rejected(self, client):
        response = client.get("/api/v1/content", headers={"Authorization": "Bearer bogus"})
        assert response.status_code == 401

    def test_media_is_public(self, client, data_dir):
        target = data_dir / "media" / "0001" / "clip.mp4"
        target.parent.mkdir(parents=True)
        target.write_bytes(b"public bytes")
        response = client.get("/media/0001/clip.mp4")
        assert response.status_code == 200
        assert response.content == b"public bytes"

    def test_unknown_route(self, client):
        session = login(client)
        assert client.get("/api/v1/nope", headers=auth(session)).status_code == 404

    def test_media_traversal_blocked(self, client, data_dir):
        (data_dir / "secret.txt").write_text("nope")
        response = client.get("/media/../secret.txt")
        assert response.status_code == 404


class TestRoundTrips:
    def test_feed_listing(self, client, file_server):
        root, base = file_server
        (root / "a.mp4").write_bytes(b"a")
        (root / "feed.xml").write_text(RSS_ONE.format(url=f"{base}/a.mp4"))
        session = login(client)
        response = client.get(
            "/api/v1/feeds", params={"url": f"{base}/feed.xml"}, headers=auth(session)
        )
        assert response.status_code == 200
        entries = response.json()["entries"]
        assert entries == [
            {"title": "clip", "contentUrl": f"{base}/a.mp4", "mimeTypeHint": "video/mp4", "sizeHint": None}
        ]

    def test_aggregate_then_is_exist_round_trip(self, client, file_server, services):
        root, base = file_server
        (root / "a.mp4").write_bytes(b"a" * 64)
        (root / "feed.xml").write_text(RSS_ONE.format(url=f"{base}/a.mp4"))
        session = login(client)

        submitted = client.post(
            "/api/v1/aggregation/aggregateContent",
            json={"reference": "ref-1", "feedURL": f"{base}/feed.xml", "selection": [0]},
            headers=auth(session),
        )
        assert submitted.status_code == 202
        ident = submitted.json()["eventIdentifier"]
        wait_for_job(services.job_store, ident)

        status = client.get(f"/api/v1/aggregation/status/{ident}", headers=auth(session))
        assert status.json()["state"] == "Succeeded"
        assert status.json()["reference"] == "ref-1"

        records = client.get("/api/v1/content", headers=auth(session)).json()["records"]
        assert len(records) == 1
        crid = records[0]["crid"]

        exists = client.post(
            "/api/v1/mediation/isExistContent",
            json={"srcContentURL": crid, "transcodingInfo": {"deviceId": "iphone-1"}},
            headers=auth(session),
        )
        assert exists.status_code == 200
        assert exists.json() == {"exists": False, "location": None, "crid": None}

    def test_unknown_status_is_404(self, client):
        session = login(client)
        assert (
            client.get("/api/v1/mediation/status/bogus", headers=auth(session)).status_code == 404
        )

    def test_profiles_round_trip(self, client):
        session = login(client)
        put = client.put(
            "/api/v1/profiles",
            json={
                "deviceId": "ipad-9",
                "deviceClass": "iPad",
                "width": 1024,
                "height": 768,
                "videoEncoding": "H.264",
                "audioEncoding": "faac",
            },
            headers=auth(session),
        )
        assert put.status_code == 200
        got = client.get("/api/v1/profiles/ipad-9", headers=auth(session))
        assert got.json()["profileHash"] == "1024x768-h264-faac"

    def test_invalid_profile_rejected(self, client):
        session = login(client)
        response = client.put(
            "/api/v1/profiles",
            json={
                "deviceId": "bad",
                "deviceClass": "iPad",
                "width": 0,
                "height": 768,
                "videoEncoding": "H.264",
                "audioEncoding": "faac",
            },
            headers=auth(session),
        )
        assert response.status_code == 400

    def test_session_info(self, client):
        session = login(client, user_agent="Mozilla/5.0 (iPad)")
        info = client.get("/api/v1/session", headers=auth(session)).json()
        assert info == {"userId": "alice", "deviceClass": "iPad", "variant": "full"}

    def test_content_lookup_by_serial_and_crid(self, client, services, data_dir):
        from webtv_cms.crid import Crid
        from webtv_cms.registry import ContentRecord

        record = ContentRecord(
            crid=Crid("etri.re.kr", "webtv", "201206020001"),
            title="x",
            source_url="http://x/a.mp4",
            storage_location=str(data_dir / "a.mp4"),
        )
        services.registry.upsert_content_record(record)
        session = login(client)
        by_serial = client.get("/api/v1/content/201206020001", headers=auth(session))
        assert by_serial.status_code == 200
        by_crid = client.get(
            "/api/v1/content/crid://etri.re.kr/webtv/201206020001", headers=auth(session)
        )
        assert by_crid.status_code == 200
        assert by_crid.json()["title"] == "x"
