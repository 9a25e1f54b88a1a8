"""HTTP face of the CMS: one route per enabler operation, plus content
listing, public media serving, and the login/session gate.

Bodies are JSON whose field names match the enabler operation inputs
(reference, feedURL, srcContentURL, transcodingInfo, srcLocation,
dstLocation, eventIdentifier, crid, ...). Job submissions return 202 with an
eventIdentifier to poll.
"""

from __future__ import annotations

from contextlib import asynccontextmanager
from pathlib import Path
from typing import Any

from fastapi import Depends, FastAPI, Header, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import FileResponse, JSONResponse
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field

from .aggregation import AggregationRequest
from .config import AppConfig, Services
from .crid import parse_crid
from .deployment import SharePost
from .errors import (
    AuthenticationError,
    CmsError,
    ConflictError,
    FeedUnreachableError,
    NotAFeedError,
    NotFoundError,
    SinkError,
    TranscodeError,
    UnsupportedFeedError,
    ValidationError,
)
from .jobs import JobRecord
from .mediation import TranscodingInfo
from .registry import ContentRecord, DeviceClass, DeviceProfile
from .sessions import Session, page_variant

_STATUS_BY_ERROR = (
    (AuthenticationError, 401),
    (NotFoundError, 404),
    (ConflictError, 409),
    (FeedUnreachableError, 502),
    (NotAFeedError, 422),
    (UnsupportedFeedError, 422),
    (SinkError, 502),
    (TranscodeError, 500),
    (ValidationError, 400),
)


def _error_status(exc: CmsError) -> int:
    for kind, status in _STATUS_BY_ERROR:
        if isinstance(exc, kind):
            return status
    return 400


class LoginBody(BaseModel):
    userId: str
    password: str


class AggregateBody(BaseModel):
    reference: str = ""
    feedURL: str
    id: str | None = None
    password: str | None = None
    selection: list[int | str] = Field(default_factory=list)


class TranscodeBody(BaseModel):
    reference: str = ""
    srcContentURL: str
    transcodingInfo: dict[str, Any]


class ExistBody(BaseModel):
    srcContentURL: str
    transcodingInfo: dict[str, Any]
    originalContent: str | None = None


class TransformBody(BaseModel):
    reference: str = ""
    srcMetadataURL: str
    transformationRule: str


class UploadBody(BaseModel):
    reference: str = ""
    srcLocation: str
    dstLocation: str


class DeleteBody(BaseModel):
    reference: str = ""
    crid: str


class ShareBody(BaseModel):
    sink: str
    account: str
    review: str
    contentUrl: str


class ProfileBody(BaseModel):
    deviceId: str
    deviceClass: str
    width: int
    height: int
    videoEncoding: str
    audioEncoding: str


def parse_transcoding_info(raw: dict[str, Any]) -> TranscodingInfo:
    known = {"deviceId", "width", "height", "videoEncoding", "audioEncoding"}
    unknown = set(raw) - known
    if unknown:
        raise ValidationError(f"transcodingInfo: unknown fields {sorted(unknown)}")
    return TranscodingInfo(
        device_id=raw.get("deviceId"),
        width=raw.get("width"),
        height=raw.get("height"),
        video_encoding=raw.get("videoEncoding"),
        audio_encoding=raw.get("audioEncoding"),
    )


def job_json(job: JobRecord) -> dict[str, Any]:
    return {
        "eventIdentifier": job.event_identifier,
        "kind": job.kind.value,
        "state": job.state.value,
        "reference": job.reference,
        "detail": job.detail,
        "resultLocation": job.result_location,
    }


def record_json(record: ContentRecord) -> dict[str, Any]:
    return {
        "crid": record.crid.render(),
        "title": record.title,
        "sourceUrl": record.source_url,
        "storageLocation": record.storage_location,
        "originalCrid": record.original_crid.render() if record.original_crid else None,
        "profileHash": record.profile_hash,
        "createdAt": record.created_at.isoformat(),
        "updatedAt": record.updated_at.isoformat() if record.updated_at else None,
        "viewCount": record.view_count,
        "mediationCount": record.mediation_count,
    }


def profile_json(profile: DeviceProfile) -> dict[str, Any]:
    return {
        "deviceId": profile.device_id,
        "deviceClass": profile.device_class.value,
        "width": profile.width,
        "height": profile.height,
        "videoEncoding": profile.video_encoding,
        "audioEncoding": profile.audio_encoding,
        "profileHash": profile.profile_hash,
    }


def share_json(share: SharePost) -> dict[str, Any]:
    return {
        "postId": share.post_id,
        "account": share.account,
        "review": share.review,
        "contentUrl": share.content_url,
        "postedAt": share.posted_at.isoformat(),
    }


def create_app(config: AppConfig, services: Services | None = None) -> FastAPI:
    svc = services if services is not None else Services(config)

    @asynccontextmanager
    async def lifespan(_: FastAPI):
        yield
        svc.shutdown()

    app = FastAPI(title="webtv-cms", lifespan=lifespan)
    app.state.services = svc

    @app.exception_handler(CmsError)
    async def cms_error_handler(_: Request, exc: CmsError) -> JSONResponse:
        return JSONResponse(
            status_code=_error_status(exc),
            content={"error": type(exc).__name__, "detail": str(exc)},
        )

    @app.exception_handler(RequestValidationError)
    async def body_error_handler(_: Request, exc: RequestValidationError) -> JSONResponse:
        return JSONResponse(
            status_code=400,
            content={"error": "RequestValidationError", "detail": exc.errors()},
        )

    def require_session(
        authorization: str | None = Header(default=None),
        x_session_token: str | None = Header(default=None),
    ) -> Session:
        token = x_session_token
        if token is None and authorization and authorization.startswith("Bearer "):
            token = authorization.removeprefix("Bearer ")
        return svc.sessions.authenticate(token)

    authed = Depends(require_session)

    # ---- session ----

    @app.post("/api/v1/login")
    def login(body: LoginBody, user_agent: str = Header(default="")) -> dict[str, Any]:
        session = svc.sessions.login(body.userId, body.password, user_agent)
        return {
            "token": session.token,
            "userId": session.user_id,
            "deviceClass": session.device_class.value,
            "variant": page_variant(session.device_class),
        }

    @app.get("/api/v1/session")
    def session_info(session: Session = authed) -> dict[str, Any]:
        return {
            "userId": session.user_id,
            "deviceClass": session.device_class.value,
            "variant": page_variant(session.device_class),
        }

    # ---- feeds / aggregation ----

    @app.get("/api/v1/feeds")
    def feeds(
        url: str,
        id: str | None = None,
        password: str | None = None,
        session: Session = authed,
    ) -> dict[str, Any]:
        credentials = (id, password) if id is not None and password is not None else None
        entries = svc.aggregation.fetch_feed(url, credentials)
        return {
            "entries": [
                {
                    "title": e.title,
                    "contentUrl": e.content_url,
                    "mimeTypeHint": e.mime_type_hint,
                    "sizeHint": e.size_hint,
                }
                for e in entries
            ]
        }

    @app.post("/api/v1/aggregation/aggregateContent", status_code=202)
    def aggregate_content(body: AggregateBody, session: Session = authed) -> dict[str, str]:
        credentials = (body.id, body.password) if body.id and body.password else None
        request = AggregationRequest(
            reference=body.reference,
            feed_url=body.feedURL,
            credentials=credentials,
            selection=list(body.selection),
        )
        return {"eventIdentifier": svc.aggregation.aggregate_content(request)}

    @app.get("/api/v1/aggregation/status/{event_identifier}")
    def aggregation_status(event_identifier: str, session: Session = authed) -> dict[str, Any]:
        return job_json(svc.aggregation.aggregation_status(event_identifier))

    # ---- mediation ----

    @app.post("/api/v1/mediation/transcodeContent", status_code=202)
    def transcode_content(body: TranscodeBody, session: Session = authed) -> dict[str, str]:
        info = parse_transcoding_info(body.transcodingInfo)
        return {
            "eventIdentifier": svc.mediation.transcode_content(
                body.reference, body.srcContentURL, info
            )
        }

    @app.post("/api/v1/mediation/isExistContent")
    def is_exist_content(body: ExistBody, session: Session = authed) -> dict[str, Any]:
        source = body.originalContent or body.srcContentURL
        result = svc.mediation.is_exist_content(source, parse_transcoding_info(body.transcodingInfo))
        return {
            "exists": result.exists,
            "location": result.location,
            "crid": result.crid.render() if result.crid else None,
        }

    @app.post("/api/v1/mediation/transformMetadata", status_code=202)
    def transform_metadata(body: TransformBody, session: Session = authed) -> dict[str, str]:
        return {
            "eventIdentifier": svc.mediation.transform_metadata(
                body.reference, body.srcMetadataURL, body.transformationRule
            )
        }

    @app.get("/api/v1/mediation/status/{event_identifier}")
    def mediation_status(event_identifier: str, session: Session = authed) -> dict[str, Any]:
        return job_json(svc.mediation.transcoding_status(event_identifier))

    # ---- deployment ----

    @app.post("/api/v1/deployment/uploadContent", status_code=202)
    def upload_content(body: UploadBody, session: Session = authed) -> dict[str, str]:
        return {
            "eventIdentifier": svc.deployment.upload_content(
                body.reference, body.srcLocation, body.dstLocation
            )
        }

    @app.post("/api/v1/deployment/updateContent", status_code=202)
    def update_content(body: UploadBody, session: Session = authed) -> dict[str, str]:
        return {
            "eventIdentifier": svc.deployment.update_content(
                body.reference, body.srcLocation, body.dstLocation
            )
        }

    @app.post("/api/v1/deployment/deleteContent")
    def delete_content(body: DeleteBody, session: Session = authed) -> dict[str, Any]:
        return svc.deployment.delete_content(body.reference, body.crid)

    @app.get("/api/v1/deployment/status/{event_identifier}")
    def deployment_status(event_identifier: str, session: Session = authed) -> dict[str, Any]:
        return job_json(svc.deployment.uploading_status(event_identifier))

    @app.post("/api/v1/deployment/share")
    def share(body: ShareBody, session: Session = authed) -> dict[str, Any]:
        post = svc.deployment.share_to_sns(body.sink, body.account, body.review, body.contentUrl)
        return share_json(post)

    # ---- registry surface ----

    @app.get("/api/v1/content")
    def list_content(session: Session = authed) -> dict[str, Any]:
        return {"records": [record_json(r) for r in svc.registry.list_content_records()]}

    @app.get("/api/v1/content/{crid_text:path}")
    def get_content(crid_text: str, session: Session = authed) -> dict[str, Any]:
        if crid_text.startswith("crid://"):
            record = svc.registry.get_content_record(parse_crid(crid_text))
        else:
            record = svc.registry.find_by_serial(crid_text)
            if record is None:
                raise NotFoundError(f"no content record with serial {crid_text!r}")
        return record_json(record)

    @app.get("/api/v1/profiles")
    def list_profiles(session: Session = authed) -> dict[str, Any]:
        return {"profiles": [profile_json(p) for p in svc.registry.list_device_profiles()]}

    @app.put("/api/v1/profiles")
    def put_profile(body: ProfileBody, session: Session = authed) -> dict[str, Any]:
        profile = DeviceProfile(
            device_id=body.deviceId,
            device_class=DeviceClass.from_text(body.deviceClass),
            width=body.width,
            height=body.height,
            video_encoding=body.videoEncoding,
            audio_encoding=body.audioEncoding,
        )
        return profile_json(svc.registry.put_device_profile(profile))

    @app.get("/api/v1/profiles/{device_id}")
    def get_profile(device_id: str, session: Session = authed) -> dict[str, Any]:
        return profile_json(svc.registry.get_device_profile(device_id))

    # ---- public file serving ----

    def _serve_from(root: Path, subpath: str) -> FileResponse:
        candidate = (root / subpath).resolve()
        root = root.resolve()
        if root != candidate and root not in candidate.parents:
            raise NotFoundError("path escapes the served directory")
        if not candidate.is_file():
            raise NotFoundError(f"no such file: /{subpath}")
        return FileResponse(candidate)

    @app.get("/media/{subpath:path}")
    def serve_media(subpath: str) -> FileResponse:
        response = _serve_from(config.data_dir / "media", subpath)
        serial = subpath.split("/", 1)[0]
        record = svc.registry.find_by_serial(serial)
        if record is not None:
            svc.registry.increment_view_count(record.crid)
        return response

    @app.get("/fixtures/{subpath:path}")
    def serve_fixture(subpath: str) -> FileResponse:
        return _serve_from(config.data_dir / "fixtures", subpath)

    if config.ui_dir is not None and config.ui_dir.is_dir():
        app.mount("/ui", StaticFiles(directory=str(config.ui_dir), html=True), name="ui")

    return app
