"""HTTP service exposing the frozen schema, annotation sessions and reports.

Every response envelope carries the schema version stamp so clients can
refuse to mix vocabularies. No endpoint accepts a label anywhere: labels
and concept ids only ever travel server -> client, which is the wire-level
form of the role separation between vocabulary author and annotator.
Mutating endpoints accept a client-supplied ``request_id`` and replay the
original response on retries.
"""

from __future__ import annotations

import threading

from fastapi import Body, FastAPI, Request, Response
from fastapi.responses import FileResponse, JSONResponse

from .agreement import build_matrix, compute_report
from .engine import BBox, ImageRef, Session
from .errors import (
    InvalidBBoxError,
    NoSharedItemsError,
    NotAssertedError,
    PartialNotAcceptedError,
    RegionFinalizedError,
    UnknownImageError,
    UnknownNodeError,
    UnknownPropertyError,
    UnknownRegionError,
    ValueOutOfDomainError,
    VistaxError,
)
from .labels import canonical_label
from .model import ENUM, BOOLEAN, ResolutionResult, Schema
from .storage import AuditLog, RecordStore, build_image_index

_STATUS_BY_CODE = {
    UnknownRegionError.code: 404,
    UnknownImageError.code: 404,
    UnknownNodeError.code: 404,
    NoSharedItemsError.code: 404,
    RegionFinalizedError.code: 409,
    PartialNotAcceptedError.code: 409,
    UnknownPropertyError.code: 422,
    ValueOutOfDomainError.code: 422,
    InvalidBBoxError.code: 422,
    NotAssertedError.code: 422,
}


def schema_payload(schema: Schema) -> dict:
    properties = []
    for pid in sorted(schema.properties):
        prop = schema.properties[pid]
        entry = {"id": prop.id, "kind": prop.kind,
                 "phrases": {str(k): v for k, v in prop.phrase_map.items()}}
        if prop.kind in (ENUM, BOOLEAN):
            entry["variants"] = list(prop.variants)
        else:
            entry["range"] = list(prop.int_range)
        properties.append(entry)
    nodes = []
    for nid in sorted(schema.nodes):
        node = schema.nodes[nid]
        binding = None
        if node.binding is not None:
            binding = {"lemma": node.binding.lemma,
                       "language": node.binding.language,
                       "gloss": node.binding.gloss,
                       "synonyms": list(node.binding.synonyms)}
        nodes.append({
            "node_id": node.node_id,
            "parent": node.parent,
            "differentiae": [{"property": c.property, "required_value": c.required_value}
                             for c in node.differentiae],
            "binding": binding,
            "concept_id": node.concept_id,
            "label": canonical_label(schema, nid),
            "children": schema.children_of(nid),
        })
    return {"schema_id": schema.schema_id,
            "version_stamp": schema.version_stamp,
            "context": {"name": schema.context.name,
                        "purpose": schema.context.purpose,
                        "language": schema.context.language},
            "root": schema.root_id,
            "properties": properties,
            "nodes": nodes}


def resolution_payload(result: ResolutionResult) -> dict:
    return {
        "path": list(result.path),
        "terminal": result.terminal,
        "status": result.status,
        "unsatisfied_frontier": {
            child: [{"property": c.property, "required_value": c.required_value}
                    for c in constraints]
            for child, constraints in result.unsatisfied_frontier.items()
        },
    }


class ServiceState:
    def __init__(self, schema: Schema | None, store_path=None, images_dir=None,
                 audit_path=None):
        self.schema = schema
        self.stamp = schema.version_stamp if schema is not None else None
        self.store = None
        if store_path is not None:
            stamps = {self.stamp} if self.stamp else set()
            self.store = RecordStore(store_path, known_stamps=stamps)
        self.audit = AuditLog(audit_path) if audit_path else None
        self.images = build_image_index(images_dir) if images_dir else {}
        self.sessions: dict[str, Session] = {}
        self.session_locks: dict[str, threading.Lock] = {}
        self.region_owner: dict[str, str] = {}
        self.replays: dict[str, dict] = {}
        self.global_lock = threading.Lock()

    def session_for_region(self, region_id: str) -> Session:
        session_id = self.region_owner.get(region_id)
        if session_id is None:
            raise UnknownRegionError(f"no region {region_id!r}", locus=region_id)
        return self.sessions[session_id]

    def lock_for(self, session_id: str) -> threading.Lock:
        return self.session_locks[session_id]


def create_app(schema: Schema | None, store_path=None, images_dir=None,
               audit_path=None) -> FastAPI:
    if schema is not None:
        schema.require_frozen()
    state = ServiceState(schema, store_path=store_path, images_dir=images_dir,
                         audit_path=audit_path)
    app = FastAPI(title="vistax annotation service")
    app.state.service = state

    # the browser workbench is typically served from a separate static origin
    from fastapi.middleware.cors import CORSMiddleware
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])

    @app.middleware("http")
    async def stamp_header(request: Request, call_next):
        # envelopes carry the stamp in-body; raw responses (image bytes)
        # still need it, so every response gets the header
        response = await call_next(request)
        if state.stamp:
            response.headers["X-Schema-Stamp"] = state.stamp
        return response

    def envelope(payload, status_code: int = 200) -> JSONResponse:
        return JSONResponse({"status": "ok", "schema_stamp": state.stamp,
                             "payload": payload}, status_code=status_code)

    def error_envelope(code: str, message: str, locus, status_code: int) -> JSONResponse:
        return JSONResponse({"status": "error", "schema_stamp": state.stamp,
                             "error": {"code": code, "message": message,
                                       "locus": locus}},
                            status_code=status_code)

    @app.exception_handler(VistaxError)
    async def on_domain_error(_request: Request, exc: VistaxError):
        return error_envelope(exc.code, exc.message, exc.locus,
                              _STATUS_BY_CODE.get(exc.code, 422))

    def replayed(request_id) -> dict | None:
        if request_id is None:
            return None
        return state.replays.get(str(request_id))

    def remember(request_id, payload) -> None:
        if request_id is not None:
            state.replays[str(request_id)] = payload

    def require_schema() -> Schema:
        if state.schema is None:
            raise _NoSchema()
        return state.schema

    class _NoSchema(Exception):
        pass

    @app.exception_handler(_NoSchema)
    async def on_no_schema(_request: Request, _exc: _NoSchema):
        return error_envelope("NoSchema", "no schema loaded", None, 503)

    # --- schema ---

    @app.get("/schema")
    def get_schema():
        return envelope(schema_payload(require_schema()))

    # --- sessions and regions ---

    @app.post("/sessions")
    def create_session(body: dict = Body(...)):
        sch = require_schema()
        cached = replayed(body.get("request_id"))
        if cached is not None:
            return envelope(cached)
        annotator_id = str(body.get("annotator_id") or "")
        if not annotator_id:
            raise ValueOutOfDomainError("annotator_id must be non-empty",
                                        locus="annotator_id")
        image_ids = body.get("images") or []
        if not isinstance(image_ids, list):
            raise ValueOutOfDomainError("images must be a list of image ids",
                                        locus="images")
        refs = []
        for image_id in image_ids:
            info = state.images.get(image_id)
            if info is not None:
                refs.append(ImageRef(image_id, info.width, info.height))
            else:
                refs.append(ImageRef(image_id))
        with state.global_lock:
            session = Session(sch, annotator_id, refs, audit=state.audit)
            state.sessions[session.session_id] = session
            state.session_locks[session.session_id] = threading.Lock()
        payload = {"session_id": session.session_id,
                   "images": sorted(session.images)}
        remember(body.get("request_id"), payload)
        return envelope(payload, status_code=201)

    def _session(session_id: str) -> Session:
        session = state.sessions.get(session_id)
        if session is None:
            raise UnknownRegionError(f"no session {session_id!r}", locus=session_id)
        return session

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        """Full session readback, so a reloaded client can rebuild its view
        from nothing but the session id."""
        require_schema()
        session = _session(session_id)
        regions = []
        for region in session.regions.values():
            regions.append({
                "region_id": region.region_id,
                "image": region.image,
                "bbox": region.bbox.as_dict(),
                "state": region.state,
                "assertions": dict(region.assertions),
            })
        return envelope({
            "session_id": session.session_id,
            "annotator_id": session.annotator_id,
            "images": sorted(session.images),
            "regions": regions,
            "records": [record.as_dict() for record in session.records],
        })

    @app.post("/sessions/{session_id}/regions")
    def create_region(session_id: str, body: dict = Body(...)):
        require_schema()
        session = _session(session_id)
        cached = replayed(body.get("request_id"))
        if cached is not None:
            return envelope(cached)
        try:
            bbox = BBox.from_any(body.get("bbox") or {})
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidBBoxError(f"bbox must carry integer x/y/width/height ({exc})")
        with state.lock_for(session_id):
            region_id = session.localize(str(body.get("image")), bbox)
            state.region_owner[region_id] = session_id
        payload = {"region_id": region_id, "image": body.get("image"),
                   "bbox": bbox.as_dict()}
        remember(body.get("request_id"), payload)
        return envelope(payload, status_code=201)

    @app.post("/regions/{region_id}/assertions")
    def assert_property(region_id: str, body: dict = Body(...)):
        require_schema()
        session = state.session_for_region(region_id)
        cached = replayed(body.get("request_id"))
        if cached is not None:
            return envelope(cached)
        prop = str(body.get("property"))
        value = body.get("value")
        with state.lock_for(session.session_id):
            result = session.assert_property(region_id, prop, value)
        payload = resolution_payload(result)
        remember(body.get("request_id"), payload)
        return envelope(payload)

    @app.delete("/regions/{region_id}/assertions/{property_id}")
    def retract_property(region_id: str, property_id: str):
        require_schema()
        session = state.session_for_region(region_id)
        with state.lock_for(session.session_id):
            result = session.retract_property(region_id, property_id)
        return envelope(resolution_payload(result))

    @app.get("/regions/{region_id}/resolution")
    def get_resolution(region_id: str):
        require_schema()
        session = state.session_for_region(region_id)
        return envelope(resolution_payload(session.resolution(region_id)))

    @app.post("/regions/{region_id}/finalize")
    def finalize(region_id: str, body: dict = Body(default={})):
        require_schema()
        session = state.session_for_region(region_id)
        cached = replayed(body.get("request_id"))
        if cached is not None:
            return envelope(cached)
        accept_partial = bool(body.get("accept_partial", False))
        with state.lock_for(session.session_id):
            record = session.finalize(region_id, accept_partial=accept_partial)
            if state.store is not None:
                with state.global_lock:
                    state.store.append([record])
        payload = record.as_dict()
        remember(body.get("request_id"), payload)
        return envelope(payload, status_code=201)

    # --- reports ---

    @app.get("/reports/agreement")
    def agreement(annotators: str = "", metric: str = "all",
                  hierarchical: bool = False):
        sch = require_schema()
        if state.store is None:
            raise NoSharedItemsError("no record store configured")
        wanted = [a for a in annotators.split(",") if a] if annotators else []
        records = state.store.load(schema=None)
        by_annotator: dict[str, list] = {}
        for record in records:
            if wanted and record.annotator_id not in wanted:
                continue
            by_annotator.setdefault(record.annotator_id, []).append(record)
        if len(by_annotator) < 2:
            raise NoSharedItemsError(
                f"need records from two or more annotators, have {len(by_annotator)}")
        matrix = build_matrix([by_annotator[a] for a in sorted(by_annotator)])
        report = compute_report(matrix, schema=sch, hierarchical=hierarchical)
        payload = report.as_dict()
        if metric != "all":
            key = {"percent": "percent_agreement", "kappa": "cohen_kappa",
                   "fleiss": "fleiss_kappa"}.get(metric)
            if key:
                payload = {key: payload[key], "item_count": payload["item_count"],
                           "annotator_count": payload["annotator_count"]}
        return envelope(payload)

    # --- images ---

    @app.get("/images")
    def image_index():
        return envelope({"images": [info.as_dict()
                                    for _, info in sorted(state.images.items())]})

    @app.get("/images/{image_id}")
    def image_bytes(image_id: str):
        info = state.images.get(image_id)
        if info is None:
            return error_envelope("UnknownImage", f"no image {image_id!r}",
                                  image_id, 404)
        return FileResponse(info.path)

    return app
