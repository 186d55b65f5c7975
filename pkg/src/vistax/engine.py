"""Annotation sessions: localize regions, assert visual properties, finalize.

The workflow-order rule is enforced structurally: a session can only be
opened on a frozen schema, and finalize() takes no label argument anywhere;
the record's label and concept id are always copied from the schema binding
(or synthesized for lexical-gap nodes). Every state-mutating call emits one
audit event.
"""

from __future__ import annotations

import uuid
from dataclasses import dataclass, field
from datetime import datetime, timezone

from .errors import (
    InvalidBBoxError,
    NotAssertedError,
    PartialNotAcceptedError,
    RegionFinalizedError,
    UnknownImageError,
    UnknownRegionError,
)
from .labels import canonical_label
from .model import ResolutionResult, Schema, Value
from .resolve import resolve

OPEN = "open"
CLASSIFIED = "classified"
FINALIZED = "finalized"


def utc_now() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


@dataclass(frozen=True)
class BBox:
    x: int
    y: int
    width: int
    height: int

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "width": self.width, "height": self.height}

    @classmethod
    def from_any(cls, value) -> "BBox":
        if isinstance(value, BBox):
            return value
        if isinstance(value, dict):
            return cls(int(value["x"]), int(value["y"]),
                       int(value["width"]), int(value["height"]))
        x, y, w, h = value
        return cls(int(x), int(y), int(w), int(h))


@dataclass(frozen=True)
class ImageRef:
    image_id: str
    width: int | None = None
    height: int | None = None


@dataclass
class Region:
    region_id: str
    image: str
    bbox: BBox
    assertions: dict[str, Value] = field(default_factory=dict)
    state: str = OPEN


@dataclass(frozen=True)
class AnnotationRecord:
    record_id: str
    image: str
    bbox: BBox
    assertions: dict[str, Value]
    node_id: str
    status: str
    label: str
    concept_id: int
    schema_stamp: str
    annotator_id: str
    timestamp: str

    def as_dict(self) -> dict:
        return {
            "record_id": self.record_id,
            "image": self.image,
            "bbox": self.bbox.as_dict(),
            "assertions": dict(self.assertions),
            "node_id": self.node_id,
            "status": self.status,
            "label": self.label,
            "concept_id": self.concept_id,
            "schema_stamp": self.schema_stamp,
            "annotator_id": self.annotator_id,
            "timestamp": self.timestamp,
        }

    @classmethod
    def from_dict(cls, raw: dict) -> "AnnotationRecord":
        return cls(
            record_id=raw["record_id"], image=raw["image"],
            bbox=BBox.from_any(raw["bbox"]),
            assertions={k: v for k, v in raw["assertions"].items()},
            node_id=raw["node_id"], status=raw["status"], label=raw["label"],
            concept_id=raw["concept_id"], schema_stamp=raw["schema_stamp"],
            annotator_id=raw["annotator_id"], timestamp=raw["timestamp"],
        )


class Session:
    """Single-writer annotation session pinned to one frozen schema version."""

    def __init__(self, schema: Schema, annotator_id: str,
                 images: list[ImageRef | str], role: str = "classifier",
                 session_id: str | None = None, audit=None, clock=utc_now,
                 memory=None):
        schema.require_frozen()
        self.schema = schema
        self.schema_stamp = schema.version_stamp
        self.annotator_id = annotator_id
        self.role = role
        self.memory = memory
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.images: dict[str, ImageRef] = {}
        for ref in images:
            ref = ImageRef(image_id=ref) if isinstance(ref, str) else ref
            self.images[ref.image_id] = ref
        self.regions: dict[str, Region] = {}
        self.records: list[AnnotationRecord] = []
        self._audit = audit
        self._clock = clock
        self._region_seq = 0
        self._audit_seq = 0
        self._emit("open_session", {"annotator_id": annotator_id,
                                    "images": sorted(self.images)})

    # --- audit plumbing ---

    def _emit(self, operation: str, payload: dict):
        self._audit_seq += 1
        if self._audit is None:
            return
        self._audit.append({
            "seq": self._audit_seq,
            "timestamp": self._clock(),
            "session_id": self.session_id,
            "operation": operation,
            "payload": payload,
            "schema_stamp": self.schema_stamp,
        })

    # --- region lifecycle ---

    def _region(self, region_id: str) -> Region:
        try:
            return self.regions[region_id]
        except KeyError:
            raise UnknownRegionError(f"no region {region_id!r}", locus=region_id) from None

    def _open_region(self, region_id: str) -> Region:
        region = self._region(region_id)
        if region.state == FINALIZED:
            raise RegionFinalizedError(f"region {region_id!r} is finalized", locus=region_id)
        return region

    def localize(self, image_id: str, bbox) -> str:
        if image_id not in self.images:
            raise UnknownImageError(f"image {image_id!r} not in session queue", locus=image_id)
        box = BBox.from_any(bbox)
        if box.width <= 0 or box.height <= 0:
            raise InvalidBBoxError(f"bbox {box} has non-positive size")
        ref = self.images[image_id]
        if ref.width is not None and ref.height is not None:
            if box.x < 0 or box.y < 0 or box.x + box.width > ref.width \
                    or box.y + box.height > ref.height:
                raise InvalidBBoxError(
                    f"bbox {box} exceeds image bounds {ref.width}x{ref.height}")
        self._region_seq += 1
        region_id = f"{self.session_id}:r{self._region_seq}"
        self.regions[region_id] = Region(region_id=region_id, image=image_id, bbox=box)
        self._emit("localize", {"region_id": region_id, "image": image_id,
                                "bbox": box.as_dict()})
        return region_id

    def resolution(self, region_id: str) -> ResolutionResult:
        return resolve(self.schema, self._region(region_id).assertions)

    def assert_property(self, region_id: str, property_id: str, value: Value) -> ResolutionResult:
        region = self._open_region(region_id)
        self.schema.check_value(property_id, value)
        region.assertions[property_id] = value
        result = resolve(self.schema, region.assertions)
        region.state = CLASSIFIED if result.status == "leaf" else OPEN
        self._emit("assert_property", {"region_id": region_id,
                                       "property": property_id, "value": value})
        return result

    def retract_property(self, region_id: str, property_id: str) -> ResolutionResult:
        region = self._open_region(region_id)
        if property_id not in region.assertions:
            raise NotAssertedError(f"{property_id!r} not asserted on {region_id!r}",
                                   locus=property_id)
        del region.assertions[property_id]
        result = resolve(self.schema, region.assertions)
        region.state = CLASSIFIED if result.status == "leaf" else OPEN
        self._emit("retract_property", {"region_id": region_id, "property": property_id})
        return result

    def finalize(self, region_id: str, accept_partial: bool = False) -> AnnotationRecord:
        region = self._open_region(region_id)
        result = resolve(self.schema, region.assertions)
        if result.status != "leaf" and not accept_partial:
            raise PartialNotAcceptedError(
                f"resolution stopped at {result.terminal!r}; "
                "set accept_partial to record an internal node", locus=region_id)
        node = self.schema.node(result.terminal)
        record = AnnotationRecord(
            record_id=f"{region_id}",
            image=region.image,
            bbox=region.bbox,
            assertions=dict(region.assertions),
            node_id=result.terminal,
            status=result.status,
            label=canonical_label(self.schema, result.terminal),
            concept_id=node.concept_id,
            schema_stamp=self.schema_stamp,
            annotator_id=self.annotator_id,
            timestamp=self._clock(),
        )
        region.state = FINALIZED
        self.records.append(record)
        if self.memory is not None and record.assertions:
            self.memory.observe(record.assertions, node_id=record.node_id)
        self._emit("finalize", {"region_id": region_id,
                                "accept_partial": accept_partial,
                                "record_id": record.record_id,
                                "node_id": record.node_id})
        return record


def open_session(schema: Schema, annotator_id: str, images: list,
                 role: str = "classifier", session_id: str | None = None,
                 audit=None, clock=utc_now, memory=None) -> Session:
    return Session(schema, annotator_id, images, role=role,
                   session_id=session_id, audit=audit, clock=clock,
                   memory=memory)
