"""Annotated-page corpus: loading, validation, statistics and the
component bank used as paste material by the synthesizers.

A dataset on disk is a directory holding one ``annotations.json`` plus the
8-bit grayscale page PNGs it references:

    {"pages": [{"id": ..., "file": ..., "width": ..., "height": ...,
                "instances": [{"id": ..., "category": ...,
                               "polygon": [[x, y], ...] | "bbox": [x, y, w, h]}]}]}

``speech_bubble`` instances carry a polygon, every other category a box.
All coordinates are integer pixels.  JSON is always written in canonical
form (sorted keys, two-space indent) so files round-trip byte-identically.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

from .geometry import (
    Box,
    polygon_bbox,
    polygon_is_simple,
    rasterize_polygon,
    transform_polygon,
)

# annotation categories and their geometry kind, in reporting order
CATEGORY_GEOMETRY = {
    "speech_bubble": "polygon",
    "part": "bbox",
    "tool": "bbox",
    "symbol": "bbox",
    "text": "bbox",
}
CATEGORIES = tuple(CATEGORY_GEOMETRY)

# paste-material categories; distinct from the annotation categories above
COMPONENT_CATEGORIES = ("stage_number", "speech_bubble", "assembly_group")

# pixels darker than this count as ink when deriving masks from crops
INK_THRESHOLD = 250

ANNOTATION_FILE = "annotations.json"


class CorpusError(Exception):
    """Raised when a dataset or manifest fails validation."""


def canonical_json(obj) -> str:
    """Serialize with sorted keys and a fixed layout; ends with a newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass
class Instance:
    """One annotated object: a polygon for speech bubbles, a box otherwise."""

    id: int
    category: str
    polygon: Optional[List[Tuple[float, float]]] = None
    bbox: Optional[Box] = None

    def bounds(self) -> Box:
        if self.bbox is not None:
            return self.bbox
        return polygon_bbox(self.polygon)

    def to_record(self) -> dict:
        rec: dict = {"id": self.id, "category": self.category}
        if self.polygon is not None:
            rec["polygon"] = [[int(round(x)), int(round(y))] for x, y in self.polygon]
        else:
            rec["bbox"] = [int(round(v)) for v in
                           (self.bbox.x, self.bbox.y, self.bbox.w, self.bbox.h)]
        return rec


@dataclass
class AnnotatedPage:
    id: str
    file: str
    width: int
    height: int
    instances: List[Instance] = field(default_factory=list)
    image: Optional[np.ndarray] = None

    def instances_of(self, category: str) -> List[Instance]:
        return [inst for inst in self.instances if inst.category == category]

    def to_record(self) -> dict:
        return {
            "id": self.id,
            "file": self.file,
            "width": self.width,
            "height": self.height,
            "instances": [inst.to_record() for inst in self.instances],
        }


# ---------------------------------------------------------------------------
# loading and validation
# ---------------------------------------------------------------------------

def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_instance(rec, page_rec, diags: List[str]) -> Optional[Instance]:
    where = f"page {page_rec.get('id')!r} instance {rec.get('id')!r}"
    if not _is_int(rec.get("id")):
        diags.append(f"{where}: id must be an integer")
        return None
    category = rec.get("category")
    if category not in CATEGORY_GEOMETRY:
        diags.append(f"{where}: unknown category {category!r}")
        return None
    has_poly = "polygon" in rec
    has_box = "bbox" in rec
    if has_poly == has_box:
        diags.append(f"{where}: exactly one of polygon/bbox is required")
        return None
    kind = CATEGORY_GEOMETRY[category]
    width = page_rec.get("width")
    height = page_rec.get("height")

    if has_poly:
        if kind != "polygon":
            diags.append(f"{where}: category {category!r} must use a bbox")
            return None
        poly = rec["polygon"]
        if (not isinstance(poly, list) or len(poly) < 3
                or not all(isinstance(v, list) and len(v) == 2 for v in poly)):
            diags.append(f"{where}: polygon must be a list of >= 3 [x, y] pairs")
            return None
        if not all(_is_int(v[0]) and _is_int(v[1]) for v in poly):
            diags.append(f"{where}: polygon coordinates must be integers")
            return None
        verts = [(float(x), float(y)) for x, y in poly]
        if not all(0 <= x < width and 0 <= y < height for x, y in verts):
            diags.append(f"{where}: polygon vertex outside page bounds")
            return None
        if not polygon_is_simple(verts):
            diags.append(f"{where}: polygon self-intersects or is degenerate")
            return None
        return Instance(id=rec["id"], category=category, polygon=verts)

    if kind != "bbox":
        diags.append(f"{where}: category {category!r} must use a polygon")
        return None
    box = rec["bbox"]
    if not (isinstance(box, list) and len(box) == 4 and all(_is_int(v) for v in box)):
        diags.append(f"{where}: bbox must be [x, y, w, h] integers")
        return None
    x, y, w, h = box
    if w <= 0 or h <= 0:
        diags.append(f"{where}: bbox must have positive size")
        return None
    if x < 0 or y < 0 or x + w > width or y + h > height:
        diags.append(f"{where}: bbox outside page bounds")
        return None
    return Instance(id=rec["id"], category=category, bbox=Box(x, y, w, h))


def _scan(path: str, load_images: bool) -> Tuple[List[AnnotatedPage], List[str]]:
    if os.path.isdir(path):
        base = path
        ann_path = os.path.join(path, ANNOTATION_FILE)
    else:
        base = os.path.dirname(path) or "."
        ann_path = path
    if not os.path.exists(ann_path):
        return [], [f"annotation file not found: {ann_path}"]
    try:
        with open(ann_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        return [], [f"cannot parse {ann_path}: {exc}"]
    if not isinstance(doc, dict) or not isinstance(doc.get("pages"), list):
        return [], [f"{ann_path}: top level must be an object with a 'pages' list"]

    diags: List[str] = []
    pages: List[AnnotatedPage] = []
    seen_ids = set()
    for page_rec in doc["pages"]:
        pid = page_rec.get("id")
        if not isinstance(pid, str) or not pid:
            diags.append(f"page {pid!r}: id must be a non-empty string")
            continue
        if pid in seen_ids:
            diags.append(f"page {pid!r}: duplicate page id")
            continue
        seen_ids.add(pid)
        width = page_rec.get("width")
        height = page_rec.get("height")
        if not (_is_int(width) and _is_int(height) and width > 0 and height > 0):
            diags.append(f"page {pid!r}: width/height must be positive integers")
            continue
        fname = page_rec.get("file")
        if not isinstance(fname, str) or not fname:
            diags.append(f"page {pid!r}: file must be a non-empty string")
            continue

        image = None
        img_path = os.path.join(base, fname)
        if not os.path.exists(img_path):
            diags.append(f"page {pid!r}: image file missing: {fname}")
        elif load_images:
            with Image.open(img_path) as img:
                if img.mode != "L":
                    diags.append(f"page {pid!r}: image must be 8-bit grayscale, got mode {img.mode!r}")
                elif img.size != (width, height):
                    diags.append(
                        f"page {pid!r}: image size {img.size} does not match the"
                        f" recorded ({width}, {height})"
                    )
                else:
                    image = np.asarray(img, dtype=np.uint8)

        instances: List[Instance] = []
        inst_ids = set()
        recs = page_rec.get("instances")
        if not isinstance(recs, list):
            diags.append(f"page {pid!r}: instances must be a list")
            recs = []
        for rec in recs:
            inst = _check_instance(rec, page_rec, diags)
            if inst is None:
                continue
            if inst.id in inst_ids:
                diags.append(f"page {pid!r} instance {inst.id}: duplicate instance id")
                continue
            inst_ids.add(inst.id)
            instances.append(inst)

        pages.append(AnnotatedPage(
            id=pid, file=fname, width=width, height=height,
            instances=instances, image=image,
        ))
    return pages, diags


def validate_corpus(path: str) -> List[str]:
    """Return every validation diagnostic for the dataset at *path*."""
    _, diags = _scan(path, load_images=True)
    return diags


def load_corpus(path: str) -> List[AnnotatedPage]:
    """Load a dataset directory, raising CorpusError on the first defect."""
    pages, diags = _scan(path, load_images=True)
    if diags:
        raise CorpusError(diags[0])
    return pages


def save_corpus(pages: Sequence[AnnotatedPage], out_dir: str,
                write_images: bool = True) -> str:
    """Write annotations (and page images when present) under *out_dir*."""
    os.makedirs(out_dir, exist_ok=True)
    doc = {"pages": [page.to_record() for page in pages]}
    ann_path = os.path.join(out_dir, ANNOTATION_FILE)
    with open(ann_path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))
    if write_images:
        for page in pages:
            if page.image is None:
                continue
            Image.fromarray(page.image, "L").save(
                os.path.join(out_dir, page.file), "PNG", compress_level=6)
    return ann_path


# ---------------------------------------------------------------------------
# statistics
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StatsRow:
    category: str
    geometry: str
    n_instances: int
    n_images: int


def corpus_stats(pages: Sequence[AnnotatedPage]) -> List[StatsRow]:
    """Per-category instance and image counts, in reporting order.

    Only categories that occur are reported, so an empty corpus yields
    zero rows.  The counts are invariant under page reordering.
    """
    inst_count: Dict[str, int] = {}
    image_count: Dict[str, int] = {}
    for page in pages:
        seen = set()
        for inst in page.instances:
            inst_count[inst.category] = inst_count.get(inst.category, 0) + 1
            seen.add(inst.category)
        for cat in seen:
            image_count[cat] = image_count.get(cat, 0) + 1
    return [
        StatsRow(cat, CATEGORY_GEOMETRY[cat], inst_count[cat], image_count[cat])
        for cat in CATEGORIES
        if cat in inst_count
    ]


def format_stats_table(rows: Sequence[StatsRow]) -> str:
    header = ("category", "geometry", "instances", "images")
    cells = [header] + [
        (r.category, r.geometry, str(r.n_instances), str(r.n_images)) for r in rows
    ]
    widths = [max(len(row[i]) for row in cells) for i in range(4)]
    lines = []
    for row in cells:
        lines.append("  ".join(val.ljust(widths[i]) for i, val in enumerate(row)).rstrip())
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# component manifest and bank
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ManifestEntry:
    page_id: str
    rect: Box
    category: str


@dataclass
class ComponentPatch:
    """A crop of corpus pixels ready for pasting.

    ``mask`` flags the pixels that belong to the component: the rasterized
    annotation polygon for speech bubbles, ink-threshold pixels otherwise.
    ``polygon`` (crop-local vertices) is kept for speech bubbles so pasted
    copies receive an exact polygon annotation.
    """

    category: str
    image: np.ndarray
    mask: np.ndarray
    native_w: int
    native_h: int
    source_page_id: str
    source_rect: Box
    polygon: Optional[List[Tuple[float, float]]] = None


@dataclass
class ComponentBank:
    patches: List[ComponentPatch]
    version: str = ""

    def of(self, category: str) -> List[ComponentPatch]:
        return [p for p in self.patches if p.category == category]


def load_manifest(path: str) -> List[ManifestEntry]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise CorpusError(f"{path}: manifest must be a JSON list")
    entries = []
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise CorpusError(f"{path}: entry {i} must be an object")
        cat = rec.get("category")
        if cat not in COMPONENT_CATEGORIES:
            raise CorpusError(f"{path}: entry {i}: unknown component category {cat!r}")
        rect = rec.get("rect")
        if not (isinstance(rect, list) and len(rect) == 4 and all(_is_int(v) for v in rect)):
            raise CorpusError(f"{path}: entry {i}: rect must be [x, y, w, h] integers")
        if rect[2] <= 0 or rect[3] <= 0:
            raise CorpusError(f"{path}: entry {i}: rect must have positive size")
        pid = rec.get("page_id")
        if not isinstance(pid, str):
            raise CorpusError(f"{path}: entry {i}: page_id must be a string")
        entries.append(ManifestEntry(page_id=pid, rect=Box(*rect), category=cat))
    return entries


def save_manifest(entries: Sequence[ManifestEntry], path: str) -> None:
    doc = [
        {
            "page_id": e.page_id,
            "rect": [int(e.rect.x), int(e.rect.y), int(e.rect.w), int(e.rect.h)],
            "category": e.category,
        }
        for e in entries
    ]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))


def _bank_digest(patches: Sequence[ComponentPatch]) -> str:
    h = hashlib.sha256()
    for p in patches:
        meta = canonical_json({
            "category": p.category,
            "native_w": p.native_w,
            "native_h": p.native_h,
            "source_page_id": p.source_page_id,
            "source_rect": [int(p.source_rect.x), int(p.source_rect.y),
                            int(p.source_rect.w), int(p.source_rect.h)],
            "polygon": None if p.polygon is None
                       else [[int(x), int(y)] for x, y in p.polygon],
        })
        h.update(meta.encode("utf-8"))
        h.update(p.image.tobytes())
        h.update(np.ascontiguousarray(p.mask, dtype=np.uint8).tobytes())
    return h.hexdigest()


def extract_components(pages: Sequence[AnnotatedPage],
                       manifest: Sequence[ManifestEntry]) -> ComponentBank:
    """Cut the manifest crops out of their pages and build a bank.

    Speech-bubble crops must contain a fully enclosed speech_bubble polygon
    (the first one in page order is used); the patch mask is that polygon
    rasterized in crop coordinates.  Other components take an ink-threshold
    mask and must not be blank.
    """
    by_id = {page.id: page for page in pages}
    patches: List[ComponentPatch] = []
    for i, entry in enumerate(manifest):
        page = by_id.get(entry.page_id)
        if page is None:
            raise CorpusError(f"manifest entry {i}: unknown page {entry.page_id!r}")
        if page.image is None:
            raise CorpusError(f"manifest entry {i}: page {entry.page_id!r} has no image")
        r = entry.rect
        x, y, w, h = int(r.x), int(r.y), int(r.w), int(r.h)
        if x < 0 or y < 0 or x + w > page.width or y + h > page.height:
            raise CorpusError(f"manifest entry {i}: rect outside page {entry.page_id!r}")
        crop = page.image[y:y + h, x:x + w].copy()

        local_poly = None
        if entry.category == "speech_bubble":
            enclosed = None
            for inst in page.instances_of("speech_bubble"):
                if r.contains_box(polygon_bbox(inst.polygon)):
                    enclosed = inst
                    break
            if enclosed is None:
                raise CorpusError(
                    f"manifest entry {i}: no speech_bubble polygon inside rect"
                    f" on page {entry.page_id!r}")
            local_poly = transform_polygon(enclosed.polygon, offset=(-x, -y))
            mask = rasterize_polygon(local_poly, w, h)
        else:
            mask = crop < INK_THRESHOLD
            if not mask.any():
                raise CorpusError(
                    f"manifest entry {i}: empty mask for {entry.category!r}"
                    f" on page {entry.page_id!r}")

        patches.append(ComponentPatch(
            category=entry.category, image=crop, mask=mask,
            native_w=w, native_h=h,
            source_page_id=entry.page_id, source_rect=Box(x, y, w, h),
            polygon=local_poly,
        ))
    bank = ComponentBank(patches=patches)
    bank.version = _bank_digest(patches)
    return bank


BANK_FILE = "bank.json"


def save_bank(bank: ComponentBank, out_dir: str) -> str:
    os.makedirs(os.path.join(out_dir, "images"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "masks"), exist_ok=True)
    recs = []
    for i, p in enumerate(bank.patches):
        img_rel = f"images/patch_{i:04d}.png"
        mask_rel = f"masks/patch_{i:04d}.png"
        Image.fromarray(p.image, "L").save(os.path.join(out_dir, img_rel),
                                           "PNG", compress_level=6)
        Image.fromarray((p.mask.astype(np.uint8) * 255), "L").save(
            os.path.join(out_dir, mask_rel), "PNG", compress_level=6)
        recs.append({
            "category": p.category,
            "image": img_rel,
            "mask": mask_rel,
            "native_w": p.native_w,
            "native_h": p.native_h,
            "source_page_id": p.source_page_id,
            "source_rect": [int(p.source_rect.x), int(p.source_rect.y),
                            int(p.source_rect.w), int(p.source_rect.h)],
            "polygon": None if p.polygon is None
                       else [[int(x), int(y)] for x, y in p.polygon],
        })
    doc = {"version": bank.version, "patches": recs}
    path = os.path.join(out_dir, BANK_FILE)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))
    return path


def load_bank(path: str) -> ComponentBank:
    bank_path = os.path.join(path, BANK_FILE) if os.path.isdir(path) else path
    base = os.path.dirname(bank_path)
    try:
        with open(bank_path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise CorpusError(f"cannot load bank: {exc}")
    patches = []
    for rec in doc.get("patches", []):
        with Image.open(os.path.join(base, rec["image"])) as img:
            image = np.asarray(img, dtype=np.uint8)
        with Image.open(os.path.join(base, rec["mask"])) as img:
            mask = np.asarray(img) > 127
        poly = rec.get("polygon")
        patches.append(ComponentPatch(
            category=rec["category"], image=image, mask=mask,
            native_w=rec["native_w"], native_h=rec["native_h"],
            source_page_id=rec["source_page_id"],
            source_rect=Box(*rec["source_rect"]),
            polygon=None if poly is None else [(float(x), float(y)) for x, y in poly],
        ))
    return ComponentBank(patches=patches, version=doc.get("version", ""))
