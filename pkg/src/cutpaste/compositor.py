"""Rendering: turn a layout plan plus a component bank into an annotated
grayscale page, and write batches of pages as a loadable dataset.

Pages composite with min-blend (out = min(canvas, patch) on mask pixels),
which is the right model for dark ink on white paper: pasting is
idempotent and order-independent wherever placements do not overlap.
"""

from __future__ import annotations

import hashlib
import os
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from PIL import Image

from ._version import generator_version
from .corpus import (
    ANNOTATION_FILE,
    AnnotatedPage,
    ComponentBank,
    Instance,
    canonical_json,
)
from .geometry import Box, transform_polygon
from .layout import LayoutError, LayoutPlan, validate_plan

DEFAULT_PAGE_W = 1166
DEFAULT_PAGE_H = 1654

# annotation categories assigned to pasted box components; pasted bubbles
# keep their own category
COMPONENT_ANNOTATION = {
    "stage_number": "text",
    "assembly_group": "part",
    "speech_bubble": "speech_bubble",
}

MANIFEST_FILE = "manifest.json"
_PNG_COMPRESS_LEVEL = 6


@dataclass
class SynthPage:
    """A rendered page, its ground truth, and enough bookkeeping to audit it.

    ``instance_masks`` maps an annotation id to the (x, y, mask) triple
    that was pasted for it: top-left paste position plus the binary mask
    after resampling.  Consistency tests compare these masks against the
    rasterized output polygons.
    """

    image: np.ndarray
    annotations: List[Instance] = field(default_factory=list)
    provenance: dict = field(default_factory=dict)
    instance_masks: Dict[int, Tuple[int, int, np.ndarray]] = field(default_factory=dict)

    @property
    def width(self) -> int:
        return int(self.image.shape[1])

    @property
    def height(self) -> int:
        return int(self.image.shape[0])


def resample_patch(image: np.ndarray, mask: np.ndarray,
                   w: int, h: int) -> Tuple[np.ndarray, np.ndarray]:
    """Resize a patch to (w, h): bilinear for pixels, nearest for the mask."""
    if (image.shape[1], image.shape[0]) == (w, h):
        return image.copy(), mask.copy()
    img = np.asarray(Image.fromarray(image, "L").resize((w, h), Image.BILINEAR),
                     dtype=np.uint8)
    m = np.asarray(
        Image.fromarray(mask.astype(np.uint8) * 255, "L").resize((w, h), Image.NEAREST)
    ) > 127
    return img, m


def paste_min(canvas: np.ndarray, image: np.ndarray, mask: np.ndarray,
              x: int, y: int) -> None:
    """Min-blend *image* onto *canvas* at (x, y), only where *mask* is set."""
    h, w = image.shape
    region = canvas[y:y + h, x:x + w]
    np.minimum(region, image, out=region, where=mask)


def render(plan: LayoutPlan, bank: ComponentBank,
           seed: Optional[int] = None) -> SynthPage:
    """Render a validated plan onto a fresh all-white page.

    Each placement's patch is resampled to its target rect and min-blended
    through its mask.  Speech bubbles receive the patch polygon mapped by
    the same scale-and-translate transform; other components are annotated
    with their target rect as a box.
    """
    problems = validate_plan(plan)
    if problems:
        raise LayoutError(f"invalid plan: {problems[0]}")
    for p in plan.placements:
        if not 0 <= p.component_id < len(bank.patches):
            raise LayoutError(f"dangling component id {p.component_id}")

    canvas = np.full((plan.page_h, plan.page_w), 255, dtype=np.uint8)
    annotations: List[Instance] = []
    masks: Dict[int, Tuple[int, int, np.ndarray]] = {}
    for idx, p in enumerate(plan.placements):
        patch = bank.patches[p.component_id]
        x, y, w, h = (int(p.target.x), int(p.target.y),
                      int(p.target.w), int(p.target.h))
        img, m = resample_patch(patch.image, patch.mask, w, h)
        paste_min(canvas, img, m, x, y)
        if p.category == "speech_bubble":
            poly = transform_polygon(
                patch.polygon,
                scale=(w / patch.native_w, h / patch.native_h),
                offset=(x, y),
            )
            annotations.append(Instance(id=idx, category="speech_bubble", polygon=poly))
        else:
            annotations.append(Instance(
                id=idx, category=COMPONENT_ANNOTATION[p.category],
                bbox=Box(x, y, w, h)))
        masks[idx] = (x, y, m)

    plan_hash = hashlib.sha256(
        canonical_json(plan.to_dict()).encode("utf-8")).hexdigest()
    return SynthPage(
        image=canvas,
        annotations=annotations,
        provenance={
            "seed": seed,
            "plan_sha256": plan_hash,
            "bank_version": bank.version,
        },
        instance_masks=masks,
    )


def _clamped_record(inst: Instance, width: int, height: int) -> dict:
    # integer rounding may land a scaled vertex on the page border; pull it
    # back inside (within the 1 px slack the format allows)
    rec = inst.to_record()
    if "polygon" in rec:
        rec["polygon"] = [
            [min(max(vx, 0), width - 1), min(max(vy, 0), height - 1)]
            for vx, vy in rec["polygon"]
        ]
    return rec


def write_dataset(pages: Sequence[SynthPage], out_dir: str,
                  seed: Optional[int] = None,
                  method: Optional[str] = None) -> dict:
    """Write PNGs, one annotation JSON in the corpus schema, and a manifest.

    Output is canonical and carries no timestamps, so identical pages
    produce byte-identical files.
    """
    os.makedirs(out_dir, exist_ok=True)
    page_records = []
    for i, sp in enumerate(pages):
        pid = f"page_{i:06d}"
        fname = f"{pid}.png"
        Image.fromarray(sp.image, "L").save(
            os.path.join(out_dir, fname), "PNG", compress_level=_PNG_COMPRESS_LEVEL)
        page_records.append({
            "id": pid,
            "file": fname,
            "width": sp.width,
            "height": sp.height,
            "instances": [
                _clamped_record(inst, sp.width, sp.height) for inst in sp.annotations
            ],
        })
    with open(os.path.join(out_dir, ANNOTATION_FILE), "w", encoding="utf-8") as fh:
        fh.write(canonical_json({"pages": page_records}))
    manifest = {
        "generator_version": generator_version(),
        "method": method,
        "n_pages": len(page_records),
        "seed": seed,
    }
    with open(os.path.join(out_dir, MANIFEST_FILE), "w", encoding="utf-8") as fh:
        fh.write(canonical_json(manifest))
    return manifest


def as_annotated_page(sp: SynthPage, page_id: str) -> AnnotatedPage:
    """View a synthesized page through the corpus page type."""
    return AnnotatedPage(
        id=page_id, file=f"{page_id}.png",
        width=sp.width, height=sp.height,
        instances=list(sp.annotations), image=sp.image,
    )
