"""The two comparison augmentors: quantity-driven random pasting and
same-class instance switching.  Both emit SynthPage objects so one
harness writes and evaluates every method.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .compositor import COMPONENT_ANNOTATION, SynthPage, paste_min, resample_patch
from .corpus import AnnotatedPage, ComponentBank, CorpusError, Instance
from .geometry import Box, polygon_bounds, rasterize_polygon, transform_polygon
from .layout import LayoutError

# an instance survives occlusion only while at least this fraction of its
# pasted mask stays visible
MIN_VISIBLE_FRACTION = 0.25


@dataclass(frozen=True)
class NaiveQuantities:
    """How many of each component the naive augmentor pastes on one page."""

    n_key: int
    n_bubble: int
    n_number: int
    n_group: int


def sample_naive_quantities(rng: np.random.Generator) -> NaiveQuantities:
    """Draw component counts: 2..8 in total, at most four bubbles, and the
    remainder split uniformly between stage numbers and assembly groups."""
    n_key = 2 + int(rng.integers(7))
    n_bubble = min(4, n_key - 2)
    rest = n_key - n_bubble
    n_number = int(rng.integers(rest + 1))
    return NaiveQuantities(n_key=n_key, n_bubble=n_bubble,
                           n_number=n_number, n_group=rest - n_number)


def _pick(rng: np.random.Generator, bank: ComponentBank, category: str) -> int:
    candidates = [i for i, p in enumerate(bank.patches) if p.category == category]
    if not candidates:
        raise LayoutError(f"component bank has no {category!r} patches")
    return candidates[int(rng.integers(len(candidates)))]


def _visible_after(mask: np.ndarray, x: int, y: int,
                   later: Sequence[Tuple[int, int, np.ndarray]]) -> np.ndarray:
    """Clip a pasted mask by every mask pasted after it (page coordinates)."""
    visible = mask.copy()
    h, w = mask.shape
    for lx, ly, lmask in later:
        lh, lw = lmask.shape
        x0, x1 = max(x, lx), min(x + w, lx + lw)
        y0, y1 = max(y, ly), min(y + h, ly + lh)
        if x0 >= x1 or y0 >= y1:
            continue
        visible[y0 - y:y1 - y, x0 - x:x1 - x] &= ~lmask[y0 - ly:y1 - ly, x0 - lx:x1 - lx]
    return visible


def naive_cut_paste(rng: np.random.Generator, bank: ComponentBank,
                    page_w: int, page_h: int,
                    seed: Optional[int] = None) -> SynthPage:
    """Paste sampled component counts at uniformly random page positions.

    Pastes land in draw order (bubbles, then numbers, then groups) and a
    later paste overwrites what is under its mask, so earlier instances
    can be partially or fully occluded.  Occlusion clips an instance's
    visible mask: boxes shrink to the visible pixels and anything under
    MIN_VISIBLE_FRACTION is dropped from the annotations.
    """
    quantities = sample_naive_quantities(rng)
    order = (["speech_bubble"] * quantities.n_bubble
             + ["stage_number"] * quantities.n_number
             + ["assembly_group"] * quantities.n_group)

    canvas = np.full((page_h, page_w), 255, dtype=np.uint8)
    pasted = []  # (category, patch_id, x, y, image, mask)
    for category in order:
        patch_id = _pick(rng, bank, category)
        patch = bank.patches[patch_id]
        scale = min(1.0, page_w / patch.native_w, page_h / patch.native_h)
        w = max(1, round(patch.native_w * scale))
        h = max(1, round(patch.native_h * scale))
        x = int(rng.integers(page_w - w + 1))
        y = int(rng.integers(page_h - h + 1))
        img, mask = resample_patch(patch.image, patch.mask, w, h)
        region = canvas[y:y + h, x:x + w]
        region[mask] = img[mask]
        pasted.append((category, patch_id, x, y, img, mask))

    annotations: List[Instance] = []
    instance_masks = {}
    for k, (category, patch_id, x, y, img, mask) in enumerate(pasted):
        total = int(mask.sum())
        if total == 0:
            continue
        later = [(lx, ly, lmask) for (_, _, lx, ly, _, lmask) in pasted[k + 1:]]
        visible = _visible_after(mask, x, y, later)
        n_visible = int(visible.sum())
        if n_visible / total < MIN_VISIBLE_FRACTION:
            continue
        patch = bank.patches[patch_id]
        if category == "speech_bubble":
            poly = transform_polygon(
                patch.polygon,
                scale=(mask.shape[1] / patch.native_w, mask.shape[0] / patch.native_h),
                offset=(x, y))
            annotations.append(Instance(id=k, category="speech_bubble", polygon=poly))
        else:
            if n_visible == total:
                box = Box(x, y, mask.shape[1], mask.shape[0])
            else:
                rows = np.flatnonzero(visible.any(axis=1))
                cols = np.flatnonzero(visible.any(axis=0))
                box = Box(x + int(cols[0]), y + int(rows[0]),
                          int(cols[-1] - cols[0]) + 1, int(rows[-1] - rows[0]) + 1)
            annotations.append(Instance(
                id=k, category=COMPONENT_ANNOTATION[category], bbox=box))
        instance_masks[k] = (x, y, mask)

    return SynthPage(
        image=canvas,
        annotations=annotations,
        provenance={
            "seed": seed,
            "method": "naive",
            "quantities": quantities.__dict__.copy(),
            "bank_version": bank.version,
        },
        instance_masks=instance_masks,
    )


def _switch_one(dest: AnnotatedPage, dest_inst: Instance,
                donor: AnnotatedPage, donor_inst: Instance) -> SynthPage:
    canvas = dest.image.copy()

    dmin_x, dmin_y, dmax_x, dmax_y = polygon_bounds(dest_inst.polygon)
    dx, dy = int(dmin_x), int(dmin_y)
    dw, dh = max(1, int(dmax_x) - dx), max(1, int(dmax_y) - dy)
    erase = rasterize_polygon(
        transform_polygon(dest_inst.polygon, offset=(-dx, -dy)), dw, dh)
    region = canvas[dy:dy + dh, dx:dx + dw]
    region[erase] = 255

    smin_x, smin_y, smax_x, smax_y = polygon_bounds(donor_inst.polygon)
    sx0, sy0 = int(smin_x), int(smin_y)
    sw, sh = max(1, int(smax_x) - sx0), max(1, int(smax_y) - sy0)
    crop = donor.image[sy0:sy0 + sh, sx0:sx0 + sw]
    donor_mask = rasterize_polygon(
        transform_polygon(donor_inst.polygon, offset=(-sx0, -sy0)), sw, sh)

    img, mask = resample_patch(crop, donor_mask, dw, dh)
    paste_min(canvas, img, mask, dx, dy)

    scale = (dw / sw, dh / sh)
    new_poly = transform_polygon(
        donor_inst.polygon, scale=scale,
        offset=(dx - sx0 * scale[0], dy - sy0 * scale[1]))
    annotations = [
        Instance(id=inst.id, category="speech_bubble", polygon=new_poly)
        if inst is dest_inst else inst
        for inst in dest.instances
    ]
    return SynthPage(
        image=canvas,
        annotations=annotations,
        provenance={
            "method": "switch",
            "dest_page": dest.id,
            "donor_page": donor.id,
            "switched_instance": dest_inst.id,
        },
        instance_masks={dest_inst.id: (dx, dy, mask)},
    )


def instance_switch(rng: np.random.Generator,
                    corpus: Sequence[AnnotatedPage],
                    seed: Optional[int] = None) -> Tuple[SynthPage, SynthPage]:
    """Swap one speech bubble between two pages, both directions.

    Donor pixels are the polygon-masked crop of the source bubble,
    anisotropically resized to the destination bubble's bounding box; the
    destination bubble is first erased to white inside its polygon.  Every
    other annotation on both pages is carried over untouched.
    """
    eligible = [p for p in corpus
                if p.image is not None and p.instances_of("speech_bubble")]
    if len(eligible) < 2:
        raise CorpusError("instance switching needs >= 2 pages with speech bubbles")
    i = int(rng.integers(len(eligible)))
    j = int(rng.integers(len(eligible) - 1))
    if j >= i:
        j += 1
    page_a, page_b = eligible[i], eligible[j]
    bubbles_a = page_a.instances_of("speech_bubble")
    bubbles_b = page_b.instances_of("speech_bubble")
    inst_a = bubbles_a[int(rng.integers(len(bubbles_a)))]
    inst_b = bubbles_b[int(rng.integers(len(bubbles_b)))]

    out_a = _switch_one(page_a, inst_a, page_b, inst_b)
    out_b = _switch_one(page_b, inst_b, page_a, inst_a)
    for page in (out_a, out_b):
        page.provenance["seed"] = seed
    return out_a, out_b
