"""Page-layout planning for the context-aware synthesizer.

A page is organized around one or two *effective areas*: the rectangles
that would hold a drawing of an assembly step on a real instruction page.
Components are then attached to each area the way layouters actually use
them: the stage number sits in the top-left corner, exactly one assembly
drawing (the parts group) occupies another edge slot, speech bubbles fill
the remaining edge slots and may additionally float strictly inside.

Area fractions are sampled from narrow ranges per arrangement:

* one area  -- alpha ~ U[0.7, 0.9]; beta ~ U[0.4, 0.6] when pinned to the
  top or bottom of the page, U[0.6, 0.8] when centred in the middle.
* two areas, side by side -- alpha fixed at 0.5 each; beta ~ U[0.7, 0.9]
  independently.
* two areas, stacked -- alpha ~ U[0.7, 0.9] each; beta drawn uniformly
  from {1/3, 1/2, 2/3}, redrawing a draw that would push the stack past
  full page height.

Pixel sizes come from ``area_dims`` (plain ``round`` of fraction x page
size).  All randomness flows through one ``numpy.random.Generator`` so a
given seed always reproduces the same plan.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import ComponentBank
from .geometry import Box

# ---------------------------------------------------------------------------
# tunables
# ---------------------------------------------------------------------------

# page margin used when an area is pinned to the top or bottom edge,
# as a fraction of page height
DEFAULT_MARGIN_FRAC = 0.02

# a patch may occupy at most this fraction of its area per axis before
# it is downscaled to fit
DEFAULT_MAX_FIT = 0.45

# rejection-sampling attempts per placement
DEFAULT_PLACE_ATTEMPTS = 20

# mandatory components retry at progressively smaller scales
DEFAULT_DOWNSCALE_FACTOR = 0.8
DEFAULT_DOWNSCALE_RETRIES = 4

STACK_BETA_CHOICES = (1.0 / 3.0, 1.0 / 2.0, 2.0 / 3.0)

CORNER_SLOTS = ("top_left", "top_right", "bottom_left", "bottom_right")
_CORNER_SIDES = {
    "top_left": ("left", "top"),
    "top_right": ("right", "top"),
    "bottom_left": ("bottom", "left"),
    "bottom_right": ("bottom", "right"),
}
SIDE_SLOTS = ("top", "bottom", "left", "right")


class LayoutError(Exception):
    pass


@dataclass
class LayoutParams:
    margin_frac: float = DEFAULT_MARGIN_FRAC
    max_fit: float = DEFAULT_MAX_FIT
    place_attempts: int = DEFAULT_PLACE_ATTEMPTS
    downscale_factor: float = DEFAULT_DOWNSCALE_FACTOR
    downscale_retries: int = DEFAULT_DOWNSCALE_RETRIES


@dataclass
class EffectiveArea:
    alpha: float
    beta: float
    rect: Box
    arrangement_tag: str


@dataclass
class Placement:
    component_id: int          # index into the bank's patch list
    category: str
    area_index: int
    target: Box                # page coordinates, integer pixels
    scale: float
    role: str                  # "edge" | "center"
    touched_sides: Tuple[str, ...]


@dataclass
class LayoutPlan:
    page_w: int
    page_h: int
    areas: List[EffectiveArea] = field(default_factory=list)
    placements: List[Placement] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "page_w": self.page_w,
            "page_h": self.page_h,
            "areas": [
                {
                    "alpha": a.alpha,
                    "beta": a.beta,
                    "rect": [int(a.rect.x), int(a.rect.y), int(a.rect.w), int(a.rect.h)],
                    "arrangement_tag": a.arrangement_tag,
                }
                for a in self.areas
            ],
            "placements": [
                {
                    "component_id": p.component_id,
                    "category": p.category,
                    "area_index": p.area_index,
                    "target": [int(p.target.x), int(p.target.y), int(p.target.w), int(p.target.h)],
                    "scale": p.scale,
                    "role": p.role,
                    "touched_sides": list(p.touched_sides),
                }
                for p in self.placements
            ],
        }

    @staticmethod
    def from_dict(doc: dict) -> "LayoutPlan":
        return LayoutPlan(
            page_w=doc["page_w"],
            page_h=doc["page_h"],
            areas=[
                EffectiveArea(
                    alpha=a["alpha"], beta=a["beta"],
                    rect=Box(*a["rect"]), arrangement_tag=a["arrangement_tag"],
                )
                for a in doc["areas"]
            ],
            placements=[
                Placement(
                    component_id=p["component_id"], category=p["category"],
                    area_index=p["area_index"], target=Box(*p["target"]),
                    scale=p["scale"], role=p["role"],
                    touched_sides=tuple(p["touched_sides"]),
                )
                for p in doc["placements"]
            ],
        )


# ---------------------------------------------------------------------------
# effective areas
# ---------------------------------------------------------------------------

def area_dims(alpha: float, beta: float, page_w: int, page_h: int) -> Tuple[int, int]:
    """Pixel size of an area occupying fractions (alpha, beta) of the page."""
    return (round(alpha * page_w), round(beta * page_h))


def _clamped(x: int, w: int, limit: int) -> int:
    return min(max(x, 0), limit - w)


def sample_effective_areas(rng: np.random.Generator, page_w: int, page_h: int,
                           params: Optional[LayoutParams] = None) -> List[EffectiveArea]:
    """Draw the page's effective areas (count, fractions and positions)."""
    params = params or LayoutParams()
    margin = round(params.margin_frac * page_h)
    n_areas = 1 + int(rng.integers(2))

    if n_areas == 1:
        tag = ("top", "middle", "bottom")[int(rng.integers(3))]
        alpha = float(rng.uniform(0.7, 0.9))
        if tag == "middle":
            beta = float(rng.uniform(0.6, 0.8))
        else:
            beta = float(rng.uniform(0.4, 0.6))
        w, h = area_dims(alpha, beta, page_w, page_h)
        x = _clamped(round((page_w - w) / 2), w, page_w)
        if tag == "top":
            y = margin
        elif tag == "bottom":
            y = page_h - margin - h
        else:
            y = round((page_h - h) / 2)
        y = _clamped(y, h, page_h)
        return [EffectiveArea(alpha, beta, Box(x, y, w, h), tag)]

    horizontal = bool(rng.integers(2))
    areas: List[EffectiveArea] = []
    if horizontal:
        half = page_w / 2.0
        for i in range(2):
            alpha = 0.5
            beta = float(rng.uniform(0.7, 0.9))
            w, h = area_dims(alpha, beta, page_w, page_h)
            x = _clamped(round(i * half + (half - w) / 2), w, page_w)
            y = _clamped(round((page_h - h) / 2), h, page_h)
            areas.append(EffectiveArea(alpha, beta, Box(x, y, w, h),
                                       "horizontal_left" if i == 0 else "horizontal_right"))
    else:
        alphas: List[float] = []
        betas: List[float] = []
        for i in range(2):
            alphas.append(float(rng.uniform(0.7, 0.9)))
            # redraw any beta that would overflow the page
            b = STACK_BETA_CHOICES[int(rng.integers(3))]
            while sum(betas) + b > 1.0:
                b = STACK_BETA_CHOICES[int(rng.integers(3))]
            betas.append(b)
        heights = [area_dims(alphas[i], betas[i], page_w, page_h)[1] for i in range(2)]
        gap = (page_h - sum(heights)) / 3.0
        y_cursor = gap
        for i in range(2):
            w, h = area_dims(alphas[i], betas[i], page_w, page_h)
            x = _clamped(round((page_w - w) / 2), w, page_w)
            y = _clamped(round(y_cursor), h, page_h)
            areas.append(EffectiveArea(alphas[i], betas[i], Box(x, y, w, h), f"vertical_{i}"))
            y_cursor += h + gap
    return areas


# ---------------------------------------------------------------------------
# component placement
# ---------------------------------------------------------------------------

def _fit_scale(native_w: int, native_h: int, area: Box, max_fit: float) -> float:
    return min(1.0, max_fit * area.w / native_w, max_fit * area.h / native_h)


def _target_size(native_w: int, native_h: int, scale: float) -> Tuple[int, int]:
    return (max(1, round(native_w * scale)), max(1, round(native_h * scale)))


def _corner_target(slot: str, area: Box, w: int, h: int) -> Box:
    x = area.x if "left" in slot else area.x + area.w - w
    y = area.y if slot.startswith("top") else area.y + area.h - h
    return Box(x, y, w, h)


def _overlaps_any(target: Box, placed: Sequence[Placement]) -> bool:
    return any(target.overlaps(p.target) for p in placed)


def _pick_patch(rng: np.random.Generator, bank: ComponentBank, category: str) -> int:
    candidates = [i for i, p in enumerate(bank.patches) if p.category == category]
    if not candidates:
        raise LayoutError(f"component bank has no {category!r} patches")
    return candidates[int(rng.integers(len(candidates)))]


def _try_side_slot(rng: np.random.Generator, area: Box, w: int, h: int,
                   placed: Sequence[Placement], attempts: int) -> Optional[Tuple[Box, str]]:
    """Place a component flush against one side, clear of the corners."""
    for _ in range(attempts):
        side = SIDE_SLOTS[int(rng.integers(4))]
        if side in ("top", "bottom"):
            span = area.w - w - 1  # stay >= 1 px away from both corners
            if span < 1:
                continue
            x = area.x + 1 + int(rng.integers(span))
            y = area.y if side == "top" else area.y + area.h - h
        else:
            span = area.h - h - 1
            if span < 1:
                continue
            y = area.y + 1 + int(rng.integers(span))
            x = area.x if side == "left" else area.x + area.w - w
        target = Box(x, y, w, h)
        if not _overlaps_any(target, placed):
            return target, side
    return None


def _try_center(rng: np.random.Generator, area: Box, w: int, h: int,
                placed: Sequence[Placement], attempts: int) -> Optional[Box]:
    span_x = area.w - w - 1
    span_y = area.h - h - 1
    if span_x < 1 or span_y < 1:
        return None
    for _ in range(attempts):
        x = area.x + 1 + int(rng.integers(span_x))
        y = area.y + 1 + int(rng.integers(span_y))
        target = Box(x, y, w, h)
        if not _overlaps_any(target, placed):
            return target
    return None


def plan_components(rng: np.random.Generator, area: EffectiveArea, area_index: int,
                    bank: ComponentBank,
                    params: Optional[LayoutParams] = None) -> List[Placement]:
    """Choose and position the components of one effective area.

    Edge slots first: two, three or four of them, the top-left corner
    always holding the stage number and exactly one other slot the
    assembly group.  With three slots the third sits flush against a
    single side rather than in a corner.  Speech bubbles take whatever
    edge slots remain, plus zero to two positions strictly inside the
    area.  A slot that cannot be placed without overlap is dropped unless
    it is mandatory (stage number, assembly group); mandatory components
    retry at progressively smaller scales instead.
    """
    params = params or LayoutParams()
    rect = area.rect
    placed: List[Placement] = []

    n_edge = 2 + int(rng.integers(3))
    if n_edge == 2:
        slots = ["top_left", "bottom_right"]
    elif n_edge == 3:
        others = [c for c in CORNER_SLOTS if c != "top_left"]
        slots = ["top_left", others[int(rng.integers(3))], "side"]
    else:
        slots = list(CORNER_SLOTS)

    group_pos = 1 + int(rng.integers(len(slots) - 1))
    categories = []
    for k in range(len(slots)):
        if k == 0:
            categories.append("stage_number")
        elif k == group_pos:
            categories.append("assembly_group")
        else:
            categories.append("speech_bubble")

    for slot, category in zip(slots, categories):
        patch_id = _pick_patch(rng, bank, category)
        patch = bank.patches[patch_id]
        base_scale = _fit_scale(patch.native_w, patch.native_h, rect, params.max_fit)
        mandatory = category in ("stage_number", "assembly_group")
        rounds = params.downscale_retries + 1 if mandatory else 1

        done = False
        for ds in range(rounds):
            scale = base_scale * params.downscale_factor ** ds
            w, h = _target_size(patch.native_w, patch.native_h, scale)
            if slot == "side":
                hit = _try_side_slot(rng, rect, w, h, placed, params.place_attempts)
                if hit is not None:
                    target, side = hit
                    placed.append(Placement(patch_id, category, area_index, target,
                                            scale, "edge", (side,)))
                    done = True
            else:
                target = _corner_target(slot, rect, w, h)
                if not _overlaps_any(target, placed):
                    placed.append(Placement(patch_id, category, area_index, target,
                                            scale, "edge",
                                            tuple(sorted(_CORNER_SIDES[slot]))))
                    done = True
            if done:
                break
        if not done and mandatory:
            raise LayoutError(
                f"could not place mandatory {category!r} in area {area_index}")

    n_center = int(rng.integers(3))
    for _ in range(n_center):
        patch_id = _pick_patch(rng, bank, "speech_bubble")
        patch = bank.patches[patch_id]
        scale = _fit_scale(patch.native_w, patch.native_h, rect, params.max_fit)
        w, h = _target_size(patch.native_w, patch.native_h, scale)
        target = _try_center(rng, rect, w, h, placed, params.place_attempts)
        if target is not None:
            placed.append(Placement(patch_id, "speech_bubble", area_index, target,
                                    scale, "center", ()))
    return placed


def plan_page(rng: np.random.Generator, page_w: int, page_h: int,
              bank: ComponentBank,
              params: Optional[LayoutParams] = None) -> LayoutPlan:
    """Sample a complete page plan: areas first, then their components."""
    params = params or LayoutParams()
    areas = sample_effective_areas(rng, page_w, page_h, params)
    placements: List[Placement] = []
    for i, area in enumerate(areas):
        placements.extend(plan_components(rng, area, i, bank, params))
    return LayoutPlan(page_w=page_w, page_h=page_h, areas=areas, placements=placements)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------

def _derived_sides(target: Box, rect: Box) -> Tuple[str, ...]:
    sides = []
    if target.x == rect.x:
        sides.append("left")
    if target.x2() == rect.x2():
        sides.append("right")
    if target.y == rect.y:
        sides.append("top")
    if target.y2() == rect.y2():
        sides.append("bottom")
    return tuple(sorted(sides))


def validate_plan(plan: LayoutPlan) -> List[str]:
    """Re-derive every structural rule from coordinates; return violations."""
    problems: List[str] = []
    if not 1 <= len(plan.areas) <= 2:
        problems.append(f"page must have 1 or 2 areas, found {len(plan.areas)}")

    for i, area in enumerate(plan.areas):
        r = area.rect
        expect = area_dims(area.alpha, area.beta, plan.page_w, plan.page_h)
        if (r.w, r.h) != expect:
            problems.append(f"area {i}: rect size {(r.w, r.h)} != round(fraction * page) {expect}")
        if r.x < 0 or r.y < 0 or r.x2() > plan.page_w or r.y2() > plan.page_h:
            problems.append(f"area {i}: rect outside page")

    by_area: Dict[int, List[Placement]] = {}
    for p in plan.placements:
        by_area.setdefault(p.area_index, []).append(p)

    for i, area in enumerate(plan.areas):
        group = by_area.get(i, [])
        edges = [p for p in group if p.role == "edge"]
        if not 2 <= len(edges) <= 4:
            problems.append(f"area {i}: edge placement count {len(edges)} outside [2, 4]")
        for cat in ("stage_number", "assembly_group"):
            n = sum(1 for p in group if p.category == cat)
            if n != 1:
                problems.append(f"area {i}: expected exactly one {cat}, found {n}")
        for p in group:
            if p.category == "stage_number" and set(p.touched_sides) != {"left", "top"}:
                problems.append(f"area {i}: stage_number not in the top-left corner")

        rect = area.rect
        for p in group:
            t = p.target
            if not (0 < p.scale <= 1.0):
                problems.append(f"area {i}: placement scale {p.scale} outside (0, 1]")
            if not rect.contains_box(t):
                problems.append(f"area {i}: target {t} not inside area rect")
                continue
            derived = _derived_sides(t, rect)
            if p.role == "edge":
                if len(derived) not in (1, 2):
                    problems.append(f"area {i}: edge placement touches {len(derived)} sides")
                if derived != p.touched_sides:
                    problems.append(
                        f"area {i}: recorded touched_sides {p.touched_sides}"
                        f" != derived {derived}")
            elif p.role == "center":
                if derived:
                    problems.append(f"area {i}: center placement touches sides {derived}")
                if p.category != "speech_bubble":
                    problems.append(f"area {i}: center placement must be a speech_bubble")
            else:
                problems.append(f"area {i}: unknown role {p.role!r}")
        for a in range(len(group)):
            for b in range(a + 1, len(group)):
                if group[a].target.overlaps(group[b].target):
                    problems.append(
                        f"area {i}: placements {a} and {b} overlap")

    for p in plan.placements:
        if not 0 <= p.area_index < len(plan.areas):
            problems.append(f"placement references unknown area {p.area_index}")
    return problems
