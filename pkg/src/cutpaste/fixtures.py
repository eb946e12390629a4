"""Bundled deterministic fixture corpus.

Four hand-authored manual-style pages with annotations, plus a matching
component manifest.  Everything is drawn procedurally from constants, so
repeated builds are byte-identical; no randomness, no font files.  The
fixtures exist for demos, CLI smoke runs and the test suite (the page art
is decorative, the annotations are the contract).

Hand-counted totals, kept in sync with the layout constants below:

    speech_bubble  3 instances on 2 pages
    part           5 instances on 3 pages
    tool           2 instances on 1 page
    symbol         2 instances on 2 pages
    text           5 instances on 3 pages
"""

from __future__ import annotations

import math
import os
from typing import List, Tuple

import numpy as np
from PIL import Image, ImageDraw

from .corpus import (
    AnnotatedPage,
    ComponentBank,
    Instance,
    ManifestEntry,
    extract_components,
    save_corpus,
    save_manifest,
)
from .geometry import Box, polygon_is_simple

FIXTURE_PAGE_W = 1166
FIXTURE_PAGE_H = 1654

_INK = 40
_MID = 70
_LIGHT = 200


def _bubble_polygon(cx: int, cy: int, r: int) -> List[Tuple[int, int]]:
    """A 16-gon balloon with a tail spike toward lower left.

    Vertices are integers (corpus rule) and the result is checked simple.
    """
    pts = []
    for i in range(16):
        a = 2.0 * math.pi * i / 16.0
        pts.append((cx + r * math.cos(a), cy + r * math.sin(a)))
    tip = (cx - 0.7 * r, cy + 1.5 * r)
    ordered = pts[:6] + [tip] + pts[6:]
    poly = [(int(round(x)), int(round(y))) for x, y in ordered]
    assert polygon_is_simple([(float(x), float(y)) for x, y in poly])
    return poly


def _draw_bubble(draw: ImageDraw.ImageDraw, poly: List[Tuple[int, int]],
                 cx: int, cy: int, r: int) -> None:
    draw.polygon(poly, fill=255, outline=_INK)
    draw.line(poly + [poly[0]], fill=_INK, width=4)
    # a few rows of fake dialogue
    for k, frac in enumerate((0.85, 0.7, 0.5)):
        half = int(r * frac * 0.6)
        y = cy - r // 3 + k * (r // 4)
        draw.rectangle([cx - half, y, cx + half, y + max(4, r // 14)], fill=_MID)


_SEGMENTS = {
    "1": "bc",
    "2": "abged",
    "3": "abgcd",
}


def _draw_digit(draw: ImageDraw.ImageDraw, box: Box, value: str) -> None:
    x, y, w, h = int(box.x), int(box.y), int(box.w), int(box.h)
    t = max(6, w // 5)
    half = h // 2
    rects = {
        "a": (x, y, x + w, y + t),
        "b": (x + w - t, y, x + w, y + half),
        "c": (x + w - t, y + half, x + w, y + h),
        "d": (x, y + h - t, x + w, y + h),
        "e": (x, y + half, x + t, y + h),
        "f": (x, y, x + t, y + half),
        "g": (x, y + half - t // 2, x + w, y + half + t - t // 2),
    }
    for seg in _SEGMENTS[value]:
        draw.rectangle(rects[seg], fill=_INK)


def _draw_part(draw: ImageDraw.ImageDraw, box: Box) -> None:
    x, y, w, h = int(box.x), int(box.y), int(box.w), int(box.h)
    draw.rectangle([x, y, x + w - 1, y + h - 1], outline=_MID, width=3)
    draw.ellipse([x + w // 6, y + h // 6, x + w - w // 6, y + h - h // 6],
                 outline=_INK, width=3)
    s = max(6, min(w, h) // 16)
    for k in range(3):
        cx = x + w // 4 + k * (w // 4)
        cy = y + h // 2
        draw.ellipse([cx - s, cy - s, cx + s, cy + s], fill=_MID)
    draw.line([x + w // 6, y + h - h // 6, x + w - w // 6, y + h // 6],
              fill=_LIGHT - 60, width=2)


def _draw_tool(draw: ImageDraw.ImageDraw, box: Box) -> None:
    x, y, w, h = int(box.x), int(box.y), int(box.w), int(box.h)
    draw.line([x + w // 8, y + h - h // 5, x + w - w // 5, y + h // 6],
              fill=_INK, width=9)
    hx, hy = x + w - w // 5, y + h // 6
    rr = max(10, min(w, h) // 6)
    draw.ellipse([hx - rr, hy - rr, hx + rr, hy + rr], outline=_INK, width=5)
    draw.rectangle([x + w // 8 - 6, y + h - h // 5 - 6,
                    x + w // 8 + 18, y + h - h // 5 + 18], fill=_MID)


def _draw_symbol(draw: ImageDraw.ImageDraw, box: Box) -> None:
    x, y, w, h = int(box.x), int(box.y), int(box.w), int(box.h)
    tri = [(x + w // 2, y + 2), (x + 2, y + h - 3), (x + w - 3, y + h - 3)]
    draw.line(tri + [tri[0]], fill=_INK, width=4)
    bx = x + w // 2
    draw.rectangle([bx - 4, y + h // 3, bx + 4, y + h - h // 3], fill=_INK)
    draw.rectangle([bx - 4, y + h - h // 4, bx + 4, y + h - h // 4 + 8], fill=_INK)


def _draw_text_block(draw: ImageDraw.ImageDraw, box: Box) -> None:
    x, y, w, h = int(box.x), int(box.y), int(box.w), int(box.h)
    bar = max(6, h // 5)
    for k, frac in enumerate((0.92, 0.75, 0.55)):
        yy = y + k * (bar + bar // 2)
        if yy + bar > y + h:
            break
        draw.rectangle([x, yy, x + int(w * frac), yy + bar], fill=_MID)


def _draw_furniture(draw: ImageDraw.ImageDraw, page_no: int) -> None:
    draw.rectangle([15, 15, FIXTURE_PAGE_W - 16, FIXTURE_PAGE_H - 16],
                   outline=_LIGHT, width=2)
    # page number strip, bottom center
    cx = FIXTURE_PAGE_W // 2
    draw.rectangle([cx - 20, FIXTURE_PAGE_H - 42,
                    cx - 20 + 8 * (page_no + 1), FIXTURE_PAGE_H - 34], fill=_MID)


# bubble geometry constants shared by the art and the annotations
_BUBBLES = {
    # key: (cx, cy, r)
    "b_a": (330, 420, 130),
    "b_b": (760, 900, 145),
    "b_c": (360, 380, 160),
}


def fixture_pages() -> List[AnnotatedPage]:
    """Build the four fixture pages in memory, art and annotations."""
    pages: List[AnnotatedPage] = []

    def new_page(idx: int):
        img = Image.new("L", (FIXTURE_PAGE_W, FIXTURE_PAGE_H), 255)
        draw = ImageDraw.Draw(img)
        _draw_furniture(draw, idx)
        return img, draw

    # --- fixture_000: parts spread -------------------------------------
    img, draw = new_page(0)
    boxes = {
        "part0": Box(120, 180, 380, 300),
        "part1": Box(640, 220, 300, 240),
        "part2": Box(180, 620, 320, 260),
        "symbol0": Box(700, 650, 180, 160),
        "text0": Box(140, 1000, 420, 90),
    }
    _draw_part(draw, boxes["part0"])
    _draw_part(draw, boxes["part1"])
    _draw_part(draw, boxes["part2"])
    _draw_symbol(draw, boxes["symbol0"])
    _draw_text_block(draw, boxes["text0"])
    pages.append(AnnotatedPage(
        id="fixture_000", file="fixture_000.png",
        width=FIXTURE_PAGE_W, height=FIXTURE_PAGE_H,
        instances=[
            Instance(id=0, category="part", bbox=boxes["part0"]),
            Instance(id=1, category="part", bbox=boxes["part1"]),
            Instance(id=2, category="part", bbox=boxes["part2"]),
            Instance(id=3, category="symbol", bbox=boxes["symbol0"]),
            Instance(id=4, category="text", bbox=boxes["text0"]),
        ],
        image=np.asarray(img, dtype=np.uint8),
    ))

    # --- fixture_001: dialogue ------------------------------------------
    img, draw = new_page(1)
    poly_a = _bubble_polygon(*_BUBBLES["b_a"])
    poly_b = _bubble_polygon(*_BUBBLES["b_b"])
    _draw_bubble(draw, poly_a, *_BUBBLES["b_a"])
    _draw_bubble(draw, poly_b, *_BUBBLES["b_b"])
    text1 = Box(150, 1300, 380, 80)
    part3 = Box(640, 1300, 340, 240)
    _draw_text_block(draw, text1)
    _draw_part(draw, part3)
    pages.append(AnnotatedPage(
        id="fixture_001", file="fixture_001.png",
        width=FIXTURE_PAGE_W, height=FIXTURE_PAGE_H,
        instances=[
            Instance(id=0, category="speech_bubble",
                     polygon=[(float(x), float(y)) for x, y in poly_a]),
            Instance(id=1, category="speech_bubble",
                     polygon=[(float(x), float(y)) for x, y in poly_b]),
            Instance(id=2, category="text", bbox=text1),
            Instance(id=3, category="part", bbox=part3),
        ],
        image=np.asarray(img, dtype=np.uint8),
    ))

    # --- fixture_002: workshop -------------------------------------------
    img, draw = new_page(2)
    poly_c = _bubble_polygon(*_BUBBLES["b_c"])
    _draw_bubble(draw, poly_c, *_BUBBLES["b_c"])
    tool0 = Box(700, 260, 320, 180)
    tool1 = Box(700, 560, 300, 200)
    symbol1 = Box(200, 800, 170, 150)
    _draw_tool(draw, tool0)
    _draw_tool(draw, tool1)
    _draw_symbol(draw, symbol1)
    pages.append(AnnotatedPage(
        id="fixture_002", file="fixture_002.png",
        width=FIXTURE_PAGE_W, height=FIXTURE_PAGE_H,
        instances=[
            Instance(id=0, category="speech_bubble",
                     polygon=[(float(x), float(y)) for x, y in poly_c]),
            Instance(id=1, category="tool", bbox=tool0),
            Instance(id=2, category="tool", bbox=tool1),
            Instance(id=3, category="symbol", bbox=symbol1),
        ],
        image=np.asarray(img, dtype=np.uint8),
    ))

    # --- fixture_003: stage digits ----------------------------------------
    img, draw = new_page(3)
    d1 = Box(140, 160, 120, 200)
    d2 = Box(460, 160, 120, 200)
    d3 = Box(780, 160, 120, 200)
    part4 = Box(200, 600, 520, 420)
    _draw_digit(draw, d1, "1")
    _draw_digit(draw, d2, "2")
    _draw_digit(draw, d3, "3")
    _draw_part(draw, part4)
    pages.append(AnnotatedPage(
        id="fixture_003", file="fixture_003.png",
        width=FIXTURE_PAGE_W, height=FIXTURE_PAGE_H,
        instances=[
            Instance(id=0, category="text", bbox=d1),
            Instance(id=1, category="text", bbox=d2),
            Instance(id=2, category="text", bbox=d3),
            Instance(id=3, category="part", bbox=part4),
        ],
        image=np.asarray(img, dtype=np.uint8),
    ))

    return pages


def fixture_manifest() -> List[ManifestEntry]:
    """Component crops matching :func:`fixture_pages`.

    Bubble rects pad the polygon bounding box; the digit and diagram
    rects pad their instance boxes and stay clear of neighbouring ink.
    """
    entries = [
        ManifestEntry(page_id="fixture_003", rect=Box(130, 150, 140, 220),
                      category="stage_number"),
        ManifestEntry(page_id="fixture_003", rect=Box(450, 150, 140, 220),
                      category="stage_number"),
        ManifestEntry(page_id="fixture_000", rect=Box(100, 160, 420, 340),
                      category="assembly_group"),
        ManifestEntry(page_id="fixture_003", rect=Box(180, 580, 560, 460),
                      category="assembly_group"),
    ]
    for key in ("b_a", "b_b", "b_c"):
        cx, cy, r = _BUBBLES[key]
        page = "fixture_001" if key in ("b_a", "b_b") else "fixture_002"
        x0 = cx - r - 12
        y0 = cy - r - 12
        x1 = cx + r + 12
        y1 = int(round(cy + 1.5 * r)) + 12
        entries.append(ManifestEntry(
            page_id=page, rect=Box(x0, y0, x1 - x0, y1 - y0),
            category="speech_bubble"))
    return entries


def build_fixture_bank() -> ComponentBank:
    return extract_components(fixture_pages(), fixture_manifest())


def build_fixture_workspace(out_dir: str) -> dict:
    """Write the fixture corpus and manifest under *out_dir*.

    Returns the paths the CLI wants: dataset dir and manifest file.
    """
    corpus_dir = os.path.join(out_dir, "corpus")
    save_corpus(fixture_pages(), corpus_dir)
    manifest_path = os.path.join(out_dir, "manifest.json")
    save_manifest(fixture_manifest(), manifest_path)
    return {"corpus_dir": corpus_dir, "manifest_path": manifest_path}
