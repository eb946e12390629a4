"""Shared test fixtures: the bundled corpus, small synthetic banks and a
randomized scoring-case generator used by both the unit and acceptance
suites."""

import numpy as np
import pytest

from cutpaste.corpus import AnnotatedPage, ComponentBank, ComponentPatch, Instance
from cutpaste.fixtures import build_fixture_bank, build_fixture_workspace, fixture_pages
from cutpaste.geometry import Box


@pytest.fixture(scope="session")
def fx_pages():
    return fixture_pages()


@pytest.fixture(scope="session")
def fx_bank():
    return build_fixture_bank()


@pytest.fixture(scope="session")
def fx_workspace(tmp_path_factory):
    """Fixture corpus, manifest and extracted bank written to disk once."""
    root = tmp_path_factory.mktemp("workspace")
    paths = build_fixture_workspace(str(root))
    paths["root"] = str(root)
    return paths


def make_patch(category, w, h, value=40, polygon=None, mask=None):
    """An all-ink patch unless a mask is given; handy for pixel oracles."""
    image = np.full((h, w), value, dtype=np.uint8)
    if mask is None:
        mask = np.ones((h, w), dtype=bool)
    return ComponentPatch(
        category=category, image=image, mask=mask,
        native_w=w, native_h=h,
        source_page_id="synthetic", source_rect=Box(0, 0, w, h),
        polygon=polygon,
    )


def make_bank(*patches):
    return ComponentBank(patches=list(patches), version="testbank")


@pytest.fixture
def ink_bank():
    """Minimal bank covering all three component categories.

    The bubble polygon is the full patch rectangle, so its raster equals
    the all-ones mask exactly.
    """
    bubble_poly = [(0.0, 0.0), (12.0, 0.0), (12.0, 9.0), (0.0, 9.0)]
    return make_bank(
        make_patch("stage_number", 10, 8, value=30),
        make_patch("assembly_group", 14, 11, value=60),
        make_patch("speech_bubble", 12, 9, value=90, polygon=bubble_poly),
    )


# ---------------------------------------------------------------------------
# randomized scoring cases (<= 4 predictions, <= 4 ground truths)
# ---------------------------------------------------------------------------

def _random_box(rng, w, h):
    x = int(rng.integers(w - 2))
    y = int(rng.integers(h - 2))
    bw = 1 + int(rng.integers(w - x - 1))
    bh = 1 + int(rng.integers(h - y - 1))
    return Box(x, y, bw, bh)


def _random_triangle(rng, w, h):
    return [(float(rng.integers(w)), float(rng.integers(h))) for _ in range(3)]


def make_eval_case(rng):
    """One random scoring fixture: (predictions, ground-truth pages).

    Scores are quantized to one decimal so ties are common, prediction
    geometry kind is independent of category, and an occasional
    prediction lands on a page id that does not exist.
    """
    from cutpaste.metrics import Prediction

    page_w = 20 + int(rng.integers(12))
    page_h = 16 + int(rng.integers(12))
    n_pages = 1 + int(rng.integers(2))
    page_ids = [f"p{k}" for k in range(n_pages)]
    pages = [
        AnnotatedPage(id=pid, file=f"{pid}.png", width=page_w, height=page_h)
        for pid in page_ids
    ]

    n_gt = int(rng.integers(5))
    for k in range(n_gt):
        page = pages[int(rng.integers(n_pages))]
        if rng.integers(2):
            page.instances.append(Instance(
                id=k, category="speech_bubble",
                polygon=_random_triangle(rng, page_w, page_h)))
        else:
            page.instances.append(Instance(
                id=k, category="part", bbox=_random_box(rng, page_w, page_h)))

    preds = []
    n_pred = int(rng.integers(5))
    for _ in range(n_pred):
        if rng.integers(10) == 0:
            pid = "ghost"
        else:
            pid = page_ids[int(rng.integers(n_pages))]
        category = ("part", "speech_bubble")[int(rng.integers(2))]
        score = int(rng.integers(11)) / 10
        if rng.integers(2):
            preds.append(Prediction(page_id=pid, category=category, score=score,
                                    polygon=_random_triangle(rng, page_w, page_h)))
        else:
            preds.append(Prediction(page_id=pid, category=category, score=score,
                                    bbox=_random_box(rng, page_w, page_h)))
    return preds, pages
