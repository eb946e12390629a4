"""Rendering: pixel-exact paste oracles, polygon transforms and the
dataset writer."""

import numpy as np
import pytest

from cutpaste.compositor import (
    SynthPage,
    as_annotated_page,
    paste_min,
    render,
    resample_patch,
    write_dataset,
)
from cutpaste.corpus import load_corpus, validate_corpus, canonical_json
from cutpaste.geometry import Box
from cutpaste.layout import EffectiveArea, LayoutError, LayoutPlan, Placement, plan_page
from cutpaste.seeds import page_stream

from conftest import make_bank, make_patch


def _hand_plan(bank, bubble_target=Box(18, 26, 12, 9), beta=0.5):
    """A 64x64 page with one 32x32 (or 32x48) area and three placements,
    built to pass validate_plan by construction."""
    h = round(beta * 64)
    area = EffectiveArea(alpha=0.5, beta=beta,
                         rect=Box(16, round((64 - h) / 2) if beta != 0.5 else 16, 32, h),
                         arrangement_tag="middle")
    r = area.rect
    placements = [
        Placement(0, "stage_number", 0, Box(r.x, r.y, 10, 8), 1.0, "edge",
                  ("left", "top")),
        Placement(1, "assembly_group", 0,
                  Box(r.x2() - 14, r.y2() - 11, 14, 11), 1.0, "edge",
                  ("bottom", "right")),
        Placement(2, "speech_bubble", 0, bubble_target, 1.0, "center", ()),
    ]
    return LayoutPlan(page_w=64, page_h=64, areas=[area], placements=placements)


class TestResample:
    def test_identity_is_exact_copy(self):
        img = np.arange(12, dtype=np.uint8).reshape(3, 4)
        mask = img % 2 == 0
        out_img, out_mask = resample_patch(img, mask, 4, 3)
        assert np.array_equal(out_img, img)
        assert np.array_equal(out_mask, mask)
        out_img[0, 0] = 99  # identity path must hand back a copy
        assert img[0, 0] == 0

    def test_nearest_mask_integer_upscale_is_block_replication(self):
        mask = np.array([[True, False], [False, True]])
        img = (mask * 200).astype(np.uint8)
        _, up = resample_patch(img, mask, 4, 4)
        assert np.array_equal(up, np.kron(mask, np.ones((2, 2), dtype=bool)))

    def test_nearest_mask_downscale_samples_centers(self):
        # output centers at input coords (0.75, 0.75) and (2.25, 2.25)
        mask = np.array([[True, True, False],
                         [True, True, False],
                         [False, False, False]])
        img = (mask * 200).astype(np.uint8)
        _, down = resample_patch(img, mask, 2, 2)
        assert np.array_equal(down, np.array([[True, False], [False, False]]))

    def test_image_stays_uint8(self):
        img = np.full((5, 7), 130, dtype=np.uint8)
        out, _ = resample_patch(img, np.ones((5, 7), bool), 14, 10)
        assert out.dtype == np.uint8 and out.shape == (10, 14)


class TestPasteMin:
    def test_darker_ink_wins(self):
        canvas = np.full((6, 6), 200, dtype=np.uint8)
        img = np.full((3, 3), 100, dtype=np.uint8)
        paste_min(canvas, img, np.ones((3, 3), bool), 1, 2)
        assert (canvas[2:5, 1:4] == 100).all()
        assert (canvas[0:2, :] == 200).all()

    def test_lighter_ink_does_not_overwrite(self):
        canvas = np.full((4, 4), 90, dtype=np.uint8)
        img = np.full((2, 2), 230, dtype=np.uint8)
        paste_min(canvas, img, np.ones((2, 2), bool), 0, 0)
        assert (canvas == 90).all()

    def test_mask_gates_the_blend(self):
        canvas = np.full((4, 4), 255, dtype=np.uint8)
        img = np.zeros((2, 2), dtype=np.uint8)
        mask = np.array([[True, False], [False, True]])
        paste_min(canvas, img, mask, 1, 1)
        assert canvas[1, 1] == 0 and canvas[2, 2] == 0
        assert canvas[1, 2] == 255 and canvas[2, 1] == 255

    def test_order_independent_on_overlap(self):
        a = np.full((20, 20), 255, dtype=np.uint8)
        b = np.full((20, 20), 255, dtype=np.uint8)
        img1 = np.full((10, 10), 100, dtype=np.uint8)
        img2 = np.full((10, 10), 50, dtype=np.uint8)
        ones = np.ones((10, 10), bool)
        paste_min(a, img1, ones, 0, 0)
        paste_min(a, img2, ones, 5, 5)
        paste_min(b, img2, ones, 5, 5)
        paste_min(b, img1, ones, 0, 0)
        assert np.array_equal(a, b)
        assert a[7, 7] == 50 and a[2, 2] == 100


class TestRender:
    def test_pixel_histogram_matches_hand_count(self, ink_bank):
        plan = _hand_plan(ink_bank)
        sp = render(plan, ink_bank, seed=5)
        values, counts = np.unique(sp.image, return_counts=True)
        got = dict(zip(values.tolist(), counts.tolist()))
        assert got == {30: 80, 60: 154, 90: 108, 255: 64 * 64 - 80 - 154 - 108}

    def test_box_annotations_equal_targets(self, ink_bank):
        plan = _hand_plan(ink_bank)
        sp = render(plan, ink_bank, seed=5)
        by_cat = {a.category: a for a in sp.annotations}
        assert by_cat["text"].bbox == Box(16, 16, 10, 8)
        assert by_cat["part"].bbox == Box(34, 37, 14, 11)

    def test_component_category_mapping(self, ink_bank):
        sp = render(_hand_plan(ink_bank), ink_bank, seed=5)
        assert [a.category for a in sp.annotations] == ["text", "part", "speech_bubble"]

    def test_unscaled_bubble_polygon_is_translated_exactly(self, ink_bank):
        sp = render(_hand_plan(ink_bank), ink_bank, seed=5)
        poly = [a for a in sp.annotations if a.polygon is not None][0].polygon
        assert poly == [(18.0, 26.0), (30.0, 26.0), (30.0, 35.0), (18.0, 35.0)]

    def test_scaled_bubble_polygon_exact_halving(self):
        # 12x8 native bubble at target 6x4: scale (0.5, 0.5), exact floats
        bank = make_bank(
            make_patch("stage_number", 10, 8, value=30),
            make_patch("assembly_group", 14, 11, value=60),
            make_patch("speech_bubble", 12, 8, value=90,
                       polygon=[(0.0, 0.0), (12.0, 0.0), (12.0, 8.0), (0.0, 8.0)]),
        )
        plan = _hand_plan(bank, bubble_target=Box(20, 28, 6, 4))
        sp = render(plan, bank, seed=None)
        poly = [a for a in sp.annotations if a.polygon is not None][0].polygon
        assert poly == [(20.0, 28.0), (26.0, 28.0), (26.0, 32.0), (20.0, 32.0)]

    def test_instance_masks_cover_all_annotations(self, ink_bank):
        sp = render(_hand_plan(ink_bank), ink_bank, seed=5)
        assert set(sp.instance_masks) == {a.id for a in sp.annotations}
        x, y, m = sp.instance_masks[0]
        assert (x, y) == (16, 16) and m.shape == (8, 10) and m.all()

    def test_rejects_invalid_plan(self, ink_bank):
        plan = _hand_plan(ink_bank)
        plan.placements[0] = Placement(0, "stage_number", 0, Box(0, 0, 10, 8),
                                       1.0, "edge", ("left", "top"))
        with pytest.raises(LayoutError, match="invalid plan"):
            render(plan, ink_bank)

    def test_rejects_dangling_component(self, ink_bank):
        plan = _hand_plan(ink_bank)
        plan.placements[0] = Placement(99, "stage_number", 0,
                                       plan.placements[0].target, 1.0, "edge",
                                       ("left", "top"))
        with pytest.raises(LayoutError, match="dangling"):
            render(plan, ink_bank)

    def test_does_not_mutate_bank(self, ink_bank):
        before = [(p.image.copy(), p.mask.copy()) for p in ink_bank.patches]
        render(_hand_plan(ink_bank), ink_bank, seed=1)
        for (img, mask), p in zip(before, ink_bank.patches):
            assert np.array_equal(img, p.image)
            assert np.array_equal(mask, p.mask)

    def test_provenance_fields(self, ink_bank):
        plan = _hand_plan(ink_bank)
        sp = render(plan, ink_bank, seed=17)
        assert sp.provenance["seed"] == 17
        assert sp.provenance["bank_version"] == "testbank"
        assert len(sp.provenance["plan_sha256"]) == 64
        again = render(plan, ink_bank, seed=17)
        assert again.provenance["plan_sha256"] == sp.provenance["plan_sha256"]


class TestWriteDataset:
    def test_round_trip_validates_clean(self, fx_bank, tmp_path):
        pages = [render(plan_page(page_stream(7, i), 1166, 1654, fx_bank),
                        fx_bank, seed=7) for i in range(3)]
        write_dataset(pages, str(tmp_path), seed=7, method="context")
        assert validate_corpus(str(tmp_path)) == []
        loaded = load_corpus(str(tmp_path))
        assert [p.id for p in loaded] == ["page_000000", "page_000001", "page_000002"]
        assert len(loaded[0].instances) == len(pages[0].annotations)

    def test_manifest_contents(self, fx_bank, tmp_path):
        from cutpaste import generator_version
        pages = [render(plan_page(page_stream(3, 0), 1166, 1654, fx_bank),
                        fx_bank, seed=3)]
        manifest = write_dataset(pages, str(tmp_path), seed=3, method="context")
        assert manifest == {
            "generator_version": generator_version(),
            "method": "context",
            "n_pages": 1,
            "seed": 3,
        }
        assert (tmp_path / "manifest.json").read_text() == canonical_json(manifest)

    def test_empty_dataset_is_valid(self, tmp_path):
        write_dataset([], str(tmp_path), seed=0, method="context")
        assert validate_corpus(str(tmp_path)) == []
        assert load_corpus(str(tmp_path)) == []

    def test_border_vertices_are_clamped_in_bounds(self, tmp_path):
        from cutpaste.corpus import Instance
        sp = SynthPage(
            image=np.full((64, 64), 255, dtype=np.uint8),
            annotations=[Instance(id=0, category="speech_bubble",
                                  polygon=[(-0.4, 3.0), (64.0, 0.0), (10.0, 63.6)])],
            provenance={},
        )
        write_dataset([sp], str(tmp_path))
        assert validate_corpus(str(tmp_path)) == []
        poly = load_corpus(str(tmp_path))[0].instances[0].polygon
        assert poly == [(0.0, 3.0), (63.0, 0.0), (10.0, 63.0)]

    def test_as_annotated_page_view(self, ink_bank):
        sp = render(_hand_plan(ink_bank), ink_bank, seed=2)
        page = as_annotated_page(sp, "pg")
        assert page.id == "pg" and page.file == "pg.png"
        assert page.width == 64 and page.height == 64
        assert page.instances == sp.annotations
        assert page.image is sp.image
