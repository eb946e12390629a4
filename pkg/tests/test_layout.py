"""Layout sampling ranges, placement structure and plan validation."""

import json

import numpy as np
import pytest

from cutpaste.geometry import Box
from cutpaste.layout import (
    LayoutError,
    LayoutParams,
    LayoutPlan,
    Placement,
    _pick_patch,
    area_dims,
    plan_page,
    sample_effective_areas,
    validate_plan,
)
from cutpaste.seeds import page_stream

from conftest import make_bank, make_patch


class TestAreaDims:
    def test_worked_examples(self):
        # single area on an A4-ish page at 200 dpi
        assert area_dims(0.8, 0.5, 2339, 1654) == (1871, 827)
        # stacked pair, one-third height
        assert area_dims(0.5, 1.0 / 3.0, 1166, 1654) == (583, 551)

    def test_uses_bankers_rounding(self):
        # 0.5 * 2339 = 1169.5 rounds to the even neighbour
        assert area_dims(0.5, 0.5, 2339, 1654) == (1170, 827)


class TestAreaSampling:
    def test_ranges_over_many_seeds(self):
        seen_counts = set()
        seen_tags = set()
        for i in range(2000):
            rng = page_stream(101, i)
            areas = sample_effective_areas(rng, 1166, 1654)
            seen_counts.add(len(areas))
            assert len(areas) in (1, 2)
            tags = [a.arrangement_tag for a in areas]
            seen_tags.update(tags)
            if len(areas) == 1:
                a = areas[0]
                assert a.arrangement_tag in ("top", "middle", "bottom")
                assert 0.7 <= a.alpha <= 0.9
                if a.arrangement_tag == "middle":
                    assert 0.6 <= a.beta <= 0.8
                else:
                    assert 0.4 <= a.beta <= 0.6
            elif tags[0].startswith("horizontal"):
                assert tags == ["horizontal_left", "horizontal_right"]
                for a in areas:
                    assert a.alpha == 0.5
                    assert 0.7 <= a.beta <= 0.9
            else:
                assert tags == ["vertical_0", "vertical_1"]
                for a in areas:
                    assert 0.7 <= a.alpha <= 0.9
                    assert a.beta in (1.0 / 3.0, 1.0 / 2.0, 2.0 / 3.0)
                assert areas[0].beta + areas[1].beta <= 1.0
            for a in areas:
                r = a.rect
                assert (r.w, r.h) == area_dims(a.alpha, a.beta, 1166, 1654)
                assert r.x >= 0 and r.y >= 0
                assert r.x2() <= 1166 and r.y2() <= 1654
        assert seen_counts == {1, 2}
        assert seen_tags == {"top", "middle", "bottom", "horizontal_left",
                             "horizontal_right", "vertical_0", "vertical_1"}

    def test_vertical_pair_never_overflows(self):
        for i in range(500):
            rng = page_stream(55, i)
            areas = sample_effective_areas(rng, 1166, 1654)
            if len(areas) == 2 and areas[0].arrangement_tag == "vertical_0":
                assert areas[0].rect.y2() <= areas[1].rect.y
                assert areas[1].rect.y2() <= 1654

    def test_margin_positions(self):
        margin = round(0.02 * 1654)
        found = set()
        for i in range(300):
            areas = sample_effective_areas(page_stream(9, i), 1166, 1654)
            if len(areas) != 1:
                continue
            a = areas[0]
            found.add(a.arrangement_tag)
            if a.arrangement_tag == "top":
                assert a.rect.y == margin
            elif a.arrangement_tag == "bottom":
                assert a.rect.y2() == 1654 - margin
            else:
                assert a.rect.y == round((1654 - a.rect.h) / 2)
        assert found == {"top", "middle", "bottom"}

    def test_deterministic(self):
        a = sample_effective_areas(page_stream(3, 4), 1166, 1654)
        b = sample_effective_areas(page_stream(3, 4), 1166, 1654)
        assert [(x.alpha, x.beta, x.rect, x.arrangement_tag) for x in a] == \
               [(x.alpha, x.beta, x.rect, x.arrangement_tag) for x in b]


class TestPlanning:
    def test_two_thousand_plans_validate_clean(self, fx_bank):
        for i in range(2000):
            plan = plan_page(page_stream(202, i), 1166, 1654, fx_bank)
            assert validate_plan(plan) == []

    def test_edge_count_support(self, fx_bank):
        counts = set()
        for i in range(400):
            plan = plan_page(page_stream(77, i), 1166, 1654, fx_bank)
            per_area = {}
            for p in plan.placements:
                if p.role == "edge":
                    per_area[p.area_index] = per_area.get(p.area_index, 0) + 1
            counts.update(per_area.values())
        assert counts == {2, 3, 4}

    def test_center_bubbles_appear(self, fx_bank):
        n_center = set()
        for i in range(300):
            plan = plan_page(page_stream(31, i), 1166, 1654, fx_bank)
            per_area = {}
            for p in plan.placements:
                if p.role == "center":
                    per_area[p.area_index] = per_area.get(p.area_index, 0) + 1
                else:
                    per_area.setdefault(p.area_index, 0)
            n_center.update(per_area.values())
        # zero, one and two floating bubbles all occur (two may be squeezed
        # out by rejection, zero and one cannot)
        assert {0, 1} <= n_center

    def test_plan_is_deterministic(self, fx_bank):
        a = plan_page(page_stream(8, 15), 1166, 1654, fx_bank)
        b = plan_page(page_stream(8, 15), 1166, 1654, fx_bank)
        assert a.to_dict() == b.to_dict()

    def test_pages_differ_across_indices(self, fx_bank):
        dicts = {json.dumps(plan_page(page_stream(8, i), 1166, 1654, fx_bank).to_dict(),
                            sort_keys=True) for i in range(10)}
        assert len(dicts) > 1

    def test_json_round_trip(self, fx_bank):
        plan = plan_page(page_stream(4, 2), 1166, 1654, fx_bank)
        doc = json.loads(json.dumps(plan.to_dict()))
        assert LayoutPlan.from_dict(doc).to_dict() == plan.to_dict()

    def test_impossible_mandatory_placement_raises(self, fx_bank):
        # a fit cap of 0.9 makes the stage number and the assembly group
        # collide in every slot arrangement; with no downscaling allowed
        # the mandatory component cannot land
        params = LayoutParams(max_fit=0.9, downscale_factor=1.0, downscale_retries=0)
        with pytest.raises(LayoutError, match="mandatory"):
            for i in range(50):
                plan_page(page_stream(1, i), 1166, 1654, fx_bank, params)

    def test_missing_category_raises(self):
        bank = make_bank(make_patch("stage_number", 10, 8))
        with pytest.raises(LayoutError, match="no 'assembly_group' patches"):
            _pick_patch(np.random.default_rng(0), bank, "assembly_group")


class TestValidatePlan:
    def _valid_plan(self, fx_bank):
        return plan_page(page_stream(12, 0), 1166, 1654, fx_bank)

    def test_detects_moved_stage_number(self, fx_bank):
        plan = self._valid_plan(fx_bank)
        for i, p in enumerate(plan.placements):
            if p.category == "stage_number":
                t = p.target
                plan.placements[i] = Placement(
                    p.component_id, p.category, p.area_index,
                    Box(t.x + 5, t.y + 5, t.w, t.h), p.scale, p.role, p.touched_sides)
                break
        problems = validate_plan(plan)
        assert problems and any("touched_sides" in s or "top-left" in s
                                for s in problems)

    def test_detects_wrong_area_size(self, fx_bank):
        plan = self._valid_plan(fx_bank)
        plan.areas[0].rect = Box(plan.areas[0].rect.x, plan.areas[0].rect.y,
                                 plan.areas[0].rect.w + 1, plan.areas[0].rect.h)
        assert any("round(fraction * page)" in s for s in validate_plan(plan))

    def test_detects_overlap(self, fx_bank):
        plan = self._valid_plan(fx_bank)
        edges = [p for p in plan.placements if p.role == "edge"]
        a, b = edges[0], edges[1]
        moved = Placement(b.component_id, b.category, b.area_index,
                          Box(a.target.x, a.target.y, b.target.w, b.target.h),
                          b.scale, b.role, b.touched_sides)
        plan.placements[plan.placements.index(b)] = moved
        assert any("overlap" in s for s in validate_plan(plan))

    def test_detects_bad_scale(self, fx_bank):
        plan = self._valid_plan(fx_bank)
        p = plan.placements[0]
        plan.placements[0] = Placement(p.component_id, p.category, p.area_index,
                                       p.target, 1.5, p.role, p.touched_sides)
        assert any("scale" in s for s in validate_plan(plan))

    def test_detects_unknown_area_index(self, fx_bank):
        plan = self._valid_plan(fx_bank)
        p = plan.placements[-1]
        plan.placements.append(Placement(p.component_id, "speech_bubble", 9,
                                         p.target, p.scale, "center", ()))
        assert any("unknown area" in s for s in validate_plan(plan))

    def test_detects_too_many_areas(self, fx_bank):
        plan = self._valid_plan(fx_bank)
        plan.areas = plan.areas * 3
        assert any("1 or 2 areas" in s for s in validate_plan(plan))


class TestSeedStreams:
    def test_same_key_same_stream(self):
        a = page_stream(42, 7).integers(0, 1 << 31, size=8)
        b = page_stream(42, 7).integers(0, 1 << 31, size=8)
        assert np.array_equal(a, b)

    def test_distinct_pages_distinct_streams(self):
        a = page_stream(42, 0).integers(0, 1 << 31, size=8)
        b = page_stream(42, 1).integers(0, 1 << 31, size=8)
        assert not np.array_equal(a, b)

    def test_distinct_seeds_distinct_streams(self):
        a = page_stream(1, 0).integers(0, 1 << 31, size=8)
        b = page_stream(2, 0).integers(0, 1 << 31, size=8)
        assert not np.array_equal(a, b)

    def test_page_index_isolation(self):
        # page 3's stream does not depend on whether pages 0..2 were drawn
        fresh = page_stream(9, 3).integers(0, 1 << 31, size=4)
        for i in range(3):
            page_stream(9, i).integers(0, 1 << 31, size=100)
        again = page_stream(9, 3).integers(0, 1 << 31, size=4)
        assert np.array_equal(fresh, again)

    def test_large_seed_values(self):
        big = (1 << 63) + 11
        a = page_stream(big, 2).integers(0, 1 << 31, size=4)
        b = page_stream(big, 2).integers(0, 1 << 31, size=4)
        assert np.array_equal(a, b)
