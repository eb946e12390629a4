"""Detection and segmentation scoring.

The protocol is pinned here so the production evaluator and the
brute-force oracle implement one definition:

* IoU thresholds run 0.50 to 0.95 in steps of 0.05.
* Predictions rank by descending score; ties break by page id, then by
  input order within the page.
* Matching is greedy per page and category: each prediction in rank
  order takes the still-unmatched ground truth with the highest IoU at
  or above the threshold, the earliest such ground truth on equal IoU.
* AP averages the precision envelope (best precision among ranked
  points with recall >= r) over the 101 recall points 0.00 .. 1.00,
  then over thresholds; AP50/AP75 are the entries at 0.50/0.75.
* AR keeps the 100 highest-ranked detections per page, counts matched
  ground truth per threshold, and averages over thresholds.
* mIoU is instance-level: each ground truth contributes its best IoU
  against same-page same-category predictions, zero when there are
  none.  A pixel-level variant hides behind ``pixel_level_miou``.
* With zero ground-truth instances every metric is None (undefined),
  never 0.

Box-to-box IoU is exact area arithmetic; any pairing that involves a
polygon is computed on scanline-rasterized masks at page resolution,
which also clips out-of-page geometry.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .corpus import CATEGORY_GEOMETRY, AnnotatedPage, Instance
from .geometry import Box, rasterize_box, rasterize_polygon

IOU_THRESHOLDS = tuple((50 + 5 * i) / 100 for i in range(10))
RECALL_POINTS = np.arange(101) / 100.0
MAX_DETECTIONS_PER_PAGE = 100


class PredictionError(Exception):
    """Raised for malformed prediction files."""


@dataclass
class Prediction:
    page_id: str
    category: str
    score: float
    polygon: Optional[List[Tuple[float, float]]] = None
    bbox: Optional[Box] = None


@dataclass
class EvalReport:
    """The scoring quintet plus one PR curve per IoU threshold.

    All five metrics are None when the ground truth is empty.
    """

    ap: Optional[float]
    ap50: Optional[float]
    ap75: Optional[float]
    ar: Optional[float]
    miou: Optional[float]
    curves: List[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ap": self.ap,
            "ap50": self.ap50,
            "ap75": self.ap75,
            "ar": self.ar,
            "miou": self.miou,
            "curves": self.curves,
        }


def format_report_table(report: EvalReport) -> str:
    """Aligned one-row table in AP / AP50 / AP75 / AR / mIoU order."""
    headers = ("AP", "AP50", "AP75", "AR", "mIoU")
    values = (report.ap, report.ap50, report.ap75, report.ar, report.miou)
    cells = ["n/a" if v is None else f"{v:.3f}" for v in values]
    width = max(len(s) for s in headers + tuple(cells))
    head = "  ".join(h.rjust(width) for h in headers)
    row = "  ".join(c.rjust(width) for c in cells)
    return f"{head}\n{row}"


# ---------------------------------------------------------------------------
# IoU primitives
# ---------------------------------------------------------------------------

def iou_box(a: Box, b: Box) -> float:
    """Exact box IoU; 0 when the union is empty."""
    inter = a.intersection_area(b)
    union = a.area() + b.area() - inter
    if union <= 0:
        return 0.0
    return inter / union


def iou_mask(a: Sequence[Tuple[float, float]], b: Sequence[Tuple[float, float]],
             page_dims: Tuple[int, int]) -> float:
    """IoU of two polygons rasterized at page resolution.

    A polygon that covers no pixel (degenerate or fully out of page)
    scores 0 against anything.
    """
    w, h = page_dims
    mask_a = rasterize_polygon(a, w, h)
    mask_b = rasterize_polygon(b, w, h)
    union = int(np.logical_or(mask_a, mask_b).sum())
    if union == 0:
        return 0.0
    inter = int(np.logical_and(mask_a, mask_b).sum())
    return inter / union


def _geometry_mask(polygon, bbox, page_dims) -> np.ndarray:
    w, h = page_dims
    if polygon is not None:
        return rasterize_polygon(polygon, w, h)
    return rasterize_box(bbox, w, h)


def pair_iou(pred_polygon, pred_bbox, gt: Instance,
             page_dims: Tuple[int, int]) -> float:
    """IoU between one prediction geometry and one ground-truth instance.

    Box against box is exact; any pairing involving a polygon goes
    through rasterized masks so both geometries live on the same grid.
    """
    if pred_bbox is not None and gt.bbox is not None:
        return iou_box(pred_bbox, gt.bbox)
    mask_p = _geometry_mask(pred_polygon, pred_bbox, page_dims)
    mask_g = _geometry_mask(gt.polygon, gt.bbox, page_dims)
    union = int(np.logical_or(mask_p, mask_g).sum())
    if union == 0:
        return 0.0
    return int(np.logical_and(mask_p, mask_g).sum()) / union


# ---------------------------------------------------------------------------
# prediction file I/O
# ---------------------------------------------------------------------------

def _as_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool)


def load_predictions(path: str, pages: Sequence[AnnotatedPage]) -> List[Prediction]:
    """Parse and validate a prediction file against the ground-truth pages.

    Scores outside [0, 1] and malformed geometry are rejected;
    out-of-page boxes are clipped to their page instead, and polygons
    are clipped implicitly when rasterized.
    """
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if not isinstance(doc, list):
        raise PredictionError(f"{path}: prediction file must be a JSON list")
    dims = {p.id: (p.width, p.height) for p in pages}
    preds: List[Prediction] = []
    for i, rec in enumerate(doc):
        where = f"{path}: prediction {i}"
        if not isinstance(rec, dict):
            raise PredictionError(f"{where}: must be an object")
        pid = rec.get("page_id")
        if not isinstance(pid, str):
            raise PredictionError(f"{where}: page_id must be a string")
        category = rec.get("category")
        if category not in CATEGORY_GEOMETRY:
            raise PredictionError(f"{where}: unknown category {category!r}")
        score = rec.get("score")
        if not _as_number(score) or not 0.0 <= score <= 1.0:
            raise PredictionError(f"{where}: score must be in [0, 1]")
        has_poly = "polygon" in rec
        has_box = "bbox" in rec
        if has_poly == has_box:
            raise PredictionError(f"{where}: exactly one of polygon/bbox is required")
        if has_poly:
            poly = rec["polygon"]
            if (not isinstance(poly, list) or len(poly) < 3
                    or not all(isinstance(v, list) and len(v) == 2
                               and _as_number(v[0]) and _as_number(v[1]) for v in poly)):
                raise PredictionError(f"{where}: polygon must be >= 3 numeric [x, y] pairs")
            preds.append(Prediction(page_id=pid, category=category, score=float(score),
                                    polygon=[(float(x), float(y)) for x, y in poly]))
        else:
            box = rec["bbox"]
            if not (isinstance(box, list) and len(box) == 4 and all(_as_number(v) for v in box)):
                raise PredictionError(f"{where}: bbox must be [x, y, w, h] numbers")
            b = Box(*[float(v) for v in box])
            if b.w < 0 or b.h < 0:
                raise PredictionError(f"{where}: bbox must have nonnegative size")
            if pid in dims:
                b = b.clip(*dims[pid])
            preds.append(Prediction(page_id=pid, category=category,
                                    score=float(score), bbox=b))
    return preds


def save_predictions(preds: Sequence[Prediction], path: str) -> None:
    recs = []
    for p in preds:
        rec: dict = {"page_id": p.page_id, "category": p.category, "score": p.score}
        if p.polygon is not None:
            rec["polygon"] = [[float(x), float(y)] for x, y in p.polygon]
        else:
            rec["bbox"] = [p.bbox.x, p.bbox.y, p.bbox.w, p.bbox.h]
        recs.append(rec)
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(recs, fh, sort_keys=True, indent=2)
        fh.write("\n")


# ---------------------------------------------------------------------------
# production evaluator
# ---------------------------------------------------------------------------

def _ranked_order(preds: Sequence[Prediction]) -> List[int]:
    return sorted(range(len(preds)),
                  key=lambda k: (-preds[k].score, preds[k].page_id, k))


def _build_groups(preds: Sequence[Prediction], pages: Sequence[AnnotatedPage],
                  order: Sequence[int]):
    """IoU matrices per (page, category), predictions in rank order."""
    dims = {p.id: (p.width, p.height) for p in pages}
    gt_groups: Dict[Tuple[str, str], List[Instance]] = {}
    for page in pages:
        for inst in page.instances:
            gt_groups.setdefault((page.id, inst.category), []).append(inst)
    pred_groups: Dict[Tuple[str, str], List[int]] = {}
    for k in order:
        p = preds[k]
        pred_groups.setdefault((p.page_id, p.category), []).append(k)

    matrices: Dict[Tuple[str, str], np.ndarray] = {}
    for key, pred_ids in pred_groups.items():
        gts = gt_groups.get(key, [])
        mat = np.zeros((len(pred_ids), len(gts)), dtype=np.float64)
        if gts:
            page_dims = dims[key[0]]
            for r, k in enumerate(pred_ids):
                p = preds[k]
                for c, gt in enumerate(gts):
                    mat[r, c] = pair_iou(p.polygon, p.bbox, gt, page_dims)
        matrices[key] = mat
    return gt_groups, pred_groups, matrices


def _greedy_flags(pred_ids: Sequence[int], mat: np.ndarray, threshold: float,
                  allowed: Optional[set] = None) -> Tuple[Dict[int, bool], int]:
    """Greedy matching over one group; returns per-prediction TP flags and
    the number of matched ground truths."""
    n_gt = mat.shape[1]
    taken = np.zeros(n_gt, dtype=bool)
    flags: Dict[int, bool] = {}
    matched = 0
    for r, k in enumerate(pred_ids):
        if allowed is not None and k not in allowed:
            continue
        best_j = -1
        best = 0.0
        for j in range(n_gt):
            v = mat[r, j]
            if not taken[j] and v >= threshold and v > best:
                best = v
                best_j = j
        if best_j >= 0:
            taken[best_j] = True
            matched += 1
            flags[k] = True
        else:
            flags[k] = False
    return flags, matched


def _ap_from_flags(order: Sequence[int], flags: Dict[int, bool],
                   total_gt: int) -> Tuple[float, np.ndarray]:
    tp = np.array([1.0 if flags[k] else 0.0 for k in order], dtype=np.float64)
    if len(tp) == 0:
        return 0.0, np.zeros(len(RECALL_POINTS))
    cum_tp = np.cumsum(tp)
    ranks = np.arange(1, len(tp) + 1, dtype=np.float64)
    precision = cum_tp / ranks
    recall = cum_tp / total_gt
    envelope = np.maximum.accumulate(precision[::-1])[::-1]
    idx = np.searchsorted(recall, RECALL_POINTS, side="left")
    prec_at = np.where(idx < len(tp), envelope[np.minimum(idx, len(tp) - 1)], 0.0)
    return float(np.mean(prec_at)), prec_at


def _capped_set(preds: Sequence[Prediction], order: Sequence[int]) -> set:
    per_page: Dict[str, List[int]] = {}
    for k in order:
        per_page.setdefault(preds[k].page_id, []).append(k)
    allowed = set()
    for ids in per_page.values():
        allowed.update(ids[:MAX_DETECTIONS_PER_PAGE])
    return allowed


def _pixel_level_miou(preds, pages, pred_groups, gt_groups) -> float:
    dims = {p.id: (p.width, p.height) for p in pages}
    cats = sorted({key[1] for key in gt_groups})
    inter: Dict[str, int] = {c: 0 for c in cats}
    union: Dict[str, int] = {c: 0 for c in cats}
    page_ids = {key[0] for key in gt_groups} | {key[0] for key in pred_groups}
    for pid in sorted(page_ids):
        if pid not in dims:
            continue
        w, h = dims[pid]
        for cat in cats:
            gts = gt_groups.get((pid, cat), [])
            pred_ids = pred_groups.get((pid, cat), [])
            if not gts and not pred_ids:
                continue
            gt_mask = np.zeros((h, w), dtype=bool)
            for gt in gts:
                gt_mask |= _geometry_mask(gt.polygon, gt.bbox, (w, h))
            pred_mask = np.zeros((h, w), dtype=bool)
            for k in pred_ids:
                p = preds[k]
                pred_mask |= _geometry_mask(p.polygon, p.bbox, (w, h))
            inter[cat] += int((gt_mask & pred_mask).sum())
            union[cat] += int((gt_mask | pred_mask).sum())
    scores = [inter[c] / union[c] if union[c] else 0.0 for c in cats]
    return float(np.mean(scores)) if scores else 0.0


def evaluate(preds: Sequence[Prediction], pages: Sequence[AnnotatedPage],
             pixel_level_miou: bool = False) -> EvalReport:
    """Score predictions against the annotated pages.

    Ground truth is grouped by page and category internally; see the
    module docstring for the exact protocol.
    """
    total_gt = sum(len(page.instances) for page in pages)
    if total_gt == 0:
        return EvalReport(ap=None, ap50=None, ap75=None, ar=None, miou=None)

    order = _ranked_order(preds)
    gt_groups, pred_groups, matrices = _build_groups(preds, pages, order)

    if pixel_level_miou:
        miou = _pixel_level_miou(preds, pages, pred_groups, gt_groups)
    else:
        best_total = 0.0
        for key, gts in gt_groups.items():
            mat = matrices.get(key)
            if mat is not None and mat.size:
                best_total += float(mat.max(axis=0).sum())
        miou = best_total / total_gt

    allowed = _capped_set(preds, order)
    ap_per_threshold: List[float] = []
    ar_per_threshold: List[float] = []
    curves: List[dict] = []
    for t in IOU_THRESHOLDS:
        flags: Dict[int, bool] = {}
        for key, pred_ids in pred_groups.items():
            group_flags, _ = _greedy_flags(pred_ids, matrices[key], t)
            flags.update(group_flags)
        ap_t, prec_at = _ap_from_flags(order, flags, total_gt)
        ap_per_threshold.append(ap_t)
        curves.append({
            "iou_threshold": t,
            "recall_points": [float(r) for r in RECALL_POINTS],
            "precision": [float(p) for p in prec_at],
        })

        matched_capped = 0
        for key, pred_ids in pred_groups.items():
            _, matched = _greedy_flags(pred_ids, matrices[key], t, allowed=allowed)
            matched_capped += matched
        ar_per_threshold.append(matched_capped / total_gt)

    return EvalReport(
        ap=float(np.mean(ap_per_threshold)),
        ap50=ap_per_threshold[0],
        ap75=ap_per_threshold[5],
        ar=float(np.mean(ar_per_threshold)),
        miou=miou,
        curves=curves,
    )


# ---------------------------------------------------------------------------
# brute-force oracle
# ---------------------------------------------------------------------------
# A deliberately naive reimplementation for small inputs: matching is found
# by enumerating every injective assignment and the PR definition is
# replayed with plain loops.  Kept free of shared logic with the fast path
# (only the IoU primitives and the page grouping rule are common ground).

def _bf_enumerate_matching(ious: List[List[float]], threshold: float) -> List[Optional[int]]:
    """Best assignment under the greedy definition, found exhaustively.

    Assignments compare lexicographically along prediction rank order by
    (matched, iou, earlier ground truth wins); the maximum is exactly what
    stepwise greedy matching produces, including tie handling.
    """
    n_pred = len(ious)
    n_gt = len(ious[0]) if n_pred else 0
    complete: List[List[Optional[int]]] = []

    def extend(k: int, used: frozenset, acc: List[Optional[int]]):
        if k == n_pred:
            complete.append(list(acc))
            return
        extend(k + 1, used, acc + [None])
        for j in range(n_gt):
            if j not in used and ious[k][j] >= threshold:
                extend(k + 1, used | {j}, acc + [j])

    extend(0, frozenset(), [])

    def rank_key(assign: List[Optional[int]]):
        return tuple(
            (1, ious[k][j], -j) if j is not None else (0, 0.0, 0)
            for k, j in enumerate(assign)
        )

    return max(complete, key=rank_key)


def evaluate_bruteforce(preds: Sequence[Prediction],
                        pages: Sequence[AnnotatedPage]) -> EvalReport:
    """Oracle evaluator for small fixtures (intended for <= ~6 preds/GTs
    per page and category; cost grows factorially)."""
    total_gt = sum(len(page.instances) for page in pages)
    if total_gt == 0:
        return EvalReport(ap=None, ap50=None, ap75=None, ar=None, miou=None)

    thresholds = [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95]
    recall_pts = [i / 100 for i in range(101)]
    dims = {page.id: (page.width, page.height) for page in pages}

    order = sorted(range(len(preds)),
                   key=lambda k: (-preds[k].score, preds[k].page_id, k))

    gt_by_group: Dict[Tuple[str, str], List[Instance]] = {}
    for page in pages:
        for inst in page.instances:
            gt_by_group.setdefault((page.id, inst.category), []).append(inst)

    def group_of(k: int) -> Tuple[str, str]:
        return (preds[k].page_id, preds[k].category)

    def iou_table(pred_ids: List[int], key: Tuple[str, str]) -> List[List[float]]:
        gts = gt_by_group.get(key, [])
        table = []
        for k in pred_ids:
            p = preds[k]
            table.append([pair_iou(p.polygon, p.bbox, gt, dims[key[0]]) for gt in gts])
        return table

    def match_everything(pred_pool: List[int], threshold: float):
        """(tp flag per prediction in pool order, matched GT count)."""
        groups: Dict[Tuple[str, str], List[int]] = {}
        for k in pred_pool:
            groups.setdefault(group_of(k), []).append(k)
        tp: Dict[int, bool] = {}
        matched = 0
        for key, pred_ids in groups.items():
            if key not in gt_by_group or not gt_by_group[key]:
                for k in pred_ids:
                    tp[k] = False
                continue
            assignment = _bf_enumerate_matching(iou_table(pred_ids, key), threshold)
            for k, j in zip(pred_ids, assignment):
                tp[k] = j is not None
                if j is not None:
                    matched += 1
        return tp, matched

    # per-page detection cap for recall
    capped_pool: List[int] = []
    by_page: Dict[str, List[int]] = {}
    for k in order:
        by_page.setdefault(preds[k].page_id, []).append(k)
    for page_ids in by_page.values():
        capped_pool.extend(page_ids[:100])

    ap_list: List[float] = []
    ar_list: List[float] = []
    for t in thresholds:
        tp, _ = match_everything(list(order), t)
        precisions: List[float] = []
        recalls: List[float] = []
        n_tp = 0
        n_fp = 0
        for k in order:
            if tp[k]:
                n_tp += 1
            else:
                n_fp += 1
            precisions.append(n_tp / (n_tp + n_fp))
            recalls.append(n_tp / total_gt)
        total = 0.0
        for r in recall_pts:
            qualifying = [precisions[i] for i in range(len(order)) if recalls[i] >= r]
            total += max(qualifying) if qualifying else 0.0
        ap_list.append(total / len(recall_pts))

        _, matched = match_everything(capped_pool, t)
        ar_list.append(matched / total_gt)

    best_sum = 0.0
    for page in pages:
        for inst in page.instances:
            candidates = [
                pair_iou(preds[k].polygon, preds[k].bbox, inst, dims[page.id])
                for k in range(len(preds))
                if preds[k].page_id == page.id and preds[k].category == inst.category
            ]
            best_sum += max(candidates) if candidates else 0.0

    return EvalReport(
        ap=sum(ap_list) / len(ap_list),
        ap50=ap_list[0],
        ap75=ap_list[5],
        ar=sum(ar_list) / len(ar_list),
        miou=best_sum / total_gt,
    )
