"""Score detector output against a synthesized ground truth.

Three prediction sets on the same little dataset:
  1. perfect copies of the ground truth (every metric 1.0)
  2. every box shifted a bit (localization errors pull AP75 below AP50)
  3. only half the instances predicted (recall loss caps everything)
"""

from cutpaste import (
    Box,
    Prediction,
    RunConfig,
    as_annotated_page,
    evaluate,
    format_report_table,
    synthesize,
)
from cutpaste.cli import main
from cutpaste.fixtures import build_fixture_workspace

workspace = build_fixture_workspace("demo_output")
main(["extract", "--dataset", workspace["corpus_dir"],
      "--manifest", workspace["manifest_path"], "--out", "demo_output/bank"])

pages = [
    as_annotated_page(sp, f"page_{i:06d}")
    for i, sp in enumerate(synthesize(RunConfig(
        command="synth", method="context", count=4, seed=99,
        bank="demo_output/bank")))
]


def copy_gt(jitter=0, keep_every=1):
    preds = []
    for page in pages:
        for inst in page.instances:
            if inst.id % keep_every:
                continue
            if inst.polygon is not None:
                poly = [(x + jitter, y + jitter) for x, y in inst.polygon]
                preds.append(Prediction(page.id, inst.category, 0.9, polygon=poly))
            else:
                b = inst.bbox
                preds.append(Prediction(page.id, inst.category, 0.9,
                                        bbox=Box(b.x + jitter, b.y, b.w, b.h)))
    return preds


for label, preds in (
    ("perfect predictions", copy_gt()),
    ("all boxes shifted 40 px", copy_gt(jitter=40)),
    ("every other instance missing", copy_gt(keep_every=2)),
):
    report = evaluate(preds, pages)
    print(f"\n{label} ({len(preds)} predictions):")
    print(format_report_table(report))
