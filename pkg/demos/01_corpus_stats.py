"""Build the bundled sample corpus on disk, validate it, and print stats.

Run from anywhere:  python3 demos/01_corpus_stats.py
Output lands in ./demo_output/corpus.
"""

from cutpaste import corpus_stats, format_stats_table, load_corpus, validate_corpus
from cutpaste.fixtures import build_fixture_workspace

workspace = build_fixture_workspace("demo_output")
corpus_dir = workspace["corpus_dir"]
print(f"sample corpus written to {corpus_dir}")

# validate_corpus returns one diagnostic string per format violation;
# a clean corpus gives an empty list
problems = validate_corpus(corpus_dir)
print(f"validation: {'ok' if not problems else problems}")

pages = load_corpus(corpus_dir)
print(f"\n{len(pages)} annotated pages:")
for page in pages:
    kinds = ", ".join(f"{inst.category}#{inst.id}" for inst in page.instances)
    print(f"  {page.id} ({page.width}x{page.height}): {kinds or '(empty)'}")

print("\nper-category totals:")
print(format_stats_table(corpus_stats(pages)))
