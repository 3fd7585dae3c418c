"""End to end: taxonomy file, study file, agreement report.

Builds a miniature elicitation study on disk in a temp directory, then
produces the report the CLI's `compute` command would give you.

Run:  python3 demos/04_study_report_workflow.py
"""

import json
import tempfile
from pathlib import Path

from consensus_kit import (
    Descriptor,
    DescriptorTaxonomy,
    build_report,
    load_dataset,
    load_taxonomy,
    parse_dataset,
    save_dataset,
    save_taxonomy,
    write_report,
)

TAXONOMY = DescriptorTaxonomy(
    version="mini-v1",
    descriptors=(
        Descriptor(id="swipe_left", label="swipe left", category="movement", hand="dominant"),
        Descriptor(id="swipe_right", label="swipe right", category="movement", hand="dominant"),
        Descriptor(id="circle", label="circular motion", category="movement", hand="dominant"),
        Descriptor(id="open_palm", label="open palm", category="hand_state", hand="dominant"),
    ),
)

# three participants, two referents, one proposal each
STUDY = {
    "taxonomy_version": "mini-v1",
    "referents": [
        {"id": "next", "label": "Next track"},
        {"id": "prev", "label": "Previous track"},
    ],
    "participants": ["p1", "p2", "p3"],
    "proposals": [
        {"id": f"{r}_{p}", "referent_id": r, "participant_id": p}
        for r in ("next", "prev")
        for p in ("p1", "p2", "p3")
    ],
    "annotations": {
        # everyone swipes right for "next"; p3 adds a flourish
        "next_p1": [0, 1, 0, 1],
        "next_p2": [0, 1, 0, 1],
        "next_p3": [0, 1, 1, 1],
        # "prev" splits: two swipe left, one circles
        "prev_p1": [1, 0, 0, 1],
        "prev_p2": [1, 0, 0, 0],
        "prev_p3": [0, 0, 1, 0],
    },
    "groupings": {
        "next": [["next_p1", "next_p2"], ["next_p3"]],
        "prev": [["prev_p1"], ["prev_p2"], ["prev_p3"]],
    },
}


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        root = Path(tmp)
        save_taxonomy(TAXONOMY, root / "taxonomy.json")

        dataset = parse_dataset(json.dumps(STUDY), TAXONOMY)
        save_dataset(dataset, root / "study.json")
        print(f"wrote {root / 'taxonomy.json'} and {root / 'study.json'}")

        # reload from disk, as the CLI would
        taxonomy = load_taxonomy(root / "taxonomy.json")
        dataset = load_dataset(root / "study.json", taxonomy)

        report = build_report(dataset)
        print("\nreport (markdown):\n")
        print(write_report(report, "markdown"))

        print("Notes:")
        print("- 'Next track' has an exact 2-of-3 group, so its hard rate is 1/3,")
        print("  while the near-identical third proposal lifts the soft rate higher.")
        print("- 'Previous track' has no identical pair at all (hard rate 0) but")
        print("  plenty of partial overlap, which only the soft rate can see.")
        for line in report.warnings:
            print(f"- warning: {line}")


if __name__ == "__main__":
    main()
