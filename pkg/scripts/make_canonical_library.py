#!/usr/bin/env python3
"""Regenerate the shipped data files.

Writes the 480-style annotated library (seeded, so rerunning is
byte-stable) and the balanced-target preset, both into the package data
directory and mirrored at the repository-level data/ directory.
"""

import json
import shutil
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(REPO / "src"))

from hairmony.balancer import balanced_preset  # noqa: E402
from hairmony.library import generate_library  # noqa: E402
from hairmony.taxonomy import load_taxonomy, validate_annotation, write_annotations  # noqa: E402

PKG_DATA = REPO / "src" / "hairmony" / "data"
REPO_DATA = REPO / "data"


def main() -> int:
    tax = load_taxonomy(PKG_DATA / "taxonomy.v1.json")
    library = generate_library(tax, count=480, seed=20240521)
    for style_id, ann in library.items():
        violations = validate_annotation(tax, ann)
        if violations:
            raise SystemExit(f"generator produced invalid style {style_id}: {violations}")

    write_annotations(library.values(), PKG_DATA / "styles.v1.jsonl")

    targets = balanced_preset()
    with open(PKG_DATA / "targets.balanced.json", "w", encoding="utf-8") as fh:
        json.dump({k: dict(v) for k, v in targets.entries.items()}, fh, indent=2, sort_keys=True)
        fh.write("\n")

    REPO_DATA.mkdir(exist_ok=True)
    for name in ("taxonomy.v1.json", "styles.v1.jsonl", "targets.balanced.json"):
        shutil.copyfile(PKG_DATA / name, REPO_DATA / name)

    print(f"wrote {len(library)} styles and targets to {PKG_DATA} and {REPO_DATA}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
