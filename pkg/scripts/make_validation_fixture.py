#!/usr/bin/env python3
"""Build the golden annotation validation fixture.

Each case is a complete annotation plus the rule ids it is expected to
violate (empty list = valid). Expectations are stated by hand next to the
mutation that causes them, never computed, so the fixture is an
independent oracle for both the Python validator and the browser UI's
mirrored rules. Output: tests/golden/validation_suite.json
"""

import copy
import json
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "tests" / "golden" / "validation_suite.json"

REGIONS = [
    "Front",
    "Top",
    "Crown",
    "Nape",
    "Right Side",
    "Right Temple",
    "Left Side",
    "Left Temple",
]

# A plain shoulder-length straight style: no bangs, no gathering, no styling.
BASE_GLOBAL = {
    "Bangs Style": "None",
    "Bangs Length": "N/A",
    "Hair Accessories": "None",
    "Parting Location": "Central",
    "Hairline Shape": "Straight",
    "Hairline Position": "Medium",
    "Hairline Visibility": "Full",
    "Surface Appearance": "Matte",
    "Baby Hair": "No baby hair",
    "Hair Attribute Varies": "No",
}
BASE_REGION = {
    "Hair Type": "Straight",
    "Strand Styling": "None",
    "Strand Thickness": "N/A",
    "Hair Gathered": "None, not gathered",
    "Hair Direction": "Brushed/flowing down",
    "Hair Length": "Shoulder length",
    "Layering": "None/Single length",
    "Decorative patterns": "None",
}

BALD_REGION = {
    "Hair Type": "N/A",
    "Strand Styling": "N/A",
    "Strand Thickness": "N/A",
    "Hair Gathered": "None, not gathered",
    "Hair Direction": "N/A",
    "Hair Length": "No hair/Bald (clipper 0)",
    "Layering": "N/A",
    "Decorative patterns": "None",
}


def build(style_id, global_mods=None, all_region_mods=None, per_region=None, bald=False):
    g = copy.deepcopy(BASE_GLOBAL)
    g.update(global_mods or {})
    base = BALD_REGION if bald else BASE_REGION
    regions = {r: copy.deepcopy(base) for r in REGIONS}
    for r in regions:
        regions[r].update(all_region_mods or {})
    for r, mods in (per_region or {}).items():
        regions[r].update(mods)
    return {"style_id": style_id, "global": g, "regions": regions}


def main():
    cases = []

    def case(name, annotation, expected, note):
        cases.append(
            {
                "name": name,
                "annotation": annotation,
                "expected_violations": sorted(expected),
                "note": note,
            }
        )

    # --- valid annotations -------------------------------------------------
    case("plain-straight", build("v01"), [], "base style, nothing conditional")
    case(
        "bangs-present",
        build("v02", {"Bangs Style": "Straight", "Bangs Length": "To eyebrows (~10cm)"}),
        [],
        "bangs set together with their length",
    )
    case(
        "braided-all-over",
        build("v03", all_region_mods={"Strand Styling": "Braids", "Strand Thickness": "Medium (1-2cm)"}),
        [],
        "styled strands with thickness set everywhere",
    )
    case(
        "fully-bald",
        build("v04", bald=True),
        [],
        "bald style with the conditional attributes parked at N/A",
    )
    case(
        "crown-ponytail",
        build("v05", per_region={"Crown": {"Hair Gathered": "Pony tail, single"}}),
        [],
        "single gathering at the crown",
    )
    case(
        "hidden-hairline-unknowns",
        build(
            "v06",
            {
                "Hairline Visibility": "Not visible",
                "Hairline Shape": "I don't know",
                "Hairline Position": "I don't know",
            },
        ),
        [],
        "unknown hairline is fine when it is not visible",
    )
    case(
        "coily-dreadlocks",
        build(
            "v07",
            all_region_mods={
                "Hair Type": "Coily",
                "Strand Styling": "Dreadlocks",
                "Strand Thickness": "Micro (<1cm)",
            },
        ),
        [],
        "micro dreadlocks on coily hair",
    )
    case(
        "mixed-lengths",
        build(
            "v08",
            per_region={
                "Nape": {"Hair Length": "Waist length or longer"},
                "Right Temple": {"Hair Length": "Short (1-5cm, clipper 4-10)"},
                "Left Temple": {"Hair Length": "Short (1-5cm, clipper 4-10)"},
            },
        ),
        [],
        "lengths may vary per region",
    )
    case(
        "unstyled-strands-no-thickness",
        build("v09"),
        [],
        "Strand Styling None with Strand Thickness left N/A is valid",
    )
    case(
        "partial-hairline-unknown-position",
        build(
            "v10",
            {
                "Hairline Visibility": "Partially visible (left)",
                "Hairline Position": "I don't know",
            },
        ),
        [],
        "partially visible hairline may leave position unknown",
    )
    case(
        "shaved-not-bald",
        build(
            "v11",
            all_region_mods={"Hair Length": "Shaved, roots visible (clipper 0.5)"},
        ),
        [],
        "shaved heads keep hair type: the bald rule only fires on clipper 0",
    )
    case(
        "nape-knot-with-beads",
        build(
            "v12",
            {"Hair Accessories": "Bead(s)"},
            per_region={"Nape": {"Hair Gathered": "Knot, multiple"}},
        ),
        [],
        "accessories and gatherings are unconstrained",
    )

    # --- single-rule violations ---------------------------------------------
    case(
        "bangs-length-without-bangs",
        build("x01", {"Bangs Length": "To eyebrows (~10cm)"}),
        ["BANGS-LEN"],
        "Bangs Style is None, so a concrete Bangs Length is inconsistent",
    )
    case(
        "bangs-without-length",
        build("x02", {"Bangs Style": "U-shaped"}),
        ["BANGS-LEN"],
        "bangs present but their length left N/A",
    )
    case(
        "braids-without-thickness",
        build("x03", per_region={"Front": {"Strand Styling": "Braids"}}),
        ["STRAND-THICK"],
        "styled strands in one region with no thickness there",
    )
    case(
        "thickness-without-styling",
        build("x04", per_region={"Top": {"Strand Thickness": "Micro (<1cm)"}}),
        ["STRAND-THICK"],
        "thickness set although strands are unstyled",
    )
    case(
        "bald-with-hair-type",
        build("x05", bald=True, all_region_mods={"Hair Type": "Straight"}),
        ["BALD-TYPE"],
        "fully bald yet Hair Type is set",
    )
    case(
        "bald-with-direction",
        build("x06", bald=True, all_region_mods={"Hair Direction": "Pointing out"}),
        ["BALD-TYPE"],
        "fully bald yet Hair Direction is set",
    )
    case(
        "full-hairline-unknown-shape",
        build("x07", {"Hairline Shape": "I don't know"}),
        ["HIDDEN-HAIRLINE"],
        "fully visible hairline cannot have unknown shape",
    )
    case(
        "full-hairline-unknown-position",
        build("x08", {"Hairline Position": "I don't know"}),
        ["HIDDEN-HAIRLINE"],
        "fully visible hairline cannot have unknown position",
    )

    # --- multiple violations --------------------------------------------------
    case(
        "two-broken-rules",
        build(
            "x09",
            {"Bangs Length": "Below eyebrows (~>10cm)"},
            per_region={"Front": {"Strand Styling": "Twists/Ringlets"}},
        ),
        ["BANGS-LEN", "STRAND-THICK"],
        "independent global and regional inconsistencies",
    )
    case(
        "bald-type-and-hidden-hairline",
        build(
            "x10",
            {"Hairline Shape": "I don't know"},
            bald=True,
            all_region_mods={"Hair Type": "Coily"},
        ),
        ["BALD-TYPE", "HIDDEN-HAIRLINE"],
        "bald style with a set type plus an unknown shape on a visible hairline",
    )
    case(
        "two-regions-missing-thickness",
        build(
            "x11",
            per_region={
                "Front": {"Strand Styling": "Braids"},
                "Crown": {"Strand Styling": "Dreadlocks"},
            },
        ),
        ["STRAND-THICK", "STRAND-THICK"],
        "per-region rule fires once per offending region",
    )

    OUT.parent.mkdir(parents=True, exist_ok=True)
    with open(OUT, "w", encoding="utf-8") as fh:
        json.dump({"cases": cases}, fh, indent=2, ensure_ascii=False, sort_keys=True)
        fh.write("\n")
    print(f"wrote {len(cases)} cases to {OUT}")


if __name__ == "__main__":
    main()
