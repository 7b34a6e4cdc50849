#!/usr/bin/env python3
"""Regenerate the checked-in Unicode tables under data/ucd/.

Inputs:
  --ucd-json DIR      an unpacked copy of the `ucd-full` npm package (the UCD
                      release encoded as JSON, one file per UCD text file)
  --confusables FILE  output of scripts/dump_confusables.cpp (UTS #39 prototypes
                      as compiled into ICU for the same Unicode version)
  --out DIR           destination for the table files (default: data/ucd)
  --tests-out DIR     destination for BidiTest.txt / BidiCharacterTest.txt
                      (default: tests/data/ucd)

Every produced table uses `;`-separated fields, `#` comments, and code points
in uppercase hex without a prefix.
"""

import argparse
import json
import os
import sys

VERSION = "14.0.0"
BIDI_CONTROLS = {0x202A, 0x202B, 0x202C, 0x202D, 0x202E, 0x2066, 0x2067, 0x2068, 0x2069}


def load(ucd, name):
    with open(os.path.join(ucd, name), encoding="utf-8") as fh:
        data = json.load(fh)
    (value,) = data.values()
    return value


def rng(entry):
    r = [int(x, 16) for x in entry["range"]]
    return r[0], r[-1]


def fmt_range(lo, hi):
    return f"{lo:04X}" if lo == hi else f"{lo:04X}..{hi:04X}"


def merge(items):
    """items: iterable of (lo, hi, value) -> merged, sorted list."""
    out = []
    for lo, hi, val in sorted(items):
        if out and out[-1][2] == val and out[-1][1] + 1 == lo:
            out[-1] = (out[-1][0], hi, val)
        else:
            out.append((lo, hi, val))
    return out


def header(fh, name, description):
    fh.write(f"# {name}\n# Unicode-Version: {VERSION}\n")
    fh.write(f"# {description}\n")
    fh.write("# Generated by scripts/gen_ucd_tables.py; do not edit by hand.\n\n")


def write_ranges(path, name, description, rows, default_note):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        header(fh, name, description)
        fh.write(f"# {default_note}\n\n")
        for lo, hi, val in rows:
            fh.write(f"{fmt_range(lo, hi)};{val}\n")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--ucd-json", required=True)
    ap.add_argument("--confusables", required=True)
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    ap.add_argument("--out", default=os.path.join(root, "data", "ucd"))
    ap.add_argument("--tests-out", default=os.path.join(root, "tests", "data", "ucd"))
    args = ap.parse_args()
    ucd = args.ucd_json
    os.makedirs(args.out, exist_ok=True)
    os.makedirs(args.tests_out, exist_ok=True)

    unicode_data = load(ucd, "UnicodeData.json")
    names = {int(e["codepoint"], 16): e["name"] for e in unicode_data}

    # bidi_classes.txt
    bidi = merge(rng(e) + (e["class"],) for e in load(ucd, "extracted/DerivedBidiClass.json"))
    write_ranges(os.path.join(args.out, "bidi_classes.txt"), "bidi_classes.txt",
                 "Bidi_Class by code point range (range;class).", bidi,
                 "Code points not listed default to L.")

    # scripts.txt
    scripts = merge(rng(e) + (e["script"],) for e in load(ucd, "Scripts.json"))
    write_ranges(os.path.join(args.out, "scripts.txt"), "scripts.txt",
                 "Script by code point range (range;script).", scripts,
                 "Code points not listed have script Unknown.")

    # general_categories.txt
    gc = merge(rng(e) + (e["category"],)
               for e in load(ucd, "extracted/DerivedGeneralCategory.json"))
    write_ranges(os.path.join(args.out, "general_categories.txt"), "general_categories.txt",
                 "General_Category by code point range (range;category).", gc,
                 "Code points not listed are Cn.")

    # invisibles.txt: Default_Ignorable_Code_Point minus bidi controls, plus ZWSP.
    invisible = set()
    for e in load(ucd, "DerivedCoreProperties.json"):
        if e["property"] == "Default_Ignorable_Code_Point":
            lo, hi = rng(e)
            invisible.update(range(lo, hi + 1))
    invisible -= BIDI_CONTROLS
    invisible.add(0x200B)
    with open(os.path.join(args.out, "invisibles.txt"), "w", encoding="utf-8", newline="\n") as fh:
        header(fh, "invisibles.txt",
               "Code points that render without a glyph (Default_Ignorable_Code_Point "
               "minus the explicit bidi controls, plus U+200B).")
        for cp in sorted(invisible):
            name = names.get(cp)
            fh.write(f"{cp:04X}" + (f" # {name}" if name and not name.startswith("<") else "") + "\n")

    # brackets.txt
    with open(os.path.join(args.out, "brackets.txt"), "w", encoding="utf-8", newline="\n") as fh:
        header(fh, "brackets.txt",
               "Bidi paired brackets (code point;paired bracket;o|c). Canonical "
               "equivalents are resolved through decompositions.txt.")
        for e in load(ucd, "BidiBrackets.json"):
            fh.write(f"{e['codepoint']};{e['bracket']};{e['type']}\n")

    # decompositions.txt and combining_classes.txt
    canon = {}
    ccc = {}
    for e in unicode_data:
        cp = int(e["codepoint"], 16)
        c = int(e.get("canonicalCombiningClass", "0"))
        if c:
            ccc[cp] = c
        dm = e.get("characterDecompositionMapping")
        if dm and not dm.startswith("<"):
            seq = dm.split()
            canon[cp] = [int(x, 16) for x in seq]

    def full(cp):
        if cp not in canon:
            return [cp]
        out = []
        for c in canon[cp]:
            out.extend(full(c))
        return out

    with open(os.path.join(args.out, "decompositions.txt"), "w", encoding="utf-8", newline="\n") as fh:
        header(fh, "decompositions.txt",
               "Full canonical decomposition (code point;sequence). Hangul syllables "
               "are decomposed algorithmically and are not listed.")
        for cp in sorted(canon):
            fh.write(f"{cp:04X};" + " ".join(f"{c:04X}" for c in full(cp)) + "\n")
    ccc_rows = merge((cp, cp, v) for cp, v in ccc.items())
    write_ranges(os.path.join(args.out, "combining_classes.txt"), "combining_classes.txt",
                 "Canonical_Combining_Class (range;class).", ccc_rows,
                 "Code points not listed have class 0.")

    # name_aliases.txt: first abbreviation alias per code point.
    seen = set()
    with open(os.path.join(args.out, "name_aliases.txt"), "w", encoding="utf-8", newline="\n") as fh:
        header(fh, "name_aliases.txt", "Short name alias (code point;abbreviation).")
        for e in load(ucd, "NameAliases.json"):
            cp = int(e["codepoint"], 16)
            if e["type"] == "abbreviation" and cp not in seen:
                seen.add(cp)
                fh.write(f"{cp:04X};{e['alias']}\n")

    # case_folding.txt: simple case folding (statuses C and S).
    with open(os.path.join(args.out, "case_folding.txt"), "w", encoding="utf-8", newline="\n") as fh:
        header(fh, "case_folding.txt", "Simple case folding (code point;folded code point).")
        for e in load(ucd, "CaseFolding.json"):
            if e["status"] in ("C", "S"):
                fh.write(f"{e['codepoint']};{e['mapping']}\n")

    # confusables.txt
    with open(args.confusables, encoding="utf-8") as src, \
            open(os.path.join(args.out, "confusables.txt"), "w", encoding="utf-8", newline="\n") as fh:
        header(fh, "confusables.txt",
               "Confusable prototype per code point (code point;target sequence), "
               "closed under mapping.")
        for line in src:
            if line.startswith("#") or not line.strip():
                continue
            fh.write(line.strip() + "\n")

    # Conformance data in the official text layouts.
    with open(os.path.join(args.tests_out, "BidiCharacterTest.txt"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(f"# BidiCharacterTest-{VERSION}.txt\n")
        for e in load(ucd, "BidiCharacterTest.json"):
            fh.write(";".join([" ".join(e["codepointSequence"]), e["direction"],
                               e["embeddingLevel"], " ".join(e["resolvedLevelList"]),
                               " ".join(e["indexList"])]) + "\n")
    with open(os.path.join(args.tests_out, "BidiTest.txt"), "w",
              encoding="utf-8", newline="\n") as fh:
        fh.write(f"# BidiTest-{VERSION}.txt\n")
        levels = reorder = None
        for e in load(ucd, "BidiTest.json"):
            if e["levels"] != levels:
                levels = e["levels"]
                fh.write(f"\n@Levels:\t{levels}\n")
            if e.get("reorder", "") != reorder:
                reorder = e.get("reorder", "")
                fh.write(f"@Reorder:\t{reorder}\n")
            fh.write(f"{e['input']}; {e['bitset']}\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
