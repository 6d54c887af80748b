"""Re-reads the confusion table straight from the source LaTeX and writes the bundled CSVs.

Source order for slides is front, back, right, left; the library's order is front, back, left,
right. Cells printed "-" (or left blank) are 0. With --check, compares against existing files.
"""
import argparse
import re
import sys
from pathlib import Path

SOURCE_ROWS = ["tap_front", "tap_center", "tap_back", "tap_left", "tap_right",
              "slide_front_fast", "slide_back_fast", "slide_right_fast", "slide_left_fast",
              "slide_front_slow", "slide_back_slow", "slide_right_slow", "slide_left_slow"]
ENUM_ORDER = ["tap_front", "tap_center", "tap_back", "tap_left", "tap_right",
              "slide_front_fast", "slide_back_fast", "slide_left_fast", "slide_right_fast",
              "slide_front_slow", "slide_back_slow", "slide_left_slow", "slide_right_slow"]


def read_table(source: Path):
    text = source.read_text()
    body = text[text.index(r"\label{table:confusion}"):]
    body = body[:body.index(r"\end{tabular}")]
    rows = []
    for line in body.splitlines():
        if not re.search(r"&\s*(front|center|back|left|right)\s*&", line):
            continue
        cells = [c.split(r"\\")[0] for c in line.split("&")]
        name_at = next(i for i, c in enumerate(cells) if c.strip() in ("front", "center", "back", "left", "right"))
        values = []
        for cell in cells[name_at + 1:]:
            cell = re.sub(r"\\(cellcolor|color)\[HTML\]\{[0-9A-F]{6}\}", "", cell)
            m = re.findall(r"\d\.\d\d", cell)
            values.append(float(m[-1]) if m else 0.0)
        rows.append(values)
    if len(rows) != 13 or any(len(r) != 13 for r in rows):
        sys.exit(f"expected 13x13 cells, got {[len(r) for r in rows]}")
    named = {SOURCE_ROWS[r]: {SOURCE_ROWS[c]: rows[r][c] for c in range(13)} for r in range(13)}
    return [[named[r][c] for c in ENUM_ORDER] for r in ENUM_ORDER]


def to_csv(matrix, fmt):
    lines = ["pattern," + ",".join(ENUM_ORDER)]
    for name, row in zip(ENUM_ORDER, matrix):
        lines.append(name + "," + ",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--source", required=True, type=Path)
    ap.add_argument("--out", required=True, type=Path)
    ap.add_argument("--check", action="store_true")
    args = ap.parse_args()
    raw = read_table(args.source)
    norm = [[v / sum(row) for v in row] for row in raw]
    outputs = {
        "table1_raw.csv": to_csv(raw, lambda v: f"{v:.2f}"),
        "table1_normalized.csv": to_csv(norm, lambda v: f"{v:.6f}"),
    }
    for name, content in outputs.items():
        path = args.out / name
        if args.check:
            if path.read_text() != content:
                sys.exit(f"{path} differs from the source transcription")
        else:
            path.write_text(content)
    for name, row in zip(ENUM_ORDER, raw):
        print(f"{name:18s} sum={sum(row):.2f} diag={row[ENUM_ORDER.index(name)]:.2f}")


if __name__ == "__main__":
    main()
