"""Capture reference to_buffers output as golden containers.

Run once with awkward 2.x installed:

    python scripts/gen_golden.py crates/core/tests/golden

With --check DIR, instead read a container written by `ragged` and print
what awkward reconstructs from it.
"""

import argparse
import json
import pathlib
import sys

import awkward as ak
import numpy as np

CASES = {
    "list_float64": lambda: ak.Array([[1.1, 2.2, 3.3], [], [4.4, 5.5]]),
    "record_ab": lambda: ak.Array(
        [{"a": i, "b": round(1.1 * i, 1)} for i in range(1, 6)]
    ),
    "empty_float64": lambda: ak.Array(np.array([], dtype=np.float64)),
}


def write(array, root):
    form, length, buffers = ak.to_buffers(array)
    (root / "buffers").mkdir(parents=True, exist_ok=True)
    (root / "form.json").write_text(form.to_json() + "\n")
    (root / "length.txt").write_text(f"{length}\n")
    for name, data in buffers.items():
        (root / "buffers" / name).write_bytes(bytes(data))


def read(root):
    form = ak.forms.from_json((root / "form.json").read_text())
    length = int((root / "length.txt").read_text())
    buffers = {p.name: p.read_bytes() for p in (root / "buffers").iterdir()}
    return ak.from_buffers(form, length, buffers)


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("out", type=pathlib.Path)
    parser.add_argument("--check", action="store_true")
    args = parser.parse_args()
    if args.check:
        print(json.dumps(read(args.out).to_list()))
        return 0
    for name, make in CASES.items():
        write(make(), args.out / name)
        print(f"wrote {args.out / name}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
