"""
The command-line workflow
=========================

Every step is also available as an ``nrdep`` subcommand exchanging plain CSV
files. This script drives the same entry point in-process and shows what
lands on disk.
"""

import tempfile
from pathlib import Path

from nrdep.cli import main

work = Path(tempfile.mkdtemp(prefix="nrdep-demo-"))
data, fitted, curves = work / "data", work / "fit", work / "curves"

steps = [
    ["gen", "--seed", "7", "--groups", "8", "--group-size", "38", "--out", str(data)],
    ["fit", "--views", str(data / "view1.csv"), str(data / "view2.csv"), "--dims", "2", "2",
     "--seed", "7", "--split-fraction", "0.7", "--out", str(fitted)],
    ["eval", "--views", str(data / "view1.csv"), str(data / "view2.csv"),
     "--maps", str(fitted / "map_1.csv"), str(fitted / "map_2.csv"),
     "--split-fraction", "0.7", "--seed", "7", "--out", str(curves)],
    ["cca", "--views", str(data / "view1.csv"), str(data / "view2.csv"), "--dims", "2",
     "--out", str(work / "cca")],
]
for argv in steps:
    print("$ nrdep", " ".join(a.replace(str(work), "$WORK") for a in argv))
    assert main(argv) == 0

# %%
for d in sorted(p for p in work.iterdir()):
    print(d.name + "/", " ".join(sorted(f.name for f in d.iterdir())))
print((curves / "curves_test_sub1_vs_sub2.csv").read_text())
