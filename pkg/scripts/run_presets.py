#!/usr/bin/env python3
"""Run the three shipped preset experiments into ./out/."""
import pathlib
import sys

from robinspectra.cli import main

HERE = pathlib.Path(__file__).resolve().parent.parent

for name in ("constant", "step", "oscillating"):
    cfg = HERE / "configs" / f"{name}.cfg"
    print(f"== {name} ==")
    rc = main(["run", "--config", str(cfg)])
    if rc != 0:
        sys.exit(rc)
