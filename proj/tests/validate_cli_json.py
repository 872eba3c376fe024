#!/usr/bin/env python3
"""Runs the omegares binary in json mode and validates every document against the shipped schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema

binary, data = sys.argv[1], pathlib.Path(sys.argv[2])
schema = json.loads((data / "schema" / "cli_output.schema.json").read_text())
fx = data / "fixtures"
runs = [
    ["group", "C4", "-p", "2"],
    ["group", "S3", "-p", "3", "-N", "4", "--seed", "3"],
    ["category", str(fx / "arrow_with_cyclic_loop_p2.json"), "--target", "y", "-N", "2"],
    ["category", str(fx / "arrow_with_cyclic_loop_p2.json"), "--target", "x"],
    ["check", str(fx / "unipotent_h1_complex.json"), "-N", "2"],
    ["check", str(fx / "sullivan_p5_m2_L3.json")],
    ["sullivan", "5", "4", "3"],
    ["torus", "-p", "3", "--action", "-I", "-N", "9"],
    ["torus", "-p", "3", "--rank", "1", "--level", "4", "--base"],
    ["perfectness", str(fx / "arrow_with_cyclic_loop_p3.json")],
]
failed = 0
for args in runs:
    proc = subprocess.run([binary, *args, "--format", "json"], capture_output=True, text=True)
    if proc.returncode not in (0, 2):
        print("FAIL", args, proc.returncode, proc.stderr)
        failed += 1
        continue
    try:
        jsonschema.validate(json.loads(proc.stdout), schema)
        print("ok  ", " ".join(args[:2]))
    except jsonschema.ValidationError as e:
        print("FAIL", args, e.message)
        failed += 1
sys.exit(1 if failed else 0)
