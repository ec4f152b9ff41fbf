"""Runs the CLI and validates each JSON output against docs/schemas."""

import json
import pathlib
import subprocess
import sys

import jsonschema

cli = sys.argv[1]
schemas = pathlib.Path(sys.argv[2])

cases = [
    ("constant", ["constant", "--p", "6"]),
    ("constant", ["constant", "--p", "2"]),
    ("table", ["table", "--p-list", "3,6,12", "--format", "json"]),
    ("verify", ["verify", "--p", "7.5"]),
    ("verify", ["verify", "--p", "6", "--override-c", "3.5"]),
    ("simulate", ["simulate", "--p-list", "3,6", "--strategy", "all", "--paths", "2000", "--steps", "8",
                  "--format", "json"]),
]

failed = 0
for name, args in cases:
    schema = json.loads((schemas / f"{name}.schema.json").read_text())
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode not in (0, 1):
        print(f"FAIL {' '.join(args)}: exit {proc.returncode}: {proc.stderr.strip()}")
        failed += 1
        continue
    try:
        jsonschema.validate(json.loads(proc.stdout), schema)
        print(f"ok   {' '.join(args)}")
    except jsonschema.ValidationError as e:
        print(f"FAIL {' '.join(args)}: {e.message}")
        failed += 1

sys.exit(1 if failed else 0)
