"""
Reports as certificates
=======================

A report carries everything needed to re-check its claims with exact
arithmetic.  Serialize one, read it back, re-verify, then corrupt a value
and watch the check fail.
"""

import json
from pathlib import Path

from efa.io import parse_input
from efa.report import analyze, report_to_json, verify_report

DATA = Path(__file__).resolve().parent.parent / "src" / "efa" / "data"

rep = analyze(parse_input(DATA / "gaussian.json"))
doc = report_to_json(rep)
text = json.dumps(doc, indent=1)
print(f"report: {len(text)} characters, status {doc['status']}")

for check in verify_report(json.loads(text)):
    print("PASS" if check.ok else "FAIL", check.name)

# claim f(i) = 4 instead of 3
bad = json.loads(text)
rec = next(r for r in bad["exceptional"] if r["kind"] != "taylor")
print("\ntampering with", rec["value"]["approx"])
rec["value_element"] = "4"
rec["value"] = {"min_poly": ["-4", "1"], "box": {"re": "4", "im": "0", "radius": "0"}, "approx": "4"}
failed = [c.name for c in verify_report(bad) if not c.ok]
print("failed checks:", failed)
