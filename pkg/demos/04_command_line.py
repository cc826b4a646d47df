"""
Batch runs from the command line
================================

The ``wigner-geometry`` command computes geometry over parameter sweeps and
runs the invariant suite at single points. This script drives it through
``subprocess`` and reads the results back.
"""

import csv
import json
import subprocess
import sys
import tempfile
from pathlib import Path

out = Path(tempfile.mkdtemp())
cli = [sys.executable, "-m", "wigner_geometry"]

# %% Sweep Y for the oscillator ground state. Y = +-1 leaves the domain; those
# rows are flagged and the run continues.
csv_path = out / "gho.csv"
subprocess.run(cli + ["compute", "--model", "GeneralizedOscillator", "--point", "X=1,Z=1", "--state", "0",
                      "--sweep", "Y=-1:1:9", "--out", str(csv_path)], check=True)
with open(csv_path) as fh:
    for row in csv.DictReader(fh):
        print(row["Y"], row["status"], row["g22"], row["F12"])

# %% Both methods at once: a discrepancy report lands next to the output.
json_path = out / "lco.json"
subprocess.run(cli + ["compute", "--model", "LinearlyCoupled2", "--point", "A=1,B=1.5", "--state", "1,0",
                      "--sweep", "C=[0.2,0.4,0.6]", "--method", "both", "--out", str(json_path)], check=True)
print(json.loads((out / "lco.discrepancy.json").read_text())["max"])

# %% Validate a point; the exit status is nonzero if any check fails.
for extra in ([], ["--nodes", "2"]):
    proc = subprocess.run(cli + ["validate", "--model", "GeneralizedOscillator", "--point", "X=1,Y=0,Z=1",
                                 "--state", "1", "--out", str(out / "v.json")] + extra, capture_output=True, text=True)
    failed = [c["name"] for c in json.loads((out / "v.json").read_text())["checks"] if not c["passed"]]
    print(f"validate {' '.join(extra) or '(default grid)'}: exit {proc.returncode}, failed {failed}")
