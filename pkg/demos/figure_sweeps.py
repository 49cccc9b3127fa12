# Regenerate the two surfaces as CSV and summarize them.
#
#     python demos/figure_sweeps.py [OUTDIR]
#
# Writes fig3.csv (D^2 and V^2 over predictability and quality for pure
# states) and fq.csv (the stringency ratio f_Q over P_Q and Q_D with a
# Detecton of norm 0.882). Plotting is left to whatever tool you prefer.

import csv
import sys
from collections import Counter
from pathlib import Path

import numpy as np

from whichway import cli

out = Path(sys.argv[1] if len(sys.argv) > 1 else "sweeps")
out.mkdir(parents=True, exist_ok=True)

cli.main(["sweep-fig3", "--grid", "41x41", "--out", str(out / "fig3.csv")])
cli.main(["sweep-fq", "--grid", "41x41", "--out", str(out / "fq.csv")])

with open(out / "fig3.csv") as f:
    rows = np.array([[float(v) for v in r] for r in list(csv.reader(f))[1:]])
print(f"fig3: {len(rows)} rows, max |1 - D^2 - V^2| = {np.max(np.abs(rows[:, 4])):.2e}")

with open(out / "fq.csv") as f:
    rows = list(csv.reader(f))[1:]
counts = Counter(r[3] for r in rows)
values = [float(r[2]) for r in rows if r[3] in ("P", "R")]
print(f"fq: {len(rows)} rows, branches {dict(counts)}, f_Q in [{min(values):.4f}, {max(values):.4f}]")
