"""A full run: manifest, series CSV, snapshots and SVG plots on disk."""

import json
import sys
import tempfile
from pathlib import Path

from csflab import RunConfig, read_series_csv, run

out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp()) / "ellipse"
cfg = RunConfig(family="ellipse", params={"a": 2.0, "b": 1.0}, n=256, output_dir=str(out))
result = run(cfg)
print("exit code", result.exit_code)

manifest = json.loads((out / "manifest.json").read_text())
print("verdict", manifest["verdict"], " omega_hat", manifest["omega_hat"])
print("final sup kappa * L", read_series_csv(out / "series.csv").D[-1])
for p in sorted(out.iterdir()):
    print(" ", p.name, f"({len(list(p.iterdir()))} files)" if p.is_dir() else "")
