"""The command-line pipeline driven from Python.

Equivalent shell commands are shown in the comments.  Outputs go to a
temporary directory.
"""

import json
import tempfile
from pathlib import Path

from treepara.cli import main

out = Path(tempfile.mkdtemp(prefix="treepara-"))

# treepara synth --n 1024 --alpha 0.3 --seed 1 --out OUT
main(["synth", "--n", "1024", "--alpha", "0.3", "--seed", "1", "--out", str(out)])

# treepara verify --signal OUT/signal.csv --alpha 0.3 --nonlinearity tanh --out OUT
code = main(["verify", "--signal", str(out / "signal.csv"), "--alpha", "0.3",
             "--nonlinearity", "tanh", "--out", str(out)])
print("verify exit code:", code)

manifest = json.loads((out / "manifest.json").read_text())
print("slopes:", manifest["slopes"])
print("norms:", manifest["norms"])
print("files:", sorted(p.name for p in out.iterdir()))
