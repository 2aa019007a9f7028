"""The full five-command pipeline on a generated toy dataset.

ingest -> train -> encode -> corpus -> eval, all through the CLI, exactly as
one would run it on a real dataset from a shell.

Run: python demos/05_cli_pipeline.py
"""

import json
import tempfile
from pathlib import Path

from binrec.cli import main
from binrec.synthetic import toy_catalog_file, toy_interaction_file

workdir = Path(tempfile.mkdtemp(prefix="binrec_demo_"))
out = workdir / "out"
toy_interaction_file(workdir / "ratings.csv", n_users=25, n_items=18, n_rows=300, seed=9)
toy_catalog_file(workdir / "items.dat", n_items=18)

config = workdir / "run.json"
config.write_text(json.dumps({
    "interactions": str(workdir / "ratings.csv"),
    "catalog": str(workdir / "items.dat"),
    "out_dir": str(out),
    "d": 16,
    "learning_rate": 0.05,
    "batch_size": 64,
    "max_epochs": 10,
    "code_format": "dot_decimal",
    "seed": 9,
}, indent=2))

for command in ("ingest", "train", "encode", "corpus", "eval"):
    print(f"\n$ binrec {command} --config {config}")
    code = main([command, "--config", str(config)])
    assert code == 0, f"{command} exited {code}"

print("\nartifacts in", out)
for path in sorted(out.iterdir()):
    print(f"  {path.name:<28} {path.stat().st_size:>8} bytes")

print("\nfirst corpus record:")
first = (out / "corpus.train.full.jsonl").read_text().splitlines()[0]
print(json.dumps(json.loads(first), indent=2)[:600])
