"""Two-step adapter tuning demo, end to end from corpus files.

If corpus files produced by the binrec CLI are passed on the command line
(text-only first, then full), they are used directly; otherwise a small
synthetic pair is generated so the demo is self-contained.

Run: python demo_two_step.py [text_only.jsonl full.jsonl]
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np

from binrec_bridge import (
    CharTokenizer,
    TuneConfig,
    build_tiny_causal_lm,
    load_corpus,
    predict,
    run_two_step,
    score_rows,
    weights_hash,
    write_score_dump,
)

workdir = Path(tempfile.mkdtemp(prefix="bridge_demo_"))

if len(sys.argv) == 3:
    text_only_path, full_path = Path(sys.argv[1]), Path(sys.argv[2])
else:
    print("no corpus files given, generating a synthetic pair")
    rng = np.random.default_rng(0)
    text_only_path = workdir / "text_only.jsonl"
    full_path = workdir / "full.jsonl"
    for path, with_codes in ((text_only_path, False), (full_path, True)):
        with open(path, "w", encoding="utf-8") as fh:
            for k in range(100):
                code = ".".join(str(int(b)) for b in rng.integers(0, 256, size=4))
                feature = f" Their preferences are encoded in the feature {code}." if with_codes else ""
                prompt = (
                    f"#Question: A user has given high ratings to the following books: "
                    f'"Book No. {int(rng.integers(1, 40))}".{feature} Would the user enjoy '
                    f'the book titled Book No. {int(rng.integers(1, 40))}? '
                    f'Answer with "Yes" or "No". \n#Answer:'
                )
                fh.write(json.dumps({
                    "prompt": prompt,
                    "completion": "Yes" if rng.random() < 0.5 else "No",
                    "user_id": f"u{k % 10}", "item_id": f"i{k % 20}", "segment": None,
                }) + "\n")

texts = [r.prompt for r in load_corpus(text_only_path)] + [r.prompt for r in load_corpus(full_path)]
tokenizer = CharTokenizer.from_texts(texts)
base = build_tiny_causal_lm(tokenizer.vocab_size, seed=0)
base_hash = weights_hash(base)
print(f"tiny base model: vocab={tokenizer.vocab_size}, base hash {base_hash[:12]}...")

cfg = TuneConfig(learning_rate=5e-3, steps=30, batch_size=16, seed=0)
model, curve1, curve2, stage1_dir, stage2_dir = run_two_step(
    base, tokenizer, text_only_path, full_path, workdir / "adapters", cfg
)
print(f"stage 1 (text only): loss {curve1[0]:.3f} -> {curve1[-1]:.3f}  [{stage1_dir}]")
print(f"stage 2 (full):      loss {curve2[0]:.3f} -> {curve2[-1]:.3f}  [{stage2_dir}]")
print("base weights unchanged:", weights_hash(model) == base_hash)

rows = load_corpus(full_path)[:5]
for row in rows:
    print(f"p_yes={predict(model, tokenizer, row.prompt).p_yes:.3f}  truth={row.completion}")

dump_path = workdir / "scores.jsonl"
write_score_dump(score_rows(model, tokenizer, load_corpus(full_path)), dump_path)
print("score dump (evaluation-compatible):", dump_path)
