"""AUC/UAUC evaluation over all/warm/cold segments with three scorers.

Run: python demos/04_segment_metrics.py
"""

import numpy as np

from binrec import collab
from binrec.dataset import LabeledInteraction, chronological_split, partition_warm_cold
from binrec.evaluation import evaluate

# A small interaction log: u1/u2 are active (warm), u3 appears only late.
rng = np.random.default_rng(4)
rows = []
ts = 0
for _ in range(60):
    user = f"u{rng.integers(1, 3)}"
    item = f"i{rng.integers(1, 9)}"
    rating = int(rng.integers(1, 6))
    rows.append(LabeledInteraction(user, item, rating, ts, int(rating > 3)))
    ts += 1
for rating in (5, 1, 4, 2):  # the cold user only shows up near the end
    rows.append(LabeledInteraction("u3", f"i{rng.integers(1, 9)}", rating, ts, int(rating > 3)))
    ts += 1

split = chronological_split(rows, (0.7, 0.1, 0.2))
segments = partition_warm_cold(split, min_user=3, min_item=2)
print("test segment tags:", [s.value for s in segments])

model, head = collab.init_model(split.n_users, split.n_items, d=16, seed=4)
cfg = collab.TrainConfig(learning_rate=0.1, batch_size=16, max_epochs=30, early_stop_patience=8, seed=4)
from binrec.dataset import index_arrays

model, head, _ = collab.train_binmf(
    model, head, index_arrays(split, "train"), index_arrays(split, "valid"), cfg
)

# Any of the three scorers produces the same report shape; bit_and needs only
# the code tables, no model weights at all.
for scorer, params in (
    ("binmf", {"model": model, "head": head}),
    ("mf", {"model": model}),
    ("bit_and", {}),
):
    if scorer == "bit_and":
        table = collab.encode_all(model, head)
        params = {"user_codes": table.user_codes, "item_codes": table.item_codes}
    report, _ = evaluate(scorer, split, segments, **params)
    print(f"\nscorer = {scorer}")
    print(report.format_table())
