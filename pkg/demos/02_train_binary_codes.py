"""Train binarized embeddings on a planted-code task and watch recovery.

Hidden +/-1 codes label every user-item pair (positive iff the code dot
product is positive); the trainer sees only the labels and must rediscover
codes that rank positives above negatives. Scaled down here so the demo runs
in under a minute; the full-size recovery check lives in the acceptance suite.

Run: python demos/02_train_binary_codes.py
"""

import numpy as np

from binrec import collab
from binrec.evaluation import auc
from binrec.synthetic import planted_code_task

task = planted_code_task(n_users=150, n_items=150, d=16, seed=3)
print(f"pairs: {len(task.train[0])} train / {len(task.valid[0])} valid / {len(task.test[0])} test")

model, head = collab.init_model(150, 150, d=16, seed=3)
cfg = collab.TrainConfig(
    learning_rate=0.1, batch_size=256, max_epochs=60, early_stop_patience=10, seed=3
)
model, head, log = collab.train_binmf(model, head, task.train, task.valid, cfg)
for row in log[:: max(1, len(log) // 6)]:
    print(f"epoch {row['epoch']:3d}  train_loss {row['train_loss']:.4f}  valid_auc {row['valid_auc']:.4f}")

u, i, labels = task.test
table = collab.encode_all(model, head)
scores = collab.score_binmf_batch(table.user_codes[u], table.item_codes[i], tau=np.sqrt(16))
print(f"held-out AUC: {auc(scores, labels.astype(int)):.4f}")

# The learned codes are ordinary bit vectors, ready for text rendering:
from binrec import codec

print("user 0 code:", codec.render_code(table.user(0), "dot_decimal"))
print("item 0 code:", codec.render_code(table.item(0), "dot_decimal"))
