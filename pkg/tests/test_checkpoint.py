import json

import numpy as np
import pytest

from binrec.checkpoint import MAGIC, load_checkpoint, save_checkpoint
from binrec.collab import TrainConfig, init_model
from binrec.errors import DataError


@pytest.fixture
def saved(tmp_path):
    model, head = init_model(5, 7, 16, seed=3)
    path = tmp_path / "model.ckpt"
    cfg = TrainConfig(seed=3)
    save_checkpoint(path, model, head, tau=4.0, config=cfg, metrics={"best_valid_auc": 0.9})
    return path, model, head


class TestRoundtrip:
    def test_arrays_survive_at_float32_precision(self, saved):
        path, model, head = saved
        loaded_model, loaded_head, tau, sidecar = load_checkpoint(path)
        assert tau == 4.0
        assert loaded_model.user_table.shape == (5, 16)
        assert np.allclose(loaded_model.user_table, model.user_table, atol=1e-6)
        assert np.allclose(loaded_model.item_table, model.item_table, atol=1e-6)
        assert np.allclose(loaded_head.W, head.W, atol=1e-6)
        assert np.allclose(loaded_head.b, head.b, atol=1e-6)

    def test_sidecar_holds_config_and_metrics(self, saved):
        path, _, _ = saved
        _, _, _, sidecar = load_checkpoint(path)
        assert sidecar["config"]["seed"] == 3
        assert sidecar["metrics"]["best_valid_auc"] == 0.9
        raw = json.loads((path.parent / "model.ckpt.json").read_text())
        assert raw == sidecar

    def test_header_layout(self, saved):
        path, _, _ = saved
        raw = path.read_bytes()
        assert raw[:8] == MAGIC
        # version 1, n_users 5, n_items 7, d 16 all little-endian
        assert int.from_bytes(raw[8:12], "little") == 1
        assert int.from_bytes(raw[12:20], "little") == 5
        assert int.from_bytes(raw[20:28], "little") == 7
        assert int.from_bytes(raw[28:32], "little") == 16


class TestErrors:
    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_checkpoint(tmp_path / "nope.ckpt")

    def test_bad_magic(self, saved):
        path, _, _ = saved
        raw = bytearray(path.read_bytes())
        raw[:8] = b"NOTMAGIC"
        path.write_bytes(bytes(raw))
        with pytest.raises(DataError, match="magic"):
            load_checkpoint(path)

    def test_truncated(self, saved):
        path, _, _ = saved
        path.write_bytes(path.read_bytes()[:40])
        with pytest.raises(DataError):
            load_checkpoint(path)
