import json

import numpy as np
import pytest

from binrec import collab
from binrec.dataset import Segment, chronological_split, partition_warm_cold
from binrec.errors import UndefinedMetricError
from binrec.evaluation import (
    ScoredExample,
    auc,
    bitwise_and_score,
    evaluate,
    metrics_for,
    score_examples,
    uauc,
    write_score_dump,
)

from conftest import brute_force_auc, make_labeled


class TestAuc:
    def test_perfect_ranking(self):
        assert auc([0.9, 0.1], [1, 0]) == 1.0

    def test_inverted_ranking(self):
        assert auc([0.1, 0.9], [1, 0]) == 0.0

    def test_matches_pairwise_oracle(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            n = int(rng.integers(10, 60))
            # coarse grid scores force plenty of ties
            scores = rng.integers(0, 6, size=n).astype(float)
            labels = rng.integers(0, 2, size=n)
            if labels.sum() in (0, n):
                continue
            assert auc(scores, labels) == pytest.approx(brute_force_auc(scores, labels), abs=1e-12)

    def test_single_class_raises(self):
        with pytest.raises(UndefinedMetricError):
            auc([0.2, 0.4], [1, 1])
        with pytest.raises(UndefinedMetricError):
            auc([0.2, 0.4], [0, 0])

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(1)
        s = rng.normal(size=300)
        labels = rng.integers(0, 2, size=300)
        tau = 5.66
        squashed = 1.0 / (1.0 + np.exp(-s / tau))
        assert auc(s, labels) == pytest.approx(auc(squashed, labels), abs=1e-12)


class TestUauc:
    def test_single_eligible_user(self):
        scores = [0.9, 0.1, 0.5]
        labels = [1, 0, 1]
        users = ["a", "a", "b"]  # b is single-class, excluded
        assert uauc(scores, labels, users) == auc([0.9, 0.1], [1, 0])

    def test_unweighted_mean(self):
        # user a: AUC 1.0 (2 examples); user b: AUC 0.5 via tie (2 examples)
        scores = [0.9, 0.1, 0.5, 0.5]
        labels = [1, 0, 1, 0]
        users = ["a", "a", "b", "b"]
        assert uauc(scores, labels, users) == pytest.approx(0.75)

    def test_single_class_user_excluded(self):
        base_scores, base_labels = [0.9, 0.1], [1, 0]
        users = ["a", "a"]
        before = uauc(base_scores, base_labels, users)
        after = uauc(base_scores + [0.7, 0.6], base_labels + [1, 1], users + ["c", "c"])
        assert before == after

    def test_no_eligible_user_raises(self):
        with pytest.raises(UndefinedMetricError):
            uauc([0.9, 0.1], [1, 1], ["a", "a"])


class TestBitwiseAnd:
    def test_idempotent(self):
        rng = np.random.default_rng(2)
        a = rng.integers(0, 2, size=32)
        assert bitwise_and_score(a, a) == int(a.sum())

    def test_disjoint_supports(self):
        a = np.array([1, 1, 0, 0])
        b = np.array([0, 0, 1, 1])
        assert bitwise_and_score(a, b) == 0

    def test_matches_bit_loop_oracle(self):
        rng = np.random.default_rng(3)
        for _ in range(200):
            a = rng.integers(0, 2, size=32)
            b = rng.integers(0, 2, size=32)
            naive = sum(1 for j in range(32) if a[j] == 1 and b[j] == 1)
            assert bitwise_and_score(a, b) == naive

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            bitwise_and_score(np.ones(8), np.ones(16))

    def test_relation_to_signed_dot(self):
        # dot = 4*AND - 2*(pop(x) + pop(y)) + d
        rng = np.random.default_rng(4)
        d = 32
        for _ in range(500):
            x = rng.integers(0, 2, size=d)
            y = rng.integers(0, 2, size=d)
            dot = int(np.dot(2 * x - 1, 2 * y - 1))
            assert dot == 4 * bitwise_and_score(x, y) - 2 * (x.sum() + y.sum()) + d


def _scored(rows):
    return [ScoredExample(u, i, s, t, seg) for u, i, s, t, seg in rows]


class TestSegments:
    def test_concatenated_equals_independent(self):
        rng = np.random.default_rng(5)
        rows = []
        for k in range(120):
            seg = "warm" if k % 3 else "cold"
            rows.append((f"u{k % 9}", f"i{k}", float(rng.integers(0, 8)), int(rng.integers(0, 2)), seg))
        examples = _scored(rows)
        warm = [e for e in examples if e.segment == "warm"]
        cold = [e for e in examples if e.segment == "cold"]
        assert metrics_for(warm).auc == pytest.approx(
            auc([e.score for e in warm], [e.label for e in warm]), abs=1e-15
        )
        assert metrics_for(cold).auc == pytest.approx(
            auc([e.score for e in cold], [e.label for e in cold]), abs=1e-15
        )

    def test_undefined_segment_does_not_abort_others(self):
        rows = make_labeled([
            ("u1", "i1", 5, 1, 1),
            ("u1", "i2", 1, 2, 0),
            ("u1", "i1", 5, 3, 1),
            ("u1", "i2", 1, 4, 0),
            ("u1", "i1", 5, 5, 1),
            ("u1", "i2", 1, 6, 0),
            ("u1", "i1", 5, 7, 1),  # test: warm positive
            ("u9", "i9", 1, 8, 0),  # test: cold negative (unseen user/item)
        ])
        split = chronological_split(rows, (0.5, 0.25, 0.25))
        assert len(split.test) == 2
        model, head = collab.init_model(split.n_users, split.n_items, d=8, seed=0)
        segments = partition_warm_cold(split, min_user=1, min_item=1)
        assert segments == [Segment.WARM, Segment.COLD]
        report, _ = evaluate("binmf", split, segments, model=model, head=head)
        assert report.segments["all"].n_examples == 2
        assert report.segments["all"].auc is not None
        # each sub-segment is a single-class singleton -> undefined, recorded not raised
        for name in ("warm", "cold"):
            assert report.segments[name].n_examples == 1
            assert report.segments[name].error is not None


class TestScorers:
    @pytest.fixture
    def toy(self):
        rows = make_labeled([
            (f"u{k % 4}", f"i{k % 5}", 5 if k % 2 else 1, k, 1 if k % 2 else 0)
            for k in range(40)
        ])
        split = chronological_split(rows, (0.6, 0.2, 0.2))
        model, head = collab.init_model(split.n_users, split.n_items, d=16, seed=1)
        return split, model, head

    def test_binmf_scores_match_manual(self, toy):
        split, model, head = toy
        examples = score_examples("binmf", split, model=model, head=head, tau=4.0)
        table = collab.encode_all(model, head)
        for e in examples:
            hu = table.user(split.user_index[e.user_id])
            hi = table.item(split.item_index[e.item_id])
            assert e.score == pytest.approx(collab.score_binmf(hu, hi, 4.0))

    def test_mf_scores_match_manual(self, toy):
        split, model, head = toy
        examples = score_examples("mf", split, model=model)
        for e in examples:
            eu = model.user_table[split.user_index[e.user_id]]
            ei = model.item_table[split.item_index[e.item_id]]
            assert e.score == pytest.approx(collab.score_mf(eu, ei))

    def test_bit_and_needs_only_codes(self, toy):
        split, model, head = toy
        table = collab.encode_all(model, head)
        examples = score_examples(
            "bit_and", split, user_codes=table.user_codes, item_codes=table.item_codes
        )
        for e in examples:
            hu = table.user(split.user_index[e.user_id])
            hi = table.item(split.item_index[e.item_id])
            assert e.score == bitwise_and_score(hu, hi)

    def test_unknown_scorer(self, toy):
        split, model, head = toy
        with pytest.raises(ValueError):
            score_examples("cosine", split, model=model)

    def test_score_dump_schema(self, toy, tmp_path):
        split, model, head = toy
        examples = score_examples("mf", split, model=model)
        path = tmp_path / "scores.jsonl"
        write_score_dump(examples, path)
        lines = path.read_text().splitlines()
        assert len(lines) == len(examples)
        row = json.loads(lines[0])
        assert set(row) == {"user_id", "item_id", "score", "label", "segment"}
