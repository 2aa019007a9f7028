import json
import logging

import numpy as np
import pytest

from binrec.dataset import (
    CatalogSchema,
    Interaction,
    Segment,
    TableSchema,
    binarize_labels,
    chronological_split,
    file_sha256,
    index_arrays,
    ingest_interactions,
    load_item_catalog,
    load_split,
    partition_warm_cold,
    save_split,
)
from binrec.errors import DataError

from conftest import make_labeled


@pytest.fixture
def ratings_file(tmp_path):
    path = tmp_path / "ratings.csv"
    path.write_text(
        "1,1193,5,978300760\n"
        "1,661,3,978302109\n"
        "2,1193,4,978301968\n",
        encoding="utf-8",
    )
    return path


class TestIngest:
    def test_field_parse(self, ratings_file):
        rows = ingest_interactions(ratings_file, TableSchema())
        assert rows[0] == Interaction(user_id="1", item_id="1193", rating=5.0, timestamp=978300760)
        assert len(rows) == 3

    def test_input_order_preserved(self, ratings_file):
        rows = ingest_interactions(ratings_file, TableSchema())
        assert [r.item_id for r in rows] == ["1193", "661", "1193"]

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            ingest_interactions(tmp_path / "nope.csv", TableSchema())

    def test_unparsable_rating_names_line(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("1,1193,5,978300760\n1,1193,high,978300760\n")
        with pytest.raises(DataError, match=r":2"):
            ingest_interactions(path, TableSchema())

    def test_double_colon_separator(self, tmp_path):
        path = tmp_path / "ratings.dat"
        path.write_text("1::1193::5::978300760\n")
        rows = ingest_interactions(path, TableSchema.preset("double_colon"))
        assert rows[0].item_id == "1193" and rows[0].rating == 5.0

    def test_deterministic_rerun(self, ratings_file):
        a = ingest_interactions(ratings_file, TableSchema())
        b = ingest_interactions(ratings_file, TableSchema())
        assert a == b


class TestBinarizeLabels:
    @pytest.mark.parametrize("rating,expected", [(5, 1), (3, 0), (1, 0), (3.5, 1)])
    def test_strict_threshold(self, rating, expected):
        rows = [Interaction("u", "i", rating, 0)]
        assert binarize_labels(rows, 3)[0].label == expected

    def test_totality(self):
        rng = np.random.default_rng(0)
        rows = [Interaction("u", "i", float(r), k) for k, r in enumerate(rng.integers(1, 6, 200))]
        labeled = binarize_labels(rows, 3)
        labels = [r.label for r in labeled]
        assert set(labels) <= {0, 1}
        assert labels.count(0) + labels.count(1) == len(rows)


class TestChronologicalSplit:
    def test_exact_fraction_sizes(self):
        rows = make_labeled([("u", "i", 5, ts, 1) for ts in range(10)])
        split = chronological_split(rows, (0.8, 0.1, 0.1))
        assert (len(split.train), len(split.valid), len(split.test)) == (8, 1, 1)

    def test_time_ordering_invariant(self):
        rng = np.random.default_rng(1)
        rows = make_labeled(
            [(f"u{k%7}", f"i{k%11}", 5, int(ts), 1) for k, ts in enumerate(rng.integers(0, 1000, 100))]
        )
        split = chronological_split(rows)
        max_train = max(r.timestamp for r in split.train)
        min_valid = min(r.timestamp for r in split.valid)
        min_test = min(r.timestamp for r in split.test)
        assert max_train <= min_valid <= min_test
        for a in split.train:
            for b in split.test:
                assert a.timestamp <= b.timestamp

    def test_stable_tie_rule(self):
        # two equal timestamps straddling the train/valid boundary
        rows = make_labeled([
            ("a", "i1", 5, 10, 1),
            ("b", "i2", 5, 50, 1),  # arrives first in input, same ts as c
            ("c", "i3", 5, 50, 1),
            ("d", "i4", 5, 99, 1),
        ])
        split = chronological_split(rows, (0.5, 0.25, 0.25))
        assert [r.user_id for r in split.train] == ["a", "b"]
        assert [r.user_id for r in split.valid] == ["c"]

    def test_index_maps_cover_everything(self):
        rows = make_labeled([
            ("u1", "i1", 5, 1, 1),
            ("u1", "i2", 5, 2, 1),
            ("u2", "i1", 5, 3, 1),
            ("u3", "i9", 5, 4, 1),  # user and item appear only in test
        ])
        split = chronological_split(rows, (0.5, 0.25, 0.25))
        assert sorted(split.user_index.values()) == list(range(split.n_users))
        assert sorted(split.item_index.values()) == list(range(split.n_items))
        for r in split.valid + split.test:
            assert r.user_id in split.user_index
            assert r.item_id in split.item_index

    def test_empty_input(self):
        with pytest.raises(DataError):
            chronological_split([], (0.8, 0.1, 0.1))

    def test_bad_ratios(self):
        rows = make_labeled([("u", "i", 5, 0, 1)])
        with pytest.raises(ValueError):
            chronological_split(rows, (0.5, 0.2, 0.2))

    def test_index_arrays(self, tiny_split):
        u, i, t = index_arrays(tiny_split, "train")
        assert len(u) == len(i) == len(t) == 8
        assert u.max() < tiny_split.n_users
        assert set(np.unique(t)) <= {0.0, 1.0}


class TestWarmCold:
    def test_both_above_thresholds(self):
        rows = make_labeled(
            [("u1", "i1", 5, ts, 1) for ts in range(10)]
            + [("u1", "i1", 5, 100, 1)]
        )
        split = chronological_split(rows, (10 / 11, 0.5 / 11, 0.5 / 11))
        tags = partition_warm_cold(split, min_user=3, min_item=3)
        assert tags == [Segment.WARM]

    def test_unseen_user_is_cold(self):
        rows = make_labeled([
            ("u1", "i1", 5, 1, 1),
            ("u1", "i1", 5, 2, 1),
            ("u1", "i1", 5, 3, 1),
            ("u2", "i1", 5, 4, 1),  # u2 has no train rows
        ])
        split = chronological_split(rows, (0.5, 0.25, 0.25))
        tags = partition_warm_cold(split, min_user=1, min_item=1)
        assert tags == [Segment.COLD]

    def test_zero_thresholds_all_warm(self, tiny_split):
        tags = partition_warm_cold(tiny_split, min_user=0, min_item=0)
        assert all(t is Segment.WARM for t in tags)

    def test_tags_partition_test_set(self, tiny_split):
        tags = partition_warm_cold(tiny_split, 3, 3)
        assert len(tags) == len(tiny_split.test)
        assert all(t in (Segment.WARM, Segment.COLD) for t in tags)


class TestCatalog:
    def test_basic_row(self, tmp_path):
        path = tmp_path / "movies.dat"
        path.write_text("1193::One Flew Over the Cuckoo's Nest (1975)::Drama\n", encoding="utf-8")
        catalog = load_item_catalog(path, CatalogSchema())
        assert catalog["1193"] == "One Flew Over the Cuckoo's Nest (1975)"

    def test_empty_title_skipped_with_warning(self, tmp_path, caplog):
        path = tmp_path / "movies.dat"
        path.write_text("1::  \n2::Real Title\n")
        with caplog.at_level(logging.WARNING):
            catalog = load_item_catalog(path, CatalogSchema())
        assert "1" not in catalog and catalog["2"] == "Real Title"
        assert any("skipped" in r.message for r in caplog.records)

    def test_duplicate_keeps_last_with_warning(self, tmp_path, caplog):
        path = tmp_path / "movies.dat"
        path.write_text("7::First Title\n7::Second Title\n")
        with caplog.at_level(logging.WARNING):
            catalog = load_item_catalog(path, CatalogSchema())
        assert catalog["7"] == "Second Title"
        assert any("duplicate" in r.message for r in caplog.records)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_item_catalog(tmp_path / "nope.dat", CatalogSchema())


class TestPersistence:
    def test_save_load_roundtrip(self, tiny_split, tmp_path):
        save_split(tiny_split, tmp_path)
        reloaded = load_split(tmp_path)
        assert reloaded == tiny_split

    def test_manifest_contents(self, tiny_split, tmp_path, ratings_file):
        manifest_path = save_split(
            tiny_split, tmp_path,
            manifest_extra={"ratios": [0.8, 0.1, 0.1], "source_sha256": file_sha256(ratings_file)},
        )
        manifest = json.loads(manifest_path.read_text())
        assert manifest["row_counts"] == {"train": 8, "valid": 1, "test": 1}
        assert manifest["n_users"] == 3 and manifest["n_items"] == 4
        assert len(manifest["source_sha256"]) == 64

    def test_rewrite_is_byte_identical(self, tiny_split, tmp_path):
        save_split(tiny_split, tmp_path / "a")
        save_split(tiny_split, tmp_path / "b")
        for name in ("split.train.tsv", "split.valid.tsv", "split.test.tsv", "manifest.json"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
