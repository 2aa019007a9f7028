"""Command-line front end: ingest -> train -> encode -> corpus -> eval.

Exit codes: 0 success, 1 user/config error, 2 data error, 3 internal error.
Every command writes its resolved configuration next to its outputs.
"""

from __future__ import annotations

import argparse
import sys
import traceback
from pathlib import Path

import numpy as np

from . import checkpoint, codec, collab, evaluation, promptgen
from .config import RunConfig, load_config, write_resolved
from .dataset import (
    CatalogSchema,
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
from .errors import ConfigError, DataError

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_DATA = 2
EXIT_INTERNAL = 3


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on usage errors; the exit-code contract wants 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise SystemExit_(EXIT_CONFIG, f"{self.prog}: error: {message}")


class SystemExit_(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _schema(cfg: RunConfig) -> TableSchema:
    return TableSchema(
        separator=cfg.separator,
        user_col=cfg.user_col,
        item_col=cfg.item_col,
        rating_col=cfg.rating_col,
        timestamp_col=cfg.timestamp_col,
    )


def _train_config(cfg: RunConfig) -> collab.TrainConfig:
    return collab.TrainConfig(
        learning_rate=cfg.learning_rate,
        batch_size=cfg.batch_size,
        max_epochs=cfg.max_epochs,
        early_stop_patience=cfg.patience,
        tau=cfg.tau,
        momentum=cfg.momentum,
        seed=cfg.seed,
    )


def cmd_ingest(cfg: RunConfig) -> None:
    if not cfg.interactions:
        raise ConfigError("ingest requires an interactions path (key: interactions)")
    rows = ingest_interactions(cfg.interactions, _schema(cfg))
    labeled = binarize_labels(rows, cfg.label_threshold)
    split = chronological_split(labeled, (cfg.train_ratio, cfg.valid_ratio, cfg.test_ratio))
    manifest_path = save_split(
        split,
        cfg.out_dir,
        manifest_extra={
            "ratios": [cfg.train_ratio, cfg.valid_ratio, cfg.test_ratio],
            "label_threshold": cfg.label_threshold,
            "source_sha256": file_sha256(cfg.interactions),
        },
    )
    print(f"wrote {manifest_path} "
          f"(train={len(split.train)} valid={len(split.valid)} test={len(split.test)} "
          f"users={split.n_users} items={split.n_items})")


def cmd_train(cfg: RunConfig) -> None:
    split = load_split(cfg.out_dir)
    model, head = collab.init_model(split.n_users, split.n_items, cfg.d, cfg.seed)
    tcfg = _train_config(cfg)
    model, head, log_rows = collab.train_binmf(
        model, head, index_arrays(split, "train"), index_arrays(split, "valid"), tcfg
    )
    tau = cfg.resolved_tau()
    out_dir = Path(cfg.out_dir)
    metrics = {"epochs_run": len(log_rows)}
    if log_rows:
        metrics["final_train_loss"] = log_rows[-1]["train_loss"]
        metrics["best_valid_auc"] = max(r["valid_auc"] for r in log_rows)
    checkpoint.save_checkpoint(out_dir / "checkpoint.bin", model, head, tau, tcfg, metrics)
    import json

    with open(out_dir / "train_log.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(log_rows, fh, indent=2)
        fh.write("\n")
    for row in log_rows:
        print(f"epoch {row['epoch']:3d}  train_loss {row['train_loss']:.4f}  "
              f"valid_auc {row['valid_auc']:.4f}")
    print(f"wrote {out_dir / 'checkpoint.bin'} (d={model.d}, tau={tau:g})")


def cmd_encode(cfg: RunConfig) -> None:
    out_dir = Path(cfg.out_dir)
    model, head, _tau, _ = checkpoint.load_checkpoint(out_dir / "checkpoint.bin")
    if cfg.code_format == "dot_decimal" and model.d % 8 != 0:
        raise ConfigError(f"dot_decimal format requires d divisible by 8, got d={model.d}")
    split = load_split(cfg.out_dir)
    table = collab.encode_all(model, head)
    fmt = codec.CodeFormat(cfg.code_format)
    entries = []
    for user_id, idx in split.user_index.items():
        entries.append(("user", user_id, codec.render_code(table.user(idx), fmt)))
    for item_id, idx in split.item_index.items():
        entries.append(("item", item_id, codec.render_code(table.item(idx), fmt)))
    dump_path = out_dir / "codes.tsv"
    codec.write_code_dump(dump_path, entries, d=model.d)
    print(f"wrote {dump_path} ({len(entries)} codes, format={fmt.value})")


def cmd_corpus(cfg: RunConfig) -> None:
    out_dir = Path(cfg.out_dir)
    split = load_split(cfg.out_dir)
    if not cfg.catalog:
        raise ConfigError("corpus requires a catalog path (key: catalog)")
    catalog = load_item_catalog(
        cfg.catalog,
        CatalogSchema(
            separator=cfg.catalog_separator,
            item_col=cfg.catalog_item_col,
            title_col=cfg.catalog_title_col,
        ),
    )
    modes = [cfg.corpus_mode] if cfg.corpus_mode != "both" else ["text_only", "full"]
    codes = None
    if "full" in modes:
        _d, _fmt, codes = codec.read_code_dump(out_dir / "codes.tsv")
    segments = partition_warm_cold(split, cfg.min_user, cfg.min_item)
    for partition in cfg.partitions():
        for mode in modes:
            records = promptgen.build_corpus(
                split,
                catalog,
                codes if mode == "full" else None,
                mode=mode,
                partition=partition,
                history_len=cfg.history_len,
                segments=segments if partition == "test" else None,
            )
            path = out_dir / f"corpus.{partition}.{mode}.jsonl"
            promptgen.write_corpus(records, path)
            print(f"wrote {path} ({len(records)} records)")


def cmd_eval(cfg: RunConfig) -> None:
    out_dir = Path(cfg.out_dir)
    split = load_split(cfg.out_dir)
    segments = partition_warm_cold(split, cfg.min_user, cfg.min_item)
    params: dict = {}
    if cfg.scorer in ("mf", "binmf"):
        model, head, tau, _ = checkpoint.load_checkpoint(out_dir / "checkpoint.bin")
        params = {"model": model, "head": head, "tau": tau}
    else:
        d, fmt, code_texts = codec.read_code_dump(out_dir / "codes.tsv")
        user_codes = np.zeros((split.n_users, d), dtype=np.uint8)
        item_codes = np.zeros((split.n_items, d), dtype=np.uint8)
        for (kind, entity_id), text in code_texts.items():
            bits = codec.parse_code_text(text)
            if kind == "user" and entity_id in split.user_index:
                user_codes[split.user_index[entity_id]] = bits
            elif kind == "item" and entity_id in split.item_index:
                item_codes[split.item_index[entity_id]] = bits
        params = {"user_codes": user_codes, "item_codes": item_codes}
    report, examples = evaluation.evaluate(cfg.scorer, split, segments, **params)
    (out_dir / "metrics.json").write_text(report.to_json() + "\n", encoding="utf-8")
    (out_dir / "metrics.txt").write_text(report.format_table() + "\n", encoding="utf-8")
    if cfg.dump_scores:
        evaluation.write_score_dump(examples, out_dir / "scores.jsonl")
    print(report.format_table())


COMMANDS = {
    "ingest": cmd_ingest,
    "train": cmd_train,
    "encode": cmd_encode,
    "corpus": cmd_corpus,
    "eval": cmd_eval,
}


def build_parser() -> _Parser:
    parser = _Parser(prog="binrec", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__, parents=[], add_help=True)
        p.add_argument("--config", help="flat JSON config file")
        p.add_argument("--seed", type=int, help="random seed override")
        p.add_argument("--out-dir", help="output directory override")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
        if name == "ingest":
            p.add_argument("--interactions", help="interaction file path")
            p.add_argument("--catalog", help="item catalog path")
        if name == "encode":
            p.add_argument("--format", dest="code_format", choices=["binary", "dot_decimal"])
        if name == "corpus":
            p.add_argument("--mode", dest="corpus_mode", choices=["text_only", "full", "both"])
            p.add_argument("--catalog", help="item catalog path")
        if name == "eval":
            p.add_argument("--scorer", choices=["mf", "binmf", "bit_and"])
            p.add_argument("--dump-scores", dest="dump_scores", action="store_const", const=True)
    return parser


def _overrides_from_args(args: argparse.Namespace) -> dict:
    overrides = {}
    for key in ("seed", "out_dir", "interactions", "catalog", "code_format",
                "corpus_mode", "scorer", "dump_scores"):
        if getattr(args, key, None) is not None:
            overrides[key] = getattr(args, key)
    for item in args.set:
        if "=" not in item:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        key, _, value = item.partition("=")
        overrides[key.strip()] = value
    return overrides


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        cfg = load_config(args.config, _overrides_from_args(args))
        write_resolved(cfg, cfg.out_dir, args.command)
        COMMANDS[args.command](cfg)
        return EXIT_OK
    except SystemExit_ as exc:
        print(exc, file=sys.stderr)
        return exc.code
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DataError, FileNotFoundError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except Exception:
        traceback.print_exc()
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
