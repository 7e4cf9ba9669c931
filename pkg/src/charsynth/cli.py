"""Command-line interface.

Subcommands: generate, index, validate, preview, episodes, demo-assets.
Every generator config key is exposed as a flag of the same name on
`generate` and `preview`, overriding the preset/config file.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from charsynth.config import (
    GeneratorConfig,
    _parse_value,
    apply_overrides,
    parse_config_text,
    preset,
)
from charsynth.datasetio import (
    AlphabetIndex,
    build_index,
    parse_alphabet,
    validate_dataset,
)
from charsynth.episodes import (
    DEFAULT_METADATA_COLUMNS,
    EpisodeSpec,
    build_episodes,
    load_table,
    write_manifest,
)
from charsynth.generate import generate_dataset, preview_grid
from charsynth.pngio import write_png
from charsynth.sampledata import write_demo_assets

_CONFIG_KEYS = [f.name for f in fields(GeneratorConfig)]


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("config overrides (one flag per key)")
    for key in _CONFIG_KEYS:
        if key == "size":  # registered explicitly on the subcommand
            continue
        group.add_argument(f"--{key}", dest=f"cfg_{key}", metavar="VALUE", default=None)


def _resolve_config(args) -> GeneratorConfig:
    cfg = GeneratorConfig()
    if args.preset:
        cfg = preset(args.preset)
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            cfg = parse_config_text(fh.read(), base=cfg)
    overrides = {}
    for key in _CONFIG_KEYS:
        raw = getattr(args, f"cfg_{key}", None)
        if raw is not None:
            overrides[key] = _parse_value(key, raw)
    if getattr(args, "size", None) is not None:
        overrides["size"] = args.size
    return apply_overrides(cfg, overrides)


def _read_alphabet(path: str):
    with open(path, encoding="utf-8") as fh:
        return parse_alphabet(fh.read())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="charsynth")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="synthesize a dataset")
    gen.add_argument("--preset", default=None)
    gen.add_argument("--config", default=None, help="key=value config file")
    gen.add_argument("--fonts", required=True)
    gen.add_argument("--alphabet", required=True)
    gen.add_argument("--count", type=int, default=20, help="instances per class")
    gen.add_argument("--size", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True)
    gen.add_argument("--workers", type=int, default=1)
    gen.add_argument("--index", default=None, help="restrict fonts to an index file")
    _add_config_flags(gen)

    idx = sub.add_parser("index", help="build an alphabet font index")
    idx.add_argument("--fonts", required=True)
    idx.add_argument("--alphabet", required=True)
    idx.add_argument("--out", required=True)
    idx.add_argument("--name", default="alphabet")

    val = sub.add_parser("validate", help="validate a dataset directory")
    val.add_argument("dataset")

    prev = sub.add_parser("preview", help="render a static preview grid")
    prev.add_argument("--preset", default=None)
    prev.add_argument("--config", default=None)
    prev.add_argument("--fonts", required=True)
    prev.add_argument("--alphabet", required=True)
    prev.add_argument("--grid", default="4x8", help="ROWSxCOLS")
    prev.add_argument("--seed", type=int, default=0)
    prev.add_argument("--size", type=int, default=None)
    prev.add_argument("--out", required=True)
    _add_config_flags(prev)

    epi = sub.add_parser("episodes", help="build few-shot episode manifests")
    epi.add_argument("--dataset", required=True)
    epi.add_argument("--n", type=int, default=5)
    epi.add_argument("--k", type=int, default=1)
    epi.add_argument("--q", type=int, default=5)
    epi.add_argument("--count", type=int, default=100)
    epi.add_argument("--mode", choices=("standard", "metadata"), default="standard")
    epi.add_argument("--metadata-cols", default=",".join(DEFAULT_METADATA_COLUMNS))
    epi.add_argument("--standardize", action="store_true")
    epi.add_argument("--seed", type=int, default=0)
    epi.add_argument("--out", required=True)

    demo = sub.add_parser("demo-assets", help="write fixture fonts, textures, alphabet")
    demo.add_argument("--out", required=True)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)

    if args.command == "generate":
        cfg = _resolve_config(args)
        entries = _read_alphabet(args.alphabet)
        font_names = None
        if args.index:
            with open(args.index, encoding="utf-8") as fh:
                font_names = AlphabetIndex.from_json(fh.read()).fonts
        layout = generate_dataset(
            cfg,
            entries,
            args.fonts,
            args.out,
            count=args.count,
            master_seed=args.seed,
            workers=args.workers,
            font_names=font_names,
        )
        report = validate_dataset(args.out)
        print(f"wrote {report['images']} images to {layout.root}")
        return 0

    if args.command == "index":
        entries = _read_alphabet(args.alphabet)
        index = build_index(args.fonts, entries, name=args.name)
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(index.to_json() + "\n")
        print(f"{len(index.fonts)} fonts cover {args.name}")
        return 0

    if args.command == "validate":
        report = validate_dataset(args.dataset)
        print(f"ok: {report['rows']} rows, {report['images']} images")
        return 0

    if args.command == "preview":
        cfg = _resolve_config(args)
        entries = _read_alphabet(args.alphabet)
        rows, cols = (int(v) for v in args.grid.lower().split("x"))
        sheet = preview_grid(cfg, entries, args.fonts, rows, cols, master_seed=args.seed)
        with open(args.out, "wb") as fh:
            fh.write(write_png(sheet))
        print(f"wrote {rows}x{cols} preview to {args.out}")
        return 0

    if args.command == "episodes":
        columns = tuple(c for c in args.metadata_cols.split(",") if c)
        table = load_table(args.dataset, columns if args.mode == "metadata" else ())
        spec = EpisodeSpec(n_way=args.n, k_shot=args.k, q_query=args.q, seed=args.seed)
        episodes = build_episodes(
            table, spec, args.count, mode=args.mode, standardize=args.standardize
        )
        write_manifest(episodes, args.out, spec, mode=args.mode, metadata_columns=columns)
        print(f"wrote {len(episodes)} episodes to {args.out}")
        return 0

    if args.command == "demo-assets":
        info = write_demo_assets(args.out)
        print(
            f"wrote {len(info['fonts'])} fonts, {len(info['textures'])} textures, "
            f"alphabet at {info['alphabet']}"
        )
        return 0

    return 1


if __name__ == "__main__":
    sys.exit(main())
