"""Command-line interface.

Subcommands: synth, masks, digitize, match, dice, evaluate.  Data goes to
files, diagnostics to stderr; exit code 0 on success, 2 on any input or
validation error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .config import RunConfig
from .errors import GraphDigitError
from .extraction import annotations_to_masks, extract_bp, extract_heart_rate
from .fileio import (
    SUFFIX_SYMBOL,
    SYMBOL_SUFFIX,
    atomic_write_text,
    dump_json,
    load_annotations,
    load_graph_mask,
    load_mask,
    load_raster,
    load_series,
    save_mask,
    save_series,
)
from .geometry import DIASTOLIC_BP, HEART_RATE, SYMBOLS, SYSTOLIC_BP, GraphGeometry, TimeSeries
from .report import build_report
from .synth import generate_dataset
from .templates import builtin_template_pack, find_matches, load_template_pack, tm_extract


def _add_geometry_overrides(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("geometry overrides")
    for f in dataclasses.fields(GraphGeometry):
        flag = "--geometry-" + f.name.replace("_", "-")
        group.add_argument(flag, dest=f"geom_{f.name}", type=float, default=None, metavar="X")


def _apply_geometry_overrides(cfg: RunConfig, args: argparse.Namespace) -> None:
    updates = {}
    for f in dataclasses.fields(GraphGeometry):
        v = getattr(args, f"geom_{f.name}", None)
        if v is None:
            continue
        current = getattr(cfg.geometry, f.name)
        updates[f.name] = int(v) if isinstance(current, int) else float(v)
    if updates:
        cfg.geometry = dataclasses.replace(cfg.geometry, **updates)


def _load_config(args: argparse.Namespace) -> RunConfig:
    cfg = RunConfig.load(args.config) if args.config else RunConfig()
    _apply_geometry_overrides(cfg, args)
    if getattr(args, "jobs", None):
        cfg.jobs = args.jobs
    return cfg


def _parallel_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _digitize_one(masks: dict[str, Path], out_dir: Path, stem: str, cfg: RunConfig) -> list[str]:
    diagnostics: list[str] = []
    geom = cfg.geometry
    hr = load_graph_mask(masks["hr"], geom)
    dbp = load_graph_mask(masks["dbp"], geom)
    sbp = load_graph_mask(masks["sbp"], geom)
    series = {
        "hr": extract_heart_rate(hr, geom, cfg.extraction, diagnostics),
        "dbp": extract_bp(dbp, geom, cfg.extraction, DIASTOLIC_BP, diagnostics),
        "sbp": extract_bp(sbp, geom, cfg.extraction, SYSTOLIC_BP, diagnostics),
    }
    for suffix, ts in series.items():
        name = f"{stem}_{suffix}.csv" if stem else f"{suffix}.csv"
        save_series(ts, out_dir / name)
    return diagnostics


def cmd_digitize(args, cfg: RunConfig) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.dataset:
        mask_dir = Path(args.dataset) / "masks"
        stems = sorted({p.name.rsplit("_", 1)[0] for p in mask_dir.glob("*_hr.pgm")})
        if not stems:
            print(f"error: no *_hr.pgm masks found under {mask_dir}", file=sys.stderr)
            return 2

        def work(stem: str) -> list[str]:
            masks = {s: mask_dir / f"{stem}_{s}.pgm" for s in ("hr", "dbp", "sbp")}
            return _digitize_one(masks, out_dir, stem, cfg)

        for diags in _parallel_map(work, stems, cfg.jobs):
            for d in diags:
                print(d, file=sys.stderr)
        return 0
    masks = {"hr": Path(args.hr), "dbp": Path(args.dbp), "sbp": Path(args.sbp)}
    for d in _digitize_one(masks, out_dir, args.stem, cfg):
        print(d, file=sys.stderr)
    return 0


def _match_one(image_path: Path, out_dir: Path, stem: str, templates, cfg: RunConfig) -> None:
    image = load_raster(image_path)
    geom = cfg.geometry
    for symbol in SYMBOLS:
        fam = [t for t in templates if t.symbol == symbol]
        matches = find_matches(image, fam)
        ts = tm_extract(
            matches,
            geom,
            symbol,
            correction=cfg.tm_corrections.get(symbol),
            suppress_radius_px=cfg.suppress_radius_px,
        )
        suffix = SYMBOL_SUFFIX[symbol]
        name = f"{stem}_{suffix}.csv" if stem else f"{suffix}.csv"
        save_series(ts, out_dir / name)


def cmd_match(args, cfg: RunConfig) -> int:
    if args.pack:
        templates = load_template_pack(args.pack)
    else:
        templates = builtin_template_pack(cfg.tm_thresholds)
    if not templates:
        print("error: template pack is empty", file=sys.stderr)
        return 2
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    if args.dataset:
        image_dir = Path(args.dataset) / "images"
        paths = sorted(image_dir.glob("*.pgm"))
        if not paths:
            print(f"error: no images found under {image_dir}", file=sys.stderr)
            return 2
        _parallel_map(
            lambda p: _match_one(p, out_dir, p.stem, templates, cfg), paths, cfg.jobs
        )
        return 0
    _match_one(Path(args.image), out_dir, args.stem, templates, cfg)
    return 0


def cmd_synth(args, cfg: RunConfig) -> int:
    style = cfg.style
    if args.seed is not None:
        style = dataclasses.replace(style, seed=args.seed)
    n = args.n if args.n is not None else cfg.n_images
    generate_dataset(
        n,
        cfg.geometry,
        style,
        args.out,
        blank_fraction=cfg.blank_fraction,
        duration_range=cfg.duration_range,
    )
    return 0


def cmd_masks(args, cfg: RunConfig) -> int:
    records = load_annotations(args.annotations)
    hr, dbp, sbp = annotations_to_masks(records, cfg.geometry)
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    stem = args.stem
    for suffix, mask in (("hr", hr), ("dbp", dbp), ("sbp", sbp)):
        name = f"{stem}_{suffix}.pgm" if stem else f"{suffix}.pgm"
        save_mask(mask, out_dir / name)
    return 0


def cmd_dice(args, cfg: RunConfig) -> int:
    from .evaluation import dice_coefficient

    a = load_mask(args.mask_a)
    b = load_mask(args.mask_b)
    print(f"{dice_coefficient(a, b):.6f}")
    return 0


def _load_series_dir(path: Path, slot_count: int) -> dict[str, dict[str, TimeSeries]]:
    table: dict[str, dict[str, TimeSeries]] = {}
    for f in sorted(path.glob("*.csv")):
        stem, _, suffix = f.stem.rpartition("_")
        if suffix not in SUFFIX_SYMBOL:
            continue
        symbol = SUFFIX_SYMBOL[suffix]
        table.setdefault(stem, {})[symbol] = load_series(f, symbol, expected_slots=slot_count)
    if not table:
        raise GraphDigitError(f"no *_hr/_dbp/_sbp series files found under {path}")
    return table


def cmd_evaluate(args, cfg: RunConfig) -> int:
    methods = {}
    for spec_arg in args.pred:
        name, _, d = spec_arg.partition("=")
        if not _ or not name:
            print(f"error: --pred expects NAME=DIR, got {spec_arg!r}", file=sys.stderr)
            return 2
        methods[name] = _load_series_dir(Path(d), cfg.geometry.slot_count)
    if len(methods) > 2:
        print("error: at most two prediction sets can be compared", file=sys.stderr)
        return 2
    truth = _load_series_dir(Path(args.truth), cfg.geometry.slot_count)
    report = build_report(methods, truth, alpha=args.alpha)
    atomic_write_text(args.out, dump_json(report))
    summary = {
        name: {
            sym: report["methods"][name]["per_symbol"][sym]["metrics"]["f1"] for sym in SYMBOLS
        }
        for name in methods
    }
    print(json.dumps({"report": str(args.out), "f1": summary}, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="graphdigit",
        description="Digitize hand-drawn vitals symbols on flowsheet graph rasters.",
    )
    parser.add_argument("--config", help="run configuration JSON", default=None)
    parser.add_argument("--jobs", type=int, default=None, help="parallel workers for batch modes")
    _add_geometry_overrides(parser)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a synthetic dataset with ground truth")
    p.add_argument("--n", type=int, default=None, help="number of images (default from config)")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=None)
    p.set_defaults(fn=cmd_synth)

    p = sub.add_parser("masks", help="rasterize an annotation file into the three masks")
    p.add_argument("--annotations", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--stem", default="", help="output filename prefix")
    p.set_defaults(fn=cmd_masks)

    p = sub.add_parser("digitize", help="convert segmentation masks into time series")
    p.add_argument("--hr", help="heart-rate mask file")
    p.add_argument("--dbp", help="diastolic mask file")
    p.add_argument("--sbp", help="systolic mask file")
    p.add_argument("--dataset", help="dataset directory (batch over masks/)")
    p.add_argument("--out", required=True)
    p.add_argument("--stem", default="", help="output filename prefix (single mode)")
    p.set_defaults(fn=cmd_digitize)

    p = sub.add_parser("match", help="template-match an image into time series")
    p.add_argument("--image", help="graph raster file")
    p.add_argument("--dataset", help="dataset directory (batch over images/)")
    p.add_argument("--pack", help="template pack directory (default: built-in pack)")
    p.add_argument("--out", required=True)
    p.add_argument("--stem", default="", help="output filename prefix (single mode)")
    p.set_defaults(fn=cmd_match)

    p = sub.add_parser("dice", help="Dice coefficient of two masks")
    p.add_argument("mask_a")
    p.add_argument("mask_b")
    p.set_defaults(fn=cmd_dice)

    p = sub.add_parser("evaluate", help="score prediction series against truth series")
    p.add_argument(
        "--pred",
        action="append",
        required=True,
        metavar="NAME=DIR",
        help="prediction series directory; give twice to compare (favored first)",
    )
    p.add_argument("--truth", required=True, help="truth series directory")
    p.add_argument("--out", required=True, help="report JSON path")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(fn=cmd_evaluate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "digitize" and not args.dataset:
            if not (args.hr and args.dbp and args.sbp):
                parser.error("digitize needs --hr/--dbp/--sbp or --dataset")
        if args.command == "match" and not args.dataset and not args.image:
            parser.error("match needs --image or --dataset")
        return args.fn(args, cfg)
    except (GraphDigitError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
