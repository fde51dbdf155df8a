"""Command-line interface: detect, describe, evaluate, bench, synth."""

from __future__ import annotations

import argparse
import csv
import dataclasses
import io as _io
import json
import os
import sys

from . import io as fileio
from .bench import bench
from .config import load_config, serialize
from .descriptor import describe_batch
from .detector import DetectorConfig, detect
from .errors import InvalidInputError, MetricDomainError, PointAtInfinityError, SurfError
from .evaluation import (
    descriptor_stability_protocol,
    detector_stability_protocol,
    load_sequence,
    summarize,
)
from .image import read_image, write_pgm
from .integral import build_integral
from .synthetic import blob_grid, synthetic_sequence, write_sequence

# Fixed detector that supplies the points for descriptor-mode evaluation.
REFERENCE_DETECTOR = DetectorConfig(max_features=2000)


def _single_config(args):
    refs = args.config or ["stable"]
    if len(refs) != 1:
        raise InvalidInputError("this command takes exactly one --config")
    return load_config(refs[0])


def _variants(args):
    variants = [load_config(ref) for ref in (args.config or ["fast", "stable"])]
    names = [v.name for v in variants]
    if len(set(names)) != len(names):
        raise InvalidInputError(f"variant names must be unique, got {names}")
    return variants


def cmd_detect(args):
    variant = _single_config(args)
    points = detect(read_image(args.image), variant.detector)
    fileio.write_points(args.out, points)
    print(f"{len(points)} interest points -> {args.out}")


def cmd_describe(args):
    variant = _single_config(args)
    image = read_image(args.image)
    points = fileio.read_points(args.points)
    res = describe_batch(build_integral(image), points, variant)
    fileio.write_descriptors(args.out, res.features)
    print(f"{len(res.features)} descriptors -> {args.out} "
          f"(dropped {res.dropped_zero} zero, {res.dropped_border} border)")


def _write_table(rows, header, out):
    buf = _io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())


def _fmt(v):
    return repr(float(v))


def _sequence_points(seq, points_dir):
    if points_dir is None:
        return [detect(img, REFERENCE_DETECTOR) for img in seq.images], "reference-detector"
    out = []
    for i in range(1, len(seq) + 1):
        path = os.path.join(points_dir, seq.name, f"img{i}.pts")
        if not os.path.isfile(path):
            path = os.path.join(points_dir, f"img{i}.pts")
        out.append(fileio.read_points(path))
    return out, "points-files"


def cmd_evaluate(args):
    variants = _variants(args)
    rows = []
    scores = {v.name: {} for v in variants}
    metric = "correct_fraction" if args.mode == "descriptor" else "repeatability"
    meta = {"mode": args.mode, "eps_px": args.eps_px, "eps_scale": args.eps_scale, "tol_assoc": args.tol_assoc,
            "variants": {v.name: serialize(v) for v in variants}}
    for directory in args.sequence:
        seq = load_sequence(directory)
        if args.mode == "descriptor":
            points, source = _sequence_points(seq, args.points)
            meta["points_source"] = source
            if source == "reference-detector":
                meta["reference_detector"] = {
                    k: (v.value if hasattr(v, "value") else v) for k, v in dataclasses.asdict(REFERENCE_DETECTOR).items()
                }
        for v in variants:
            if args.mode == "descriptor":
                values = descriptor_stability_protocol(seq, points, v, args.tol_assoc)
            else:
                values = [res.r for res in detector_stability_protocol(seq, v.detector, args.eps_px, args.eps_scale)]
            for i, value in enumerate(values, start=2):
                scores[v.name][(seq.name, i)] = value
                rows.append([seq.name, i, v.name, metric, _fmt(value)])
    for name, value in summarize(scores).items():
        rows.append(["ALL", "summary", name, f"summary_{args.mode}", _fmt(value)])
    _write_table(rows, ["sequence", "image", "variant", "metric", "value"], args.out)
    if args.out:
        with open(args.out + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")


def cmd_bench(args):
    if args.outer < 1 or args.inner < 1:
        raise InvalidInputError("--outer and --inner must be at least 1")
    variants = _variants(args)
    image = read_image(args.image)
    results = bench(image, variants, os.path.basename(args.image), args.outer, args.inner)
    rows = [[r.variant, r.image, f"{r.median_ms:.3f}", " ".join(f"{t:.3f}" for t in r.best_of_inner_ms),
             r.feature_count] for r in results]
    _write_table(rows, ["variant", "image", "median_ms", "best_of_inner_ms", "feature_count"], args.out)


def cmd_synth(args):
    if args.kind == "sequence":
        images, hs = synthetic_sequence(seed=args.seed, size=args.size, count=args.count)
        write_sequence(args.out, images, hs)
        print(f"{len(images)} images -> {args.out}")
    else:
        img, _ = blob_grid()
        os.makedirs(os.path.dirname(os.path.abspath(args.out)), exist_ok=True)
        write_pgm(args.out, img)
        print(f"blob grid -> {args.out}")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="stablesurf", description="SURF detection, description and evaluation.")
    sub = p.add_subparsers(dest="command", required=True)

    def config_flag(sp):
        sp.add_argument("--config", action="append", metavar="PATH",
                        help="variant config file or preset name (fast, stable); repeatable")

    d = sub.add_parser("detect", help="detect interest points")
    d.add_argument("image")
    config_flag(d)
    d.add_argument("--out", required=True)
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("describe", help="describe points from a points file")
    s.add_argument("image")
    s.add_argument("points")
    config_flag(s)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_describe)

    e = sub.add_parser("evaluate", help="score variants on homography sequences (CSV)")
    e.add_argument("sequence", nargs="+", help="directory with img<N>.pgm and H1to<N>p")
    config_flag(e)
    e.add_argument("--mode", choices=("descriptor", "detector"), default="descriptor")
    e.add_argument("--points", metavar="DIR", help="img<N>.pts files to describe instead of detecting")
    e.add_argument("--eps-px", type=float, default=1.5)
    e.add_argument("--eps-scale", type=float, default=0.25)
    e.add_argument("--tol-assoc", type=float, default=3.0)
    e.add_argument("--out")
    e.set_defaults(func=cmd_evaluate)

    b = sub.add_parser("bench", help="time detect+describe per variant")
    b.add_argument("image")
    config_flag(b)
    b.add_argument("--outer", type=int, default=11)
    b.add_argument("--inner", type=int, default=10)
    b.add_argument("--out")
    b.set_defaults(func=cmd_bench)

    y = sub.add_parser("synth", help="write synthetic test data")
    y.add_argument("out")
    y.add_argument("--kind", choices=("sequence", "blobs"), default="sequence")
    y.add_argument("--seed", type=int, default=0)
    y.add_argument("--size", type=int, default=256)
    y.add_argument("--count", type=int, default=4)
    y.set_defaults(func=cmd_synth)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        args.func(args)
    except (MetricDomainError, PointAtInfinityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (SurfError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
