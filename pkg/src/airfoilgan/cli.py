"""Command-line pipeline: preprocess, synth, train, generate, evaluate, smooth, plot.

Exit codes: 0 success, 2 usage or input error, 3 numerical failure.
"""
import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .dataset import (
    ClassLabel,
    Thresholds,
    Y_COLUMNS,
    assign_classes,
    load_dataset,
    load_records,
    load_samples,
    save_canonical,
    save_dataset,
    save_samples,
)
from .errors import AirfoilGanError, NumericalError
from .gan import GanConfig, load_checkpoint, sample_class, save_checkpoint, train
from .geometry import parse_selig, resample
from .kernels import BACKEND
from .metrics import SampleSet, evaluate
from .plot import write_svg
from .rng import Rng
from .smoothing import savitzky_golay
from .synth import synthetic_corpus

log = logging.getLogger("airfoilgan")

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 2, 3


class InputError(Exception):
    """Bad user input detected by a command (exit code 2)."""


def write_manifest(output, command, args, inputs=(), outputs=(), seed=None):
    config = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "config")}
    manifest = {
        "command": command,
        "config": json.loads(json.dumps(config, default=str)),
        "inputs": [str(p) for p in inputs],
        "outputs": [str(p) for p in outputs],
        "seed": seed,
        "version": __version__,
        "kernel_backend": BACKEND,
    }
    path = Path(f"{output}.manifest.json")
    path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
    return path


def _thresholds(args):
    return Thresholds(args.clcd_threshold, args.alpha_threshold, args.tau_threshold)


def cmd_preprocess(args):
    in_dir = Path(args.in_dir)
    if not in_dir.is_dir():
        raise InputError(f"{in_dir} is not a directory")
    files = sorted(p for p in in_dir.iterdir() if p.suffix.lower() == ".dat")
    ids, rows, failures = [], [], 0
    for path in files:
        try:
            raw = parse_selig(path.read_text(errors="replace"))
            rows.append(resample(raw))
            ids.append(path.stem)
        except AirfoilGanError as exc:
            failures += 1
            print(f"skipped {path.name}: {exc}", file=sys.stderr)
    if not rows:
        raise InputError(f"no parseable .dat files in {in_dir}")
    y = np.array(rows)
    if args.records:
        records = load_records(args.records)
        known = set(ids)
        usable = [r for r in records if r.airfoil_id in known]
        if len(usable) < len(records):
            print(f"ignored {len(records) - len(usable)} record(s) for airfoils that failed to load", file=sys.stderr)
        d = assign_classes(list(zip(ids, y)), usable, _thresholds(args))
        save_dataset(d, args.out)
        print(f"{len(ids)} airfoils ({failures} failed) -> {len(d)} labelled entries in {args.out}")
    else:
        save_canonical(ids, y, args.out)
        print(f"{len(ids)} airfoils ({failures} failed) -> {args.out}")
    inputs = [str(p) for p in files] + ([args.records] if args.records else [])
    write_manifest(args.out, "preprocess", args, inputs, [args.out])
    return EXIT_OK


def cmd_synth(args):
    if args.count < 1:
        raise InputError("--count must be >= 1")
    d, _, _ = synthetic_corpus(args.count, args.seed, _thresholds(args))
    save_dataset(d, args.out)
    counts = " ".join(f"{k}:{v}" for k, v in d.class_counts().items())
    print(f"{len(d)} entries -> {args.out} ({counts})")
    write_manifest(args.out, "synth", args, (), [args.out], args.seed)
    return EXIT_OK


def _hidden(text):
    return tuple(int(v) for v in str(text).split(",") if v.strip())


def cmd_train(args):
    d = load_dataset(args.dataset)
    if len(d) == 0:
        raise InputError(f"{args.dataset} has no entries")
    omegas = args.omega if isinstance(args.omega, list) else [args.omega]
    out = Path(args.out)
    for omega in omegas:
        ckpt = out if len(omegas) == 1 else out.with_name(f"{out.stem}.omega{omega:g}{out.suffix}")
        config = GanConfig(
            omega=omega, lr=args.lr, epochs=args.epochs, batch_size=args.batch_size, d_steps=args.d_steps,
            seed=args.seed, g_hidden=_hidden(args.g_hidden), d_hidden=_hidden(args.d_hidden),
            beta1=args.beta1, beta2=args.beta2,
        )
        progress = None
        if args.log_every:
            def progress(epoch, rep, every=args.log_every):
                if epoch % every == 0:
                    log.info("epoch %d g=%.4f d=%.4f smooth=%.3g", epoch, rep.g_loss[-1], rep.d_loss[-1], rep.smooth[-1])
        model, report = train(d, config, progress=progress)
        save_checkpoint(model, ckpt, with_optimizer=args.with_optimizer)
        report_path = Path(f"{ckpt.with_suffix('')}.report.csv")
        report.save_csv(report_path)
        mean_smooth = float(np.mean(report.smooth)) if len(report) else 0.0
        print(f"omega={omega:g} epochs={config.epochs} mean_smooth_component={mean_smooth:.6g} -> {ckpt}")
        write_manifest(ckpt, "train", args, [args.dataset], [ckpt, report_path], args.seed)
    return EXIT_OK


def _parse_class(text):
    try:
        return ClassLabel.from_code(text)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def cmd_generate(args):
    label = _parse_class(args.class_)
    if args.n < 1:
        raise InputError("--n must be >= 1")
    model = load_checkpoint(args.checkpoint)
    y = sample_class(model, label, args.n, Rng(args.seed))
    if args.sg_filter:
        window, order = args.sg_filter
        y = savitzky_golay(y, window, order, cyclic=not args.open)
    save_samples(label, y, args.out)
    print(f"{args.n} samples of class {label} -> {args.out}")
    write_manifest(args.out, "generate", args, [args.checkpoint], [args.out], args.seed)
    return EXIT_OK


def cmd_evaluate(args):
    rows = []
    for path in args.samples:
        label, y = load_samples(path)
        if len(y) == 0:
            raise InputError(f"{path} contains no samples")
        rows.append(evaluate(SampleSet(y, label), args.tau_threshold))
    fh = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["class", "acc_tau", "sigma_tau", "S"])
        for r in rows:
            w.writerow([r["class"], repr(r["acc_tau"]), repr(r["sigma_tau"]), repr(r["S"])])
    finally:
        if args.out:
            fh.close()
    if args.out:
        write_manifest(args.out, "evaluate", args, args.samples, [args.out])
    return EXIT_OK


def cmd_smooth(args):
    with open(args.input, newline="") as fh:
        lines = fh.read().splitlines()
    preamble = [ln for ln in lines[:1] if ln.startswith("#")]
    reader = csv.reader(lines[len(preamble):])
    header = next(reader, None)
    if header is None or header[-len(Y_COLUMNS):] != Y_COLUMNS:
        raise InputError(f"{args.input}: expected trailing columns y1..y{len(Y_COLUMNS)}")
    lead = len(header) - len(Y_COLUMNS)
    rows = [r for r in reader if r]
    try:
        y = np.array([[float(v) for v in r[lead:]] for r in rows]).reshape(-1, len(Y_COLUMNS))
    except ValueError as exc:
        raise InputError(f"{args.input}: {exc}") from None
    if len(y):
        y = savitzky_golay(y, args.window, args.order, cyclic=not args.open)
    with open(args.out, "w", newline="") as fh:
        for ln in preamble:
            fh.write(ln + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r, yr in zip(rows, y):
            w.writerow([*r[:lead], *(repr(float(v)) for v in yr)])
    print(f"smoothed {len(rows)} curve(s) -> {args.out}")
    write_manifest(args.out, "smooth", args, [args.input], [args.out])
    return EXIT_OK


def cmd_plot(args):
    label, y = load_samples(args.samples)
    if len(y) == 0:
        raise InputError(f"{args.samples} contains no samples")
    title = args.title or (f"class {label}" if label else None)
    try:
        write_svg(args.out, y, mean=not args.no_mean, title=title)
    except OSError as exc:
        raise InputError(f"cannot write {args.out}: {exc}") from None
    print(f"{len(y)} curves -> {args.out}")
    write_manifest(args.out, "plot", args, [args.samples], [args.out])
    return EXIT_OK


def _add_thresholds(p):
    p.add_argument("--clcd-threshold", type=float, default=100.0)
    p.add_argument("--alpha-threshold", type=float, default=10.0)
    p.add_argument("--tau-threshold", type=float, default=0.12)


def build_parser():
    parser = argparse.ArgumentParser(prog="airfoilgan", description=__doc__.splitlines()[0])
    parser.add_argument("--config", help="JSON file of option defaults; command-line flags take precedence")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("preprocess", help="resample a directory of Selig .dat files to 38-point curves")
    p.add_argument("in_dir")
    p.add_argument("out")
    p.add_argument("--records", help="performance CSV (airfoil_id,Re,M,alpha,cl,cd); writes a labelled dataset")
    _add_thresholds(p)
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("synth", help="write a synthetic NACA 4-digit labelled dataset")
    p.add_argument("--count", type=int, default=32, help="airfoils per class")
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    _add_thresholds(p)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("train", help="train the conditional GAN")
    p.add_argument("dataset")
    p.add_argument("--out", required=True, help="checkpoint JSON path")
    p.add_argument("--omega", type=float, nargs="+", default=[10.0],
                   help="smoothing weight; several values run a sweep (0 = plain GAN)")
    p.add_argument("--epochs", type=int, default=30000)
    p.add_argument("--batch-size", type=int, default=64)
    p.add_argument("--lr", type=float, default=1e-4)
    p.add_argument("--beta1", type=float, default=0.9)
    p.add_argument("--beta2", type=float, default=0.999)
    p.add_argument("--d-steps", type=int, default=1, help="discriminator updates per generator update")
    p.add_argument("--g-hidden", default="256,256,256")
    p.add_argument("--d-hidden", default="256,256")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--with-optimizer", action="store_true", help="store Adam moments in the checkpoint")
    p.add_argument("--log-every", type=int, default=0)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="sample curves for one class")
    p.add_argument("checkpoint")
    p.add_argument("--class", dest="class_", required=True, help="3-bit class such as 011")
    p.add_argument("--n", type=int, default=600)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--sg-filter", type=int, nargs=2, metavar=("WINDOW", "ORDER"),
                   help="apply a Savitzky-Golay filter to each curve")
    p.add_argument("--open", action="store_true", help="treat curves as open for the filter")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("evaluate", help="accuracy and diversity metrics per class")
    p.add_argument("samples", nargs="+")
    p.add_argument("--tau-threshold", type=float, default=0.12)
    p.add_argument("--out", help="metrics CSV (default: stdout)")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("smooth", help="Savitzky-Golay filter every curve in a CSV")
    p.add_argument("input")
    p.add_argument("out")
    p.add_argument("--window", type=int, default=5)
    p.add_argument("--order", type=int, default=2)
    p.add_argument("--open", action="store_true")
    p.set_defaults(func=cmd_smooth)

    p = sub.add_parser("plot", help="render samples and their mean shape to SVG")
    p.add_argument("samples")
    p.add_argument("--out", required=True)
    p.add_argument("--no-mean", action="store_true")
    p.add_argument("--title")
    p.set_defaults(func=cmd_plot)
    return parser


def _apply_config(parser, argv):
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        cfg = json.loads(Path(args.config).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {args.config}: {exc}")
    if not isinstance(cfg, dict):
        parser.error("config file must hold a JSON object")
    section = cfg.get(args.command, {})
    flat = {k: v for k, v in cfg.items() if not isinstance(v, dict)}
    defaults = {k.replace("-", "_"): v for k, v in {**flat, **section}.items()}
    subparser = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in subparser._actions}
    unknown = sorted(set(defaults) - known)
    if unknown:
        parser.error(f"unknown config keys for {args.command}: {', '.join(unknown)}")
    subparser.set_defaults(**defaults)
    return parser.parse_args(argv)


def main(argv=None):
    parser = build_parser()
    args = _apply_config(parser, argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (InputError, AirfoilGanError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
