"""Command-line front end.

Subcommands: enroll, identify, evaluate, sweep, synth.  Exit codes:
0 success, 1 internal error, 2 input error, 3 configuration/compatibility
error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import denoise, evaluation, pipeline, synthcam
from .errors import CompatibilityError, InputDataError
from .identify import METHODS
from .manifest import parse_manifest

AVERAGE_CHOICES = ("none", "train", "run", "both")


def _average_flags(choice: str | None) -> tuple[bool | None, bool | None]:
    """Map an --average choice onto (train, run) flags; None keeps the
    manifest defaults."""
    if choice is None:
        return None, None
    return choice in ("train", "both"), choice in ("run", "both")


def _add_common(parser: argparse.ArgumentParser, with_rate: bool = True) -> None:
    if with_rate:
        parser.add_argument("--rate", type=int, default=None,
                            help="sampling rate denominator N (one frame, or one N-frame average, per N)")
    parser.add_argument("--average", choices=AVERAGE_CHOICES, default=None,
                        help="which phases use block averaging instead of frame selection")
    parser.add_argument("--sigma0", type=float, default=denoise.DEFAULT_SIGMA0,
                        help="noise std assumed by the wavelet Wiener denoiser (0-255 scale)")
    parser.add_argument("--levels", type=int, default=denoise.DEFAULT_LEVELS,
                        help="wavelet decomposition levels")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker thread cap; 1 gives the bit-exact sequential reference")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="prnuvid",
        description="Source camera identification for video via PRNU sensor fingerprints.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enroll", help="build one fingerprint file per manifest camera")
    p.add_argument("--manifest", required=True)
    p.add_argument("--out", default=None,
                   help="output directory for *.fp files (default: <manifest dir>/fingerprints)")
    _add_common(p)

    p = sub.add_parser("identify", help="identify the source camera of a frame directory")
    p.add_argument("--fingerprints", required=True, help="directory of enrolled *.fp files")
    p.add_argument("--video", required=True, help="directory of frame images")
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--metric", choices=("pearson", "pce"), default="pearson",
                   help="pattern-correlation comparison metric")
    p.add_argument("--normalize", action="store_true",
                   help="normalize each per-frame PCE vector by its maximum")
    p.add_argument("--raw-template", action="store_true",
                   help="correlate residuals against F alone instead of F*I")
    _add_common(p)

    p = sub.add_parser("evaluate", help="confusion matrix over a manifest's test set")
    p.add_argument("--manifest", required=True)
    p.add_argument("--method", choices=METHODS, required=True)
    p.add_argument("--metric", choices=("pearson", "pce"), default="pearson")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--raw-template", action="store_true")
    p.add_argument("--out", default=None, help="report JSON path (default: stdout)")
    _add_common(p)

    p = sub.add_parser("sweep", help="error rates over a grid of methods and sampling rates")
    p.add_argument("--manifest", action="append", required=True,
                   help="manifest path; repeat for multiple test variants")
    p.add_argument("--rates", default="30,25,20,15,10",
                   help="comma-separated rate denominators")
    p.add_argument("--methods", default="all",
                   help="'all' or comma-separated subset of voting,patcorr,pcevec")
    p.add_argument("--metric", choices=("pearson", "pce"), default="pearson")
    p.add_argument("--normalize", action="store_true")
    p.add_argument("--raw-template", action="store_true")
    p.add_argument("--out", default=".", help="directory receiving sweep.json and sweep.csv")
    _add_common(p, with_rate=False)

    p = sub.add_parser("synth", help="generate a synthetic dataset with known ground truth")
    p.add_argument("--out", required=True)
    p.add_argument("--cameras", type=int, default=5)
    p.add_argument("--frames", type=int, default=100, help="frames per video")
    p.add_argument("--tests", type=int, default=2, help="test videos per camera")
    p.add_argument("--rows", type=int, default=128)
    p.add_argument("--cols", type=int, default=128)
    p.add_argument("--strength", type=float, default=synthcam.DEFAULT_STRENGTH)
    p.add_argument("--sigma-add", type=float, default=2.0)
    p.add_argument("--seed", type=int, default=7)
    p.add_argument("--rate", type=int, default=10, help="sampling default recorded in the manifest")

    return parser


def _cmd_enroll(args: argparse.Namespace) -> int:
    man = parse_manifest(args.manifest)
    avg_train, _ = _average_flags(args.average)
    registry = pipeline.build_registry(
        man, rate=args.rate, average_train=avg_train,
        sigma0=args.sigma0, levels=args.levels, threads=args.threads,
    )
    out_dir = Path(args.out) if args.out else man.path.resolve().parent / "fingerprints"
    paths = pipeline.save_registry(registry, out_dir)
    for p in paths:
        print(p)
    return 0


def _cmd_identify(args: argparse.Namespace) -> int:
    registry = pipeline.load_registry(args.fingerprints)
    if len(registry) < 2:
        raise CompatibilityError("identification needs at least 2 enrolled fingerprints")
    video = Path(args.video)
    rate = args.rate if args.rate is not None else 10
    _, avg_run = _average_flags(args.average)
    average = bool(avg_run)
    result = pipeline.identify_video(
        video, registry, method=args.method, rate=rate, average=average,
        sigma0=args.sigma0, levels=args.levels, metric=args.metric,
        normalize=args.normalize, modulate=not args.raw_template,
    )
    payload = {
        "predicted": result.predicted_id,
        "method": result.method,
        "cameras": result.camera_ids,
        "evidence": result.evidence,
        "frames_used": result.frames_used,
        "tie": result.tie,
        "config": {
            "video": str(video),
            "fingerprints": str(args.fingerprints),
            "rate": rate,
            "average_run": average,
            "sigma0": args.sigma0,
            "levels": args.levels,
            "metric": args.metric if args.method == "patcorr" else None,
            "normalize": args.normalize if args.method == "pcevec" else None,
            "template": "raw" if args.raw_template else "modulated",
        },
    }
    print(json.dumps(payload, indent=2))
    return 0


def _cmd_evaluate(args: argparse.Namespace) -> int:
    man = parse_manifest(args.manifest)
    avg_train, avg_run = _average_flags(args.average)
    report = evaluation.run_evaluation(
        man, args.method, rate=args.rate,
        average_train=avg_train, average_run=avg_run,
        sigma0=args.sigma0, levels=args.levels, metric=args.metric,
        normalize=args.normalize, modulate=not args.raw_template,
        threads=args.threads,
    )
    text = json.dumps(report.to_json_dict(man, threads=args.threads), indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
        print(args.out)
    else:
        print(text)
    return 0


def _cmd_sweep(args: argparse.Namespace) -> int:
    manifests = []
    for path in args.manifest:
        man = parse_manifest(path)
        label = Path(path).resolve().parent.name or Path(path).stem
        if any(l == label for l, _ in manifests):
            label = f"{label}-{len(manifests)}"
        manifests.append((label, man))
    try:
        rates = [int(r) for r in args.rates.split(",") if r.strip()]
    except ValueError:
        raise InputDataError(f"bad --rates value: {args.rates!r}") from None
    if args.methods == "all":
        methods = list(METHODS)
    else:
        methods = [m.strip() for m in args.methods.split(",") if m.strip()]
        for m in methods:
            if m not in METHODS:
                raise InputDataError(f"unknown method in --methods: {m!r}")
    avg_train, avg_run = _average_flags(args.average)
    table = evaluation.sweep(
        manifests, methods, rates, sigma0=args.sigma0, levels=args.levels,
        metric=args.metric, normalize=args.normalize,
        modulate=not args.raw_template,
        average_train=avg_train, average_run=avg_run, threads=args.threads,
    )
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    json_path = out_dir / "sweep.json"
    csv_path = out_dir / "sweep.csv"
    table.write_json(json_path)
    table.write_csv(csv_path)
    print(json_path)
    print(csv_path)
    return 0


def _cmd_synth(args: argparse.Namespace) -> int:
    manifest_path = synthcam.write_dataset(
        args.out, cameras=args.cameras, frames=args.frames,
        tests_per_camera=args.tests, rows=args.rows, cols=args.cols,
        strength=args.strength, sigma_add=args.sigma_add,
        seed=args.seed, rate=args.rate,
    )
    print(manifest_path)
    return 0


_COMMANDS = {
    "enroll": _cmd_enroll,
    "identify": _cmd_identify,
    "evaluate": _cmd_evaluate,
    "sweep": _cmd_sweep,
    "synth": _cmd_synth,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except InputDataError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return 2
    except CompatibilityError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 3
    except Exception as exc:  # noqa: BLE001 - CLI boundary
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
