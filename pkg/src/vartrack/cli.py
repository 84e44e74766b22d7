"""Command-line front end: track, eval, synth, and benchmark subcommands.

Exit codes: 0 success, 2 configuration error, 3 I/O error, 4 insufficient
frames. Flags override a JSON config file, which overrides defaults.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from . import evaluation, sequence_io, synthetic
from .errors import (
    ConfigurationError,
    EmptySequenceError,
    InsufficientFramesError,
    SequenceFormatError,
    SequenceIOError,
)
from .pipeline import PipelineConfig, track_sequence

_CONFIG_KEYS = ("eta", "alpha", "phi", "min_blob_area", "min_object_side", "invisible_max")
_VISIBLE_COLOR = (0, 255, 0)
_COASTING_COLOR = (255, 160, 0)
_DASH = 3


def _build_config(args) -> PipelineConfig:
    values = {}
    if getattr(args, "config", None):
        try:
            with open(args.config) as fh:
                loaded = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigurationError(f"cannot read config {args.config}: {exc}") from exc
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config {args.config} must hold a JSON object")
        unknown = set(loaded) - set(_CONFIG_KEYS)
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        values.update(loaded)
    for key in _CONFIG_KEYS:
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    config = PipelineConfig(**values)
    config.validate()
    return config


def _dashed_rectangle(draw: ImageDraw.ImageDraw, box, color) -> None:
    x0, y0, x1, y1 = box
    for x in range(x0, x1 + 1, 2 * _DASH):
        draw.line([(x, y0), (min(x + _DASH - 1, x1), y0)], fill=color)
        draw.line([(x, y1), (min(x + _DASH - 1, x1), y1)], fill=color)
    for y in range(y0, y1 + 1, 2 * _DASH):
        draw.line([(x0, y), (x0, min(y + _DASH - 1, y1))], fill=color)
        draw.line([(x1, y), (x1, min(y + _DASH - 1, y1))], fill=color)


def annotate_frame(pixels: np.ndarray, snapshots) -> Image.Image:
    """Render tracks over a frame: solid 1-px rectangles for visible tracks,
    dashed for coasting ones, each labelled with its id at the box corner."""
    gray = np.clip(np.floor(np.asarray(pixels, dtype=np.float64) + 0.5), 0, 255)
    image = Image.fromarray(gray.astype(np.uint8), mode="L").convert("RGB")
    draw = ImageDraw.Draw(image)
    height, width = gray.shape
    for snap in snapshots:
        x, y, w, h = snap.box
        x0 = max(0, min(width - 1, x - 1))
        y0 = max(0, min(height - 1, y - 1))
        x1 = max(0, min(width - 1, x - 1 + w - 1))
        y1 = max(0, min(height - 1, y - 1 + h - 1))
        color = _COASTING_COLOR if snap.coasting else _VISIBLE_COLOR
        if snap.coasting:
            _dashed_rectangle(draw, (x0, y0, x1, y1), color)
        else:
            draw.rectangle([x0, y0, x1, y1], outline=color, width=1)
        draw.text((x0 + 2, y0 + 1), str(snap.track_id), fill=color)
    return image


def _load_truth_boxes(path) -> dict[int, list[tuple[int, int, int, int]]]:
    boxes: dict[int, list[tuple[int, int, int, int]]] = {}
    for box in sequence_io.load_ground_truth(path):
        boxes.setdefault(box.frame_index, []).append((box.x, box.y, box.w, box.h))
    return boxes


def _judge_sequence(observations, truth_by_frame, frame_indices):
    detections_by_frame: dict[int, list[tuple[int, int, int, int]]] = {}
    for frame, _tid, x, y, w, h in observations:
        detections_by_frame.setdefault(frame, []).append((x, y, w, h))
    judgements = []
    for t in frame_indices:
        judgements.extend(
            evaluation.judge_frame(
                t, detections_by_frame.get(t, []), truth_by_frame.get(t, [])
            )
        )
    return judgements


def _write_report(report, report_path) -> None:
    report_path = Path(report_path)
    try:
        report_path.parent.mkdir(parents=True, exist_ok=True)
        with open(report_path, "w") as fh:
            json.dump(report.to_dict(), fh, indent=2)
            fh.write("\n")
        precision_path = report_path.with_name(report_path.stem + "_precision.csv")
        with open(precision_path, "w") as fh:
            fh.write("threshold,fraction\n")
            for threshold, fraction in report.precision:
                fh.write(f"{threshold},{fraction}\n")
    except OSError as exc:
        raise SequenceIOError(f"cannot write report {report_path}: {exc}") from exc


def _cmd_track(args) -> int:
    config = _build_config(args)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SequenceIOError(f"cannot create output directory {out_dir}: {exc}") from exc
    frames = sequence_io.load_sequence(args.input, args.pattern)
    stack = np.stack([f.pixels for f in frames])

    debug_sink = None
    if args.dump_bg or args.dump_fg:
        bg_names = {"background", "dissimilarity", "weight"}
        fg_names = {"foreground", "mask"}
        dump_dir = out_dir / "debug"
        dump_dir.mkdir(exist_ok=True)

        def debug_sink(frame_index, name, image):
            wanted = (args.dump_bg and name in bg_names) or (
                args.dump_fg and name in fg_names
            )
            if wanted:
                sequence_io.write_image(
                    dump_dir / f"{name}_{frame_index:05d}.pgm", image
                )

    result = track_sequence(stack, config, debug_sink=debug_sink)
    sequence_io.write_detections(out_dir / "detections.csv", result.observations)
    for t, snaps in result.snapshots.items():
        annotate_frame(stack[t - 1], snaps).save(out_dir / f"annotated_{t:05d}.png")
    print(f"tracked {result.operated_frames} frames -> {out_dir / 'detections.csv'}")
    if args.gt:
        truth = _load_truth_boxes(args.gt)
        judgements = _judge_sequence(
            result.observations, truth, range(1, stack.shape[0] + 1)
        )
        fps = evaluation.measure_fps(result.operated_frames, result.compute_seconds)
        report = evaluation.aggregate(judgements, fps=fps)
        _write_report(report, out_dir / "report.json")
        print(
            f"TD {report.td_pct:.2f}%  FD {report.fd_pct:.2f}%  "
            f"MD {report.md_pct:.2f}%  FPS {report.fps:.1f}"
        )
    return 0


def _cmd_eval(args) -> int:
    rows = sequence_io.read_detections(args.detections)
    truth = _load_truth_boxes(args.gt)
    frame_max = max(
        [r[0] for r in rows] + list(truth.keys()), default=0
    )
    if frame_max == 0:
        raise ConfigurationError("no frames to evaluate")
    judgements = _judge_sequence(rows, truth, range(1, frame_max + 1))
    report = evaluation.aggregate(judgements, fps=None)
    _write_report(report, args.report)
    print(
        f"TD {report.td_pct:.2f}%  FD {report.fd_pct:.2f}%  MD {report.md_pct:.2f}%"
    )
    return 0


def _cmd_synth(args) -> int:
    spec = synthetic.SceneSpec.from_json(args.spec)
    out_dir = Path(args.out)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise SequenceIOError(f"cannot create output directory {out_dir}: {exc}") from exc
    frames, truths = synthetic.render(spec)
    for t, frame in enumerate(frames, start=1):
        sequence_io.write_image(out_dir / f"frame_{t:05d}.pgm", frame)
    for i, boxes in enumerate(truths, start=1):
        lines = [
            f"{b.x},{b.y},{b.w},{b.h}" if b is not None else "0,0,0,0"
            for b in boxes
        ]
        (out_dir / f"truth_object_{i}.txt").write_text("\n".join(lines) + "\n")
    print(f"rendered {len(frames)} frames -> {out_dir}")
    return 0


def _cmd_benchmark(args) -> int:
    config = _build_config(args)
    frames = sequence_io.load_sequence(args.input, args.pattern)
    stack = np.stack([f.pixels for f in frames])
    result = track_sequence(stack, config)
    truth = _load_truth_boxes(args.gt)
    judgements = _judge_sequence(
        result.observations, truth, range(1, stack.shape[0] + 1)
    )
    fps = evaluation.measure_fps(result.operated_frames, result.compute_seconds)
    report = evaluation.aggregate(judgements, fps=fps)
    _write_report(report, args.report)
    print(
        f"TD {report.td_pct:.2f}%  FD {report.fd_pct:.2f}%  "
        f"MD {report.md_pct:.2f}%  FPS {report.fps:.1f}"
    )
    return 0


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="JSON config file (flags take precedence)")
    parser.add_argument("--eta", type=int, help="history window size (default 4)")
    parser.add_argument("--alpha", type=float, help="gate/dilation factor (default 1.5)")
    parser.add_argument("--phi", type=float, help="infeasible-cost sentinel (default 1e6)")
    parser.add_argument("--min-blob-area", dest="min_blob_area", type=int)
    parser.add_argument("--min-object-side", dest="min_object_side", type=int)
    parser.add_argument(
        "--invisible-max",
        dest="invisible_max",
        type=int,
        help="frames a track may coast (default 2*eta)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vartrack",
        description="Detect and track moving objects in sequences with variable background.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    track = sub.add_parser("track", help="run the full pipeline over a sequence")
    track.add_argument("--input", required=True, help="frame directory")
    track.add_argument("--pattern", default="*", help="filename glob (default *)")
    track.add_argument("--out", required=True, help="output directory")
    track.add_argument("--gt", help="ground-truth file for post-run evaluation")
    track.add_argument("--dump-bg", action="store_true", help="dump B/D/W images")
    track.add_argument("--dump-fg", action="store_true", help="dump F/mask images")
    _add_config_flags(track)
    track.set_defaults(func=_cmd_track)

    ev = sub.add_parser("eval", help="score an existing detections CSV")
    ev.add_argument("--detections", required=True)
    ev.add_argument("--gt", required=True)
    ev.add_argument("--report", required=True, help="JSON report path")
    ev.set_defaults(func=_cmd_eval)

    synth = sub.add_parser("synth", help="render a synthetic scene")
    synth.add_argument("--spec", required=True, help="SceneSpec JSON file")
    synth.add_argument("--out", required=True, help="output directory")
    synth.set_defaults(func=_cmd_synth)

    bench = sub.add_parser("benchmark", help="pipeline + evaluation + FPS")
    bench.add_argument("--input", required=True)
    bench.add_argument("--pattern", default="*")
    bench.add_argument("--gt", required=True)
    bench.add_argument("--report", required=True)
    _add_config_flags(bench)
    bench.set_defaults(func=_cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigurationError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except (SequenceIOError, SequenceFormatError, EmptySequenceError) as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 3
    except InsufficientFramesError as exc:
        print(f"insufficient frames: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
