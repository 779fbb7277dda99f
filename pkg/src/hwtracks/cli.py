"""Command-line entry point chaining the pipeline over recordings.

Subcommands: synth (scenario script -> detections + truth files), track
(detections -> recording file sets), extract (recordings -> episodes, fits,
cut-ins, statistics), validate (recording file sets -> issue report) and
stats (recordings -> statistics only).

Exit codes: 0 success, 1 failure, 2 usage. Failures are reported as a JSON
object on stderr; the validate subcommand writes its report as JSON on
stdout. Recording-level parallelism (--jobs) never changes any output byte:
workers own disjoint files and merged statistics are reduced in input order.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import sys
import traceback
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

from . import stats as statsmod
from .dataset_io import (
    DatasetError,
    RecordingFileSet,
    discover_recordings,
    validate,
    write_recording,
    write_recording_meta,
)
from .lane_change import write_cut_ins_csv, write_cut_ins_json, write_fits_csv
from .maneuvers import write_episodes_csv, write_episodes_json
from .pipeline import (
    ExtractResult,
    PipelineConfig,
    extract_recording_files,
    load_pipeline_config,
    track_stage,
)
from .surround import compute_surround
from .synth import ScriptError, corrupt, generate_truth, load_script
from .tracking import write_detections


def _error_dict(kind: str, message: str, file: Optional[str] = None,
                row: Optional[int] = None, column: Optional[str] = None) -> Dict:
    out: Dict = {"kind": kind, "message": message}
    if file is not None:
        out["file"] = file
    if row is not None:
        out["row"] = row
    if column is not None:
        out["column"] = column
    return out


def _issue_dict(issue) -> Dict:
    return _error_dict(issue.kind, issue.message, issue.file, issue.row, issue.column)


def _report_errors(errors: List[Dict]) -> None:
    if errors:
        json.dump({"errors": errors}, sys.stderr, indent=2)
        sys.stderr.write("\n")


def _exception_error(exc: Exception) -> Dict:
    if isinstance(exc, DatasetError):
        return _issue_dict(exc.issue)
    if isinstance(exc, ScriptError):
        return _error_dict("ScriptError", str(exc))
    return _error_dict(type(exc).__name__, str(exc))


def _load_config(args) -> PipelineConfig:
    overrides = {}
    if getattr(args, "jobs", None) is not None:
        overrides["jobs"] = args.jobs
    if getattr(args, "seed_override", None) is not None:
        overrides["seed_override"] = args.seed_override
    return load_pipeline_config(getattr(args, "config", None), **overrides)


# ---------------------------------------------------------------------------
# Workers (module level so they pickle for process pools)


def _track_one(item: Tuple[Path, Path, PipelineConfig, Path]):
    detections_path, meta_path, cfg, output_dir = item
    try:
        track_stage(detections_path, meta_path, cfg, output_dir)
        return None
    except Exception as exc:  # reported, never crashes the batch
        return _exception_error(exc)


def _extract_one(item: Tuple[RecordingFileSet, PipelineConfig, Path, bool]):
    paths, cfg, output_dir, write_files = item
    try:
        result = extract_recording_files(paths, cfg)
        if write_files:
            rid = result.recording_id
            write_episodes_csv(result.episodes, rid, output_dir / f"{rid:02d}_episodes.csv")
            write_episodes_json(result.episodes, rid, output_dir / f"{rid:02d}_episodes.json")
            write_fits_csv(result.fits, rid, output_dir / f"{rid:02d}_laneChangeFits.csv")
            write_cut_ins_csv(result.cut_ins, rid, output_dir / f"{rid:02d}_cutIns.csv")
            write_cut_ins_json(result.cut_ins, rid, output_dir / f"{rid:02d}_cutIns.json")
        return None, result
    except Exception as exc:
        return _exception_error(exc), None


def _run_parallel(worker, items: Sequence, jobs: int) -> List:
    """Map worker over items, preserving input order."""
    if jobs <= 1 or len(items) <= 1:
        return [worker(item) for item in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, items))


# ---------------------------------------------------------------------------
# Subcommands


def cmd_synth(args) -> int:
    errors: List[Dict] = []
    try:
        cfg = _load_config(args)
        script = load_script(args.script)
        if cfg.seed_override is not None:
            script = dataclasses.replace(script, seed=cfg.seed_override)
        truth = generate_truth(script)
        output = Path(args.output)
        detections_dir = output / "detections"
        truth_dir = output / "truth"
        detections_dir.mkdir(parents=True, exist_ok=True)
        truth_dir.mkdir(parents=True, exist_ok=True)

        rid = truth.meta.recording_id
        detections = corrupt(
            truth.tracks,
            script.noise,
            script.seed,
            meta=truth.meta,
            road_length=truth.road_length,
            scripted_dropouts=truth.scripted_dropouts,
        )
        write_detections(detections, detections_dir / f"{rid:02d}_detections.csv")
        write_recording_meta(truth.meta, detections_dir / f"{rid:02d}_recordingMeta.csv")

        surround = compute_surround(truth.tracks, truth.meta)
        write_recording(truth.meta, truth.tracks, surround, truth_dir)
        write_episodes_csv(truth.episodes, rid, truth_dir / f"{rid:02d}_episodes.csv")
        write_episodes_json(truth.episodes, rid, truth_dir / f"{rid:02d}_episodes.json")
        write_cut_ins_csv(truth.cut_ins, rid, truth_dir / f"{rid:02d}_cutIns.csv")
        write_cut_ins_json(truth.cut_ins, rid, truth_dir / f"{rid:02d}_cutIns.json")
        print(f"recording {rid}: {len(truth.tracks)} vehicles, "
              f"{len(truth.episodes)} lane changes, {len(truth.cut_ins)} cut-ins")
        return 0
    except Exception as exc:
        errors.append(_exception_error(exc))
        _report_errors(errors)
        return 1


def cmd_track(args) -> int:
    errors: List[Dict] = []
    try:
        cfg = _load_config(args)
    except Exception as exc:
        _report_errors([_exception_error(exc)])
        return 1
    input_dir = Path(args.input)
    output_dir = Path(args.output)
    output_dir.mkdir(parents=True, exist_ok=True)
    detection_files = sorted(input_dir.glob("*_detections.csv"))
    if not detection_files:
        _report_errors([_error_dict("EmptyInput", f"no *_detections.csv in {input_dir}")])
        return 1
    items = []
    for det_path in detection_files:
        rid_text = det_path.name.split("_")[0]
        meta_path = input_dir / f"{rid_text}_recordingMeta.csv"
        items.append((det_path, meta_path, cfg, output_dir))
    for outcome in _run_parallel(_track_one, items, cfg.jobs):
        if outcome is not None:
            errors.append(outcome)
    _report_errors(errors)
    return 1 if errors else 0


def _write_corpus_stats(
    results: Sequence[ExtractResult], cfg: PipelineConfig, output_dir: Path
) -> None:
    all_tracks = [t for r in results for t in r.tracks]
    all_episodes = [e for r in results for e in r.episodes]
    all_cut_ins = [c for r in results for c in r.cut_ins]

    hist = statsmod.mean_speed_histogram(all_tracks, cfg.stats.mean_speed_bin)
    statsmod.write_histogram_csv(hist, output_dir / "meanSpeedHistogram.csv")
    for result in results:
        series = statsmod.truck_ratio_over_time(
            result.tracks, cfg.stats.truck_ratio_window
        )
        statsmod.write_truck_ratio_csv(
            series, output_dir / f"{result.recording_id:02d}_truckRatio.csv"
        )
    thw_stats = statsmod.cut_in_thw_stats(
        all_cut_ins, cfg.stats.speed_bin, cfg.stats.thw_bin
    )
    statsmod.write_histogram_csv(
        thw_stats.histogram, output_dir / "cutInThwHistogram.csv"
    )
    statsmod.write_decile_band_csv(
        thw_stats.band, output_dir / "cutInThwBand.csv"
    )
    summary = statsmod.maneuver_summary(all_episodes, all_tracks)
    statsmod.write_summary_json(
        summary, len(all_cut_ins), output_dir / "summary.json"
    )


def _run_extract(args, write_per_recording: bool) -> int:
    errors: List[Dict] = []
    try:
        cfg = _load_config(args)
    except Exception as exc:
        _report_errors([_exception_error(exc)])
        return 1
    input_dir = Path(args.input)
    output_dir = Path(args.output)
    output_dir.mkdir(parents=True, exist_ok=True)
    filesets = discover_recordings(input_dir)
    if not filesets:
        _report_errors([_error_dict("EmptyInput", f"no recordings in {input_dir}")])
        return 1
    items = [(paths, cfg, output_dir, write_per_recording) for paths in filesets]
    results: List[ExtractResult] = []
    for outcome, result in _run_parallel(_extract_one, items, cfg.jobs):
        if outcome is not None:
            errors.append(outcome)
        else:
            results.append(result)
    if results:
        _write_corpus_stats(results, cfg, output_dir)
        total_fits = sum(len(r.fits) for r in results)
        total_failures = sum(r.fit_failures for r in results)
        print(
            f"{len(results)} recording(s): "
            f"{sum(len(r.episodes) for r in results)} episodes, "
            f"{total_fits} lane-change fits ({total_failures} skipped), "
            f"{sum(len(r.cut_ins) for r in results)} cut-ins"
        )
    _report_errors(errors)
    return 1 if errors else 0


def cmd_extract(args) -> int:
    return _run_extract(args, write_per_recording=True)


def cmd_stats(args) -> int:
    return _run_extract(args, write_per_recording=False)


def cmd_validate(args) -> int:
    input_dir = Path(args.input)
    filesets = discover_recordings(input_dir)
    issues = []
    if not filesets:
        issues.append(_error_dict("EmptyInput", f"no recordings in {input_dir}"))
    for paths in filesets:
        report = validate(paths)
        issues.extend(_issue_dict(issue) for issue in report.issues)
    json.dump({"issues": issues}, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return 0 if not issues else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hwtracks",
        description="Highway trajectory pipeline: tracking, smoothing, "
                    "surround metrics, maneuvers, lane-change fits, statistics.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p, needs_output=True):
        p.add_argument("--config", type=Path, default=None,
                       help="JSON pipeline configuration")
        p.add_argument("--input", type=Path, required=True)
        if needs_output:
            p.add_argument("--output", type=Path, required=True)
        p.add_argument("--jobs", type=int, default=None,
                       help="parallel recordings (default from config, 1)")
        p.add_argument("--seed-override", type=int, default=None, dest="seed_override")

    p_synth = sub.add_parser("synth", help="generate a synthetic scene from a script")
    p_synth.add_argument("--script", type=Path, required=True)
    p_synth.add_argument("--output", type=Path, required=True)
    p_synth.add_argument("--config", type=Path, default=None)
    p_synth.add_argument("--seed-override", type=int, default=None, dest="seed_override")
    p_synth.set_defaults(func=cmd_synth)

    p_track = sub.add_parser("track", help="turn detection streams into recordings")
    add_common(p_track)
    p_track.set_defaults(func=cmd_track)

    p_extract = sub.add_parser(
        "extract", help="mine maneuvers, lane-change fits, cut-ins and statistics"
    )
    add_common(p_extract)
    p_extract.set_defaults(func=cmd_extract)

    p_stats = sub.add_parser("stats", help="recompute statistics only")
    add_common(p_stats)
    p_stats.set_defaults(func=cmd_stats)

    p_validate = sub.add_parser("validate", help="check recording files")
    p_validate.add_argument("--input", type=Path, required=True)
    p_validate.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # last-resort structured report, never a bare crash
        _report_errors([_exception_error(exc)])
        traceback.print_exc(file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
