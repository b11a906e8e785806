"""Command-line front end.

Subcommands: enroll, identify, list, evaluate, synth. Every error class
maps to its own exit code so scripts can tell an unreadable WAV from a
corrupt database:

    0 success
    2 usage error (argparse)
    3 file IO failure
    4 unreadable or unsupported audio file
    5 audio holds no usable speech frames
    6 database problem (missing speaker, duplicate, version, corruption)
    7 configuration or sample-rate mismatch
    8 manifest problem
    1 any other failure
"""

from __future__ import annotations

import argparse
import os
import sys

from .audio import load_wav
from .config import PipelineConfig
from .corpus import synthesize_corpus
from .engine import (MODE_DISTORTION, MODES, SpeakerDatabase, enroll,
                     identify_features, new_database)
from .errors import (AllSilent, ConfigError, CorruptDatabase, CorruptFile,
                     DuplicateSpeaker, EmptyAudio, EmptyDatabase, IoFailure,
                     ManifestParse, SampleRateMismatch, SignalTooShort,
                     SpeakerIdError, UnsupportedFormat, VersionMismatch)
from .evaluate import evaluate_manifest, write_report
from .features import dump_features, extract_features
from .storage import load_db, save_db

_EXIT_CODES = (
    (ManifestParse, 8),
    ((ConfigError, SampleRateMismatch), 7),
    ((DuplicateSpeaker, EmptyDatabase, VersionMismatch, CorruptDatabase), 6),
    ((EmptyAudio, SignalTooShort, AllSilent), 5),
    ((UnsupportedFormat, CorruptFile), 4),
    (IoFailure, 3),
    (SpeakerIdError, 1),
)

# (flag, config field, type); frame geometry flags are in milliseconds
_OVERRIDES = (
    ("sample_rate", "sample_rate", int),
    ("mel_bins", "mel_bins", int),
    ("cepstra", "cepstral_count", int),
    ("radius", "cluster_radius", float),
    ("ridge_lambda", "ridge_lambda", float),
)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="speakerid",
        description="Closed-set speaker identification: enroll speakers "
                    "from WAV files, then identify unknown recordings.")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_pipeline_flags(p):
        p.add_argument("--sample-rate", type=int, default=None,
                       help="expected WAV sample rate in Hz (default 16000)")
        p.add_argument("--frame-ms", type=float, default=None,
                       help="frame length in milliseconds (default 25)")
        p.add_argument("--shift-ms", type=float, default=None,
                       help="frame shift in milliseconds (default 10)")
        p.add_argument("--mel-bins", type=int, default=None,
                       help="number of mel filters (default 26)")
        p.add_argument("--cepstra", type=int, default=None,
                       help="cepstral coefficients per frame (default 12)")
        p.add_argument("--radius", type=float, default=None,
                       help="cluster radius in normalized feature space "
                            "(default 0.5)")
        p.add_argument("--lambda", dest="ridge_lambda", type=float,
                       default=None,
                       help="ridge regularization for the output weights "
                            "(default 1e-6)")

    p = sub.add_parser("enroll", help="add a speaker to a database")
    p.add_argument("speaker_id", help="unique speaker id")
    p.add_argument("wavs", nargs="+", metavar="wav",
                   help="one or more WAV recordings of the speaker")
    p.add_argument("--db", required=True, help="database file path")
    add_pipeline_flags(p)

    p = sub.add_parser("identify", help="match a recording against a database")
    p.add_argument("wav", help="WAV recording to identify")
    p.add_argument("--db", required=True, help="database file path")
    p.add_argument("--mode", choices=MODES, default=MODE_DISTORTION)
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--dump-features", metavar="PATH", default=None,
                   help="also write the probe's feature vectors as CSV")

    p = sub.add_parser("list", help="show enrolled speakers")
    p.add_argument("--db", required=True, help="database file path")
    p.add_argument("--format", choices=("text", "tsv"), default="text")

    p = sub.add_parser("evaluate",
                       help="score a labeled manifest against a database")
    p.add_argument("--manifest", required=True,
                   help="TSV manifest: path<TAB>speaker_id per line")
    p.add_argument("--db", required=True, help="database file path")
    p.add_argument("--mode", choices=MODES, default=MODE_DISTORTION)
    p.add_argument("--format", choices=("text", "tsv"), default="text")
    p.add_argument("--report-dir", default=None,
                   help="also write TSV tables and PNG figures here")

    p = sub.add_parser("synth", help="generate a synthetic test corpus")
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--speakers", type=int, default=5)
    p.add_argument("--utterances", type=int, default=4,
                   help="total utterances per speaker")
    p.add_argument("--test", type=int, default=1,
                   help="utterances per speaker held out for test.tsv")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sample-rate", type=int, default=16_000)
    return parser


def _config_from_args(args) -> PipelineConfig:
    kwargs = {}
    for attr, field, cast in _OVERRIDES:
        value = getattr(args, attr)
        if value is not None:
            kwargs[field] = cast(value)
    return PipelineConfig.from_ms(
        sample_rate=kwargs.pop("sample_rate", 16_000),
        frame_ms=args.frame_ms if args.frame_ms is not None else 25.0,
        shift_ms=args.shift_ms if args.shift_ms is not None else 10.0,
        **kwargs)


def _check_overrides_against(args, config: PipelineConfig):
    """Pipeline flags on an existing database must agree with it."""
    for attr, field, cast in _OVERRIDES:
        value = getattr(args, attr)
        if value is not None and cast(value) != getattr(config, field):
            raise ConfigError(
                f"--{attr.replace('_', '-')} {value} conflicts with the "
                f"existing database ({field}={getattr(config, field)})")
    for attr, field in (("frame_ms", "frame_len"), ("shift_ms", "frame_shift")):
        value = getattr(args, attr)
        if value is None:
            continue
        samples = int(round(config.sample_rate * value / 1000.0))
        if samples != getattr(config, field):
            raise ConfigError(
                f"--{attr.replace('_', '-')} {value} conflicts with the "
                f"existing database ({field}={getattr(config, field)})")


def _cmd_enroll(args) -> int:
    if os.path.exists(args.db):
        db = load_db(args.db)
        _check_overrides_against(args, db.config)
    else:
        db = new_database(_config_from_args(args))
    signals = [load_wav(path) for path in args.wavs]
    db = enroll(args.speaker_id, signals, db)
    save_db(db, args.db)
    model = db.models[args.speaker_id]
    print(f"enrolled {args.speaker_id}: {model.frame_count} frames, "
          f"{model.center_count} centers "
          f"({db.speaker_count} speakers total)")
    return 0


def _cmd_identify(args) -> int:
    db = load_db(args.db)
    signal = load_wav(args.wav)
    if db.speaker_count == 0:
        raise EmptyDatabase("no speakers enrolled")
    if signal.sample_rate != db.config.sample_rate:
        raise SampleRateMismatch(
            f"signal at {signal.sample_rate} Hz, database expects "
            f"{db.config.sample_rate} Hz")
    feats = extract_features(signal, db.config)
    if args.dump_features:
        dump_features(feats, args.dump_features)
    result = identify_features(feats.vectors, db, args.mode)

    ranked = result.ranked()
    if args.format == "tsv":
        for rank, (sid, score) in enumerate(ranked, start=1):
            print(f"{sid}\t{score:.12g}\t{rank}")
    else:
        print(f"best: {result.best_speaker}")
        print(f"mode: {result.mode}")
        print(f"margin: {result.margin:.6g}")
        print("rank\tspeaker\tscore")
        for rank, (sid, score) in enumerate(ranked, start=1):
            print(f"{rank}\t{sid}\t{score:.6g}")
    return 0


def _cmd_list(args) -> int:
    db = load_db(args.db)
    if args.format == "tsv":
        for sid, model in db.models.items():
            print(f"{sid}\t{model.center_count}\t{model.frame_count}")
    else:
        print(f"database: {args.db}")
        print(f"speakers: {db.speaker_count}")
        print(f"pipeline: {db.config.fingerprint()}")
        for sid, model in db.models.items():
            print(f"  {sid}: {model.center_count} centers from "
                  f"{model.frame_count} frames")
    return 0


def _cmd_evaluate(args) -> int:
    db = load_db(args.db)
    report = evaluate_manifest(args.manifest, db, args.mode)
    if args.format == "tsv":
        for e in report.entries:
            print(f"{e.path}\t{e.true_speaker}\t{e.predicted or '-'}\t"
                  f"{int(e.correct)}\t{e.margin:.12g}\t{e.error or '-'}")
    else:
        print(f"entries: {report.total}")
        print(f"correct: {report.correct}")
        print(f"failures: {report.failures}")
        print(f"accuracy: {report.accuracy:.4f}")
        print(f"mean margin: {report.mean_margin:.6g}")
        wrong = [e for e in report.entries if not e.correct]
        for e in wrong:
            what = e.error if e.error else f"predicted {e.predicted}"
            print(f"  wrong: {e.path} (true {e.true_speaker}, {what})")
    if args.report_dir:
        for path in write_report(report, args.report_dir):
            print(f"wrote {path}", file=sys.stderr)
    return 0


def _cmd_synth(args) -> int:
    corpus = synthesize_corpus(args.out, speakers=args.speakers,
                               utterances=args.utterances,
                               test_count=args.test, seed=args.seed,
                               sample_rate=args.sample_rate)
    print(f"wrote {len(corpus.wav_paths)} files for "
          f"{len(corpus.speaker_ids)} speakers under {corpus.out_dir}")
    print(f"enroll manifest: {corpus.enroll_manifest}")
    print(f"test manifest: {corpus.test_manifest}")
    return 0


_COMMANDS = {
    "enroll": _cmd_enroll,
    "identify": _cmd_identify,
    "list": _cmd_list,
    "evaluate": _cmd_evaluate,
    "synth": _cmd_synth,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except SpeakerIdError as exc:
        print(f"error: {exc}", file=sys.stderr)
        for kinds, code in _EXIT_CODES:
            if isinstance(exc, kinds):
                return code
        return 1  # pragma: no cover
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
