"""Batch evaluation of a database against a labeled manifest.

Runs the same identify code path as single-file identification over
every manifest entry, tallies closed-set accuracy and confusion counts,
and can render the results as TSV tables plus figures in a report
directory. Entries whose audio fails to process are marked failed and
count as wrong; the run continues.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from .audio import load_wav
from .corpus import read_manifest
from .engine import MODE_DISTORTION, SpeakerDatabase, identify
from .errors import IoFailure, SpeakerIdError


@dataclass(frozen=True)
class EvalEntry:
    """One manifest row's outcome. ``predicted`` is None when the entry
    failed to process; ``error`` then says why."""

    path: str
    true_speaker: str
    predicted: str | None
    margin: float
    error: str | None

    @property
    def correct(self) -> bool:
        return self.predicted == self.true_speaker


@dataclass(frozen=True)
class EvalReport:
    mode: str
    entries: list[EvalEntry]
    confusion: dict[tuple[str, str], int]

    @property
    def total(self) -> int:
        return len(self.entries)

    @property
    def correct(self) -> int:
        return sum(1 for e in self.entries if e.correct)

    @property
    def failures(self) -> int:
        return sum(1 for e in self.entries if e.error is not None)

    @property
    def accuracy(self) -> float:
        return self.correct / self.total if self.total else 0.0

    @property
    def mean_margin(self) -> float:
        margins = [e.margin for e in self.entries if e.error is None]
        return sum(margins) / len(margins) if margins else 0.0

    def labels(self) -> list[str]:
        seen = {e.true_speaker for e in self.entries}
        seen.update(e.predicted for e in self.entries if e.predicted)
        return sorted(seen)


def evaluate_manifest(manifest_path, db: SpeakerDatabase,
                      mode: str = MODE_DISTORTION) -> EvalReport:
    """Identify every manifest entry and aggregate the outcomes."""
    entries = []
    confusion: dict[tuple[str, str], int] = {}
    for item in read_manifest(manifest_path):
        try:
            result = identify(load_wav(item.path), db, mode)
        except SpeakerIdError as exc:
            entries.append(EvalEntry(path=item.path,
                                     true_speaker=item.speaker_id,
                                     predicted=None, margin=0.0,
                                     error=str(exc)))
            continue
        entries.append(EvalEntry(path=item.path, true_speaker=item.speaker_id,
                                 predicted=result.best_speaker,
                                 margin=result.margin, error=None))
        key = (item.speaker_id, result.best_speaker)
        confusion[key] = confusion.get(key, 0) + 1
    return EvalReport(mode=mode, entries=entries, confusion=confusion)


def _write_results_tsv(report: EvalReport, path: str):
    with open(path, "w", encoding="utf-8") as out:
        out.write("path\ttrue\tpredicted\tcorrect\tmargin\terror\n")
        for e in report.entries:
            out.write(f"{e.path}\t{e.true_speaker}\t{e.predicted or '-'}\t"
                      f"{int(e.correct)}\t{e.margin:.9g}\t{e.error or '-'}\n")


def _write_confusion_tsv(report: EvalReport, path: str):
    labels = report.labels()
    with open(path, "w", encoding="utf-8") as out:
        out.write("true\\predicted\t" + "\t".join(labels) + "\n")
        for true in labels:
            row = [str(report.confusion.get((true, pred), 0))
                   for pred in labels]
            out.write(true + "\t" + "\t".join(row) + "\n")


def _write_summary_tsv(report: EvalReport, path: str):
    with open(path, "w", encoding="utf-8") as out:
        out.write(f"mode\t{report.mode}\n")
        out.write(f"total\t{report.total}\n")
        out.write(f"correct\t{report.correct}\n")
        out.write(f"failures\t{report.failures}\n")
        out.write(f"accuracy\t{report.accuracy:.6f}\n")
        out.write(f"mean_margin\t{report.mean_margin:.9g}\n")


def _render_figures(report: EvalReport, out_dir: str) -> list[str]:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    import numpy as np

    labels = report.labels()
    grid = np.array([[report.confusion.get((t, p), 0) for p in labels]
                     for t in labels], dtype=float)
    fig, ax = plt.subplots(figsize=(max(4.0, 0.5 * len(labels) + 2.0),) * 2)
    image = ax.imshow(grid, cmap="Blues")
    ax.set_xticks(range(len(labels)), labels, rotation=90, fontsize=7)
    ax.set_yticks(range(len(labels)), labels, fontsize=7)
    ax.set_xlabel("predicted")
    ax.set_ylabel("true")
    ax.set_title(f"confusion ({report.mode}, acc={report.accuracy:.3f})")
    if len(labels) <= 20:
        for i in range(len(labels)):
            for j in range(len(labels)):
                if grid[i, j]:
                    ax.text(j, i, int(grid[i, j]), ha="center", va="center",
                            fontsize=7,
                            color="white" if grid[i, j] > grid.max() / 2
                            else "black")
    fig.colorbar(image, ax=ax, shrink=0.8)
    fig.tight_layout()
    confusion_png = os.path.join(out_dir, "confusion_matrix.png")
    fig.savefig(confusion_png, dpi=120)
    plt.close(fig)

    ok = [e.margin for e in report.entries if e.error is None and e.correct]
    bad = [e.margin for e in report.entries if e.error is None and not e.correct]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    ax.hist([ok, bad], bins=20, stacked=True, color=["#2a7", "#c33"],
            label=["correct", "wrong"])
    ax.set_xlabel("margin (best vs runner-up)")
    ax.set_ylabel("entries")
    ax.set_title(f"decision margins ({report.mode})")
    ax.legend()
    fig.tight_layout()
    margins_png = os.path.join(out_dir, "margins.png")
    fig.savefig(margins_png, dpi=120)
    plt.close(fig)
    return [confusion_png, margins_png]


def write_report(report: EvalReport, out_dir) -> list[str]:
    """Write TSV tables and PNG figures into ``out_dir``; returns the
    paths written."""
    out_dir = str(out_dir)
    try:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        for name, writer in (("results.tsv", _write_results_tsv),
                             ("confusion.tsv", _write_confusion_tsv),
                             ("summary.tsv", _write_summary_tsv)):
            path = os.path.join(out_dir, name)
            writer(report, path)
            paths.append(path)
        paths.extend(_render_figures(report, out_dir))
    except OSError as exc:
        raise IoFailure(f"cannot write report into {out_dir!r}: {exc}") from exc
    return paths
