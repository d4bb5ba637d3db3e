"""Model files and run artifacts (metrics, history, predictions)."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Sequence

from .core import BetaNetwork, BetaUnit, predict
from .hierarchy import GenerationRecord, RunReport

MODEL_FORMAT = "bbfnn-model/1"
METRICS_KEYS = (
    "seed",
    "training_error",
    "generalization_error",
    "n_units",
    "generations_run",
    "grad_iterations",
    "ga_training_error",
    "stopped_early",
)
_UNIT_KEYS = ("center", "width", "p", "q", "weight")


class ModelFileError(ValueError):
    pass


def _num(value: float) -> str:
    # repr gives the shortest string that round-trips to the same double.
    return repr(float(value))


def model_to_dict(net: BetaNetwork) -> dict:
    return {
        "format": MODEL_FORMAT,
        "units": [
            {"center": u.center, "width": u.width, "p": u.shape_p, "q": u.shape_q, "weight": w}
            for u, w in zip(net.units, net.weights)
        ],
    }


def model_from_dict(doc: dict) -> BetaNetwork:
    if not isinstance(doc, dict) or doc.get("format") != MODEL_FORMAT:
        raise ModelFileError(f"not a {MODEL_FORMAT} document")
    units, weights = [], []
    for i, entry in enumerate(doc.get("units", [])):
        if not isinstance(entry, dict) or set(entry) != set(_UNIT_KEYS):
            raise ModelFileError(f"units[{i}]: expected keys {list(_UNIT_KEYS)}")
        try:
            units.append(BetaUnit(entry["center"], entry["width"], entry["p"], entry["q"]))
            weights.append(float(entry["weight"]))
        except (TypeError, ValueError) as exc:
            raise ModelFileError(f"units[{i}]: {exc}") from None
    return BetaNetwork(tuple(units), tuple(weights))


def save_model(net: BetaNetwork, path) -> None:
    Path(path).write_text(json.dumps(model_to_dict(net), indent=2) + "\n", encoding="utf-8")


def load_model(path) -> BetaNetwork:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise ModelFileError(f"cannot read model {path}: {exc}") from None
    return model_from_dict(doc)


def write_metrics(report: RunReport, path) -> None:
    scalars = report.scalars()
    doc = {key: scalars[key] for key in METRICS_KEYS}
    Path(path).write_text(json.dumps(doc, indent=2) + "\n", encoding="utf-8")


def write_history(history: Sequence[GenerationRecord], path) -> None:
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["generation", "best_fitness1", "best_fitness2", "mean_gene_count"])
        for rec in history:
            w.writerow([rec.generation, _num(rec.best_fitness1), _num(rec.best_fitness2),
                        _num(rec.mean_gene_count)])


def write_predictions(net: BetaNetwork, dataset, path) -> None:
    y_pred = predict(net, dataset.x) if dataset is not None else []
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y_true", "y_pred"])
        if dataset is None:
            return
        for x, y, yp in zip(dataset.x, dataset.y, y_pred):
            w.writerow([_num(x), _num(y), _num(yp)])


def write_run(report: RunReport, out_dir, predictions_on) -> list[Path]:
    """Write metrics.json, model.json, history.csv and predictions.csv."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / "metrics.json", out / "model.json", out / "history.csv", out / "predictions.csv"]
    write_metrics(report, paths[0])
    save_model(report.final_network, paths[1])
    write_history(report.history, paths[2])
    write_predictions(report.final_network, predictions_on, paths[3])
    return paths
