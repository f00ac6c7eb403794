"""CSV/JSON readers and writers used by the command line tool.

Importances and descriptors are CSV files with a ``sample_id`` column; rows
are joined on that id. Every float written out is rounded to 12 significant
digits so reruns produce identical bytes.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pandas as pd

from .core import CohortModel, ImportanceMatrix, Partition, TagMatrix
from .exceptions import TaghortError

ID_COLUMN = "sample_id"
FLOAT_FORMAT = "%.12g"


class InputFormatError(TaghortError):
    pass


def round12(x: float) -> float:
    return float(f"{x:.12g}")


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return round12(float(obj)) if np.isfinite(obj) else None
    return obj


def write_json(path, obj) -> None:
    Path(path).write_text(json.dumps(_jsonable(obj), indent=2, sort_keys=False) + "\n")


def _read_csv(path) -> pd.DataFrame:
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as exc:
        raise InputFormatError(f"{path}: {exc}") from exc
    if ID_COLUMN not in frame.columns:
        raise InputFormatError(f"{path}: missing {ID_COLUMN!r} column")
    ids = frame[ID_COLUMN]
    if ids.duplicated().any():
        raise InputFormatError(f"{path}: duplicate sample ids, e.g. {ids[ids.duplicated()].iloc[0]!r}")
    return frame


def read_importances(path) -> tuple[list[str], ImportanceMatrix]:
    """Importance CSV -> (sample ids, matrix). Non-numeric cells are reported by row and column."""
    frame = _read_csv(path)
    features = [c for c in frame.columns if c != ID_COLUMN]
    if not features:
        raise InputFormatError(f"{path}: no importance columns")
    values = np.empty((len(frame), len(features)))
    for j, col in enumerate(features):
        parsed = pd.to_numeric(frame[col], errors="coerce")
        bad = parsed.isna() | ~np.isfinite(parsed.to_numpy(dtype=float, na_value=np.nan))
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise InputFormatError(
                f"{path}: row {row + 2} (sample {frame[ID_COLUMN].iloc[row]!r}), column {col!r}: "
                f"{frame[col].iloc[row]!r} is not a finite number"
            )
        values[:, j] = parsed.to_numpy(dtype=float)
    return frame[ID_COLUMN].tolist(), ImportanceMatrix(values, tuple(features))


def read_descriptors(path) -> tuple[list[str], pd.DataFrame]:
    """Descriptor CSV -> (sample ids, frame). Numeric-looking columns are converted."""
    frame = _read_csv(path)
    ids = frame[ID_COLUMN].tolist()
    data = frame.drop(columns=[ID_COLUMN])
    for col in data.columns:
        empty = data[col] == ""
        if empty.any():
            row = int(np.flatnonzero(empty.to_numpy())[0])
            raise InputFormatError(f"{path}: row {row + 2}, column {col!r}: missing value")
        numeric = pd.to_numeric(data[col], errors="coerce")
        if not numeric.isna().any():
            data[col] = numeric
    return ids, data.reset_index(drop=True)


def align(ids: list[str], other_ids: list[str], frame: pd.DataFrame) -> pd.DataFrame:
    """Reorder ``frame`` (keyed by ``other_ids``) to follow ``ids``; the id sets must match."""
    missing = sorted(set(ids) - set(other_ids))
    extra = sorted(set(other_ids) - set(ids))
    if missing or extra:
        raise InputFormatError(
            f"sample ids differ between inputs: {len(missing)} missing from descriptors "
            f"{missing[:3]}, {len(extra)} only in descriptors {extra[:3]}"
        )
    position = {sid: i for i, sid in enumerate(other_ids)}
    return frame.iloc[[position[sid] for sid in ids]].reset_index(drop=True)


def write_importances(path, ids, W: ImportanceMatrix) -> None:
    frame = pd.DataFrame(W.values, columns=list(W.feature_names))
    frame.insert(0, ID_COLUMN, ids)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_descriptors(path, ids, data: pd.DataFrame) -> None:
    frame = data.copy()
    frame.insert(0, ID_COLUMN, ids)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_assignments(path, ids, partition: Partition) -> None:
    pd.DataFrame({ID_COLUMN: ids, "cohort": partition.assignment}).to_csv(path, index=False)


def read_assignments(path) -> tuple[list[str], list[int]]:
    frame = pd.read_csv(path, dtype={ID_COLUMN: str})
    return frame[ID_COLUMN].tolist(), frame["cohort"].astype(int).tolist()


def cohort_records(model: CohortModel, dataset_mean: np.ndarray) -> list[dict]:
    names = list(model.feature_names)
    out = []
    for t in range(model.k):
        out.append({
            "cohort": t + 1,
            "size": int(model.sizes[t]),
            "tags": [model.dictionary[p] for p in model.tag_sets[t]],
            "mean_importance": dict(zip(names, model.cohort_means[t].tolist())),
            "relative_importance": dict(zip(names, (model.cohort_means[t] - dataset_mean).tolist())),
        })
    return out


def write_cohorts(path, model: CohortModel, W: ImportanceMatrix, extra: dict | None = None) -> None:
    payload = {
        "k": model.k,
        "descriptiveness": model.descriptiveness,
        "compactness": model.compactness,
        "dataset_mean_importance": dict(zip(W.feature_names, W.values.mean(axis=0).tolist())),
        "cohorts": cohort_records(model, W.values.mean(axis=0)),
    }
    if extra:
        payload.update(extra)
    write_json(path, payload)


def write_cohort_plot_data(path, model: CohortModel, W: ImportanceMatrix) -> None:
    """Tidy rows (cohort, feature, mean, relative) for bar charts of cohort importance."""
    dataset_mean = W.values.mean(axis=0)
    rows = [
        (t + 1, name, model.cohort_means[t, j], model.cohort_means[t, j] - dataset_mean[j])
        for t in range(model.k)
        for j, name in enumerate(model.feature_names)
    ]
    pd.DataFrame(rows, columns=["cohort", "feature", "mean_importance", "relative_importance"]).to_csv(
        path, index=False, float_format=FLOAT_FORMAT
    )


def write_sweep(path, report) -> None:
    frame = pd.DataFrame([r.__dict__ for r in report.records])
    frame.insert(0, "method", report.method)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def write_sweep_summary(path, report) -> None:
    frame = pd.DataFrame([s.__dict__ for s in report.summaries])
    frame.insert(0, "method", report.method)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)


def tags_frame(D: TagMatrix, ids) -> pd.DataFrame:
    frame = pd.DataFrame(D.values.astype(int), columns=list(D.dictionary))
    frame.insert(0, ID_COLUMN, ids)
    return frame
