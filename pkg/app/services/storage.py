import logging
from pathlib import Path
from typing import Type, TypeVar

import pandas as pd
from pydantic import BaseModel
from pydantic import ValidationError as SchemaError

from app.core.exceptions import ValidationError
from app.models.dataset import Dataset, LabelEncoding, validate_dataset

logger = logging.getLogger(__name__)

M = TypeVar("M", bound=BaseModel)


def _existing(path) -> Path:
    path = Path(path)
    if not path.is_file():
        raise ValidationError(f"missing file: {path}")
    return path


def read_dataset(path, encoding: LabelEncoding = LabelEncoding.REAL, header: bool = True) -> Dataset:
    """CSV with one observation per row; the last column is the response."""
    try:
        frame = pd.read_csv(_existing(path), header=0 if header else None, float_precision="round_trip")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise ValidationError(f"malformed CSV {path}: {e}")
    if frame.shape[1] < 2:
        raise ValidationError(f"dimension mismatch: {path} needs at least one feature column and a response")
    values = frame.apply(pd.to_numeric, errors="coerce").to_numpy(dtype=float)
    logger.debug(f"read {frame.shape[0]} x {frame.shape[1] - 1} dataset from {path}")
    return validate_dataset(values[:, :-1], values[:, -1], encoding)


def write_dataset(data: Dataset, path, header: bool = True) -> None:
    frame = pd.DataFrame(data.X, columns=[f"x{j}" for j in range(data.p)])
    frame["y"] = data.y
    frame.to_csv(path, index=False, header=header)
    logger.info(f"wrote {data.n} x {data.p} dataset to {path}")


def write_model(model: BaseModel, path) -> None:
    Path(path).write_text(model.model_dump_json(indent=2) + "\n")
    logger.info(f"wrote {type(model).__name__} to {path}")


def read_model(model_type: Type[M], path) -> M:
    try:
        return model_type.model_validate_json(_existing(path).read_text())
    except SchemaError as e:
        raise ValidationError(f"malformed {model_type.__name__} in {path}: {e}")


def write_frame(frame: pd.DataFrame, path) -> None:
    frame.to_csv(path, index=False)
    logger.info(f"wrote {len(frame)} rows to {path}")


def summary_path(path) -> Path:
    """results.csv -> results_summary.csv"""
    path = Path(path)
    return path.with_name(f"{path.stem}_summary{path.suffix or '.csv'}")
