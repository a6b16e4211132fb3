"""Validated, reproducible CSV output."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Sequence

import pandas as pd
from pydantic import BaseModel

from src.nlkg.errors import RowContractError
from src.nlkg.schemas.contracts import validate_dataframe

logger = logging.getLogger(__name__)

# 17 significant digits round-trip every float64
FLOAT_FORMAT = "%.17g"


def rows_frame(rows: Sequence[dict], columns: Sequence[str]) -> pd.DataFrame:
    """DataFrame with exactly `columns`, in order; missing cells are NaN."""
    return pd.DataFrame(list(rows), columns=list(columns))


def write_csv(df: pd.DataFrame, path: Path, model: type[BaseModel]) -> Path:
    errors = validate_dataframe(df, model)
    if errors:
        for msg in errors[:5]:
            logger.error(msg)
        raise RowContractError(f"{len(errors)} rows of {Path(path).name} violate {model.__name__}")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info("Wrote: %s (%d rows)", path, len(df))
    return path
