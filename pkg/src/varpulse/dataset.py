"""Equidistant diary (EMA) datasets and CSV ingestion.

A dataset is a complete T x m matrix of equidistant observations, one
column per self-report variable, oldest row first.  Missing cells are a
hard error: responses are simulated on the assumption of an unbroken,
equally spaced series, and silent imputation would corrupt them.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ConfigError, MissingDataError, ParseError

POSITIVE = "positive"
NEGATIVE = "negative"
POLARITIES = (POSITIVE, NEGATIVE)


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class VariableMeta:
    """Name, interpretation and answer-scale statistics of one variable.

    ``polarity`` records whether an increase of the variable is experienced
    as a good thing ("positive") or a bad thing ("negative"); the advice
    layer uses it to flip signs so every variable can be read as positive.
    ``mean``/``sd`` are the sample mean and sample (n-1) standard deviation
    of the raw answers.
    """

    name: str
    polarity: str = POSITIVE
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self) -> None:
        if not self.name:
            raise ValueError("variable name must be non-empty")
        if self.polarity not in POLARITIES:
            raise ValueError(f"polarity must be one of {POLARITIES}, got {self.polarity!r}")
        if not self.sd >= 0.0:
            raise ValueError(f"sd must be >= 0, got {self.sd}")


@dataclass(frozen=True)
class EmaDataset:
    """Complete, equidistant multivariate diary series.

    Attributes
    ----------
    variables : tuple of VariableMeta
        Endogenous variable metadata, one entry per column of ``rows``.
    rows : ndarray, shape (T, m)
        Observations, oldest first.  Stored read-only.
    interval_minutes : float
        Time between consecutive rows, in minutes.
    exo_names, exo_rows :
        Optional exogenous columns (can influence the system but are never
        influenced by it), aligned row-for-row with ``rows``.
    """

    variables: tuple[VariableMeta, ...]
    rows: np.ndarray
    interval_minutes: float
    exo_names: tuple[str, ...] = ()
    exo_rows: np.ndarray | None = None

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=float)
        if rows.ndim != 2 or rows.shape[1] != len(self.variables):
            raise ValueError(f"rows must be T x {len(self.variables)}, got shape {rows.shape}")
        if not np.all(np.isfinite(rows)):
            raise MissingDataError("dataset contains non-finite cells")
        object.__setattr__(self, "rows", _readonly(rows))
        object.__setattr__(self, "variables", tuple(self.variables))
        names = [v.name for v in self.variables]
        if len(set(names)) != len(names):
            raise ValueError("variable names must be unique")
        if not self.interval_minutes > 0:
            raise ValueError("interval_minutes must be positive")
        if self.exo_rows is not None:
            exo = np.asarray(self.exo_rows, dtype=float)
            if exo.shape != (rows.shape[0], len(self.exo_names)):
                raise ValueError(
                    f"exo_rows must be {rows.shape[0]} x {len(self.exo_names)}, got {exo.shape}"
                )
            if not np.all(np.isfinite(exo)):
                raise MissingDataError("exogenous columns contain non-finite cells")
            object.__setattr__(self, "exo_rows", _readonly(exo))
        object.__setattr__(self, "exo_names", tuple(self.exo_names))

    @property
    def n_obs(self) -> int:
        return self.rows.shape[0]

    @property
    def n_vars(self) -> int:
        return len(self.variables)

    def names(self) -> list[str]:
        return [v.name for v in self.variables]


def _column_stats(col: np.ndarray) -> tuple[float, float]:
    mean = float(np.mean(col))
    sd = float(np.std(col, ddof=1)) if col.size > 1 else 0.0
    return mean, sd


def _parse_csv(
    lines: Iterable[str],
    source: str,
    interval_minutes: float,
    polarity_map: Mapping[str, str] | None,
    exogenous: Sequence[str],
) -> EmaDataset:
    reader = csv.reader(lines)
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise ParseError(f"{source}: empty file") from None
    raw_rows: list[list[float]] = []
    for row_idx, row in enumerate(reader):
        if len(row) != len(header):
            raise MissingDataError(
                f"{source}: row {row_idx} has {len(row)} cells, expected {len(header)}"
            )
        parsed = []
        for name, cell in zip(header, row):
            cell = cell.strip()
            if cell == "":
                raise MissingDataError(f"{source}: empty cell in row {row_idx}, column {name!r}")
            try:
                parsed.append(float(cell))
            except ValueError:
                raise ParseError(
                    f"{source}: non-numeric cell {cell!r} in row {row_idx}, column {name!r}"
                ) from None
        raw_rows.append(parsed)

    if not raw_rows:
        raise ParseError(f"{source}: no observation rows")

    polarity_map = dict(polarity_map or {})
    for name in polarity_map:
        if name not in header:
            raise ConfigError(f"polarity_map names unknown variable {name!r}; columns: {header}")
    for value in polarity_map.values():
        if value not in POLARITIES:
            raise ConfigError(f"polarity must be one of {POLARITIES}, got {value!r}")
    for name in exogenous:
        if name not in header:
            raise ConfigError(f"exogenous names unknown variable {name!r}; columns: {header}")

    table = np.array(raw_rows, dtype=float)
    exo_set = set(exogenous)
    endo_idx = [i for i, name in enumerate(header) if name not in exo_set]
    exo_idx = [header.index(name) for name in exogenous]

    variables = []
    for i in endo_idx:
        mean, sd = _column_stats(table[:, i])
        variables.append(
            VariableMeta(
                name=header[i],
                polarity=polarity_map.get(header[i], POSITIVE),
                mean=mean,
                sd=sd,
            )
        )

    return EmaDataset(
        variables=tuple(variables),
        rows=table[:, endo_idx],
        interval_minutes=float(interval_minutes),
        exo_names=tuple(exogenous),
        exo_rows=table[:, exo_idx] if exo_idx else None,
    )


def load_ema_csv(
    path: str | Path,
    interval_minutes: float,
    polarity_map: Mapping[str, str] | None = None,
    exogenous: Sequence[str] = (),
) -> EmaDataset:
    """Load a diary CSV (header row of names, one observation per row).

    Parameters
    ----------
    path : file path
        UTF-8, comma-separated, oldest observation first.
    interval_minutes : float
        Measurement interval of the study.
    polarity_map : mapping name -> "positive"/"negative", optional
        Variables absent from the map default to positive.
    exogenous : sequence of column names, optional
        Columns to split off as exogenous inputs.

    Raises
    ------
    MissingDataError
        An empty or absent cell (the series must be complete).
    ParseError
        A cell that is not a number.
    ConfigError
        A ``polarity_map`` or ``exogenous`` name not present in the header.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as fh:
        return _parse_csv(fh, str(path), interval_minutes, polarity_map, exogenous)


def parse_ema_csv(
    text: str,
    interval_minutes: float,
    polarity_map: Mapping[str, str] | None = None,
    exogenous: Sequence[str] = (),
) -> EmaDataset:
    """Same as :func:`load_ema_csv` but for CSV text already in memory."""
    return _parse_csv(
        io.StringIO(text, newline=""), "<csv>", interval_minutes, polarity_map, exogenous
    )
