"""Survival data containers and CSV ingestion."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


class DataError(ValueError):
    """Invalid input data; ``row`` is the 1-based data row when known."""

    def __init__(self, message, row: int | None = None):
        super().__init__(message if row is None else f"row {row}: {message}")
        self.row = row


@dataclass(frozen=True)
class Observation:
    time: float
    event: bool = True
    covariates: tuple[float, ...] = ()

    def __post_init__(self):
        if not (self.time > 0 and math.isfinite(self.time)):
            raise DataError(f"time must be positive and finite, got {self.time}")


@dataclass(frozen=True, eq=False)
class SurvivalDataset:
    """Times, event flags (True = observed) and a covariate matrix."""

    times: np.ndarray
    events: np.ndarray
    covariates: np.ndarray = field(default=None)
    covariate_names: tuple[str, ...] = ()
    source: str | None = None

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float).ravel()
        e = np.asarray(self.events, dtype=bool).ravel()
        if t.shape != e.shape:
            raise DataError("times and events differ in length")
        bad = np.flatnonzero(~(np.isfinite(t) & (t > 0)))
        if bad.size:
            raise DataError(f"time must be positive, got {t[bad[0]]}", row=int(bad[0]) + 1)
        if self.covariates is None:
            z = np.zeros((t.size, 0))
        else:
            z = np.asarray(self.covariates, dtype=float)
            if z.ndim == 1:
                z = z[:, None]
        if z.shape[0] != t.size:
            raise DataError("covariate block has the wrong number of rows")
        names = tuple(self.covariate_names) or tuple(f"z{j + 1}" for j in range(z.shape[1]))
        if len(names) != z.shape[1]:
            raise DataError("covariate names do not match the covariate block")
        if not np.all(np.isfinite(z)):
            row = int(np.flatnonzero(~np.all(np.isfinite(z), axis=1))[0]) + 1
            raise DataError("non-finite covariate value", row=row)
        for arr in (t, e, z):
            arr.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "events", e)
        object.__setattr__(self, "covariates", z)
        object.__setattr__(self, "covariate_names", names)

    @classmethod
    def from_observations(cls, obs: Sequence[Observation], names=(), source=None):
        if not obs:
            raise DataError("no observations")
        k = len(obs[0].covariates)
        if any(len(o.covariates) != k for o in obs):
            raise DataError("covariate length differs between observations")
        z = np.array([o.covariates for o in obs], dtype=float).reshape(len(obs), k)
        return cls(np.array([o.time for o in obs]), np.array([o.event for o in obs]), z,
                   tuple(names), source)

    def __len__(self):
        return self.times.size

    @property
    def n_events(self) -> int:
        return int(self.events.sum())

    @property
    def n_covariates(self) -> int:
        return self.covariates.shape[1]

    def observations(self) -> list[Observation]:
        return [Observation(float(t), bool(e), tuple(map(float, z)))
                for t, e, z in zip(self.times, self.events, self.covariates)]

    def without_covariates(self) -> "SurvivalDataset":
        return SurvivalDataset(self.times, self.events, None, (), self.source)

    def uncensored(self) -> "SurvivalDataset":
        keep = self.events
        return SurvivalDataset(self.times[keep], self.events[keep], self.covariates[keep],
                               self.covariate_names, self.source)

    def summary(self) -> dict:
        """Validation report: counts and a per-covariate summary."""
        cov = {name: {"mean": float(np.mean(col)), "min": float(np.min(col)), "max": float(np.max(col))}
               for name, col in zip(self.covariate_names, self.covariates.T)}
        return {"rows": len(self), "events": self.n_events, "censored": len(self) - self.n_events,
                "covariates": cov}


def _parse_float(text, column, row):
    try:
        return float(text)
    except ValueError:
        raise DataError(f"column {column!r}: cannot parse {text!r} as a number", row=row) from None


def load_dataset(path, time_col: str, status_col: str | None = None,
                 covariate_cols: Sequence[str] = (), categorical: Sequence[str] = ()) -> SurvivalDataset:
    """Read a header-row CSV into a :class:`SurvivalDataset`.

    ``status_col`` holds 1 for an event and 0 for right censoring; when it is
    omitted every row is an event. Columns listed in ``categorical`` are
    expanded into 0/1 indicators for every level but the smallest, named
    ``column=level``.
    """
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames
        if not header:
            raise DataError(f"{path}: missing header row")
        header = [h.strip() for h in header]
        reader.fieldnames = header
        wanted = [time_col] + ([status_col] if status_col else []) + list(covariate_cols) + list(categorical)
        missing = [c for c in wanted if c not in header]
        if missing:
            raise DataError(f"unknown column(s) {', '.join(missing)}; available: {', '.join(header)}")
        rows = list(reader)
    if not rows:
        raise DataError(f"{path}: no data rows")

    times, events, numeric = [], [], []
    cats = {c: [] for c in categorical}
    for i, row in enumerate(rows, start=1):
        t = _parse_float(row[time_col], time_col, i)
        if not (t > 0 and math.isfinite(t)):
            raise DataError(f"time must be positive, got {row[time_col]!r}", row=i)
        if status_col:
            s = _parse_float(row[status_col], status_col, i)
            if s not in (0.0, 1.0):
                raise DataError(f"status must be 0 or 1, got {row[status_col]!r}", row=i)
            events.append(s == 1.0)
        else:
            events.append(True)
        times.append(t)
        numeric.append([_parse_float(row[c], c, i) for c in covariate_cols])
        for c in categorical:
            cats[c].append(row[c].strip())

    names = list(covariate_cols)
    blocks = [np.array(numeric, dtype=float).reshape(len(rows), len(covariate_cols))]
    for c in categorical:
        vals = cats[c]
        try:
            levels = sorted(set(vals), key=float)
        except ValueError:
            levels = sorted(set(vals))
        for lev in levels[1:]:
            names.append(f"{c}={lev}")
            blocks.append(np.array([[1.0 if v == lev else 0.0] for v in vals]))
    z = np.hstack(blocks) if blocks else None
    return SurvivalDataset(np.array(times), np.array(events), z, tuple(names), str(path))
