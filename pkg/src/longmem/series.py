"""Rate-panel data model: ingestion, alignment, increments and profiles.

Panel files are comma-separated text tables.  The first column holds ISO
``YYYY-MM-DD`` dates under any header name; every remaining column is one
series, its header being the series id.  Cells are decimal-point numerics;
an empty cell marks a missing observation.  Dates are calendar labels only:
all scale arithmetic elsewhere in the package counts observations
(trading days).
"""

from __future__ import annotations

import csv
import datetime as dt
import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AlignmentError, SchemaError

__all__ = [
    "TimeSeries",
    "RatePanel",
    "IncrementSeries",
    "Profile",
    "load_panel",
    "panel_to_csv",
    "align",
    "increments",
    "profile",
    "profile_from_values",
    "series_profile",
]

# Telescoping check on the profile's final element, relative to sum(|X|).
_PROFILE_TOL = 1e-9


def _readonly(values) -> np.ndarray:
    arr = np.array(values, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """One dated observation vector (rate levels, percent units)."""

    id: str
    dates: tuple[dt.date, ...]
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "dates", tuple(self.dates))
        object.__setattr__(self, "values", _readonly(self.values))
        if self.values.ndim != 1:
            raise ValueError(f"series {self.id!r}: values must be 1-D")
        if len(self.dates) != len(self.values):
            raise ValueError(f"series {self.id!r}: {len(self.dates)} dates vs "
                             f"{len(self.values)} values")
        if len(self.values) < 2:
            raise ValueError(f"series {self.id!r}: length {len(self.values)} < 2")
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"series {self.id!r}: non-finite values")
        for a, b in zip(self.dates, self.dates[1:]):
            if a >= b:
                raise ValueError(f"series {self.id!r}: dates not strictly "
                                 f"increasing at {a}")

    def __len__(self) -> int:
        return len(self.values)

    def restrict(self, date_from: dt.date, date_to: dt.date) -> "TimeSeries":
        """Sub-series with dates in the inclusive window [date_from, date_to]."""
        keep = [i for i, d in enumerate(self.dates) if date_from <= d <= date_to]
        if len(keep) < 2:
            raise AlignmentError(
                f"series {self.id!r}: window {date_from}..{date_to} keeps "
                f"{len(keep)} observations (< 2)")
        return TimeSeries(self.id, tuple(self.dates[i] for i in keep),
                          self.values[keep])


@dataclass(frozen=True, eq=False)
class RatePanel:
    """A collection of series sharing one date index once aligned."""

    series: tuple[TimeSeries, ...]
    date_index: tuple[dt.date, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "series", tuple(self.series))
        if not self.series:
            raise ValueError("panel has no series")
        ids = [s.id for s in self.series]
        if len(set(ids)) != len(ids):
            dupes = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate series ids: {', '.join(dupes)}")
        if not self.date_index:
            union = sorted({d for s in self.series for d in s.dates})
            object.__setattr__(self, "date_index", tuple(union))
        else:
            object.__setattr__(self, "date_index", tuple(self.date_index))

    @property
    def ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.series)

    @property
    def is_aligned(self) -> bool:
        return all(s.dates == self.date_index for s in self.series)

    def __len__(self) -> int:
        return len(self.series)

    def member(self, series_id: str) -> TimeSeries:
        for s in self.series:
            if s.id == series_id:
                return s
        raise KeyError(f"no series {series_id!r} in panel")


@dataclass(frozen=True, eq=False)
class IncrementSeries:
    """Absolute one-step changes |R(i+1) - R(i)| of a parent series."""

    parent_id: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if len(self.values) < 1:
            raise ValueError(f"{self.parent_id!r}: empty increment series")
        if np.any(self.values < 0):
            raise ValueError(f"{self.parent_id!r}: negative increments")

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True, eq=False)
class Profile:
    """Cumulative sum of mean-centered increments; telescopes to 0."""

    parent_id: str
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "values", _readonly(self.values))
        if len(self.values) < 2:
            raise ValueError(f"{self.parent_id!r}: profile shorter than 2")
        tol = _PROFILE_TOL * max(np.sum(np.abs(np.diff(self.values))), 1.0)
        if abs(self.values[-1]) > tol:
            raise ValueError(f"{self.parent_id!r}: profile does not telescope "
                             f"to 0 (final value {self.values[-1]:g})")

    def __len__(self) -> int:
        return len(self.values)


def load_panel(path, *, delimiter: str = ",") -> RatePanel:
    """Read a delimited panel file into a (possibly unaligned) RatePanel.

    Each column becomes one TimeSeries holding only the dates where it has
    a value; gaps are resolved later by :func:`align`.  Rows whose date
    cell does not parse are dropped with a warning.

    Raises SchemaError for an unreadable file, missing value columns,
    duplicate column labels, duplicate dates, non-numeric cells, or any
    column with fewer than two observations.
    """
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh, delimiter=delimiter))
    except OSError as exc:
        raise SchemaError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise SchemaError(f"{path}: empty file")

    header = [h.strip() for h in rows[0]]
    if len(header) < 2:
        raise SchemaError(f"{path}: no value columns (header: {header})")
    labels = header[1:]
    if len(set(labels)) != len(labels):
        dupes = sorted({l for l in labels if labels.count(l) > 1})
        raise SchemaError(f"{path}: duplicate column labels: {', '.join(dupes)}")
    if any(not l for l in labels):
        raise SchemaError(f"{path}: empty column label in header")

    dates: list[dt.date] = []
    cells: list[list[float | None]] = [[] for _ in labels]
    n_bad_dates = 0
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not c.strip() for c in row):
            continue
        try:
            d = dt.date.fromisoformat(row[0].strip())
        except ValueError:
            n_bad_dates += 1
            continue
        dates.append(d)
        for j, label in enumerate(labels):
            raw = row[j + 1].strip() if j + 1 < len(row) else ""
            if raw == "":
                cells[j].append(None)
                continue
            try:
                cells[j].append(float(raw))
            except ValueError:
                raise SchemaError(f"{path}:{lineno}: column {label!r}: "
                                  f"non-numeric cell {raw!r}") from None
    if n_bad_dates:
        warnings.warn(f"{path}: dropped {n_bad_dates} rows with unparseable dates",
                      stacklevel=2)

    if len(set(dates)) != len(dates):
        seen, dupes = set(), set()
        for d in dates:
            (dupes if d in seen else seen).add(d)
        raise SchemaError(f"{path}: duplicate dates: "
                          + ", ".join(str(d) for d in sorted(dupes)))

    order = np.argsort(np.array([d.toordinal() for d in dates]))
    members = []
    for j, label in enumerate(labels):
        col_dates, col_values = [], []
        for i in order:
            if cells[j][i] is not None:
                col_dates.append(dates[i])
                col_values.append(cells[j][i])
        if len(col_values) < 2:
            raise SchemaError(f"{path}: column {label!r} has "
                              f"{len(col_values)} observations (< 2)")
        try:
            members.append(TimeSeries(label, tuple(col_dates), col_values))
        except ValueError as exc:
            raise SchemaError(f"{path}: column {label!r}: {exc}") from exc
    return RatePanel(tuple(members))


def panel_to_csv(panel: RatePanel) -> str:
    """Serialize a panel in the same schema :func:`load_panel` reads.

    Values print in shortest round-trip form, missing cells stay empty, so
    write-then-read reproduces the panel exactly.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["date", *panel.ids])
    lookup = [dict(zip(s.dates, s.values)) for s in panel.series]
    for d in panel.date_index:
        row = [d.isoformat()]
        for values_by_date in lookup:
            v = values_by_date.get(d)
            row.append("" if v is None else repr(float(v)))
        writer.writerow(row)
    return buf.getvalue()


def _forward_fill(ts: TimeSeries, index: tuple[dt.date, ...],
                  max_gap: int) -> TimeSeries:
    """Fill runs of <= max_gap missing index dates from the last observation.

    A fillable run at the series start has no prior value and raises;
    longer runs (including a long leading run) are left missing and fall
    to the subsequent intersection.
    """
    have = dict(zip(ts.dates, ts.values))
    out_dates: list[dt.date] = []
    out_values: list[float] = []
    run: list[dt.date] = []
    for d in index:
        if d in have:
            if run and len(run) <= max_gap:
                if not out_values:
                    raise AlignmentError(
                        f"series {ts.id!r}: gap of {len(run)} at series start "
                        f"cannot be forward-filled (no prior value)")
                out_dates.extend(run)
                out_values.extend([out_values[-1]] * len(run))
            run = []
            out_dates.append(d)
            out_values.append(have[d])
        else:
            run.append(d)
    if run and len(run) <= max_gap and out_values:
        out_dates.extend(run)
        out_values.extend([out_values[-1]] * len(run))
    order = sorted(range(len(out_dates)), key=lambda i: out_dates[i])
    return TimeSeries(ts.id, tuple(out_dates[i] for i in order),
                      [out_values[i] for i in order])


def align(panel: RatePanel, policy: str = "intersect",
          max_gap: int | None = None) -> RatePanel:
    """Bring every panel member onto one shared date index.

    ``intersect`` keeps only dates where every series has a value; it
    never fabricates data and is the default.  ``forward_fill`` first fills
    missing runs of length <= max_gap from the last observation, then
    intersects.
    """
    if policy not in ("intersect", "forward_fill"):
        raise ValueError(f"unknown alignment policy {policy!r}")
    members = list(panel.series)
    if policy == "forward_fill":
        if max_gap is None or max_gap < 1:
            raise ValueError("forward_fill requires max_gap >= 1")
        members = [_forward_fill(s, panel.date_index, max_gap) for s in members]

    shared = set(members[0].dates)
    for s in members[1:]:
        shared &= set(s.dates)
    if len(shared) < 2:
        raise AlignmentError(f"aligned panel would have {len(shared)} shared "
                             f"dates (< 2)")
    index = tuple(sorted(shared))
    out = []
    for s in members:
        keep = [i for i, d in enumerate(s.dates) if d in shared]
        out.append(TimeSeries(s.id, index, s.values[keep]))
    return RatePanel(tuple(out), index)


def increments(series: TimeSeries) -> IncrementSeries:
    """Absolute one-step fluctuation X(i) = |R(i+1) - R(i)|."""
    return IncrementSeries(series.id, np.abs(np.diff(series.values)))


def profile(x: IncrementSeries) -> Profile:
    """Mean-centered cumulative sum Y(t) of an increment series."""
    return profile_from_values(x.values, x.parent_id)


def profile_from_values(values, parent_id: str) -> Profile:
    """Profile of a raw (possibly signed) increment vector.

    This is the entry point for validation data whose values already are
    increments, e.g. synthetic noise panels.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or len(x) < 2:
        raise ValueError(f"{parent_id!r}: need a 1-D increment vector of "
                         f"length >= 2")
    centered = x - x.mean()
    # Second pass removes the rounding residual of the first; without it a
    # long constant series at large magnitude fails the telescoping check.
    centered -= centered.mean()
    return Profile(parent_id, np.cumsum(centered))


def series_profile(series: TimeSeries, input_kind: str = "levels") -> Profile:
    """Profile of a series under the chosen input interpretation.

    ``levels`` (default) applies the absolute-change transform first;
    ``increments`` treats the stored values as the increment series itself.
    """
    if input_kind == "levels":
        return profile(increments(series))
    if input_kind == "increments":
        return profile_from_values(series.values, series.id)
    raise ValueError(f"unknown input_kind {input_kind!r}")
