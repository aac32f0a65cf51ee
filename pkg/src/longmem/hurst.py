"""Long-memory exponent estimation from fluctuation functions.

The exponent is the slope of a least-squares line through
(log10 s, log10 F(s)).  Fits default to scales up to 250 because beyond
roughly a trading year the scaling of rate series tends to bend and a
single line stops being meaningful; pass an explicit ``fit_range`` to
override.  ``detect_crossover`` searches for that bend: it compares the
single-line fit against every split of the log-log points into a left and
a right line and reports the split scale when the two-line model removes
enough of the squared error.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import AlignmentError, FitError, LongmemError
from .scaling import (
    DEFAULT_SCALE_CAP,
    DetrendMethod,
    FluctuationFunction,
    ScaleGrid,
    default_grid,
    fluctuation,
)
from .series import RatePanel, series_profile
from .util import ordered_map

__all__ = [
    "HurstEstimate",
    "CrossoverReport",
    "HurstDistribution",
    "classify",
    "fit_hurst",
    "detect_crossover",
    "hurst_distribution",
]

# Relative slack when comparing piecewise SSEs; exact fits differ only by
# rounding noise and the tie must go to the largest candidate scale.
_SSE_TIE_REL = 1e-9
# Below this the single line already fits to rounding noise and the
# two-line improvement ratio is meaningless.
_SSE_FLOOR = 1e-20


def classify(hurst: float, tol: float = 0.0) -> str:
    """Bucket an exponent: 0.5 means increments look uncorrelated."""
    if abs(hurst - 0.5) <= tol:
        return "uncorrelated"
    return "persistent" if hurst > 0.5 else "antipersistent"


@dataclass(frozen=True)
class HurstEstimate:
    """Slope of the log10-log10 fluctuation fit for one series."""

    series_id: str
    hurst: float
    intercept: float
    r_squared: float
    stderr: float
    fit_range: tuple[int, int]  # smallest and largest scale actually used
    n_points: int
    n_excluded: int  # in-range scales dropped because F was zero

    def classify(self, tol: float = 0.0) -> str:
        return classify(self.hurst, tol)

    def to_json_dict(self) -> dict:
        return {
            "series_id": self.series_id,
            "hurst": self.hurst,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "stderr": self.stderr,
            "fit_range": list(self.fit_range),
            "n_points": self.n_points,
            "n_excluded": self.n_excluded,
            "regime": self.classify(),
        }


def fit_hurst(
    f: FluctuationFunction,
    fit_range: tuple[int | None, int | None] | None = None,
) -> HurstEstimate:
    """Fit log10 F against log10 s over ``fit_range`` (inclusive).

    ``None`` bounds are open; the default range caps at 250.  Scales where
    F is exactly zero carry no information on a log axis and are excluded
    (their count is reported).  Fewer than three usable points is an error.
    """
    if fit_range is None:
        fit_range = (None, DEFAULT_SCALE_CAP)
    s_lo, s_hi = fit_range
    lo = 0 if s_lo is None else int(s_lo)
    hi = np.inf if s_hi is None else int(s_hi)
    if s_lo is not None and s_hi is not None and lo > hi:
        raise FitError(f"empty fit range ({lo}, {hi})")

    in_range = (f.scales >= lo) & (f.scales <= hi)
    usable = in_range & (f.values > 0.0)
    n_excluded = int(in_range.sum() - usable.sum())
    if int(usable.sum()) < 3:
        raise FitError(
            f"{f.series_id!r}: {int(usable.sum())} usable scales in "
            f"[{lo}, {s_hi if s_hi is not None else 'inf'}], need at least 3"
        )

    s_used = f.scales[usable]
    log_s = np.log10(s_used.astype(float))
    log_f = np.log10(f.values[usable])
    if np.ptp(log_s) == 0.0:
        raise FitError(f"{f.series_id!r}: all usable scales identical")

    res = stats.linregress(log_s, log_f)
    r2 = min(max(float(res.rvalue) ** 2, 0.0), 1.0)
    return HurstEstimate(
        series_id=f.series_id,
        hurst=float(res.slope),
        intercept=float(res.intercept),
        r_squared=r2,
        stderr=float(res.stderr),
        fit_range=(int(s_used[0]), int(s_used[-1])),
        n_points=int(usable.sum()),
        n_excluded=n_excluded,
    )


def _line_fit(x: np.ndarray, y: np.ndarray) -> tuple[float, float, float]:
    """Least-squares line; returns (slope, intercept, sse)."""
    xm = x.mean()
    ym = y.mean()
    dx = x - xm
    slope = float(np.dot(dx, y - ym) / np.dot(dx, dx))
    intercept = float(ym - slope * xm)
    resid = y - (intercept + slope * x)
    return slope, intercept, float(np.dot(resid, resid))


@dataclass(frozen=True)
class CrossoverReport:
    """Outcome of the two-line versus one-line comparison."""

    series_id: str
    breakpoint_scale: int | None
    slope_left: float
    slope_right: float
    sse_single: float
    sse_piecewise: float
    improvement_ratio: float

    def to_json_dict(self) -> dict:
        return {
            "series_id": self.series_id,
            "breakpoint_scale": self.breakpoint_scale,
            "slope_left": self.slope_left,
            "slope_right": self.slope_right,
            "sse_single": self.sse_single,
            "sse_piecewise": self.sse_piecewise,
            "improvement_ratio": self.improvement_ratio,
        }


def detect_crossover(
    f: FluctuationFunction,
    min_side_points: int = 3,
    improvement_threshold: float = 0.5,
) -> CrossoverReport:
    """Search every grid scale for a bend in the log-log curve.

    A candidate at scale s fits one line to the points with scale <= s and
    an independent line to the points above s.  The candidate with the
    smallest combined squared error wins; near-exact ties go to the largest
    scale so a kink sitting on a grid point is reported at that point.  The
    breakpoint is only reported when the two-line model removes at least
    ``improvement_threshold`` of the single-line squared error; a single
    line that already fits to rounding noise yields ratio 0 and no
    breakpoint.
    """
    if not 0.0 < improvement_threshold < 1.0:
        raise ValueError("improvement_threshold must be in (0, 1)")
    if min_side_points < 2:
        raise ValueError("need at least 2 points per side")

    usable = f.values > 0.0
    scales = f.scales[usable]
    n_pts = scales.size
    if n_pts < 2 * min_side_points + 1:
        raise FitError(
            f"{f.series_id!r}: {n_pts} usable scales, need at least "
            f"{2 * min_side_points + 1} for a crossover search"
        )
    log_s = np.log10(scales.astype(float))
    log_f = np.log10(f.values[usable])

    _, _, sse_single = _line_fit(log_s, log_f)

    best_k = -1
    best = (math.inf, 0.0, 0.0)  # sse, slope_left, slope_right
    for k in range(min_side_points - 1, n_pts - min_side_points):
        sl, _, sse_l = _line_fit(log_s[: k + 1], log_f[: k + 1])
        sr, _, sse_r = _line_fit(log_s[k + 1 :], log_f[k + 1 :])
        sse = sse_l + sse_r
        tie = max(_SSE_FLOOR, _SSE_TIE_REL * max(sse, best[0]))
        if sse < best[0] - tie or abs(sse - best[0]) <= tie:
            best = (sse, sl, sr)
            best_k = k

    sse_piecewise, slope_left, slope_right = best
    if sse_single <= _SSE_FLOOR:
        ratio = 0.0
    else:
        ratio = 1.0 - sse_piecewise / sse_single
    breakpoint = int(scales[best_k]) if ratio >= improvement_threshold else None
    return CrossoverReport(
        series_id=f.series_id,
        breakpoint_scale=breakpoint,
        slope_left=slope_left,
        slope_right=slope_right,
        sse_single=sse_single,
        sse_piecewise=sse_piecewise,
        improvement_ratio=ratio,
    )


@dataclass(frozen=True)
class HurstDistribution:
    """Per-series exponents for a panel plus their histogram."""

    estimates: tuple[HurstEstimate, ...]
    failures: tuple[tuple[str, str], ...]  # (series id, reason), sorted by id
    bin_width: float
    bin_edges: np.ndarray
    counts: np.ndarray

    @property
    def h_min(self) -> float:
        return min(e.hurst for e in self.estimates)

    @property
    def h_max(self) -> float:
        return max(e.hurst for e in self.estimates)

    @property
    def mode_bin(self) -> tuple[float, float]:
        i = int(np.argmax(self.counts))
        return (float(self.bin_edges[i]), float(self.bin_edges[i + 1]))

    def estimates_table(self) -> str:
        lines = ["id,hurst,stderr,r_squared,s_lo,s_hi"]
        for e in self.estimates:
            lines.append(
                f"{e.series_id},{e.hurst!r},{e.stderr!r},{e.r_squared!r},"
                f"{e.fit_range[0]},{e.fit_range[1]}"
            )
        return "\n".join(lines) + "\n"

    def histogram_table(self) -> str:
        lines = ["bin_low,bin_high,count"]
        for i, c in enumerate(self.counts):
            lines.append(
                f"{float(self.bin_edges[i])!r},{float(self.bin_edges[i + 1])!r},{int(c)}"
            )
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "estimates": [e.to_json_dict() for e in self.estimates],
            "failures": [{"series_id": i, "error": m} for i, m in self.failures],
            "bin_width": self.bin_width,
            "bin_edges": [float(v) for v in self.bin_edges],
            "counts": [int(c) for c in self.counts],
            "summary": {
                "h_min": self.h_min,
                "h_max": self.h_max,
                "mode_bin": list(self.mode_bin),
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True)


def _histogram(values: np.ndarray, width: float) -> tuple[np.ndarray, np.ndarray]:
    """Counts over bins of fixed width, edges snapped to multiples of width."""
    lo = math.floor(values.min() / width) * width
    n_bins = max(1, math.ceil((values.max() - lo) / width - 1e-9))
    edges = lo + width * np.arange(n_bins + 1)
    # Snapped edges can land exactly on a value; make the top edge inclusive.
    counts, _ = np.histogram(values, bins=edges)
    counts[-1] += int(np.sum(values == edges[-1]))
    return edges, counts


def hurst_distribution(
    panel: RatePanel,
    method: DetrendMethod,
    grid: ScaleGrid | None = None,
    fit_range: tuple[int | None, int | None] | None = None,
    bin_width: float = 0.02,
    input_kind: str = "levels",
    threads: int = 1,
) -> HurstDistribution:
    """Estimate the exponent of every panel member and bin the results.

    A member whose fit fails (too short for the grid, constant, zero
    fluctuations) is recorded under ``failures`` instead of aborting the
    rest.  The panel must be aligned so every member sees the same grid.
    """
    if not panel.is_aligned:
        raise AlignmentError("panel must be aligned before batch estimation")
    if bin_width <= 0.0:
        raise ValueError("bin_width must be positive")
    n_profile = len(panel.date_index) - (1 if input_kind == "levels" else 0)
    if grid is None:
        grid = default_grid(n_profile)

    def one(ts):
        try:
            prof = series_profile(ts, input_kind=input_kind)
            f = fluctuation(prof, grid, method)
            return ts.id, fit_hurst(f, fit_range), None
        except (LongmemError, ValueError) as exc:
            return ts.id, None, str(exc)

    members = sorted(panel.series, key=lambda t: t.id)
    results = ordered_map(one, members, threads=threads)

    estimates = tuple(e for _, e, _ in results if e is not None)
    failures = tuple((i, m) for i, _, m in results if m is not None)
    if not estimates:
        raise FitError("no panel member produced a usable fit")
    h = np.array([e.hurst for e in estimates])
    edges, counts = _histogram(h, bin_width)
    return HurstDistribution(
        estimates=estimates,
        failures=failures,
        bin_width=bin_width,
        bin_edges=edges,
        counts=counts,
    )
