"""Ground-truth generators: exact fractional Gaussian noise and block panels.

The fGn sampler embeds the target autocovariance

    gamma(k) = (sigma^2 / 2) * (|k+1|^{2H} - 2|k|^{2H} + |k-1|^{2H})

in a circulant matrix of power-of-two size and draws through its FFT
eigendecomposition, which reproduces the covariance exactly.  Should the
embedding produce genuinely negative eigenvalues, generation falls back to
the (also exact, O(n^2)) conditional recursion sampler rather than
approximating; eigenvalues negative only at rounding level are clamped
to zero.

Generated panels hold noise values, i.e. the series values are already
increments.  Feed them to the estimators with ``input_kind="increments"``.
"""

from __future__ import annotations

import datetime as dt
from dataclasses import dataclass

import numpy as np

from .series import RatePanel, TimeSeries

__all__ = [
    "FgnSpec",
    "BlockSpec",
    "autocovariance",
    "generate_fgn",
    "generate_blocks",
    "trading_dates",
]

# Relative level below which a negative embedding eigenvalue is treated as
# rounding noise of an exact zero.
_EIGEN_TOL = 1e-12


def autocovariance(k, hurst: float, sigma: float = 1.0):
    """Analytic fGn autocovariance gamma(k) at integer lag(s) k."""
    k = np.abs(np.asarray(k, dtype=float))
    two_h = 2.0 * hurst
    return 0.5 * sigma ** 2 * (np.abs(k + 1) ** two_h
                               - 2.0 * k ** two_h
                               + np.abs(k - 1) ** two_h)


@dataclass(frozen=True)
class FgnSpec:
    """Target length, Hurst exponent, RNG seed and scale of an fGn draw."""

    n: int
    hurst: float
    seed: int = 0
    sigma: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.n < 16:
            raise ValueError(f"n must be >= 16, got {self.n}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


@dataclass(frozen=True)
class BlockSpec:
    """Block-correlated ensemble: common factor per block plus noise."""

    n_blocks: int
    block_size: int
    common_weight: float
    hurst: float
    n: int
    seed: int = 0
    sigma: float = 1.0

    def __post_init__(self):
        if self.n_blocks < 2:
            raise ValueError(f"n_blocks must be >= 2, got {self.n_blocks}")
        if self.block_size < 2:
            raise ValueError(f"block_size must be >= 2, got {self.block_size}")
        if not 0.0 <= self.common_weight <= 1.0:
            raise ValueError(f"common_weight must lie in [0, 1], got "
                             f"{self.common_weight}")
        if not 0.0 < self.hurst < 1.0:
            raise ValueError(f"hurst must lie in (0, 1), got {self.hurst}")
        if self.n < 16:
            raise ValueError(f"n must be >= 16, got {self.n}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")


def trading_dates(n: int, start: dt.date = dt.date(2000, 1, 3)) -> tuple[dt.date, ...]:
    """n consecutive weekdays starting at (or after) ``start``."""
    d64 = np.busday_offset(np.datetime64(start, "D"), np.arange(n),
                           roll="forward")
    return tuple(d64.astype("datetime64[D]").tolist())


def _fgn_circulant(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray | None:
    """Exact unit-variance fGn via circulant embedding; None if indefinite."""
    m = 1 << int(np.ceil(np.log2(n)))
    lags = np.arange(m + 1)
    row = np.concatenate([autocovariance(lags, hurst),
                          autocovariance(lags[1:m][::-1], hurst)])
    eigvals = np.fft.fft(row).real
    floor = -_EIGEN_TOL * eigvals.max()
    if eigvals.min() < floor:
        return None
    eigvals = np.maximum(eigvals, 0.0)

    two_m = 2 * m
    z = rng.standard_normal(two_m)
    w = np.zeros(two_m, dtype=complex)
    w[0] = np.sqrt(eigvals[0] / two_m) * z[0]
    w[m] = np.sqrt(eigvals[m] / two_m) * z[1]
    half = np.sqrt(eigvals[1:m] / (2.0 * two_m))
    w[1:m] = half * (z[2:m + 1] + 1j * z[m + 1:two_m])
    w[m + 1:] = np.conj(w[1:m][::-1])
    return np.fft.fft(w)[:n].real


def _fgn_hosking(n: int, hurst: float, rng: np.random.Generator) -> np.ndarray:
    """Exact unit-variance fGn by the conditional-distribution recursion."""
    gamma = autocovariance(np.arange(n), hurst)
    out = np.empty(n)
    out[0] = rng.standard_normal()
    phi = np.empty(n)
    prev = np.empty(n)
    variance = 1.0
    length = 0
    for i in range(1, n):
        if length == 0:
            phi[0] = gamma[1]
        else:
            reflection = (gamma[length + 1]
                          - phi[:length] @ gamma[length:0:-1]) / variance
            prev[:length] = phi[:length]
            phi[:length] = prev[:length] - reflection * prev[:length][::-1]
            phi[length] = reflection
        length += 1
        variance *= 1.0 - phi[length - 1] ** 2
        mean = phi[:length] @ out[i - 1::-1][:length]
        out[i] = mean + np.sqrt(variance) * rng.standard_normal()
    return out


def _fgn_values(n: int, hurst: float, sigma: float,
                rng: np.random.Generator, method: str = "auto") -> np.ndarray:
    if method not in ("auto", "circulant", "hosking"):
        raise ValueError(f"unknown generation method {method!r}")
    values = None
    if method in ("auto", "circulant"):
        values = _fgn_circulant(n, hurst, rng)
        if values is None and method == "circulant":
            raise ValueError("circulant embedding is not nonnegative definite "
                             "for this spec; use method='hosking'")
    if values is None:
        values = _fgn_hosking(n, hurst, rng)
    return sigma * values


def generate_fgn(spec: FgnSpec, method: str = "auto") -> TimeSeries:
    """Stationary Gaussian series with exact fGn covariance, seed-determined.

    The sample is labelled with synthetic weekday dates; its values are the
    noise itself (increments), not integrated levels.
    """
    rng = np.random.default_rng(spec.seed)
    values = _fgn_values(spec.n, spec.hurst, spec.sigma, rng, method)
    return TimeSeries(f"fgn-h{spec.hurst:g}-seed{spec.seed}",
                      trading_dates(spec.n), values)


def generate_blocks(spec: BlockSpec, method: str = "auto") -> RatePanel:
    """Aligned panel of n_blocks x block_size mixed-factor fGn members.

    Member values are common_weight * block_factor +
    (1 - common_weight) * own_noise, every component drawn at the same
    Hurst exponent.  Ids follow the "b<block>:m<member>" pattern.
    """
    rng = np.random.default_rng(spec.seed)
    dates = trading_dates(spec.n)
    members = []
    for b in range(1, spec.n_blocks + 1):
        common = _fgn_values(spec.n, spec.hurst, spec.sigma, rng, method)
        for m in range(1, spec.block_size + 1):
            own = _fgn_values(spec.n, spec.hurst, spec.sigma, rng, method)
            values = (spec.common_weight * common
                      + (1.0 - spec.common_weight) * own)
            members.append(TimeSeries(f"b{b}:m{m}", dates, values))
    index = dates
    return RatePanel(tuple(members), index)
