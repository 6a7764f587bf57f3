"""Bootstrap confidence bands for power-law fits.

Two resampling schemes are provided.  The hierarchical scheme draws the M
scale groups with replacement and then, within each drawn group, that
group's own number of records with replacement; it captures between-scale
variance (e.g. pretraining seeds) on top of per-run variance and yields
noticeably more conservative intervals when between-scale variance
dominates.  The naive scheme ignores the group structure and draws all
M*T pooled points with replacement.

Every replicate consumes its own counter-based random substream derived
from (rng_seed, replicate index), so results are bit-identical however the
replicates are scheduled.  Replicates whose resample collapses to fewer
than two distinct scales are redrawn from the same substream; a replicate
that stays degenerate for ``max_redraws`` consecutive draws aborts the run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DataError, DegenerateDataError
from .powerlaw import _ols_log
from .records import RunSet
from .rng import substream


@dataclass(frozen=True)
class BootstrapConfig:
    """Replicate count, percentile pair, resampling mode, and seed."""

    n_replicates: int = 1000
    lo_pct: float = 2.5
    hi_pct: float = 97.5
    mode: str = "hierarchical"
    rng_seed: int = 0
    max_redraws: int = 100

    def __post_init__(self) -> None:
        if self.n_replicates < 1:
            raise DataError(f"n_replicates must be >= 1, got {self.n_replicates}")
        if not (0.0 <= self.lo_pct < self.hi_pct <= 100.0):
            raise DataError(
                f"percentiles must satisfy 0 <= lo < hi <= 100, got ({self.lo_pct}, {self.hi_pct})"
            )
        if self.mode not in ("hierarchical", "naive"):
            raise DataError(f"unknown bootstrap mode {self.mode!r}")
        if self.max_redraws < 1:
            raise DataError(f"max_redraws must be >= 1, got {self.max_redraws}")


@dataclass(frozen=True)
class BootstrapBand:
    """Percentile intervals for the slope, intercept, and fitted line."""

    slope_ci: tuple[float, float]
    intercept_ci: tuple[float, float]
    point_band: tuple[tuple[float, float, float], ...]
    replicates_used: int
    replicate_slopes: tuple[float, ...]
    replicate_intercepts: tuple[float, ...]
    lo_pct: float
    hi_pct: float

    def interval_at(self, x: float) -> tuple[float, float]:
        """Percentile interval of the per-replicate predictions at x."""
        if not (x > 0 and math.isfinite(x)):
            raise DataError("x must be positive and finite")
        slopes = np.asarray(self.replicate_slopes)
        intercepts = np.asarray(self.replicate_intercepts)
        preds = np.exp(intercepts + slopes * math.log(x))
        return (
            float(np.percentile(preds, self.lo_pct)),
            float(np.percentile(preds, self.hi_pct)),
        )


def percentile(samples: Sequence[float], p: float) -> float:
    """Percentile with linear interpolation at rank p/100*(n-1)."""
    arr = np.asarray(list(samples), dtype=float)
    if arr.size == 0:
        raise DataError("percentile of an empty sample is undefined")
    if not 0.0 <= p <= 100.0:
        raise DataError(f"percentile must be in [0, 100], got {p}")
    return float(np.percentile(arr, p))


class _Pool:
    """Log-space arrays and group index structure for one run set."""

    def __init__(self, runset: RunSet):
        params = np.array([r.scale.params for r in runset.records], dtype=float)
        values = np.array([r.value for r in runset.records], dtype=float)
        self.u = np.log(params)
        self.v = np.log(values)
        self.params = params
        self.groups = [np.asarray(g, dtype=np.intp) for g in runset.scale_groups()]
        self.group_params = np.array([s.params for s in runset.scales], dtype=float)
        self.n_groups = len(self.groups)
        sizes = {g.size for g in self.groups}
        # Uniform group sizes admit a single vectorized within-group draw.
        self.matrix = np.vstack(self.groups) if len(sizes) == 1 else None


def _draw_hierarchical(pool: _Pool, rng: np.random.Generator):
    m = pool.n_groups
    g = rng.integers(0, m, size=m)
    if np.unique(pool.group_params[g]).size < 2:
        return None
    if pool.matrix is not None:
        t = pool.matrix.shape[1]
        within = rng.integers(0, t, size=(m, t))
        return np.take_along_axis(pool.matrix[g], within, axis=1).ravel()
    parts = []
    for k in g:
        members = pool.groups[k]
        parts.append(members[rng.integers(0, members.size, size=members.size)])
    return np.concatenate(parts)


def _draw_naive(pool: _Pool, rng: np.random.Generator):
    n = pool.u.size
    idx = rng.integers(0, n, size=n)
    if np.unique(pool.params[idx]).size < 2:
        return None
    return idx


def _replicate_coeffs(pool: _Pool, cfg: BootstrapConfig, index: int) -> tuple[float, float]:
    """(slope, intercept) of replicate ``index``, redrawing degenerate samples."""
    rng = substream(cfg.rng_seed, index)
    draw = _draw_hierarchical if cfg.mode == "hierarchical" else _draw_naive
    for _ in range(cfg.max_redraws):
        idx = draw(pool, rng)
        if idx is not None:
            return _ols_log(pool.u[idx], pool.v[idx])
    raise DegenerateDataError(
        f"replicate {index}: no resample with 2 distinct scales after "
        f"{cfg.max_redraws} consecutive redraws"
    )


def default_grid(runset: RunSet, extra: Sequence[float] = (), n_points: int = 25) -> tuple[float, ...]:
    """Geometric x-grid covering the data range and any extrapolation targets."""
    xs = [float(s.params) for s in runset.scales]
    lo = min(xs)
    hi = max(xs + [float(e) for e in extra])
    pts = set(float(p) for p in np.geomspace(lo, hi, n_points))
    pts.update(float(e) for e in extra)
    pts.update((lo, hi))
    return tuple(sorted(pts))


def _run(runset: RunSet, cfg: BootstrapConfig, grid: Sequence[float] | None) -> BootstrapBand:
    pool = _Pool(runset)
    if grid is None:
        grid_t = default_grid(runset)
    else:
        grid_t = tuple(float(g) for g in grid)
        if not grid_t or any(not (g > 0 and math.isfinite(g)) for g in grid_t):
            raise DataError("grid values must be positive and finite")

    b = cfg.n_replicates
    slopes = np.empty(b)
    intercepts = np.empty(b)
    for r in range(b):
        slopes[r], intercepts[r] = _replicate_coeffs(pool, cfg, r)

    log_grid = np.log(np.asarray(grid_t))
    preds = np.exp(intercepts[:, None] + slopes[:, None] * log_grid[None, :])
    lo_band = np.percentile(preds, cfg.lo_pct, axis=0)
    hi_band = np.percentile(preds, cfg.hi_pct, axis=0)

    return BootstrapBand(
        slope_ci=(percentile(slopes, cfg.lo_pct), percentile(slopes, cfg.hi_pct)),
        intercept_ci=(percentile(intercepts, cfg.lo_pct), percentile(intercepts, cfg.hi_pct)),
        point_band=tuple(
            (x, float(lo), float(hi)) for x, lo, hi in zip(grid_t, lo_band, hi_band)
        ),
        replicates_used=b,
        replicate_slopes=tuple(float(a) for a in slopes),
        replicate_intercepts=tuple(float(c) for c in intercepts),
        lo_pct=cfg.lo_pct,
        hi_pct=cfg.hi_pct,
    )


def hierarchical_bootstrap(
    runset: RunSet, cfg: BootstrapConfig, grid: Sequence[float] | None = None
) -> BootstrapBand:
    """Scale-then-run resampling (see module docstring for the scheme)."""
    if cfg.mode != "hierarchical":
        raise DataError(f"config mode is {cfg.mode!r}, expected 'hierarchical'")
    return _run(runset, cfg, grid)


def naive_bootstrap(
    runset: RunSet, cfg: BootstrapConfig, grid: Sequence[float] | None = None
) -> BootstrapBand:
    """Pooled resampling of all points, ignoring the scale structure."""
    if cfg.mode != "naive":
        raise DataError(f"config mode is {cfg.mode!r}, expected 'naive'")
    return _run(runset, cfg, grid)


def bootstrap_band(
    runset: RunSet, cfg: BootstrapConfig, grid: Sequence[float] | None = None
) -> BootstrapBand:
    """Dispatch to the resampling scheme named by ``cfg.mode``."""
    return _run(runset, cfg, grid)
