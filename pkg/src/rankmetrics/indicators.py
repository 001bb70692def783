"""Rank-index and top-percentile indicators.

The Rk-index of a unit is ``scale * geomean(1 / (offset + rank1_i))``
over its k most cited papers' world ranks, defaulting to k=10,
offset=20, scale=1000.  The offset flattens the large proportional jumps
between the very first ranks so the index tracks narrow top percentiles
linearly; the scale just keeps typical values in a readable range.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass

import numpy as np

from .rankcore import TopKRanks, WorldIndex
from .synthdist import REAL, CitationSeries, LognormalSpec

DEFAULT_K = 10
DEFAULT_OFFSET = 20.0
DEFAULT_SCALE = 1000.0

EMPIRICAL = "empirical"
ANALYTIC = "analytic"


class PercentileCutoffError(ValueError):
    """The requested top-x% slice of this world is empty."""


class OriginError(ValueError):
    """Operation undefined for this series origin."""


@dataclass(frozen=True)
class RkResult:
    """Rk-index of one unit plus the inputs it was computed from."""

    label: str | None
    rk: float
    k: int = DEFAULT_K
    offset: float = DEFAULT_OFFSET
    scale: float = DEFAULT_SCALE
    rank1s: tuple[int, ...] = ()


@dataclass(frozen=True)
class PercentileResult:
    """Papers of one unit among the world's top x% most cited.

    Empirical results count actual papers (integer); analytic results
    multiply the unit's lognormal tail probability above the world
    threshold by its size, so they are real-valued and can be below 1.
    """

    label: str | None
    x: float
    mode: str
    value: float
    threshold: float
    cutoff_rank: int = 0


def rk_from_rank1s(rank1s, offset: float = DEFAULT_OFFSET, scale: float = DEFAULT_SCALE) -> float:
    """scale * geometric mean of 1/(offset + rank1) in log space."""
    ranks = np.asarray(rank1s, dtype=np.float64)
    if ranks.size == 0:
        raise ValueError("need at least one rank")
    if np.any(ranks < 1):
        raise ValueError("ranks must be >= 1")
    if offset < 0:
        raise ValueError(f"offset must be >= 0, got {offset}")
    if scale <= 0:
        raise ValueError(f"scale must be > 0, got {scale}")
    return float(scale * np.exp(-np.mean(np.log(offset + ranks))))


def rk_index(
    top: TopKRanks, offset: float = DEFAULT_OFFSET, scale: float = DEFAULT_SCALE
) -> RkResult:
    """Rk-index from a unit's top-k global ranks."""
    rank1s = top.rank1s
    return RkResult(
        label=top.label,
        rk=rk_from_rank1s(rank1s, offset=offset, scale=scale),
        k=top.k,
        offset=offset,
        scale=scale,
        rank1s=rank1s,
    )


def percentile_cutoff(x: float, world_size: int) -> int:
    """1-based rank delimiting the top x% of `world_size` papers.

    floor(x/100 * W), with a few-ulp guard so exact boundaries such as
    0.1% of 280,000 resolve to 280 rather than 279.
    """
    if not 0 < x <= 100:
        raise ValueError(f"percentile must satisfy 0 < x <= 100, got {x}")
    if world_size < 1:
        raise ValueError("world must be non-empty")
    t = x * world_size / 100.0
    return int(math.floor(t * (1.0 + 4.0 * sys.float_info.epsilon)))


def empirical_ptop(world: WorldIndex, label: str, x: float) -> PercentileResult:
    """Count a unit's papers holding world rank <= floor(x/100 * W)."""
    cutoff = percentile_cutoff(x, world.size)
    pos = world.positions(label)
    count = int(np.count_nonzero(world.rank1[pos] <= cutoff)) if cutoff else 0
    threshold = world.value_at_rank(cutoff) if cutoff else math.inf
    return PercentileResult(
        label=label, x=x, mode=EMPIRICAL, value=count, threshold=threshold, cutoff_rank=cutoff
    )


def lognormal_survival(mu: float, sigma: float, c: float) -> float:
    """P(X > c) for ln X ~ Normal(mu, sigma^2)."""
    if c <= 0:
        raise ValueError(f"citation value must be > 0, got {c}")
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    z = (math.log(c) - mu) / sigma
    return 0.5 * math.erfc(z / math.sqrt(2.0))


def analytic_ptop(spec: LognormalSpec, world: WorldIndex, x: float) -> PercentileResult:
    """Expected top-x% paper count of a series against an observed world.

    The threshold is the world's citation value at the cutoff rank; the
    value is N times the series' tail probability above it, so it is
    generally non-integer and may be below 1.
    """
    cutoff = percentile_cutoff(x, world.size)
    if cutoff < 1:
        raise PercentileCutoffError(
            f"top {x}% of a world of {world.size} papers holds no entries"
        )
    threshold = world.value_at_rank(cutoff)
    value = spec.n * lognormal_survival(spec.mu, spec.sigma, threshold)
    return PercentileResult(
        label=spec.label, x=x, mode=ANALYTIC, value=value, threshold=threshold, cutoff_rank=cutoff
    )


def count_uncited(series: CitationSeries) -> int:
    """Number of zero-citation papers (defined for real integer counts only)."""
    if series.origin != REAL:
        raise OriginError("uncited counting is undefined for synthetic series")
    return int(np.count_nonzero(series.values == 0))


def fractional_rk(rk: RkResult, local_share: float) -> float:
    """Scale an Rk-index by a unit's share of the collaboration.

    Experimental: the share semantics (addresses vs authors, averaging)
    are left to the caller.  Outputs using it should be marked as such.
    """
    if not 0 < local_share <= 1:
        raise ValueError(f"local_share must be in (0, 1], got {local_share}")
    return rk.rk * local_share
