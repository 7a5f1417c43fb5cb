"""Dephasing-rate sweeps of the mixing time.

The mixing time scales like 1/gamma when dephasing is weak (coherences
must decay before the walk settles) and like gamma N^2 when dephasing is
strong (the walk degrades into slow classical diffusion), so T_mix(gamma)
is large in both tails with a unique interior optimum.  This module
sweeps log-spaced gamma grids, locates and optionally refines that
optimum, and fits the two tail slopes on a log-log scale.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass

import numpy as np

from .mixing import mixing_time
from .model import WalkConfig

DEFAULT_EPS = 0.01
DEFAULT_GAMMA_MIN = 1e-3
DEFAULT_GAMMA_MAX = 1e2
DEFAULT_GAMMA_POINTS = 25
# Dense-exponential sweeps grow as N^6; integrate instead above this size.
EXACT_METHOD_MAX_N = 20

_REFINE_RELATIVE_WIDTH = 1e-2
_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SweepPoint:
    gamma: float
    t_mix: float
    converged: bool


@dataclass(frozen=True)
class SweepResult:
    """Mixing times over a gamma grid, with the grid optimum.

    gamma_opt / t_opt are the argmin over converged points, or None when
    nothing converged.
    """

    n: int
    eps: float
    method: str
    mode: str
    points: tuple[SweepPoint, ...]
    gamma_opt: float | None
    t_opt: float | None


@dataclass(frozen=True)
class TransitionEntry:
    """One cycle size: its sweep and the fitted tail exponents."""

    n: int
    sweep: SweepResult
    small_gamma_slope: float | None
    large_gamma_slope: float | None


@dataclass(frozen=True)
class TransitionReport:
    eps: float
    entries: tuple[TransitionEntry, ...]


def default_gamma_grid(
    num: int = DEFAULT_GAMMA_POINTS,
    lo: float = DEFAULT_GAMMA_MIN,
    hi: float = DEFAULT_GAMMA_MAX,
) -> np.ndarray:
    """Log-spaced grid spanning both scaling regimes for N up to ~35."""
    if num < 2 or lo <= 0 or hi <= lo:
        raise ValueError(f"need num >= 2 and 0 < lo < hi, got num={num}, [{lo}, {hi}]")
    return np.logspace(math.log10(lo), math.log10(hi), num)


def default_method(n: int) -> str:
    return "exact" if n <= EXACT_METHOD_MAX_N else "s-literal"


def _evaluate_point(task: tuple[int, float, float, str, str]) -> SweepPoint:
    n, gamma, eps, method, mode = task
    try:
        result = mixing_time(WalkConfig(n=n, gamma=gamma), eps, method=method, mode=mode)
        return SweepPoint(gamma=gamma, t_mix=result.t_mix, converged=result.converged)
    except Exception:
        return SweepPoint(gamma=gamma, t_mix=float("nan"), converged=False)


def sweep_gamma(
    n: int,
    eps: float = DEFAULT_EPS,
    gammas: np.ndarray | None = None,
    method: str | None = None,
    mode: str = "sustained",
    jobs: int = 1,
) -> SweepResult:
    """Measure the mixing time at every gamma of a sorted positive grid.

    Per-point failures are recorded as converged=False rather than
    raised.  With jobs > 1 the points run in a process pool; collection
    order is fixed by the grid, so the result is identical to a
    sequential run.
    """
    if gammas is None:
        gammas = default_gamma_grid()
    gammas = np.asarray(gammas, dtype=float)
    if gammas.size == 0:
        raise ValueError("gamma grid is empty")
    if np.any(gammas <= 0) or np.any(np.diff(gammas) <= 0):
        raise ValueError("gamma grid must be positive and strictly increasing")
    if method is None:
        method = default_method(n)

    tasks = [(int(n), float(g), float(eps), method, mode) for g in gammas]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            points = tuple(pool.map(_evaluate_point, tasks))
    else:
        points = tuple(_evaluate_point(task) for task in tasks)

    gamma_opt = t_opt = None
    converged = [p for p in points if p.converged and math.isfinite(p.t_mix)]
    if converged:
        best = min(converged, key=lambda p: p.t_mix)
        gamma_opt, t_opt = best.gamma, best.t_mix
    return SweepResult(
        n=int(n), eps=float(eps), method=method, mode=mode,
        points=points, gamma_opt=gamma_opt, t_opt=t_opt,
    )


def optimal_gamma(result: SweepResult, refine: bool = True) -> tuple[float, float]:
    """Locate the mixing-time optimum of a sweep.

    Requires at least 3 converged points with an interior minimum;
    refuses a boundary minimum, which signals the grid missed one of the
    tails.  Refinement runs a golden-section search between the two grid
    neighbours of the argmin (the sweep curves are empirically unimodal
    there) down to relative interval width 1e-2, and never returns a
    worse value than the grid optimum.
    """
    converged = [p for p in result.points if p.converged and math.isfinite(p.t_mix)]
    if len(converged) < 3:
        raise ValueError(f"need at least 3 converged points, got {len(converged)}")
    arg = min(range(len(converged)), key=lambda i: converged[i].t_mix)
    if arg == 0 or arg == len(converged) - 1:
        raise ValueError(
            f"minimum at grid boundary (gamma={converged[arg].gamma:g}); widen the grid"
        )
    best_gamma, best_t = converged[arg].gamma, converged[arg].t_mix
    if not refine:
        return best_gamma, best_t

    def measure(gamma: float) -> float:
        point = _evaluate_point((result.n, gamma, result.eps, result.method, result.mode))
        return point.t_mix if point.converged and math.isfinite(point.t_mix) else math.inf

    lo, hi = converged[arg - 1].gamma, converged[arg + 1].gamma
    c = hi - _INVPHI * (hi - lo)
    d = lo + _INVPHI * (hi - lo)
    fc, fd = measure(c), measure(d)
    for gamma, t in ((c, fc), (d, fd)):
        if t < best_t:
            best_gamma, best_t = gamma, t
    while hi - lo > _REFINE_RELATIVE_WIDTH * 0.5 * (hi + lo):
        if fc <= fd:
            hi, d, fd = d, c, fc
            c = hi - _INVPHI * (hi - lo)
            fc = measure(c)
            if fc < best_t:
                best_gamma, best_t = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + _INVPHI * (hi - lo)
            fd = measure(d)
            if fd < best_t:
                best_gamma, best_t = d, fd
    return best_gamma, best_t


def tail_slopes(result: SweepResult, points_per_tail: int = 5) -> tuple[float | None, float | None]:
    """Log-log slopes of T_mix(gamma) over the smallest and largest gammas.

    Fits least-squares lines through the first and last points_per_tail
    converged points; returns None for a tail with fewer points.
    """
    converged = [p for p in result.points if p.converged and math.isfinite(p.t_mix)]

    def fit(chunk: list[SweepPoint]) -> float | None:
        if len(chunk) < points_per_tail:
            return None
        x = np.log10([p.gamma for p in chunk])
        y = np.log10([p.t_mix for p in chunk])
        return float(np.polyfit(x, y, 1)[0])

    return fit(converged[:points_per_tail]), fit(converged[-points_per_tail:])


def transition_report(
    ns: list[int],
    eps: float = DEFAULT_EPS,
    gammas: np.ndarray | None = None,
    method: str | None = None,
    jobs: int = 1,
) -> TransitionReport:
    """Sweep every requested cycle size and fit both tail exponents.

    The per-N curves exhibit the coherence-limited 1/gamma tail, the
    diffusive gamma tail, and the interior optimum in between.
    """
    entries = []
    for n in ns:
        result = sweep_gamma(n, eps=eps, gammas=gammas, method=method, jobs=jobs)
        small, large = tail_slopes(result)
        entries.append(
            TransitionEntry(
                n=int(n), sweep=result,
                small_gamma_slope=small, large_gamma_slope=large,
            )
        )
    return TransitionReport(eps=float(eps), entries=tuple(entries))
