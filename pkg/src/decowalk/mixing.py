"""Mixing-time measurement against the uniform distribution.

The distance is total variation ||P - U|| = sum_j |P_j - 1/N|, range
[0, 2].  mixing_time scans a coarse grid of 2048 intervals over the
search horizon, then bisects the bracketing interval with fresh distance
evaluations down to relative width 1e-4.  Two crossing notions are
supported: `first-crossing` (the literal first time the distance dips
under eps) and `sustained` (the first time after which every sampled
distance stays under eps).  The oscillatory small-gamma regime dips
transiently below eps long before settling, so `sustained` is the
default and is what the sweep module uses.

Distances come from one of five evaluation methods: `exact` (spectral
propagator of the dense generator), `s-literal` / `rho` (fixed-step RK4
of either master equation), `perturbative` (shifted-mode reconstruction)
and `large-gamma-closed-form` (slow-branch diffusion).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import (
    DiagonalPropagator,
    TimeSeries,
    build_full_operator,
    effective_step,
    rk4_step_matrix,
    _as_state_vector,
    _diag_indices,
)
from .large_gamma import closed_form_a, large_gamma_bounds
from .model import WalkConfig
from .spectral import _PerturbativeKernel, small_gamma_mixing_bound

METHODS = ("exact", "s-literal", "rho", "perturbative", "large-gamma-closed-form")
MODES = ("first-crossing", "sustained")

GRID_INTERVALS = 2048
RELATIVE_BRACKET = 1e-4


@dataclass(frozen=True)
class MixingResult:
    """Measured eps-mixing time.

    When converged, the distance at t_mix is at or below eps and bracket
    is the final bisection width; in first-crossing mode the distance at
    t_mix - bracket still exceeds eps.  When not converged, t_mix equals
    the horizon.
    """

    t_mix: float
    converged: bool
    eps: float
    method: str
    mode: str
    horizon: float
    bracket: float


def uniform_distribution(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def total_variation(p: np.ndarray, q: np.ndarray) -> float:
    """sum_j |p_j - q_j|; symmetric, in [0, 2] for probability vectors."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape != q.shape:
        raise ValueError(f"length mismatch: {p.shape} vs {q.shape}")
    return float(np.abs(p - q).sum())


def average_distribution(series: TimeSeries, t_final: float) -> np.ndarray:
    """Trapezoid time average (1/T) integral of P(t) dt over [t_0, t_final].

    t_final must lie inside the sampled range; the final partial cell is
    handled by linear interpolation.
    """
    times = series.times
    dists = series.dists
    if not times[0] <= t_final <= times[-1]:
        raise ValueError(
            f"t_final={t_final} outside the sampled range [{times[0]}, {times[-1]}]"
        )
    if t_final == times[0]:
        return dists[0].copy()
    idx = int(np.searchsorted(times, t_final, side="right")) - 1
    integral = np.zeros(dists.shape[1])
    if idx >= 1:
        integral = np.trapezoid(dists[: idx + 1], x=times[: idx + 1], axis=0)
    if t_final > times[idx]:
        frac = (t_final - times[idx]) / (times[idx + 1] - times[idx])
        edge = (1.0 - frac) * dists[idx] + frac * dists[idx + 1]
        integral = integral + 0.5 * (dists[idx] + edge) * (t_final - times[idx])
    return integral / (t_final - times[0])


def default_horizon(config: WalkConfig, eps: float) -> float:
    """Search window guaranteed to contain the crossing in both regimes.

    10x the larger of the small-dephasing bound and the diffusive upper
    bound.  The undamped walk has no bound at all (it need not mix), so
    gamma = 0 falls back to a fixed window of 100 N.
    """
    if config.gamma == 0:
        return 100.0 * config.n
    e = min(eps, 1.9)  # keep the bound formulas inside their domain
    small = small_gamma_mixing_bound(config.n, config.gamma, e)
    large = large_gamma_bounds(config.n, config.gamma, e).t_upper
    return 10.0 * max(small, large)


class _ClosedFormDistance:
    """Distance curve of a directly evaluable distribution family."""

    def __init__(self, fn, n: int) -> None:
        self._fn = fn
        self._uniform = uniform_distribution(n)

    def grid(self, times: np.ndarray) -> np.ndarray:
        return np.array([self.at(float(t)) for t in times])

    def at(self, t: float) -> float:
        return total_variation(self._fn(t), self._uniform)


class _PerturbativeDistance:
    """Distance curve of the shifted-mode reconstruction (vectorised)."""

    def __init__(self, config: WalkConfig) -> None:
        self._kernel = _PerturbativeKernel(config)
        self._uniform = uniform_distribution(config.n)

    def grid(self, times: np.ndarray) -> np.ndarray:
        dists = self._kernel.distributions(times)
        return np.abs(dists - self._uniform).sum(axis=1)

    def at(self, t: float) -> float:
        return float(self.grid(np.array([t]))[0])


class _SpectralDistance:
    """Distance curve of the dense-generator spectral propagator."""

    def __init__(self, config: WalkConfig) -> None:
        self._prop = DiagonalPropagator(config, model="s-literal")
        self._uniform = uniform_distribution(config.n)

    def grid(self, times: np.ndarray) -> np.ndarray:
        dists = self._prop.distributions(times)
        return np.abs(dists - self._uniform).sum(axis=1)

    def at(self, t: float) -> float:
        return total_variation(self._prop.distribution(t), self._uniform)


class _SteppedDistance:
    """Distance curve of an RK4 trajectory on a uniform coarse grid.

    States are stored at every coarse sample; off-grid requests advance
    from the nearest stored state with a freshly sized step, so bisection
    refinements reuse the integration instead of restarting from t = 0.
    """

    def __init__(self, config: WalkConfig, model: str, times: np.ndarray, dt: float) -> None:
        self._op = build_full_operator(config, model).matrix
        self._gamma = config.gamma
        self._dt_request = dt
        self._diag = _diag_indices(config.n)
        self._uniform = uniform_distribution(config.n)
        self._times = times
        span = float(times[1] - times[0])
        dt_eff, per_cell = effective_step(span, dt, config.gamma)
        hop = np.linalg.matrix_power(rk4_step_matrix(self._op, dt_eff), per_cell)
        vec = _as_state_vector(config, model, None)
        self._states = np.empty((times.size, vec.size), dtype=vec.dtype)
        self._states[0] = vec
        for k in range(1, times.size):
            vec = hop @ vec
            self._states[k] = vec

    def grid(self, times: np.ndarray) -> np.ndarray:
        dists = np.real(self._states[:, self._diag])
        return np.abs(dists - self._uniform).sum(axis=1)

    def at(self, t: float) -> float:
        idx = int(np.searchsorted(self._times, t, side="right")) - 1
        idx = max(0, min(idx, self._times.size - 1))
        delta = float(t - self._times[idx])
        vec = self._states[idx]
        if delta > 1e-12 * max(1.0, abs(t)):
            dt_eff, steps = effective_step(delta, self._dt_request, self._gamma)
            hop = np.linalg.matrix_power(rk4_step_matrix(self._op, dt_eff), steps)
            vec = hop @ vec
        dist = np.real(vec[self._diag])
        return total_variation(dist, self._uniform)


def _make_distance(config: WalkConfig, method: str, times: np.ndarray, dt: float):
    if method == "exact":
        return _SpectralDistance(config)
    if method in ("s-literal", "rho"):
        return _SteppedDistance(config, method, times, dt)
    if method == "perturbative":
        return _PerturbativeDistance(config)
    if method == "large-gamma-closed-form":
        return _ClosedFormDistance(lambda t: closed_form_a(config, t), config.n)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def mixing_time(
    config: WalkConfig,
    eps: float,
    method: str = "exact",
    mode: str = "sustained",
    horizon: float | None = None,
    dt: float = 0.01,
) -> MixingResult:
    """Smallest time at which the walk is eps-close to uniform.

    first-crossing returns the first grid-then-bisection-refined time
    with distance <= eps; sustained returns the earliest time from which
    every later grid sample stays <= eps.  Reports converged=False with
    t_mix=horizon when the distance never qualifies.
    """
    if not 0 < eps <= 2:
        raise ValueError(f"eps must lie in (0, 2], got {eps}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    if horizon is None:
        horizon = default_horizon(config, eps)
    if not (horizon > 0 and math.isfinite(horizon)):
        raise ValueError(f"horizon must be positive and finite, got {horizon}")

    times = np.linspace(0.0, float(horizon), GRID_INTERVALS + 1)
    distance = _make_distance(config, method, times, dt)
    below = distance.grid(times) <= eps
    if mode == "sustained":
        below = np.logical_and.accumulate(below[::-1])[::-1]

    hits = np.flatnonzero(below)
    if hits.size == 0:
        return MixingResult(
            t_mix=float(horizon), converged=False, eps=eps, method=method,
            mode=mode, horizon=float(horizon), bracket=0.0,
        )
    first = int(hits[0])
    if first == 0:
        return MixingResult(
            t_mix=0.0, converged=True, eps=eps, method=method,
            mode=mode, horizon=float(horizon), bracket=0.0,
        )
    lo, hi = float(times[first - 1]), float(times[first])
    while hi - lo > RELATIVE_BRACKET * hi:
        mid = 0.5 * (lo + hi)
        if distance.at(mid) <= eps:
            hi = mid
        else:
            lo = mid
    return MixingResult(
        t_mix=hi, converged=True, eps=eps, method=method,
        mode=mode, horizon=float(horizon), bracket=hi - lo,
    )
