"""Time evolution of the monitored-walk master equations.

Both pictures are linear: flattening the N x N state row-major turns
each right-hand side into a fixed N^2 x N^2 generator, and trajectories
are computed three ways,

* a dense matrix exponential of the generator (the oracle),
* classical fixed-step fourth-order Runge-Kutta,
* an eigendecomposition propagator for cheap evaluation at many times.

For a linear autonomous system the classical RK4 update is exactly the
degree-4 Taylor polynomial of the step map,

    v  ->  (I + hG + (hG)^2/2 + (hG)^3/6 + (hG)^4/24) v,

so the integrator precomputes that polynomial once and applies it per
step.  This is algebraically identical to running the four-stage scheme
and much cheaper when millions of steps are needed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .model import (
    WalkConfig,
    initial_density,
    initial_state,
    rho_rhs,
    s_rhs,
)

MODELS = ("s-literal", "rho")

# Dense exponentials of the N^2 x N^2 generator stay cheap up to here.
MAX_DENSE_N = 64


class IntegrationError(RuntimeError):
    """Trajectory left the trusted regime (non-finite values or trace drift)."""


@dataclass(frozen=True)
class TimeGrid:
    """Fixed-step integration window with subsampled output.

    dt is a request; the integrator may shrink it to respect stiffness
    (see integrate).  Samples are kept every sample_stride accepted
    steps, plus the final time.
    """

    t_end: float
    dt: float = 0.01
    sample_stride: int = 10
    t_start: float = 0.0

    def __post_init__(self) -> None:
        if not (0 <= self.t_start < self.t_end):
            raise ValueError(
                f"need 0 <= t_start < t_end, got [{self.t_start}, {self.t_end}]"
            )
        if not (0 < self.dt <= self.t_end - self.t_start):
            raise ValueError(f"dt must lie in (0, t_end - t_start], got {self.dt}")
        if int(self.sample_stride) != self.sample_stride or self.sample_stride < 1:
            raise ValueError(f"sample_stride must be a positive integer, got {self.sample_stride}")


@dataclass(frozen=True)
class FullOperator:
    """Generator matrix acting on the flattened state.

    Row index is the output entry (mu, nu) flattened as mu*n + nu, column
    index the input entry (alpha, beta) flattened the same way.
    """

    matrix: np.ndarray
    n: int
    model: str


@dataclass
class TimeSeries:
    """Sampled trajectory: times, vertex distributions, optional matrices."""

    times: np.ndarray
    dists: np.ndarray
    config: WalkConfig
    model: str
    dt_used: float
    states: list[np.ndarray] | None = None


def _check_model(model: str) -> None:
    if model not in MODELS:
        raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def build_full_operator(config: WalkConfig, model: str = "s-literal") -> FullOperator:
    """Assemble the dense generator of the chosen picture.

    Each row holds the four cyclic-neighbour couplings of the stencil
    plus the damping -gamma on off-diagonal entries (mu != nu).  Applying
    the matrix to a flattened state reproduces s_rhs or rho_rhs entrywise.
    """
    _check_model(model)
    n = config.n
    if model == "s-literal":
        dtype = float
        # coefficients of S[mu, nu+1], S[mu+1, nu], S[mu-1, nu], S[mu, nu-1]
        coeffs = (0.25, 0.25, -0.25, -0.25)
    else:
        dtype = complex
        coeffs = (0.25j, -0.25j, -0.25j, 0.25j)
    mat = np.zeros((n * n, n * n), dtype=dtype)
    for mu in range(n):
        for nu in range(n):
            row = mu * n + nu
            cols = (
                mu * n + (nu + 1) % n,
                ((mu + 1) % n) * n + nu,
                ((mu - 1) % n) * n + nu,
                mu * n + (nu - 1) % n,
            )
            for col, c in zip(cols, coeffs):
                mat[row, col] += c
            if mu != nu:
                mat[row, row] -= config.gamma
    return FullOperator(matrix=mat, n=n, model=model)


def _default_initial(config: WalkConfig, model: str) -> np.ndarray:
    return initial_state(config) if model == "s-literal" else initial_density(config)


def _as_state_vector(config: WalkConfig, model: str, initial: np.ndarray | None) -> np.ndarray:
    if initial is None:
        initial = _default_initial(config, model)
    state = np.asarray(initial)
    if state.shape != (config.n, config.n):
        raise ValueError(f"initial state must be {config.n}x{config.n}, got {state.shape}")
    if model == "s-literal":
        if np.iscomplexobj(state):
            if np.abs(state.imag).max() > 0:
                raise ValueError("literal-S states are real matrices")
            state = state.real
        return state.astype(float).ravel().copy()
    return state.astype(complex).ravel().copy()


def exact_evolve(
    config: WalkConfig,
    t: float,
    model: str = "s-literal",
    initial: np.ndarray | None = None,
) -> np.ndarray:
    """Propagate to time t with a dense matrix exponential.

    Scaling-and-squaring Pade exponential of t times the generator; this
    is the oracle every integrator is measured against.  Guarded to
    n <= MAX_DENSE_N, where the N^2 x N^2 exponential is still cheap.
    """
    _check_model(model)
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    if config.n > MAX_DENSE_N:
        raise ValueError(f"dense exponential guarded to n <= {MAX_DENSE_N}, got {config.n}")
    op = build_full_operator(config, model)
    vec = _as_state_vector(config, model, initial)
    out = scipy.linalg.expm(op.matrix * t) @ vec
    return out.reshape(config.n, config.n)


def rk4_step_matrix(generator: np.ndarray, dt: float) -> np.ndarray:
    """One-step transfer matrix of classical RK4 for a linear system.

    Horner evaluation of I + A + A^2/2 + A^3/6 + A^4/24 with A = dt*G.
    """
    a = dt * generator
    eye = np.eye(a.shape[0], dtype=a.dtype)
    poly = eye + a / 4.0
    poly = eye + (a / 3.0) @ poly
    poly = eye + (a / 2.0) @ poly
    return eye + a @ poly


def effective_step(span: float, dt_request: float, gamma: float) -> tuple[float, int]:
    """Largest step <= request that also respects the damping stiffness cap.

    The off-diagonal damping rate gamma sets the fastest time scale, so
    the step is capped at 0.1 / max(gamma, 1).  Returns (dt, step count)
    with dt dividing the span exactly.
    """
    cap = 0.1 / max(gamma, 1.0)
    base = min(dt_request, cap)
    n_steps = max(1, math.ceil(span / base - 1e-9))
    return span / n_steps, n_steps


def _diag_indices(n: int) -> np.ndarray:
    idx = np.arange(n)
    return idx * n + idx


def integrate(
    config: WalkConfig,
    grid: TimeGrid,
    model: str = "s-literal",
    initial: np.ndarray | None = None,
    keep_states: bool = False,
) -> TimeSeries:
    """Fixed-step RK4 trajectory, sampled every grid.sample_stride steps.

    The effective step is min(grid.dt, 0.1/max(gamma, 1)) rounded so it
    divides the window exactly.  Every sample is checked for finiteness
    and for conservation of the diagonal sum (within 1e-10 of its initial
    value); violations raise IntegrationError.
    """
    _check_model(model)
    op = build_full_operator(config, model)
    vec = _as_state_vector(config, model, initial)
    n = config.n
    diag = _diag_indices(n)
    trace0 = float(np.real(vec[diag].sum()))
    trace_tol = 1e-10 * max(1.0, abs(trace0))

    span = grid.t_end - grid.t_start
    dt_eff, n_steps = effective_step(span, grid.dt, config.gamma)
    step = rk4_step_matrix(op.matrix, dt_eff)
    stride = int(grid.sample_stride)
    step_stride = np.linalg.matrix_power(step, stride)

    sample_steps = list(range(0, n_steps + 1, stride))
    if sample_steps[-1] != n_steps:
        sample_steps.append(n_steps)

    times = grid.t_start + dt_eff * np.asarray(sample_steps, dtype=float)
    times[-1] = grid.t_end
    dists = np.empty((len(sample_steps), n))
    states: list[np.ndarray] | None = [] if keep_states else None

    def record(pos: int, v: np.ndarray) -> None:
        if not np.all(np.isfinite(v.view(float))):
            raise IntegrationError(f"non-finite state at t={times[pos]:g}; reduce dt")
        dsum = float(np.real(v[diag].sum()))
        if abs(dsum - trace0) > trace_tol:
            raise IntegrationError(
                f"diagonal sum drifted to {dsum!r} at t={times[pos]:g} (started at {trace0!r})"
            )
        dists[pos] = np.real(v[diag])
        if states is not None:
            states.append(v.reshape(n, n).copy())

    record(0, vec)
    done = 0
    for pos, target in enumerate(sample_steps[1:], start=1):
        hop = target - done
        if hop == stride:
            vec = step_stride @ vec
        else:
            vec = np.linalg.matrix_power(step, hop) @ vec
        done = target
        record(pos, vec)

    return TimeSeries(
        times=times,
        dists=dists,
        config=config,
        model=model,
        dt_used=dt_eff,
        states=states,
    )


class DiagonalPropagator:
    """Vertex distribution of the dense-generator solution at arbitrary times.

    Diagonalises the generator once, so each evaluation is a single small
    matrix-vector product.  The generator is not normal; the eigenbasis
    is trusted only after an explicit residual and conditioning check,
    otherwise evaluation falls back to stepped matrix exponentials.
    """

    _RESIDUAL_TOL = 1e-9
    _COND_TOL = 1e8

    def __init__(
        self,
        config: WalkConfig,
        model: str = "s-literal",
        initial: np.ndarray | None = None,
    ) -> None:
        _check_model(model)
        self.config = config
        self.model = model
        self.n = config.n
        self._generator = build_full_operator(config, model).matrix
        self._vec0 = _as_state_vector(config, model, initial)
        self._diag = _diag_indices(config.n)
        self.mode = "expm"
        modes, basis = np.linalg.eig(self._generator)
        residual = np.linalg.norm(self._generator @ basis - basis * modes)
        residual /= max(1.0, np.linalg.norm(self._generator))
        cond = np.linalg.cond(basis)
        if np.isfinite(cond) and cond <= self._COND_TOL and residual <= self._RESIDUAL_TOL:
            coeff = np.linalg.solve(basis, self._vec0.astype(complex))
            self._modes = modes
            self._weights = basis[self._diag, :] * coeff[None, :]
            self.mode = "eig"

    def distribution(self, t: float) -> np.ndarray:
        if t < 0:
            raise ValueError(f"t must be >= 0, got {t}")
        if self.mode == "eig":
            return np.real(self._weights @ np.exp(self._modes * t))
        vec = scipy.linalg.expm(self._generator * t) @ self._vec0
        return np.real(vec[self._diag])

    def distributions(self, times: np.ndarray) -> np.ndarray:
        """Distributions at many times, shape (len(times), n)."""
        times = np.asarray(times, dtype=float)
        if times.size and times.min() < 0:
            raise ValueError("times must be >= 0")
        if self.mode == "eig":
            out = np.empty((times.size, self.n))
            for lo in range(0, times.size, 512):
                hi = min(lo + 512, times.size)
                phases = np.exp(np.outer(self._modes, times[lo:hi]))
                out[lo:hi] = np.real(self._weights @ phases).T
            return out
        return self._distributions_stepped(times)

    def _distributions_stepped(self, times: np.ndarray) -> np.ndarray:
        out = np.empty((times.size, self.n))
        spacings = np.diff(times)
        if times.size >= 2 and np.allclose(spacings, spacings[0], rtol=1e-9, atol=0.0):
            hop = scipy.linalg.expm(self._generator * spacings[0])
            vec = scipy.linalg.expm(self._generator * times[0]) @ self._vec0
            for k in range(times.size):
                out[k] = np.real(vec[self._diag])
                if k + 1 < times.size:
                    vec = hop @ vec
            return out
        for k, t in enumerate(times):
            out[k] = self.distribution(float(t))
        return out
