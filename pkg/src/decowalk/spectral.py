"""Spectral analysis of the monitored walk at small dephasing.

The undamped part of the literal-S generator is a circulant stencil on
the discrete torus Z_N x Z_N, so its eigenvectors are the 2-d Fourier
modes V^(m,n) with eigenvalues

    lambda_(m,n) = i sin(pi (m+n)/N) cos(pi (m-n)/N)
                 = (i/2) (sin(2 pi m / N) + sin(2 pi n / N)).

The damping term is a rank-structured perturbation whose matrix elements
between Fourier modes depend only on the index sums: modes couple only
when (m+n) is congruent to (m'+n') mod N.  Eigenvalues coincide in three
patterns (equal indices, index sums congruent to zero, and swapped index
pairs), and working inside those blocks gives the first-order shifts

    -gamma (N-1)/N   for equal-index and unpaired modes,
    -gamma (N-2)/N   for swapped-pair modes.

Summing the shifted modes reconstructs the distribution at small gamma,
and bounding the mode sum gives the small-dephasing mixing-time bound.
Everything here also covers the gamma = 0 walk in closed form.
"""

from __future__ import annotations

import math

import numpy as np

from .model import WalkConfig

DEGENERACY_CLASSES = ("zero", "diagonal", "off-diagonal", "simple")


def cycle_eigenvalues(n: int) -> np.ndarray:
    """Adjacency eigenvalues of the N-cycle: 2 cos(2 pi j / N)."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    return 2.0 * np.cos(2.0 * np.pi * np.arange(n) / n)


def unitary_amplitudes(n: int, t: float) -> np.ndarray:
    """Closed walk started at vertex 0, bare adjacency generator.

    psi_j(t) = (1/N) sum_m exp(-2it cos(2 pi m / N)) exp(-2 pi i m j / N),
    global phase dropped.  Note the time unit: this propagates with the
    full adjacency, while the master equations in this package carry a
    quarter-rate hopping stencil, so their gamma = 0 trajectories match
    these amplitudes at t/4 (see checks.zero_dephasing_agreement).
    """
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    phases = np.exp(-1j * t * cycle_eigenvalues(n))
    return np.fft.fft(phases) / n


def unitary_distribution(n: int, t: float) -> np.ndarray:
    """Vertex probabilities |psi_j(t)|^2 of the closed walk."""
    amps = unitary_amplitudes(n, t)
    return np.abs(amps) ** 2


def m_function(n: int, j: int, t: float) -> complex:
    """Fourier kernel (1/N) sum_m exp(i t sin(2 pi m / N)) omega_N^(m j).

    Bounded by 1 in modulus and equal to delta_j0 at t = 0.  Squaring at
    half time expands into the full two-index mode sum, and the diagonal
    (m, m) modes alone resum to the kernel at doubled vertex index:

        M_j(t/2)^2 = (1/N^2) sum_{m,n} exp(t lambda_(m,n)) omega^{(m+n) j}
        M_{2j mod N}(t) = (1/N) sum_m exp(t lambda_(m,m)) omega^{2 m j}
    """
    if not 0 <= j < n:
        raise ValueError(f"vertex index must lie in [0, {n}), got {j}")
    m = np.arange(n)
    kernel = np.exp(1j * t * np.sin(2.0 * np.pi * m / n))
    return complex(np.sum(kernel * np.exp(2j * np.pi * m * j / n)) / n)


def torus_eigenvalue(m: int, n: int, size: int) -> complex:
    """Eigenvalue of the undamped generator on Fourier mode (m, n)."""
    _check_mode(m, n, size)
    return 1j * math.sin(math.pi * (m + n) / size) * math.cos(math.pi * (m - n) / size)


def torus_eigenvector(m: int, n: int, size: int) -> np.ndarray:
    """Unit-norm Fourier mode (1/N) omega^(m mu + n nu), flattened row-major."""
    _check_mode(m, n, size)
    mu = np.arange(size)
    row = np.exp(2j * np.pi * m * mu / size)
    col = np.exp(2j * np.pi * n * mu / size)
    return np.outer(row, col).ravel() / size


def classify_degeneracy(m: int, n: int, size: int) -> str:
    """Which eigenvalue-coincidence pattern the mode (m, n) belongs to.

    `zero`: index sum congruent to 0 mod N (eigenvalue 0; these modes
    drop out of the distribution reconstruction).  `diagonal`: m = n.
    `off-diagonal`: m != n with the swapped partner (n, m) distinct,
    giving an effective two-fold degeneracy.  `simple` is the fallback
    for anything unpaired (unreachable on Z_N x Z_N, kept for clarity).
    """
    _check_mode(m, n, size)
    if (m + n) % size == 0:
        return "zero"
    if m == n:
        return "diagonal"
    if (n, m) != (m, n):
        return "off-diagonal"
    return "simple"


def u_similarity(m: int, n: int, m2: int, n2: int, size: int, gamma: float) -> float:
    """Damping matrix element between Fourier modes (m, n) and (m2, n2).

    Conjugating the off-diagonal damping by the mode basis leaves
    -gamma on the mode diagonal plus gamma/N whenever the index sums are
    congruent mod N; everything else vanishes.  Symmetric in its two
    mode arguments.
    """
    _check_mode(m, n, size)
    _check_mode(m2, n2, size)
    value = 0.0
    if (m, n) == (m2, n2):
        value -= gamma
    if ((m2 - m) + (n2 - n)) % size == 0:
        value += gamma / size
    return value


def perturbed_eigenvalue(m: int, n: int, config: WalkConfig) -> complex:
    """Mode eigenvalue with its first-order damping shift.

    Swapped-pair (off-diagonal class) modes shift by -gamma (N-2)/N; all
    other modes shift by -gamma (N-1)/N.  Meaningful in the regime
    gamma * N << 1 (not enforced).
    """
    lam = torus_eigenvalue(m, n, config.n)
    if classify_degeneracy(m, n, config.n) == "off-diagonal":
        shift = -config.gamma * (config.n - 2) / config.n
    else:
        shift = -config.gamma * (config.n - 1) / config.n
    return lam + shift


def _check_mode(m: int, n: int, size: int) -> None:
    if size < 3:
        raise ValueError(f"size must be >= 3, got {size}")
    if not (0 <= m < size and 0 <= n < size):
        raise ValueError(f"mode indices must lie in [0, {size}), got ({m}, {n})")


class _PerturbativeKernel:
    """Shifted mode rates grouped by index sum, for fast evaluation.

    For s = (m+n) mod N != 0 the class members are (m, (s-m) mod N) with
    m free, exactly N modes per class; zero-sum modes are excluded and
    replaced by the stationary uniform term.
    """

    def __init__(self, config: WalkConfig) -> None:
        n = config.n
        self.n = n
        s = np.arange(1, n)[:, None]
        m = np.arange(n)[None, :]
        k = (s - m) % n
        lam = 0.5j * (np.sin(2.0 * np.pi * m / n) + np.sin(2.0 * np.pi * k / n))
        shift = np.where(
            m == k,
            -config.gamma * (n - 1) / n,
            -config.gamma * (n - 2) / n,
        )
        self.rates = lam + shift  # shape (n-1, n)
        j = np.arange(n)[None, :]
        self.fourier = np.exp(2j * np.pi * np.arange(1, n)[:, None] * j / n)

    def distributions(self, times: np.ndarray) -> np.ndarray:
        times = np.asarray(times, dtype=float)
        out = np.empty((times.size, self.n))
        for lo in range(0, times.size, 256):
            hi = min(lo + 256, times.size)
            block = times[lo:hi, None, None]
            class_sums = np.exp(block * self.rates[None, :, :]).sum(axis=2)
            out[lo:hi] = 1.0 / self.n + np.real(class_sums @ self.fourier) / self.n**2
        return out


def perturbative_distribution(config: WalkConfig, t: float) -> np.ndarray:
    """Distribution reconstructed from first-order-shifted Fourier modes.

    P_j(t) = 1/N + (1/N^2) sum over modes with nonzero index sum of
    exp(t (lambda + shift)) omega^{(m+n) j}.  Real by conjugate pairing
    and exact at gamma = 0, where it reproduces the literal-S dynamics
    for every N.  Intended regime gamma * N << 1.
    """
    if t < 0:
        raise ValueError(f"t must be >= 0, got {t}")
    return _PerturbativeKernel(config).distributions(np.array([t]))[0]


def small_gamma_mixing_bound(n: int, gamma: float, eps: float) -> float:
    """Mixing-time bound in the small-dephasing regime.

    (1/gamma) * ln(N/eps) * (1 + 2/(N-2)): the slowest shifted mode
    decays at rate gamma (N-2)/N, and the mode sum stays under eps once
    that envelope does.
    """
    if int(n) != n or n <= 2:
        raise ValueError(f"n must be an integer > 2, got {n}")
    if gamma <= 0:
        raise ValueError("gamma must be > 0; the undamped walk has no decay envelope")
    if not 0 < eps < 2:
        raise ValueError(f"eps must lie in (0, 2), got {eps}")
    return (1.0 / gamma) * math.log(n / eps) * (1.0 + 2.0 / (n - 2))
