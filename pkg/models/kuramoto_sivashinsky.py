"""
Kuramoto-Sivashinsky equation with a random bifurcation parameter.

    u_t = -4 u_xxxx - alpha [u_xx + (u_x)^2 / 2],   x in [0, 2 pi), periodic

alpha ~ U(13, 17). Derivatives are taken with the discrete Fourier transform;
the quadratic term is formed in physical space and de-aliased with the 2/3 rule.
Its k = 0 mode is removed, so the spatial mean of u is conserved (zero for the
initial profile below) and the evolution is that of the mean-free solution.
"""

import numpy as np

from models.base_model import StochasticModel
from tools.errors import InvalidArgumentError

INITIAL_AMPLITUDES = (2.6680, 0.1979, 0.0094)


def _check_grid(n: int) -> None:
    if n < 8 or n & (n - 1):
        raise InvalidArgumentError(f"spatial grid size must be a power of two >= 8, got {n}")


def wavenumbers(n: int) -> np.ndarray:
    """Non-negative wavenumbers of an rfft of length n."""
    return np.arange(n // 2 + 1, dtype=float)


def dealias_mask(n: int) -> np.ndarray:
    """2/3 rule: keep wavenumbers k <= n/3."""
    return wavenumbers(n) <= n / 3.0


def linear_symbol(n: int, alpha: np.ndarray) -> np.ndarray:
    """Fourier multiplier of -4 d^4/dx^4 - alpha d^2/dx^2: -4k^4 + alpha k^2."""
    k = wavenumbers(n)
    return -4.0 * k ** 4 + np.asarray(alpha)[..., None] * k ** 2


def nonlinear_term_hat(u_hat: np.ndarray, alpha: np.ndarray, n: int) -> np.ndarray:
    """Fourier coefficients of -alpha/2 (u_x)^2, de-aliased, without the k = 0 mode.

    The spatial mean of (u_x)^2 is dropped so the solution stays mean-free.
    """
    k = wavenumbers(n)
    ik = 1j * k
    ik[-1] = 0.0  # Nyquist mode has no odd derivative
    u_x = np.fft.irfft(ik * u_hat * dealias_mask(n), n=n, axis=-1)
    square_hat = np.fft.rfft(u_x * u_x, axis=-1) * dealias_mask(n)
    square_hat[..., 0] = 0.0
    return -0.5 * np.asarray(alpha)[..., None] * square_hat


def ks_rhs(u: np.ndarray, alpha: float | np.ndarray, nonlinear: bool = True) -> np.ndarray:
    """u_t for physical values u (..., n) on the uniform periodic grid."""
    u = np.asarray(u, dtype=float)
    n = u.shape[-1]
    _check_grid(n)
    alpha = np.asarray(alpha, dtype=float)
    u_hat = np.fft.rfft(u, axis=-1)
    rhs_hat = linear_symbol(n, alpha) * u_hat
    if nonlinear:
        rhs_hat = rhs_hat + nonlinear_term_hat(u_hat, alpha, n)
    return np.fft.irfft(rhs_hat, n=n, axis=-1)


def initial_profile(x: np.ndarray) -> np.ndarray:
    a1, a2, a3 = INITIAL_AMPLITUDES
    return a1 * np.cos(x) + a2 * np.cos(2 * x) + a3 * np.cos(3 * x)


class KuramotoSivashinskyModel(StochasticModel):
    """K-S on a Fourier grid with alpha mapped from xi in [-1, 1]."""

    time_scheme = "semi-implicit-spectral"

    def __init__(self, n_modes: int = 64, alpha_range: tuple[float, float] = (13.0, 17.0),
                 nonlinear: bool = True):
        _check_grid(n_modes)
        super().__init__(name="kuramoto-sivashinsky", dimension=1)
        self.n_modes = n_modes
        self.alpha_range = alpha_range
        self.nonlinear = nonlinear
        self.x = 2.0 * np.pi * np.arange(n_modes) / n_modes

    @property
    def n_vars(self) -> int:
        return 1

    @property
    def n_dofs(self) -> int:
        return self.n_modes

    @property
    def parameter_ranges(self) -> list[tuple[float, float]]:
        return [self.alpha_range]

    @property
    def spatial_weights(self) -> np.ndarray:
        # periodic trapezoid rule
        return np.full(self.n_modes, 2.0 * np.pi / self.n_modes)

    def alpha(self, xi: np.ndarray) -> np.ndarray:
        return self.parameters(xi)[..., 0]

    def initial_state(self, xi: np.ndarray) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        return np.broadcast_to(initial_profile(self.x), xi.shape[:-1] + (1, self.n_modes)).copy()

    def rhs(self, u: np.ndarray, t: float, xi: np.ndarray) -> np.ndarray:
        alpha = self.alpha(xi)[..., None]
        return ks_rhs(u, alpha, nonlinear=self.nonlinear)
