"""Doubly-dispersive channel, receiver IQ imbalance, residual CFO, and the
improper noise they induce in the affine domain.

The received time-domain signal (after CPP removal, cyclic view) is

    r[n] = mu  e^{-j2pi eps n} sum_p h_p s[(n - tau_p) % N] e^{-j2pi f_p n}
         + nu  e^{+j2pi eps n} sum_p h_p* s*[(n - tau_p) % N] e^{+j2pi f_p n}
         + mu e^{-j2pi eps n} w[n] + nu e^{+j2pi eps n} w*[n],

with mu = cos(phi) + j psi sin(phi), nu = psi cos(phi) - j sin(phi).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .daft import AfdmParams, daft_matrix

__all__ = [
    "ChannelConfig",
    "ChannelRealization",
    "CfoRealization",
    "ImpairmentParams",
    "derive_iq_params",
    "draw_residual_cfo",
    "sample_channel",
    "delta_diag",
    "time_channel_matrix",
    "build_heff",
    "apply_channel_time",
    "gen_improper_noise",
]

def derive_iq_params(psi: float, phi: float) -> tuple[complex, complex]:
    """IQ imbalance scalars (mu, nu) from amplitude mismatch psi and phase
    mismatch phi (radians)."""
    mu = complex(np.cos(phi), psi * np.sin(phi))
    nu = complex(psi * np.cos(phi), -np.sin(phi))
    return mu, nu


@dataclass(frozen=True)
class ImpairmentParams:
    """Receiver front-end impairment parameters.

    psi: amplitude mismatch, phi: phase mismatch in radians,
    sigma_eps_sq: variance of the residual normalized CFO.
    mu/nu are always recomputed from (psi, phi), never stored.
    """

    psi: float
    phi: float
    sigma_eps_sq: float = 0.0

    def __post_init__(self):
        if self.sigma_eps_sq < 0:
            raise ValueError(f"sigma_eps_sq must be >= 0, got {self.sigma_eps_sq}")

    @property
    def mu(self) -> complex:
        return derive_iq_params(self.psi, self.phi)[0]

    @property
    def nu(self) -> complex:
        return derive_iq_params(self.psi, self.phi)[1]


@dataclass(frozen=True)
class CfoRealization:
    """One frame's residual normalized CFO (cycles/sample)."""

    epsilon: float


def draw_residual_cfo(sigma_eps_sq: float, rng: np.random.Generator) -> CfoRealization:
    """Draw eps ~ N(0, sigma_eps_sq); exactly 0 for zero variance.

    Always consumes one draw from rng so paired runs with different
    variances stay stream-aligned.
    """
    if sigma_eps_sq < 0:
        raise ValueError(f"sigma_eps_sq must be >= 0, got {sigma_eps_sq}")
    z = rng.standard_normal()
    if sigma_eps_sq == 0.0:
        return CfoRealization(0.0)
    return CfoRealization(float(np.sqrt(sigma_eps_sq) * z))


@dataclass(frozen=True)
class ChannelConfig:
    """Delay-Doppler channel draw configuration.

    alpha_max is the maximum normalized Doppler index (2.0 corresponds to
    twice the chirp spacing, e.g. 405 km/h at a 4 GHz carrier with the
    reference numerology).
    """

    block_len: int
    num_paths: int = 3
    alpha_max: float = 2.0
    doppler_mode: str = "integer"  # or "fractional"
    delays: tuple[int, ...] = (0, 1, 2)

    def __post_init__(self):
        if self.num_paths < 1:
            raise ValueError("need at least one path")
        if len(self.delays) != self.num_paths:
            raise ValueError("delays must list one entry per path")
        if len(set(self.delays)) != self.num_paths or min(self.delays) < 0:
            raise ValueError("delays must be distinct non-negative integers")
        if max(self.delays) >= self.block_len:
            raise ValueError("delays must be < block length")
        if self.doppler_mode not in ("integer", "fractional"):
            raise ValueError(f"unknown doppler_mode {self.doppler_mode!r}")


@dataclass(frozen=True)
class ChannelRealization:
    """One draw of the P-path channel: complex gains, integer delays,
    normalized Dopplers (cycles/sample)."""

    gains: np.ndarray
    delays: tuple[int, ...]
    dopplers: np.ndarray

    @property
    def num_paths(self) -> int:
        return len(self.delays)


def sample_channel(cfg: ChannelConfig, rng: np.random.Generator) -> ChannelRealization:
    """Draw path gains h_p ~ CN(0, 1/P) and Dopplers from uniform angles.

    Integer mode truncates alpha_max*cos(theta) toward zero before the
    division by N; fractional mode keeps the raw value.
    """
    p = cfg.num_paths
    gains = (rng.standard_normal(p) + 1j * rng.standard_normal(p)) * np.sqrt(1.0 / (2 * p))
    theta = rng.uniform(-np.pi, np.pi, p)
    alpha = cfg.alpha_max * np.cos(theta)
    if cfg.doppler_mode == "integer":
        alpha = np.trunc(alpha)
    dopplers = alpha / cfg.block_len
    return ChannelRealization(gains=gains, delays=tuple(cfg.delays), dopplers=dopplers)


def delta_diag(lam: float, n: int) -> np.ndarray:
    """Diagonal of Delta_lambda = diag(exp(-j 2 pi lambda n))."""
    return np.exp(-2j * np.pi * lam * np.arange(n))


def time_channel_matrix(n: int, ch: ChannelRealization) -> np.ndarray:
    """Cyclic time-domain channel sum_p h_p Delta_{f_p} Pi^{tau_p}."""
    b = np.zeros((n, n), dtype=complex)
    rows = np.arange(n)
    for h, tau, f in zip(ch.gains, ch.delays, ch.dopplers):
        b[rows, (rows - tau) % n] += h * delta_diag(f, n)
    return b


def build_heff(
    p: AfdmParams,
    ch: ChannelRealization,
    eps: CfoRealization | float = 0.0,
    daft: np.ndarray | None = None,
) -> np.ndarray:
    """Affine-domain effective channel A Delta_eps (sum_p h_p Delta_{f_p}
    Pi^{tau_p}) A^H, with Gamma_CPP = I (integer 2Nc1 regime)."""
    epsilon = eps.epsilon if isinstance(eps, CfoRealization) else float(eps)
    a = daft_matrix(p) if daft is None else daft
    b = delta_diag(epsilon, p.n)[:, None] * time_channel_matrix(p.n, ch)
    return a @ b @ a.conj().T


def apply_channel_time(
    s: np.ndarray,
    ch: ChannelRealization,
    eps: CfoRealization | float,
    iq: ImpairmentParams,
    w: np.ndarray,
) -> np.ndarray:
    """Sample-by-sample impaired reception on the CPP-stripped cyclic view."""
    s = np.asarray(s)
    w = np.asarray(w)
    n = len(s)
    if len(w) != n:
        raise ValueError(f"noise length {len(w)} != signal length {n}")
    epsilon = eps.epsilon if isinstance(eps, CfoRealization) else float(eps)
    idx = np.arange(n)
    direct = np.zeros(n, dtype=complex)
    for h, tau, f in zip(ch.gains, ch.delays, ch.dopplers):
        direct += h * s[(idx - tau) % n] * np.exp(-2j * np.pi * f * idx)
    e_minus = np.exp(-2j * np.pi * epsilon * idx)
    mu, nu = iq.mu, iq.nu
    return mu * e_minus * (direct + w) + nu * np.conj(e_minus) * np.conj(direct + w)


def gen_improper_noise(
    p: AfdmParams,
    iq: ImpairmentParams,
    eps: CfoRealization | float,
    sigma_n_sq: float,
    rng: np.random.Generator,
    daft: np.ndarray | None = None,
) -> np.ndarray:
    """Affine-domain noise w' = mu A Delta_eps w + nu A Delta_{-eps} w*.

    Covariance (|mu|^2+|nu|^2) sigma_n^2 I, pseudo-covariance
    2 mu nu sigma_n^2 A A^T (independent of eps).
    """
    if sigma_n_sq <= 0:
        raise ValueError(f"sigma_n_sq must be > 0, got {sigma_n_sq}")
    epsilon = eps.epsilon if isinstance(eps, CfoRealization) else float(eps)
    a = daft_matrix(p) if daft is None else daft
    w = (rng.standard_normal(p.n) + 1j * rng.standard_normal(p.n)) * np.sqrt(sigma_n_sq / 2)
    d = delta_diag(epsilon, p.n)
    return iq.mu * (a @ (d * w)) + iq.nu * (a @ (np.conj(d) * np.conj(w)))
