"""Widely-linear LMMSE detection via the stacked real/imaginary model,
plus an improperness-blind complex LMMSE baseline.

The complex observation y = mu H x + nu G H* x* + w' (G = A A^T) becomes
y_tilde = H_tilde x_tilde + w_tilde with x_tilde = [Re x; Im x] and

    H_tilde = [[Re(mu H + nu G H*), -Im(mu H - nu G H*)],
               [Im(mu H + nu G H*),  Re(mu H - nu G H*)]].

The real noise covariance is C_wt = 0.5 [[Re(C+P), -Im(C-P)],
[Im(C+P), Re(C-P)]] with C = (|mu|^2+|nu|^2) sigma_n^2 I and
P = 2 mu nu sigma_n^2 G.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import linalg as sla

from .daft import AfdmParams, conj_operator

__all__ = [
    "RealCompositeModel",
    "IllConditionedModelError",
    "stack_real",
    "reassemble_complex",
    "build_composite_channel",
    "build_noise_covariance",
    "build_model",
    "lmmse_detect",
    "lmmse_detect_woodbury",
    "naive_lmmse",
]

COND_LIMIT = 1e12


class IllConditionedModelError(np.linalg.LinAlgError):
    """Noise covariance too ill-conditioned for a trustworthy solve."""


def stack_real(x: np.ndarray) -> np.ndarray:
    """[Re x; Im x] stacking (real block first)."""
    x = np.asarray(x)
    return np.concatenate([x.real, x.imag])


def reassemble_complex(x_tilde: np.ndarray) -> np.ndarray:
    """Inverse of stack_real: x[n] = x_tilde[n] + j x_tilde[n+N]."""
    x_tilde = np.asarray(x_tilde)
    if x_tilde.size % 2 != 0:
        raise ValueError(f"stacked vector must have even length, got {x_tilde.size}")
    n = x_tilde.size // 2
    return x_tilde[:n] + 1j * x_tilde[n:]


def build_composite_channel(
    h_eff: np.ndarray, conj_op: np.ndarray, mu: complex, nu: complex
) -> np.ndarray:
    """Real 2N x 2N channel of the stacked model."""
    h_eff = np.asarray(h_eff)
    if h_eff.shape != conj_op.shape or h_eff.shape[0] != h_eff.shape[1]:
        raise ValueError(
            f"shape mismatch: h_eff {h_eff.shape} vs conj_op {conj_op.shape}"
        )
    image = conj_op @ h_eff.conj()
    plus = mu * h_eff + nu * image
    minus = mu * h_eff - nu * image
    return np.block([[plus.real, -minus.imag], [plus.imag, minus.real]])


def build_noise_covariance(
    p: AfdmParams,
    mu: complex,
    nu: complex,
    sigma_n_sq: float,
    conj_op: np.ndarray | None = None,
) -> np.ndarray:
    """Real 2N x 2N covariance of the stacked improper noise."""
    if sigma_n_sq <= 0:
        raise ValueError(f"sigma_n_sq must be > 0, got {sigma_n_sq}")
    g = conj_operator(p) if conj_op is None else conj_op
    c = (abs(mu) ** 2 + abs(nu) ** 2) * sigma_n_sq * np.eye(p.n)
    pw = 2 * mu * nu * sigma_n_sq * g
    cp = c + pw
    cm = c - pw
    return 0.5 * np.block([[cp.real, -cm.imag], [cp.imag, cm.real]])


@dataclass(frozen=True)
class RealCompositeModel:
    """Stacked real observation model: y_tilde = h_tilde x_tilde + w_tilde."""

    h_tilde: np.ndarray
    c_w_tilde: np.ndarray
    y_tilde: np.ndarray


def build_model(
    p: AfdmParams,
    h_eff: np.ndarray,
    y: np.ndarray,
    mu: complex,
    nu: complex,
    sigma_n_sq: float,
    conj_op: np.ndarray | None = None,
) -> RealCompositeModel:
    g = conj_operator(p) if conj_op is None else conj_op
    return RealCompositeModel(
        h_tilde=build_composite_channel(h_eff, g, mu, nu),
        c_w_tilde=build_noise_covariance(p, mu, nu, sigma_n_sq, conj_op=g),
        y_tilde=stack_real(y),
    )


def _chol_noise(c: np.ndarray):
    """Cholesky of an SPD system matrix with a cheap conditioning guard."""
    try:
        cf = sla.cho_factor(c, lower=True, check_finite=False)
    except np.linalg.LinAlgError as exc:
        raise IllConditionedModelError(f"system matrix not SPD: {exc}") from exc
    d = np.diag(cf[0])
    cond_est = (d.max() / d.min()) ** 2
    if cond_est > COND_LIMIT:
        raise IllConditionedModelError(
            f"condition estimate {cond_est:.3e} exceeds {COND_LIMIT:.0e}"
        )
    return cf


def lmmse_detect(model: RealCompositeModel) -> np.ndarray:
    """x_hat = (2I + H^T C^-1 H)^-1 H^T C^-1 y, via symmetric solves."""
    h = model.h_tilde
    cf = _chol_noise(model.c_w_tilde)
    cinv_h = sla.cho_solve(cf, h, check_finite=False)
    lhs = 2.0 * np.eye(h.shape[1]) + h.T @ cinv_h
    rhs = cinv_h.T @ model.y_tilde
    return sla.solve(lhs, rhs, assume_a="pos", check_finite=False)


def lmmse_detect_woodbury(model: RealCompositeModel) -> np.ndarray:
    """Woodbury form: x_hat = 0.5 H^T (0.5 H H^T + C)^-1 y."""
    h = model.h_tilde
    m = 0.5 * (h @ h.T) + model.c_w_tilde
    cf = _chol_noise(m)  # conditioning guard on the inverted matrix
    z = sla.cho_solve(cf, model.y_tilde, check_finite=False)
    return 0.5 * (h.T @ z)


def naive_lmmse(
    y: np.ndarray,
    h_eff: np.ndarray,
    sigma_n_sq: float,
    mu: complex,
    nu: complex,
) -> np.ndarray:
    """Improperness-blind baseline: complex LMMSE on y = mu H x + noise,
    treating the total noise power (|mu|^2+|nu|^2) sigma_n^2 as proper."""
    hm = mu * np.asarray(h_eff)
    n = hm.shape[0]
    gram = hm @ hm.conj().T + (abs(mu) ** 2 + abs(nu) ** 2) * sigma_n_sq * np.eye(n)
    return hm.conj().T @ sla.solve(gram, np.asarray(y), assume_a="pos", check_finite=False)
