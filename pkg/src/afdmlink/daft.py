"""Discrete affine Fourier transform (DAFT) matrices and the structure of
the complex-conjugate operator A@A.T.

The DAFT matrix is A = Lambda_c2 @ F @ Lambda_c1 with F the unitary DFT and
Lambda_c = diag(exp(-j 2 pi c n^2)).  The inverse transform is A^H.  For the
complex-conjugate operator A@A.T (with c2 = 0) an entry (m, l) vanishes iff
(m + l) mod N is odd, or it is even and the 2-adic valuation of k = 2*N*c1
is at least that of (m + l) mod N.  Both an analytic predicate and a
brute-force oracle for this zero pattern are provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "AfdmParams",
    "ZeroPatternReport",
    "dft_matrix",
    "phase_diag",
    "daft_matrix",
    "apply_daft",
    "apply_idaft",
    "cyclic_shift_matrix",
    "conj_operator",
    "mirror_permutation",
    "operator_entry_bruteforce",
    "two_adic_valuation",
    "zero_pattern_predicate",
    "zero_pattern_report",
]

DEFAULT_ZERO_THRESHOLD = 1e-9


@dataclass(frozen=True)
class AfdmParams:
    """Block length and chirp rates defining one AFDM numerology.

    2*N*c1 must be an integer (stored exactly as ``k``); N must be even so
    the half-sum splitting behind the zero-pattern analysis applies.
    """

    n: int
    c1: float
    c2: float = 0.0
    k: int = field(init=False)

    def __post_init__(self):
        if self.n < 2 or self.n % 2 != 0:
            raise ValueError(f"block length must be even and >= 2, got {self.n}")
        k_float = 2.0 * self.n * self.c1
        k = round(k_float)
        if abs(k_float - k) > 1e-9:
            raise ValueError(f"2*N*c1 must be an integer, got {k_float}")
        object.__setattr__(self, "k", int(k))

    @classmethod
    def from_k(cls, n: int, k: int, c2: float = 0.0) -> "AfdmParams":
        """Construct from the integer k = 2*N*c1 directly."""
        return cls(n=n, c1=k / (2.0 * n), c2=c2)


def dft_matrix(n: int) -> np.ndarray:
    """Unitary n x n DFT matrix, entry (m, l) = exp(-j2pi m l / n)/sqrt(n)."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    m = np.arange(n)
    return np.exp(-2j * np.pi * np.outer(m, m) / n) / np.sqrt(n)


def phase_diag(c: float, n: int) -> np.ndarray:
    """Quadratic phase diagonal Lambda_c = diag(exp(-j 2 pi c n'^2))."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    idx = np.arange(n)
    return np.diag(np.exp(-2j * np.pi * c * idx.astype(float) ** 2))


def daft_matrix(p: AfdmParams) -> np.ndarray:
    """DAFT matrix A = Lambda_c2 @ F @ Lambda_c1 (unitary)."""
    idx = np.arange(p.n).astype(float)
    d2 = np.exp(-2j * np.pi * p.c2 * idx**2)
    d1 = np.exp(-2j * np.pi * p.c1 * idx**2)
    return d2[:, None] * dft_matrix(p.n) * d1[None, :]


def apply_daft(p: AfdmParams, s: np.ndarray) -> np.ndarray:
    """Forward transform A @ s."""
    s = np.asarray(s)
    if s.shape != (p.n,):
        raise ValueError(f"expected vector of length {p.n}, got shape {s.shape}")
    return daft_matrix(p) @ s


def apply_idaft(p: AfdmParams, x: np.ndarray) -> np.ndarray:
    """Inverse transform A^H @ x."""
    x = np.asarray(x)
    if x.shape != (p.n,):
        raise ValueError(f"expected vector of length {p.n}, got shape {x.shape}")
    return daft_matrix(p).conj().T @ x


def cyclic_shift_matrix(n: int) -> np.ndarray:
    """Forward cyclic-shift permutation: [Pi]_{i,j} = 1 iff i = (j+1) mod n."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return np.roll(np.eye(n), 1, axis=0)


def conj_operator(p: AfdmParams, daft: np.ndarray | None = None) -> np.ndarray:
    """Complex-conjugate operator A @ A.T.

    Pass a precomputed DAFT matrix via ``daft`` to avoid rebuilding it.
    """
    a = daft_matrix(p) if daft is None else daft
    return a @ a.T


def mirror_permutation(n: int) -> np.ndarray:
    """Permutation T with [T]_{m,l} = 1 iff (m+l) mod n = 0.

    This is what conj_operator degenerates to for c1 = c2 = 0 (the OFDM
    mirror-subcarrier coupling).
    """
    t = np.zeros((n, n))
    m = np.arange(n)
    t[m, (-m) % n] = 1.0
    return t


def operator_entry_bruteforce(n: int, k: int, m: int, l: int) -> complex:
    """Entry (m, l) of F @ Lambda_{2c1} @ F (the c2 = 0 operator) by direct
    summation: (1/n) sum_t exp(-j 2pi ((m+l) t + k t^2) / n).

    Serves as the independent oracle for zero_pattern_predicate.
    """
    if not (0 <= m < n and 0 <= l < n):
        raise IndexError(f"indices ({m}, {l}) out of range for n={n}")
    t = np.arange(n)
    phase = -2j * np.pi * ((m + l) * t + k * t.astype(float) ** 2) / n
    return complex(np.sum(np.exp(phase)) / n)


def two_adic_valuation(x: int) -> float:
    """Exponent of the largest power of 2 dividing x; +inf for x = 0."""
    if x == 0:
        return math.inf
    x = abs(x)
    v = 0
    while x % 2 == 0:
        x //= 2
        v += 1
    return v


def zero_pattern_predicate(n: int, k: int, m: int, l: int) -> bool:
    """Analytic prediction that operator entry (m, l) is zero.

    Works on s = (m + l) mod n since the oracle sum depends on m + l only
    modulo n (parity preserved because n is even).  True iff s is odd, or
    s > 0 is even with v2(k) >= v2(s).  s = 0 has v2 = +inf and is never
    predicted zero.
    """
    if n % 2 != 0:
        raise ValueError(f"block length must be even, got {n}")
    if not isinstance(k, (int, np.integer)):
        raise ValueError(f"k must be an integer, got {k!r}")
    s = (m + l) % n
    if s % 2 == 1:
        return True
    if s == 0:
        return False
    return two_adic_valuation(int(k)) >= two_adic_valuation(s)


@dataclass
class ZeroPatternReport:
    """Predicted vs brute-force zero pattern of the conjugate operator."""

    n: int
    k: int
    threshold: float
    predicted_zero: np.ndarray  # bool (n, n)
    actual_zero: np.ndarray  # bool (n, n)
    discrepancies: list[tuple[int, int]]

    @property
    def discrepancy_count(self) -> int:
        return len(self.discrepancies)

    def summary(self) -> str:
        lines = [
            f"n={self.n} k={self.k} threshold={self.threshold:g}",
            f"predicted zeros: {int(self.predicted_zero.sum())}",
            f"actual zeros:    {int(self.actual_zero.sum())}",
            f"discrepancies:   {self.discrepancy_count}",
        ]
        for m, l in self.discrepancies:
            mag = abs(operator_entry_bruteforce(self.n, self.k, m, l))
            lines.append(f"  ({m},{l}) predicted_zero={bool(self.predicted_zero[m, l])} |entry|={mag:.3e}")
        return "\n".join(lines)


def zero_pattern_report(n: int, k: int, threshold: float = DEFAULT_ZERO_THRESHOLD) -> ZeroPatternReport:
    """Compare the analytic predicate against the brute-force oracle.

    The oracle entry depends on (m, l) only through s = (m+l) mod n, so the
    n distinct sums are evaluated once and broadcast to the full grid.
    """
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    mag_by_s = np.array([abs(operator_entry_bruteforce(n, k, s, 0)) for s in range(n)])
    pred_by_s = np.array([zero_pattern_predicate(n, k, s, 0) for s in range(n)])
    s_grid = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    predicted = pred_by_s[s_grid]
    actual = mag_by_s[s_grid] < threshold
    mism = np.argwhere(predicted != actual)
    return ZeroPatternReport(
        n=n,
        k=k,
        threshold=threshold,
        predicted_zero=predicted,
        actual_zero=actual,
        discrepancies=[(int(m), int(l)) for m, l in mism],
    )
