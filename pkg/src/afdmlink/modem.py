"""Bit mapping, IDAFT modulation with chirp-periodic prefix, and DAFT
demodulation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .daft import AfdmParams, daft_matrix

__all__ = [
    "Constellation",
    "Frame",
    "square_qam",
    "map_bits",
    "demap_hard",
    "modulate",
    "demodulate",
]


def _gray_decode(g: int) -> int:
    b = 0
    while g:
        b ^= g
        g >>= 1
    return b


@dataclass(frozen=True)
class Constellation:
    """Gray-coded constellation, indexed by bit label (MSB-first).

    points[label] is the symbol whose bits are the binary digits of label;
    unit mean power, zero mean, zero pseudo-mean for square QAM.
    """

    order: int
    points: np.ndarray

    @property
    def bits_per_symbol(self) -> int:
        return int(np.log2(self.order))


def square_qam(m: int) -> Constellation:
    """Square M-QAM with per-axis Gray labeling, normalized to unit power.

    The first half of each label addresses the I axis, the second half the
    Q axis; all-zero bits map to the most positive corner, so QPSK label
    00 -> (1+1j)/sqrt(2).
    """
    k = int(np.log2(m))
    if 2**k != m or k % 2 != 0:
        raise ValueError(f"order must be an even power of 2 (square QAM), got {m}")
    half = k // 2
    levels = 2**half
    amps = np.empty(levels)
    for g in range(levels):
        amps[g] = levels - 1 - 2 * _gray_decode(g)
    pts = np.empty(m, dtype=complex)
    for label in range(m):
        bi = label >> half
        bq = label & (levels - 1)
        pts[label] = amps[bi] + 1j * amps[bq]
    pts /= np.sqrt(np.mean(np.abs(pts) ** 2))
    return Constellation(order=m, points=pts)


def map_bits(bits: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Map a flat 0/1 array (length divisible by bits/symbol) to symbols."""
    bits = np.asarray(bits)
    k = constellation.bits_per_symbol
    if bits.size % k != 0:
        raise ValueError(f"bit count {bits.size} not divisible by {k}")
    groups = bits.reshape(-1, k)
    labels = groups @ (1 << np.arange(k)[::-1])
    return constellation.points[labels]


def demap_hard(symbols: np.ndarray, constellation: Constellation) -> np.ndarray:
    """Nearest-point hard decision; ties break toward the lowest label."""
    symbols = np.asarray(symbols).reshape(-1)
    d2 = np.abs(symbols[:, None] - constellation.points[None, :]) ** 2
    labels = d2.argmin(axis=1)
    k = constellation.bits_per_symbol
    bits = (labels[:, None] >> np.arange(k)[::-1]) & 1
    return bits.reshape(-1).astype(np.int64)


@dataclass(frozen=True)
class Frame:
    """One transmit frame: chirp-domain payload plus CPP'd time signal."""

    payload: np.ndarray  # N chirp-domain symbols x
    cpp_len: int
    time_signal: np.ndarray  # cpp_len + N samples


def modulate(p: AfdmParams, x: np.ndarray, cpp_len: int, daft: np.ndarray | None = None) -> Frame:
    """IDAFT-modulate x and prepend the chirp-periodic prefix.

    CPP sample at offset -n (n = 1..cpp_len) is s[N-n] * exp(-j 2 pi c1
    (N^2 - 2 N n)); for integer 2Nc1 and even N the phase factor is exactly
    1 and the CPP is a plain cyclic prefix.  The general formula is kept so
    other regimes fail loudly rather than silently.
    """
    x = np.asarray(x)
    if x.shape != (p.n,):
        raise ValueError(f"expected {p.n} symbols, got shape {x.shape}")
    if cpp_len < 0:
        raise ValueError(f"cpp_len must be >= 0, got {cpp_len}")
    a = daft_matrix(p) if daft is None else daft
    s = a.conj().T @ x
    offsets = np.arange(-cpp_len, 0)
    phase = np.exp(-2j * np.pi * p.c1 * (p.n**2 + 2.0 * p.n * offsets))
    cpp = s[p.n + offsets] * phase
    return Frame(payload=x, cpp_len=cpp_len, time_signal=np.concatenate([cpp, s]))


def demodulate(p: AfdmParams, received: np.ndarray, cpp_len: int, daft: np.ndarray | None = None) -> np.ndarray:
    """Strip the CPP and apply the DAFT: y = A r."""
    received = np.asarray(received)
    if received.shape != (p.n + cpp_len,):
        raise ValueError(
            f"expected {p.n + cpp_len} samples, got shape {received.shape}"
        )
    a = daft_matrix(p) if daft is None else daft
    return a @ received[cpp_len:]
