"""Monte Carlo BER sweeps with deterministic, schedule-independent seeding.

Each frame derives its own RNG streams from (seed, snr point index, frame
index), so any parallel schedule reproduces the sequential result exactly,
and runs that differ only in impairment or detector settings consume
identical bit/channel/CFO/noise draws (paired comparisons).
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields

import numpy as np

from .daft import AfdmParams, conj_operator, daft_matrix
from .detector import (
    RealCompositeModel,
    build_composite_channel,
    build_noise_covariance,
    lmmse_detect_woodbury,
    naive_lmmse,
    reassemble_complex,
    stack_real,
)
from .impairments import (
    ChannelConfig,
    ImpairmentParams,
    apply_channel_time,
    build_heff,
    draw_residual_cfo,
    sample_channel,
)
from .modem import demap_hard, demodulate, map_bits, modulate, square_qam

__all__ = [
    "SimConfig",
    "BerPoint",
    "BerCurve",
    "ConfigError",
    "load_config",
    "snr_to_noise_var",
    "snr_db_to_ebn0_db",
    "run_frame",
    "run_sweep",
    "write_ber_csv",
    "wilson_interval",
]

DETECTOR_CHOICES = ("widely_linear", "naive", "both")
KNOWLEDGE_CHOICES = ("genie", "mismatched")


class ConfigError(ValueError):
    """Invalid or unreadable simulation configuration."""


@dataclass(frozen=True)
class SimConfig:
    """Full sweep definition.  phi is in degrees, SNR grid in dB."""

    n: int
    snr_grid_db: tuple[float, ...]
    frames_per_point: int
    seed: int
    m: int = 4
    p: int = 3
    two_n_c1: int = 5
    c2: float = 0.0001
    doppler_mode: str = "integer"
    psi: float = 0.0
    phi_deg: float = 0.0
    sigma_eps_sq: float = 0.0
    detector: str = "widely_linear"
    knowledge: str = "genie"
    cpp_len: int = 3

    def __post_init__(self):
        if self.frames_per_point < 1:
            raise ConfigError("frames_per_point must be >= 1")
        grid = tuple(float(v) for v in self.snr_grid_db)
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("snr_grid_db must be strictly increasing")
        object.__setattr__(self, "snr_grid_db", grid)
        if self.detector not in DETECTOR_CHOICES:
            raise ConfigError(f"detector must be one of {DETECTOR_CHOICES}")
        if self.knowledge not in KNOWLEDGE_CHOICES:
            raise ConfigError(f"knowledge must be one of {KNOWLEDGE_CHOICES}")

    @property
    def detectors(self) -> tuple[str, ...]:
        if self.detector == "both":
            return ("widely_linear", "naive")
        return (self.detector,)

    def afdm_params(self) -> AfdmParams:
        return AfdmParams.from_k(self.n, self.two_n_c1, self.c2)

    def channel_config(self) -> ChannelConfig:
        return ChannelConfig(
            block_len=self.n, num_paths=self.p, doppler_mode=self.doppler_mode
        )

    def impairment_params(self) -> ImpairmentParams:
        return ImpairmentParams(
            psi=self.psi, phi=math.radians(self.phi_deg), sigma_eps_sq=self.sigma_eps_sq
        )

    def as_dict(self) -> dict:
        out = {}
        for f in fields(self):
            val = getattr(self, f.name)
            if f.name == "snr_grid_db":
                val = ",".join(f"{v:g}" for v in val)
            out[f.name] = val
        return out


_CONFIG_PARSERS = {
    "n": int,
    "m": int,
    "p": int,
    "two_n_c1": int,
    "c2": float,
    "doppler_mode": str,
    "psi": float,
    "phi_deg": float,
    "sigma_eps_sq": float,
    "snr_grid_db": lambda v: tuple(float(x) for x in v.split(",")),
    "frames_per_point": int,
    "seed": int,
    "detector": str,
    "knowledge": str,
    "cpp_len": int,
}
_REQUIRED_KEYS = ("n", "snr_grid_db", "frames_per_point", "seed")


def load_config(path: str) -> SimConfig:
    """Parse a flat ``key = value`` config file ('#' starts a comment).

    Unknown keys are errors; see README for the schema.
    """
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        if key not in _CONFIG_PARSERS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        if key in kv:
            raise ConfigError(f"{path}:{lineno}: duplicate key {key!r}")
        try:
            kv[key] = _CONFIG_PARSERS[key](val)
        except ValueError as exc:
            raise ConfigError(f"{path}:{lineno}: bad value for {key!r}: {exc}") from exc
    missing = [k for k in _REQUIRED_KEYS if k not in kv]
    if missing:
        raise ConfigError(f"{path}: missing required keys {missing}")
    try:
        return SimConfig(**kv)
    except (ConfigError, ValueError) as exc:
        raise ConfigError(f"{path}: {exc}") from exc


def snr_to_noise_var(snr_db: float, m: int = 4) -> float:
    """Symbol-SNR convention: unit-power symbols, average unit-energy
    channel, so sigma_n^2 = 10^(-snr_db/10)."""
    return float(10.0 ** (-snr_db / 10.0))


def snr_db_to_ebn0_db(snr_db: float, m: int) -> float:
    """Eb/N0 for the same operating point: symbol SNR - 10 log10(log2 M)."""
    return float(snr_db - 10.0 * math.log10(math.log2(m)))


@dataclass(frozen=True)
class BerPoint:
    snr_db: float
    bit_errors: int
    bits_total: int

    @property
    def ber(self) -> float:
        return self.bit_errors / self.bits_total


@dataclass(frozen=True)
class BerCurve:
    detector: str
    points: tuple[BerPoint, ...]
    metadata: dict = field(default_factory=dict)


class _FrameContext:
    """Per-config immutable precomputation shared by every frame."""

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self.params = cfg.afdm_params()
        self.daft = daft_matrix(self.params)
        self.conj_op = self.daft @ self.daft.T
        self.constellation = square_qam(cfg.m)
        self.chan_cfg = cfg.channel_config()
        self.iq = cfg.impairment_params()
        # noise covariance is constant per grid point (read-only after init)
        self.noise_cov = [
            build_noise_covariance(
                self.params, self.iq.mu, self.iq.nu,
                snr_to_noise_var(snr, cfg.m), conj_op=self.conj_op,
            )
            for snr in cfg.snr_grid_db
        ]


def _frame_rngs(cfg: SimConfig, point_index: int, frame_index: int):
    ss = np.random.SeedSequence(entropy=(cfg.seed, point_index, frame_index))
    return [np.random.default_rng(child) for child in ss.spawn(4)]


def run_frame(
    cfg: SimConfig,
    point_index: int,
    frame_index: int,
    ctx: _FrameContext | None = None,
) -> tuple[dict[str, int], int]:
    """Simulate one frame at grid point ``point_index``.

    Returns ({detector: bit_errors}, bits_in_frame).  Deterministic in
    (cfg, point_index, frame_index); the four RNG streams (bits, channel,
    CFO, noise) are drawn in a fixed order independent of the detector and
    knowledge settings.
    """
    ctx = ctx or _FrameContext(cfg)
    sigma_n_sq = snr_to_noise_var(cfg.snr_grid_db[point_index], cfg.m)
    rng_bits, rng_chan, rng_eps, rng_noise = _frame_rngs(cfg, point_index, frame_index)

    bits = rng_bits.integers(0, 2, cfg.n * ctx.constellation.bits_per_symbol)
    x = map_bits(bits, ctx.constellation)
    frame = modulate(ctx.params, x, cfg.cpp_len, daft=ctx.daft)
    s = frame.time_signal[cfg.cpp_len :]

    ch = sample_channel(ctx.chan_cfg, rng_chan)
    eps = draw_residual_cfo(cfg.sigma_eps_sq, rng_eps)
    w = (rng_noise.standard_normal(cfg.n) + 1j * rng_noise.standard_normal(cfg.n))
    w *= np.sqrt(sigma_n_sq / 2)

    r = apply_channel_time(s, ch, eps, ctx.iq, w)
    y = demodulate(ctx.params, r, cpp_len=0, daft=ctx.daft)

    eps_known = eps if cfg.knowledge == "genie" else 0.0
    h_eff = build_heff(ctx.params, ch, eps_known, daft=ctx.daft)

    errors: dict[str, int] = {}
    for det in cfg.detectors:
        if det == "widely_linear":
            model = RealCompositeModel(
                h_tilde=build_composite_channel(h_eff, ctx.conj_op, ctx.iq.mu, ctx.iq.nu),
                c_w_tilde=ctx.noise_cov[point_index],
                y_tilde=stack_real(y),
            )
            x_hat = reassemble_complex(lmmse_detect_woodbury(model))
        else:
            x_hat = naive_lmmse(y, h_eff, sigma_n_sq, ctx.iq.mu, ctx.iq.nu)
        bits_hat = demap_hard(x_hat, ctx.constellation)
        errors[det] = int(np.count_nonzero(bits_hat != bits))
    return errors, int(bits.size)


def _worker_count() -> int:
    env = os.environ.get("AFDM_THREADS")
    if env:
        try:
            count = int(env)
        except ValueError as exc:
            raise ConfigError(f"AFDM_THREADS must be an integer, got {env!r}") from exc
        if count < 1:
            raise ConfigError("AFDM_THREADS must be >= 1")
        return count
    return min(4, os.cpu_count() or 1)


def run_sweep(cfg: SimConfig, workers: int | None = None) -> dict[str, BerCurve]:
    """Run the full SNR sweep; one BerCurve per configured detector.

    Frames are independent work units reduced by integer summation, so the
    result is identical for any worker count.
    """
    ctx = _FrameContext(cfg)
    workers = workers if workers is not None else _worker_count()
    totals = {det: [0] * len(cfg.snr_grid_db) for det in cfg.detectors}
    bits_per_frame = cfg.n * ctx.constellation.bits_per_symbol

    def one(task):
        point_index, frame_index = task
        try:
            return run_frame(cfg, point_index, frame_index, ctx=ctx)
        except Exception as exc:
            raise RuntimeError(
                f"frame {frame_index} at grid point {point_index} failed: {exc}"
            ) from exc

    tasks = [
        (pi, fi)
        for pi in range(len(cfg.snr_grid_db))
        for fi in range(cfg.frames_per_point)
    ]
    if workers == 1:
        results = map(one, tasks)
    else:
        pool = ThreadPoolExecutor(max_workers=workers)
        results = pool.map(one, tasks)
    for (point_index, _), (errors, _) in zip(tasks, results):
        for det, cnt in errors.items():
            totals[det][point_index] += cnt
    if workers != 1:
        pool.shutdown()

    bits_total = cfg.frames_per_point * bits_per_frame
    meta = cfg.as_dict()
    meta["snr_convention"] = "symbol SNR, sigma_n^2 = 10^(-snr_db/10)"
    meta["ebn0_offset_db"] = f"{10.0 * math.log10(math.log2(cfg.m)):.6f}"
    curves = {}
    for det in cfg.detectors:
        points = tuple(
            BerPoint(snr_db=snr, bit_errors=totals[det][pi], bits_total=bits_total)
            for pi, snr in enumerate(cfg.snr_grid_db)
        )
        curves[det] = BerCurve(detector=det, points=points, metadata=dict(meta, detector_arm=det))
    return curves


def write_ber_csv(curve: BerCurve, path: str) -> None:
    """CSV rows `snr_db,bit_errors,bits_total,ber` plus a trailing '#'
    metadata block echoing the configuration."""
    try:
        with open(path, "w") as fh:
            fh.write("snr_db,bit_errors,bits_total,ber\n")
            for pt in curve.points:
                fh.write(f"{pt.snr_db:g},{pt.bit_errors},{pt.bits_total},{pt.ber:.10e}\n")
            for key in sorted(curve.metadata):
                fh.write(f"# {key} = {curve.metadata[key]}\n")
    except OSError as exc:
        raise OSError(f"failed writing BER curve to {path}: {exc}") from exc


def wilson_interval(errors: int, total: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if total < 1:
        raise ValueError("total must be >= 1")
    phat = errors / total
    denom = 1.0 + z * z / total
    center = (phat + z * z / (2 * total)) / denom
    half = z * math.sqrt(phat * (1 - phat) / total + z * z / (4 * total * total)) / denom
    return max(0.0, center - half), min(1.0, center + half)
