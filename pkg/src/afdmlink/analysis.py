"""Structural metrics for the effective channel and the conjugate operator:
energy leakage off the zero-CFO support, nonzero density, and CSV export of
matrix magnitudes for heatmap reproduction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "LeakageMetric",
    "DensityStats",
    "leakage_metric",
    "density_stats",
    "export_matrix_magnitudes",
    "import_matrix_magnitudes",
]

DEFAULT_SUPPORT_THRESHOLD = 1e-9


@dataclass(frozen=True)
class LeakageMetric:
    """Fraction of a matrix's energy lying off the reference support."""

    support_energy_fraction: float
    leakage: float
    threshold: float
    support: np.ndarray  # bool mask derived from the eps=0 reference


@dataclass(frozen=True)
class DensityStats:
    nnz: int
    density: float
    per_row_max_nnz: int


def leakage_metric(
    h_eff_with_eps: np.ndarray,
    h_eff_zero_eps: np.ndarray,
    threshold: float = DEFAULT_SUPPORT_THRESHOLD,
) -> LeakageMetric:
    """Energy of the CFO-impaired matrix outside the eps=0 support.

    The support is taken from the reference matrix only; leakage is
    1 - (on-support energy)/(total energy) of the impaired matrix.
    """
    a = np.asarray(h_eff_with_eps)
    b = np.asarray(h_eff_zero_eps)
    if a.shape != b.shape:
        raise ValueError(f"shape mismatch: {a.shape} vs {b.shape}")
    support = np.abs(b) > threshold
    total = float(np.sum(np.abs(a) ** 2))
    on_support = float(np.sum(np.abs(a[support]) ** 2))
    frac = on_support / total if total > 0 else 1.0
    return LeakageMetric(
        support_energy_fraction=frac,
        leakage=1.0 - frac,
        threshold=threshold,
        support=support,
    )


def density_stats(matrix: np.ndarray, threshold: float = DEFAULT_SUPPORT_THRESHOLD) -> DensityStats:
    """Count entries with magnitude above threshold."""
    if threshold <= 0:
        raise ValueError(f"threshold must be positive, got {threshold}")
    mask = np.abs(np.asarray(matrix)) > threshold
    nnz = int(mask.sum())
    return DensityStats(
        nnz=nnz,
        density=nnz / mask.size,
        per_row_max_nnz=int(mask.sum(axis=1).max()),
    )


def export_matrix_magnitudes(matrix: np.ndarray, path: str, params: dict | None = None) -> None:
    """Write |matrix| as plain CSV, one row per line, 6 significant digits.

    The first line is a '#' header carrying the dimensions and any extra
    parameters, so the file round-trips through import_matrix_magnitudes.
    """
    mag = np.abs(np.asarray(matrix))
    fields = [f"rows={mag.shape[0]}", f"cols={mag.shape[1]}"]
    for key, val in (params or {}).items():
        fields.append(f"{key}={val}")
    try:
        with open(path, "w") as fh:
            fh.write("# " + " ".join(fields) + "\n")
            for row in mag:
                fh.write(",".join(f"{v:.6g}" for v in row) + "\n")
    except OSError as exc:
        raise OSError(f"failed writing matrix magnitudes to {path}: {exc}") from exc


def import_matrix_magnitudes(path: str) -> np.ndarray:
    """Read back a file written by export_matrix_magnitudes."""
    try:
        return np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    except OSError as exc:
        raise OSError(f"failed reading matrix magnitudes from {path}: {exc}") from exc
