"""AFDM link-level simulation under receiver IQ imbalance and residual CFO,
with a widely-linear LMMSE detector and matrix-structure analysis."""

from .daft import (
    AfdmParams,
    apply_daft,
    apply_idaft,
    conj_operator,
    cyclic_shift_matrix,
    daft_matrix,
    dft_matrix,
    mirror_permutation,
    operator_entry_bruteforce,
    phase_diag,
    zero_pattern_predicate,
    zero_pattern_report,
)
from .impairments import (
    ChannelConfig,
    ChannelRealization,
    CfoRealization,
    ImpairmentParams,
    apply_channel_time,
    build_heff,
    derive_iq_params,
    draw_residual_cfo,
    gen_improper_noise,
    sample_channel,
)
from .modem import Constellation, Frame, demap_hard, demodulate, map_bits, modulate, square_qam
from .detector import (
    RealCompositeModel,
    build_composite_channel,
    build_model,
    build_noise_covariance,
    lmmse_detect,
    lmmse_detect_woodbury,
    naive_lmmse,
    reassemble_complex,
    stack_real,
)
from .analysis import (
    DensityStats,
    LeakageMetric,
    density_stats,
    export_matrix_magnitudes,
    import_matrix_magnitudes,
    leakage_metric,
)
from .simharness import (
    BerCurve,
    BerPoint,
    SimConfig,
    load_config,
    run_frame,
    run_sweep,
    snr_to_noise_var,
    wilson_interval,
    write_ber_csv,
)

__version__ = "0.1.0"
