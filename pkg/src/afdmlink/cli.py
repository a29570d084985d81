"""Command-line front end: BER sweeps and matrix-structure dumps."""

from __future__ import annotations

import argparse
import sys

import numpy as np

from .analysis import export_matrix_magnitudes, leakage_metric
from .daft import AfdmParams, conj_operator, daft_matrix, zero_pattern_report
from .detector import build_composite_channel
from .impairments import build_heff, draw_residual_cfo, sample_channel
from .simharness import ConfigError, load_config, run_sweep, write_ber_csv


def _out_path(base: str, detector: str, multi: bool) -> str:
    if not multi:
        return base
    stem, dot, ext = base.rpartition(".")
    if not dot:
        return f"{base}.{detector}"
    return f"{stem}.{detector}.{ext}"


def _cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    curves = run_sweep(cfg)
    multi = len(curves) > 1
    for det, curve in curves.items():
        path = _out_path(args.out, det, multi)
        write_ber_csv(curve, path)
        print(f"wrote {path}")
    return 0


def _cmd_operator(args) -> int:
    p = AfdmParams.from_k(args.n, args.k, args.c2)
    op = conj_operator(p)
    export_matrix_magnitudes(op, args.out, params={"n": p.n, "k": p.k, "c2": p.c2})
    print(f"wrote {args.out}")
    if args.report:
        report = zero_pattern_report(args.n, args.k)
        with open(args.report, "w") as fh:
            fh.write(report.summary() + "\n")
        print(f"wrote {args.report}")
    return 0


def _cmd_heff(args) -> int:
    cfg = load_config(args.config)
    p = cfg.afdm_params()
    a = daft_matrix(p)
    rng = np.random.default_rng(cfg.seed)
    ch = sample_channel(cfg.channel_config(), rng)
    eps = draw_residual_cfo(args.sigma_eps, rng)
    h_eps = build_heff(p, ch, eps, daft=a)
    h_ref = build_heff(p, ch, 0.0, daft=a)
    export_matrix_magnitudes(
        h_eps, args.out,
        params={"n": p.n, "k": p.k, "c2": p.c2, "sigma_eps_sq": args.sigma_eps,
                "epsilon": f"{eps.epsilon:.6g}", "seed": cfg.seed},
    )
    metric = leakage_metric(h_eps, h_ref)
    print(f"wrote {args.out}")
    print(f"leakage = {metric.leakage:.6g} (support threshold {metric.threshold:g})")
    return 0


def _cmd_composite(args) -> int:
    cfg = load_config(args.config)
    p = cfg.afdm_params()
    a = daft_matrix(p)
    iq = cfg.impairment_params()
    rng = np.random.default_rng(cfg.seed)
    ch = sample_channel(cfg.channel_config(), rng)
    eps = draw_residual_cfo(cfg.sigma_eps_sq, rng)
    h_eff = build_heff(p, ch, eps, daft=a)
    h_tilde = build_composite_channel(h_eff, a @ a.T, iq.mu, iq.nu)
    export_matrix_magnitudes(
        h_tilde, args.out,
        params={"n": p.n, "k": p.k, "c2": p.c2, "psi": cfg.psi,
                "phi_deg": cfg.phi_deg, "sigma_eps_sq": cfg.sigma_eps_sq,
                "seed": cfg.seed},
    )
    print(f"wrote {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afdmlink",
        description="AFDM link simulation under receiver IQ imbalance and residual CFO",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a Monte Carlo BER sweep")
    sim.add_argument("--config", required=True, help="flat key=value config file")
    sim.add_argument("--out", required=True, help="output CSV path")
    sim.set_defaults(func=_cmd_simulate)

    op = sub.add_parser("operator", help="dump |A A^T| and its zero-pattern report")
    op.add_argument("--n", type=int, required=True)
    op.add_argument("--k", type=int, required=True, help="integer 2*N*c1")
    op.add_argument("--c2", type=float, default=0.0)
    op.add_argument("--out", required=True, help="CSV of entry magnitudes")
    op.add_argument("--report", help="text file for the zero-pattern report")
    op.set_defaults(func=_cmd_operator)

    heff = sub.add_parser("heff", help="dump |H_eff| for one channel draw")
    heff.add_argument("--config", required=True)
    heff.add_argument("--sigma-eps", type=float, required=True,
                      dest="sigma_eps", help="residual CFO variance")
    heff.add_argument("--out", required=True)
    heff.set_defaults(func=_cmd_heff)

    comp = sub.add_parser("composite", help="dump |H_tilde| (stacked real channel)")
    comp.add_argument("--config", required=True)
    comp.add_argument("--out", required=True)
    comp.set_defaults(func=_cmd_composite)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
