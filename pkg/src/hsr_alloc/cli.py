"""Command line entry point: ``hsr-alloc <subcommand> [options]``.

Every subcommand writes CSV whose first line is ``# config: ...`` with the
fully resolved configuration, followed by a header row.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from .config import ConfigError, RunConfig, describe, parse_config
from .ici import ici_coeff_approx, ici_coeff_exact
from .optimizer import CPSA_VARIANTS, Infeasible
from .study import Study

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INFEASIBLE = 2
EXIT_BAD_CONFIG = 3


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".10g")
    return str(v)


class CsvOut:
    def __init__(self, cfg: RunConfig, header):
        self.buf = io.StringIO()
        self.buf.write(f"# config: {describe(cfg)}\n")
        self.w = csv.writer(self.buf, lineterminator="\n")
        self.w.writerow(header)

    def row(self, *values):
        self.w.writerow([fmt(v) for v in values])

    def text(self) -> str:
        return self.buf.getvalue()


def cmd_trajectory(study: Study, args) -> tuple[CsvOut, int]:
    out = CsvOut(study.cfg, ["i", "t_seconds", "mr_distance_m", "pathloss", "doppler_hz",
                             "gamma0", "gamma_ici0"])
    for p, f in zip(study.trajectory, study.factors):
        out.row(p.index, p.time, p.mr_distance, p.pathloss, p.doppler, f.gamma0, f.gamma_ici0)
    return out, EXIT_OK


def cmd_ici_table(study: Study, args) -> tuple[CsvOut, int]:
    p = study.params
    fd = args.doppler
    if fd is None:
        fd = abs(study.trajectory.periods[-1].doppler)
    T, N = p.symbol_duration, p.n_subcarriers
    out = CsvOut(study.cfg, ["k", "exact", "approx", "rel_err"])
    for k in range(-args.kmax, args.kmax + 1):
        ex = ici_coeff_exact(k, fd, T, N)
        if k == 0:
            out.row(k, ex, "", "")
            continue
        ap = ici_coeff_approx(k, fd, T, N)
        out.row(k, ex, ap, (ap - ex) / ex if ex else float("nan"))
    return out, EXIT_OK


def cmd_opsa_sweep(study: Study, args) -> tuple[CsvOut, int]:
    out = CsvOut(study.cfg, ["i", "t_seconds", "beta", "eta", "c_mr_bps", "c_users_bps",
                             "feasible"])
    for p, a in zip(study.trajectory, study.sweep()):
        out.row(a.period_i, p.time, a.beta, a.eta, a.c_mr, a.c_users, a.feasible)
    return out, EXIT_OK


def cmd_compare_cpsa(study: Study, args) -> tuple[CsvOut, int]:
    cols = ["i", "t_seconds", "opsa_bps"] + [f"cpsa_{v.lower()}_bps" for v in CPSA_VARIANTS]
    out = CsvOut(study.cfg, cols)
    opt = study.sweep()
    fixed = study.cpsa_all()
    for j, p in enumerate(study.trajectory):
        out.row(p.index, p.time, opt[j].c_mr, *(fixed[v][j].c_mr for v in CPSA_VARIANTS))
    return out, EXIT_OK


def cmd_gap(study: Study, args) -> tuple[CsvOut, int]:
    out = CsvOut(study.cfg, ["i", "c_lower", "c_upper", "gap"])
    for g in study.gaps():
        out.row(g.period_i, g.c_lower, g.c_upper, g.gap)
    return out, EXIT_OK


def cmd_validate(study: Study, args) -> tuple[CsvOut, int]:
    from .validation import run_all

    out = CsvOut(study.cfg, ["criterion", "check", "measured", "tolerance", "status", "detail"])
    ok = True
    for c in run_all(study.cfg):
        out.row(c.criterion, c.name, c.measured, c.tolerance, "pass" if c.passed else "fail",
                c.detail)
        ok &= c.passed
    return out, EXIT_OK if ok else EXIT_CHECK_FAILED


COMMANDS = {
    "trajectory": (cmd_trajectory, "per-period geometry, Doppler and SNR factors"),
    "ici-table": (cmd_ici_table, "closed-form versus approximate ICI coefficients"),
    "opsa-sweep": (cmd_opsa_sweep, "optimal split for every scheduling period"),
    "compare-cpsa": (cmd_compare_cpsa, "MR rate of OPSA against the constant baselines"),
    "gap": (cmd_gap, "ICI-as-noise versus ICI-free bounds and their gap"),
    "validate": (cmd_validate, "run every oracle suite; pass/fail table"),
}


def _override(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {text!r}")
    k, v = text.split("=", 1)
    return k.strip(), v.strip()


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH", help="key = value config file")
    common.add_argument("--seed", type=int, help="root seed for every random stream")
    common.add_argument("--rho", help="user rate target as a share of C_sum")
    common.add_argument("--rate-target", metavar="BPS", help="absolute user rate target (bit/s)")
    common.add_argument("--with-ici", choices=("on", "off"), help="treat ICI as noise (on)")
    common.add_argument("--set", dest="overrides", action="append", type=_override, default=[],
                        metavar="KEY=VALUE", help="override any config key (repeatable)")
    common.add_argument("--out", metavar="PATH", help="write CSV here instead of stdout")

    parser = argparse.ArgumentParser(prog="hsr-alloc", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sp = sub.add_parser(name, parents=[common], help=helptext)
        if name == "ici-table":
            sp.add_argument("--kmax", type=int, default=10)
            sp.add_argument("--doppler", type=float, default=None,
                            help="Doppler in Hz (default: edge-of-cell value)")
    return parser


def config_from_args(args) -> RunConfig:
    overrides = dict(args.overrides)
    for key, value in (("seed", args.seed), ("rho", args.rho), ("rate_target", args.rate_target),
                       ("with_ici", args.with_ici)):
        if value is not None:
            overrides[key] = str(value)
    return parse_config(args.config, overrides)


def _emit(text, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = config_from_args(args)
    except ConfigError as exc:
        print(f"hsr-alloc: config error: {exc}", file=sys.stderr)
        return EXIT_BAD_CONFIG
    if args.command == "ici-table" and args.kmax < 0:
        parser.error("--kmax must be nonnegative")
    study = Study(cfg)
    fn = COMMANDS[args.command][0]
    try:
        out, code = fn(study, args)
    except Infeasible as exc:
        out = CsvOut(cfg, ["status", "reason", "r_th_bps", "c_sum_bps", "message"])
        out.row("error", "infeasible", study.target.r_th, study.target.c_sum, str(exc))
        code = EXIT_INFEASIBLE
        print(f"hsr-alloc: {exc}", file=sys.stderr)
    _emit(out.text(), args.out)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
