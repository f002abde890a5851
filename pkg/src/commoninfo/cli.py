"""Command-line front end: ``commoninfo {discrete,gaussian,lossy,verify}``."""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import gaussian as G
from .errors import BadParameter, CommonInfoError, Infeasible, NotConverged, TooLarge
from .gk import gk_common_information
from .prob import load_pmf

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_NOT_CONVERGED, EXIT_INFEASIBLE = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    pmf_file: str | None = None
    rho: float | None = None
    d1: float | None = None
    d2: float | None = None
    d1_grid: tuple = ()
    restarts: int = 8
    seed: int = 0
    lambda_grid: tuple = ()
    out: str | None = None
    only: tuple = ()
    quiet: bool = False

    def __post_init__(self):
        if self.subcommand in ("discrete", "lossy") and self.pmf_file is None:
            raise BadParameter(f"{self.subcommand} needs a PMF file")
        if self.subcommand == "gaussian" and (self.rho is None or self.pmf_file is not None):
            raise BadParameter("gaussian needs --rho and no PMF file")
        if len(self.d1_grid) > 1 and np.any(np.diff(self.d1_grid) <= 0):
            raise BadParameter("grids must be strictly increasing")

    def solver_config(self):
        from .tradeoff import SolverConfig

        kw = {"restarts": self.restarts, "rng_seed": self.seed}
        if self.lambda_grid:
            kw["lagrange_grid"] = self.lambda_grid
        return SolverConfig(**kw)


def parse_grid(text: str) -> tuple:
    """``start:stop:step`` (stop included when it lands on the grid)."""
    try:
        start, stop, step = (float(v) for v in text.split(":"))
    except ValueError as exc:
        raise BadParameter(f"grid must be start:stop:step, got {text!r}") from exc
    if not step > 0 or stop < start:
        raise BadParameter("grids must be strictly increasing")
    n = int(np.floor((stop - start) / step + 1e-9)) + 1
    return tuple(float(v) for v in np.round(start + step * np.arange(n), 12))


def _floats(text: str) -> tuple:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError as exc:
        raise BadParameter(f"expected comma-separated numbers, got {text!r}") from exc


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating, int, np.integer)):
        return f"{float(v):.9g}"
    return str(v)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _say(cfg: RunConfig, msg: str) -> None:
    if cfg.quiet:
        return
    # keep stdout clean when it carries CSV
    stream = sys.stderr if (cfg.out is None and cfg.subcommand in ("gaussian", "lossy")) else sys.stdout
    print(msg, file=stream)


# ---------------------------------------------------------------------------
# subcommands


def cmd_discrete(cfg: RunConfig) -> int:
    from .tradeoff import c_curve, k_curve, oracle_c_curve, wyner_ci, write_curve_csv

    pmf = load_pmf(cfg.pmf_file)
    scfg = cfg.solver_config()
    w = wyner_ci(pmf, scfg)
    gk = gk_common_information(pmf)
    _say(cfg, f"H(X)   = {pmf.hx():.6f} bits")
    _say(cfg, f"H(Y)   = {pmf.hy():.6f} bits")
    _say(cfg, f"H(X,Y) = {pmf.hxy():.6f} bits")
    _say(cfg, f"I(X;Y) = {pmf.mi():.6f} bits")
    _say(cfg, f"C_GK   = {gk:.6f} bits (exact)")
    line = f"C_W    = {w.value:.6f} bits (residual {w.residual:.2e})"
    if pmf.shape[0] * pmf.shape[1] <= 4:
        try:
            o = oracle_c_curve(pmf, grid_step=0.05)[0].shared_rate
            lo, hi = sorted((w.value, o))
            line += f", oracle bracket [{lo:.6f}, {hi:.6f}]"
        except TooLarge:
            pass
    if w.ambiguous:
        line += ", optimizer not unique"
    _say(cfg, line)
    out = Path(cfg.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    write_curve_csv(c_curve(pmf, scfg), out / "c_curve.csv")
    write_curve_csv(k_curve(pmf, scfg), out / "k_curve.csv")
    _say(cfg, f"curves written to {out / 'c_curve.csv'} and {out / 'k_curve.csv'}")
    if not w.converged:
        raise NotConverged("Wyner solver did not converge; curves are partial")
    return EXIT_OK


GAUSS_HEADER = ("d1", "d2", "regime", "joint_rd_bits", "lossy_ci_bits", "slb_bits", "slb_tight")


def cmd_gaussian(cfg: RunConfig) -> int:
    if not 0 <= cfg.rho < 1:
        raise BadParameter("rho must satisfy 0 <= rho < 1")
    src = G.GaussianSource(cfg.rho)
    d2 = 0.2 if cfg.d2 is None else cfg.d2
    grid = cfg.d1_grid or ((cfg.d1,) if cfg.d1 is not None else parse_grid("0.01:0.99:0.01"))
    fig = G.fig2_curve(src, d2, grid)
    rows = []
    for d1, val, reg in zip(fig.d1, fig.values, fig.regimes):
        slb, tight = G.gaussian_slb(src, d1, d2)
        rows.append((d1, d2, reg.value, G.gaussian_joint_rd(src, d1, d2), val, slb, tight))
    _emit(_csv_text(GAUSS_HEADER, rows), cfg.out)
    _say(cfg, f"rho={src.rho:.9g} D2={d2:.9g}: A at D1={fig.point_a:.9g}, B at D1={fig.point_b:.9g}, "
              f"lossless C_W={G.gaussian_wyner_ci_lossless(src):.6f} bits")
    return EXIT_OK


LOSSY_HEADER = ("d1", "d2", "rate_bits", "lossy_wyner_bits", "lb", "ub", "epsilon")


def cmd_lossy_discrete(cfg: RunConfig) -> int:
    from .lossy import DistortionSpec, check_corollary1, lossy_wyner_ci
    from .region import lossy_point, pangloss_gap

    pmf = load_pmf(cfg.pmf_file)
    spec = DistortionSpec.hamming(*pmf.shape)
    d2 = 0.0 if cfg.d2 is None else cfg.d2
    grid = cfg.d1_grid or (0.0 if cfg.d1 is None else cfg.d1,)
    scfg = cfg.solver_config()
    rows, converged = [], True
    for d1 in grid:
        res = lossy_wyner_ci(pmf, spec, d1, d2, scfg)
        b = res.bounds
        rows.append((d1, d2, res.rd.rate, res.value, b.lower, b.upper, b.epsilon))
        cor = check_corollary1(res.decomposition, res.rd)
        pt, _, _ = lossy_point(res.decomposition.dist(), spec, f"d{d1:.9g}_{d2:.9g}")
        converged &= res.rd.converged
        _say(cfg, f"D=({d1:.6g},{d2:.6g}): R={res.rd.rate:.6f} C_W={res.value:.6f} "
                  f"bounds=[{b.lower:.6f},{b.upper:.6f}] eps={b.epsilon:.1e} "
                  f"pangloss_gap={pangloss_gap(pt, res.rd.rate):+.2e} "
                  f"recon_markov_max={max(cor['residuals'].values()):.2e}")
    _emit(_csv_text(LOSSY_HEADER, rows), cfg.out)
    if not converged:
        raise NotConverged("rate-distortion solver did not converge")
    return EXIT_OK


def cmd_verify(cfg: RunConfig) -> int:
    from . import acceptance

    results = acceptance.run(cfg.only, seed=cfg.seed)
    for r in results:
        _say(cfg, r.line())
    report = {"seed": cfg.seed, "passed": all(r.passed for r in results),
              "criteria": [r.report() for r in results]}
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if cfg.out:
        Path(cfg.out).write_text(text)
    elif not cfg.quiet:
        sys.stdout.write(text)
    return EXIT_OK if report["passed"] else EXIT_FAIL


COMMANDS = {"discrete": cmd_discrete, "gaussian": cmd_gaussian, "lossy": cmd_lossy_discrete,
            "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="commoninfo", description="Common information of correlated sources.")
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def solver_flags(p):
        p.add_argument("--restarts", type=int, default=8)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--lambda-grid", default="", help="comma-separated Lagrange weights")
        p.add_argument("--format", choices=["csv"], default="csv")
        p.add_argument("--quiet", action="store_true")

    p = sub.add_parser("discrete", help="entropies, C_GK, C_W and tradeoff curves of a PMF file")
    p.add_argument("pmf_file")
    p.add_argument("--out", help="directory for c_curve.csv and k_curve.csv (default: current)")
    solver_flags(p)

    p = sub.add_parser("gaussian", help="lossy CI sweep for a bivariate Gaussian source")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--d1", type=float)
    p.add_argument("--d2", type=float, default=0.2)
    p.add_argument("--d1-grid", default="")
    p.add_argument("--out", help="CSV path (default: standard output)")
    solver_flags(p)

    p = sub.add_parser("lossy", help="joint RD and lossy Wyner CI of a PMF file (Hamming)")
    p.add_argument("pmf_file")
    p.add_argument("--d1", type=float, default=0.0)
    p.add_argument("--d2", type=float, default=0.0)
    p.add_argument("--d1-grid", default="")
    p.add_argument("--out", help="CSV path (default: standard output)")
    solver_flags(p)

    p = sub.add_parser("verify", help="run the acceptance suite")
    p.add_argument("--only", default="", help="comma-separated criterion names or numbers")
    p.add_argument("--out", help="JSON report path (default: standard output)")
    solver_flags(p)
    return ap


def config_from_args(ns: argparse.Namespace) -> RunConfig:
    return RunConfig(
        subcommand=ns.subcommand,
        pmf_file=getattr(ns, "pmf_file", None),
        rho=getattr(ns, "rho", None),
        d1=getattr(ns, "d1", None),
        d2=getattr(ns, "d2", None),
        d1_grid=parse_grid(ns.d1_grid) if getattr(ns, "d1_grid", "") else (),
        restarts=ns.restarts,
        seed=ns.seed,
        lambda_grid=_floats(ns.lambda_grid) if ns.lambda_grid else (),
        out=ns.out,
        only=tuple(v for v in getattr(ns, "only", "").split(",") if v.strip()),
        quiet=ns.quiet,
    )


def main(argv=None) -> int:
    ns = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.subcommand](cfg)
    except NotConverged as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except Infeasible as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (CommonInfoError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
