"""Command-line entry point.

Subcommands: sample | limit | moments | duality | lln | clt | check.

Settings come from an optional flat ``key = value`` file (``--config``),
overridden by command-line flags. Outputs go to ``--out``:

    sample   eigenvalues.csv   replica,index,lambda
             weights.csv       replica,index,q_squared
    limit    density_mp.csv / density_nu.csv / density_assoc.csv   x,density
             density.svg (with --svg)
    moments  moments.txt       canonical polynomial text per order
             mean_moments.csv  r,exact_mean   (when N, M and beta are given)
    duality  duality.txt
    lln      lln.csv, lln.txt
    clt      clt.csv, clt.txt
    check    check.csv, check.txt

Experiment CSVs share the report schema
``step,N,M,beta,statistic,estimate,stderr,target,tolerance,passed``.
Every float is written with 17 significant digits. A run with any failed
assertion writes ``failures.json`` and exits with status 1. Bad parameters
exit with 2, numerical breakdown with 3, I/O errors with 4.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict, dataclass, fields
from pathlib import Path

import numpy as np

from . import experiments as ex
from .csvio import write_csv
from .errors import DomainError, NumericalError, ParameterError
from .exact import DEGREE_CAP, mean_unscaled_moment, moment_poly, verify_duality
from .laws import (AssocLaguerreLaw, MpLaw, NuLaw, assoc_laguerre_density, mp_density,
                   nu_density)
from .tridiag import EnsembleParams

SUBCOMMANDS = ("sample", "limit", "moments", "duality", "lln", "clt", "check")
REGIMES = ("fixed_beta", "beta_n_to_infinity", "high_temperature")

TEST_FUNCTIONS = {
    "x": (lambda x: x, lambda x: np.ones_like(x)),
    "x2": (lambda x: x**2, lambda x: 2 * x),
    "x3": (lambda x: x**3, lambda x: 3 * x**2),
    "log1p": (np.log1p, lambda x: 1 / (1 + x)),
    "sin": (np.sin, np.cos),
    "const": (lambda x: np.ones_like(x), lambda x: np.zeros_like(x)),
}


@dataclass
class RunConfig:
    subcommand: str
    n: int = None
    m: float = None
    beta: float = None
    gamma: float = None
    c: float = None
    alpha: float = None
    law: str = None
    regime: str = "fixed_beta"
    schedule: tuple = ()
    replicas: int = 200
    r_max: int = 4
    tol: float = None
    f: str = "x"
    master_seed: int = 0
    out: str = "."
    svg: bool = False
    workers: int = 1

    def validate(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ParameterError(f"unknown subcommand {self.subcommand!r}")
        if self.regime not in REGIMES:
            raise ParameterError(f"regime must be one of {REGIMES}")
        if self.replicas < 1:
            raise ParameterError("replicas must be positive")
        if self.workers < 1:
            raise ParameterError("workers must be positive")
        if not 0 <= self.r_max <= DEGREE_CAP:
            raise ParameterError(f"rmax must be in 0..{DEGREE_CAP}")
        if self.f not in TEST_FUNCTIONS:
            raise ParameterError(f"f must be one of {sorted(TEST_FUNCTIONS)}")
        if not 0 <= self.master_seed < 2**64:
            raise ParameterError("seed must fit in 64 bits")
        if self.gamma is not None and not 0 < self.gamma < 1:
            raise ParameterError("gamma must lie in (0, 1)")
        if self.tol is not None and not self.tol > 0:
            raise ParameterError("tol must be positive")
        if self.subcommand in ("sample", "check") or (self.subcommand == "moments" and self.n):
            self.ensemble()
        if self.subcommand in ("lln", "clt"):
            self.regime_spec()
        if self.subcommand == "clt" and self.replicas < 1000:
            raise ParameterError("clt needs at least 1000 replicas")
        return self

    def ensemble(self) -> EnsembleParams:
        if self.n is None or self.beta is None:
            raise ParameterError("--n and --beta are required")
        m = self.m
        if m is None:
            if self.gamma is None:
                raise ParameterError("give --m or --gamma")
            m = self.n / self.gamma
        return EnsembleParams(self.n, m, self.beta)

    def regime_spec(self) -> ex.RegimeSpec:
        if self.gamma is None:
            raise ParameterError("--gamma is required for regime runs")
        ns = tuple(self.schedule) or ((self.n,) if self.n else ())
        if not ns:
            raise ParameterError("give --n or --schedule")
        if self.regime == "fixed_beta":
            if self.beta is None:
                raise ParameterError("fixed_beta needs --beta")
            return ex.RegimeSpec.fixed_beta(self.beta, self.gamma, ns)
        if self.regime == "beta_n_to_infinity":
            return ex.RegimeSpec.beta_n_to_infinity(self.gamma, ns, beta0=self.beta or 1.0)
        if self.c is None:
            raise ParameterError("high_temperature needs --c")
        return ex.RegimeSpec.high_temperature(self.c, self.gamma, ns)


_CASTS = {"n": int, "m": float, "beta": float, "gamma": float, "c": float, "alpha": float,
          "law": str, "regime": str, "replicas": int, "r_max": int, "tol": float, "f": str,
          "master_seed": int, "out": str, "workers": int,
          "svg": lambda s: s.strip().lower() in ("1", "true", "yes", "on"),
          "schedule": lambda s: tuple(int(v) for v in s.replace(",", " ").split())}
_ALIASES = {"rmax": "r_max", "seed": "master_seed", "N": "n", "M": "m"}


def read_config_file(path) -> dict:
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    out = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ParameterError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = _ALIASES.get(key, key)
            if key not in _CASTS:
                raise ParameterError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                out[key] = _CASTS[key](value)
            except ValueError as err:
                raise ParameterError(f"{path}:{lineno}: bad value for {key}: {err}") from None
    return out


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--n", type=int)
    common.add_argument("--m", type=float)
    common.add_argument("--beta", type=float)
    common.add_argument("--gamma", type=float)
    common.add_argument("--c", type=float)
    common.add_argument("--alpha", type=float)
    common.add_argument("--law", choices=("mp", "nu", "assoc"))
    common.add_argument("--regime", choices=REGIMES)
    common.add_argument("--schedule", type=_CASTS["schedule"], help="N values, e.g. 100,200,400")
    common.add_argument("--replicas", type=int)
    common.add_argument("--rmax", dest="r_max", type=int)
    common.add_argument("--tol", type=float)
    common.add_argument("--f", choices=sorted(TEST_FUNCTIONS))
    common.add_argument("--seed", dest="master_seed", type=int)
    common.add_argument("--out")
    common.add_argument("--svg", action="store_const", const=True)
    common.add_argument("--workers", type=int)
    parser = argparse.ArgumentParser(prog="betalaguerre", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub.add_parser(name, parents=[common])
    return parser


def config_from_args(argv) -> RunConfig:
    ns = build_parser().parse_args(argv)
    values = read_config_file(ns.config) if ns.config else {}
    for f in fields(RunConfig):
        v = getattr(ns, f.name, None)
        if v is not None and f.name != "subcommand":
            values[f.name] = v
    return RunConfig(subcommand=ns.subcommand, **values).validate()


# commands ------------------------------------------------------------------

def cmd_sample(cfg: RunConfig):
    p = cfg.ensemble()
    spectra = ex.simulate(p, cfg.replicas, cfg.master_seed, 0, weights=True, workers=cfg.workers)
    out = Path(cfg.out)
    idx = np.arange(p.N)
    eig_rows = [(k, i, lam) for k in range(cfg.replicas) for i, lam in zip(idx, spectra.eigenvalues[k])]
    w_rows = [(k, i, q) for k in range(cfg.replicas) for i, q in zip(idx, spectra.weights[k])]
    write_csv(out / "eigenvalues.csv", ("replica", "index", "lambda"), eig_rows)
    write_csv(out / "weights.csv", ("replica", "index", "q_squared"), w_rows)
    failures = []
    sums = spectra.weights.sum(axis=1)
    for k in np.flatnonzero(np.abs(sums - 1) > 1e-12):
        failures.append({"check": "weights_sum", "replica": int(k), "value": float(sums[k])})
    print(f"wrote {cfg.replicas * p.N} eigenvalues to {out / 'eigenvalues.csv'}")
    return failures


def _grid_for(law, points=401):
    if isinstance(law, MpLaw):
        return np.linspace(0.0, 1.1 * law.lam_plus, points)
    if isinstance(law, NuLaw):
        hi = law.scale * law.base.x_cut
        return np.linspace(0.0, min(hi, 10 * law.scale * (law.alpha + 2 * law.c + 10)), points)
    return np.linspace(0.0, law.x_cut, points)


def cmd_limit(cfg: RunConfig):
    kind = cfg.law or ("nu" if cfg.c is not None and cfg.alpha is None else "mp")
    if kind == "assoc" or cfg.alpha is not None:
        if cfg.alpha is None or cfg.c is None:
            raise ParameterError("the associated Laguerre law needs --alpha and --c")
        law = AssocLaguerreLaw(cfg.alpha, cfg.c)
        kind, density = "assoc", (lambda x: assoc_laguerre_density(law, x))
        if cfg.c == 0:
            print(f"c = 0: Gamma({cfg.alpha + 1}, 1) density")
    elif kind == "nu":
        if cfg.gamma is None or cfg.c is None:
            raise ParameterError("the high-temperature law needs --gamma and --c")
        law = NuLaw(cfg.gamma, cfg.c)
        density = lambda x: nu_density(law, x)  # noqa: E731
    else:
        if cfg.gamma is None:
            raise ParameterError("the Marchenko-Pastur law needs --gamma")
        law = MpLaw(cfg.gamma)
        density = lambda x: mp_density(law, x)  # noqa: E731
    grid = _grid_for(law)
    out = Path(cfg.out)
    write_csv(out / f"density_{kind}.csv", ("x", "density"), zip(grid, density(grid)))
    print(f"wrote {len(grid)} points to {out / f'density_{kind}.csv'}")
    if cfg.svg:
        if kind == "assoc":
            raise ParameterError("--svg overlays need an ensemble limit law (mp or nu)")
        n = cfg.n or (cfg.schedule[-1] if cfg.schedule else 200)
        if kind == "nu":
            p = EnsembleParams(n, n / cfg.gamma, 2 * cfg.c / n)
        else:
            p = EnsembleParams(n, n / cfg.gamma, cfg.beta or 2.0)
        sp = ex.simulate(p, cfg.replicas, cfg.master_seed, 0, workers=cfg.workers)
        from .plotting import density_overlay_svg
        sup = density_overlay_svg(out / "density.svg", sp.eigenvalues, density, grid,
                                  f"{kind} law, N={p.N}, beta={p.beta:.4g}, {cfg.replicas} replicas")
        print(f"sup discrepancy: {sup:.6g}")
    return []


def cmd_moments(cfg: RunConfig):
    out = Path(cfg.out)
    lines = []
    for r in range(cfg.r_max + 1):
        lines.append(f"# m_{r}(N, kappa, alpha)")
        lines.append(moment_poly(r).to_text())
    text = "\n".join(lines) + "\n"
    (out / "moments.txt").write_text(text)
    print(text, end="")
    if cfg.n is not None:
        p = cfg.ensemble()
        rows = [(r, float(mean_unscaled_moment(p, r))) for r in range(cfg.r_max + 1)]
        write_csv(out / "mean_moments.csv", ("r", "exact_mean"), rows)
        for r, v in rows:
            print(f"E<L_N, x^{r}> = {v!r}")
    return []


def cmd_duality(cfg: RunConfig):
    failures, lines = [], []
    for r in range(1, cfg.r_max + 1):
        ok, residual = verify_duality(r)
        lines.append(f"r = {r}")
        lines.append("residual: 0" if ok else "residual:\n" + residual.to_text())
        if not ok:
            failures.append({"check": "duality", "r": r, "residual": residual.to_text()})
    text = "\n".join(lines) + "\n"
    (Path(cfg.out) / "duality.txt").write_text(text)
    print(text, end="")
    return failures


def _emit(report: ex.ExperimentReport, cfg: RunConfig, name: str):
    out = Path(cfg.out)
    report.to_csv(out / f"{name}.csv")
    text = report.summary()
    (out / f"{name}.txt").write_text(text + "\n")
    print(text)
    return [dict(r, experiment=report.name) for r in report.failures]


def cmd_lln(cfg: RunConfig):
    regime = cfg.regime_spec()
    rep = ex.run_lln(regime, cfg.r_max or 4, cfg.replicas, cfg.master_seed, tol=cfg.tol,
                     workers=cfg.workers)
    return _emit(rep, cfg, "lln")


def cmd_clt(cfg: RunConfig):
    regime = cfg.regime_spec()
    f, fp = TEST_FUNCTIONS[cfg.f]
    target = 2 * cfg.gamma if cfg.f == "x" else None
    rep = ex.run_clt(f, fp, regime, cfg.replicas, cfg.master_seed, target=target,
                     workers=cfg.workers)
    return _emit(rep, cfg, "clt")


def cmd_check(cfg: RunConfig):
    p = cfg.ensemble()
    f, fp = TEST_FUNCTIONS[cfg.f]
    reports = [
        ex.check_variance_relation(p, f, cfg.replicas, cfg.master_seed, step=0, workers=cfg.workers),
        ex.check_poincare_matrix(p, f, fp, cfg.replicas, cfg.master_seed, step=1, workers=cfg.workers),
        ex.check_poincare_alpha(p, f, fp, cfg.replicas, cfg.master_seed, step=2, workers=cfg.workers),
        ex.check_chi_poincare(cfg.beta * (p.M - p.N + 1), f, fp, max(cfg.replicas, 1000),
                              cfg.master_seed, step=3),
    ]
    merged = ex.ExperimentReport("check", cfg.master_seed, config={"f": cfg.f})
    for rep in reports:
        for row in rep.rows:
            merged.rows.append(dict(row, statistic=f"{rep.name}.{row['statistic']}"))
        merged.wall_clock += rep.wall_clock
    return _emit(merged, cfg, "check")


COMMANDS = {"sample": cmd_sample, "limit": cmd_limit, "moments": cmd_moments,
            "duality": cmd_duality, "lln": cmd_lln, "clt": cmd_clt, "check": cmd_check}


def main(argv=None):
    try:
        cfg = config_from_args(sys.argv[1:] if argv is None else argv)
        out = Path(cfg.out)
        out.mkdir(parents=True, exist_ok=True)
        failures = COMMANDS[cfg.subcommand](cfg)
    except (ParameterError, DomainError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"numerical failure: {err}", file=sys.stderr)
        return 3
    except OSError as err:
        print(f"I/O error: {err.filename}: {err.strerror}", file=sys.stderr)
        return 4
    fail_path = out / "failures.json"
    if failures:
        fail_path.write_text(json.dumps({"config": asdict(cfg), "failures": failures},
                                        indent=2, default=str) + "\n")
        print(f"{len(failures)} assertion(s) failed; see {fail_path}", file=sys.stderr)
        return 1
    if fail_path.exists():
        fail_path.unlink()
    return 0


if __name__ == "__main__":
    sys.exit(main())
