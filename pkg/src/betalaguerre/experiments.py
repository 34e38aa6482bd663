"""Monte Carlo experiments on the beta-Laguerre tridiagonal model.

Replica ``i`` of regime step ``s`` always draws from the stream
``SeedSpec(master_seed, i, s)``, and per-replica results land in fixed array
slots, so reports do not depend on how many worker threads were used.
Standard errors of nonlinear statistics (variances, differences of
variances, inequality slacks) come from a delete-a-group jackknife over
contiguous replica blocks.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .errors import ParameterError
from .exact import DEGREE_CAP, mean_unscaled_moment
from .laws import MpLaw, NuLaw, clt_variance_mp, mp_cdf, mp_integrate, mp_moment, mu1_expectation, nu_moment
from .rng import SeedSpec, sample_chi
from .tridiag import EnsembleParams, sample_spectrum

ROUNDING_FLOOR = 1e-12
REPORT_COLUMNS = ("step", "N", "M", "beta", "statistic", "estimate", "stderr",
                  "target", "tolerance", "passed")


@dataclass(frozen=True)
class RegimeSpec:
    kind: str
    gamma: float
    steps: tuple
    c: float = None

    KINDS = ("fixed_beta", "beta_n_to_infinity", "high_temperature")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise ParameterError(f"unknown regime kind {self.kind!r}")
        if not 0 < self.gamma < 1:
            raise ParameterError("gamma must lie in (0, 1)")
        if not self.steps:
            raise ParameterError("a regime needs at least one step")
        if self.kind == "high_temperature":
            if self.c is None or not self.c > 0:
                raise ParameterError("high_temperature needs c > 0")
            for p in self.steps:
                if abs(p.beta * p.N - 2 * self.c) > 1e-12 * 2 * self.c:
                    raise ParameterError(f"beta * N = {p.beta * p.N} differs from 2c = {2 * self.c}")
        gaps = [abs(p.gamma - self.gamma) for p in self.steps]
        if any(b > a + 1e-15 for a, b in zip(gaps, gaps[1:])):
            raise ParameterError("N/M must approach gamma monotonically along the schedule")

    @classmethod
    def fixed_beta(cls, beta, gamma, Ns):
        return cls("fixed_beta", gamma, tuple(EnsembleParams(n, n / gamma, beta) for n in Ns))

    @classmethod
    def beta_n_to_infinity(cls, gamma, Ns, beta0=1.0, power=0.5):
        """``beta = beta0 * N^-power`` with ``power < 1``, so ``beta N`` grows."""
        if not power < 1:
            raise ParameterError("power must be below 1 for beta N to diverge")
        return cls("beta_n_to_infinity", gamma,
                   tuple(EnsembleParams(n, n / gamma, beta0 * n**-power) for n in Ns))

    @classmethod
    def high_temperature(cls, c, gamma, Ns):
        return cls("high_temperature", gamma,
                   tuple(EnsembleParams(n, n / gamma, 2 * c / n) for n in Ns), c)

    @property
    def limit_law(self):
        return NuLaw(self.gamma, self.c) if self.kind == "high_temperature" else MpLaw(self.gamma)

    def limit_moment(self, r):
        law = self.limit_law
        return nu_moment(law, r) if isinstance(law, NuLaw) else mp_moment(law, r)


@dataclass
class ExperimentReport:
    name: str
    master_seed: int
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    wall_clock: float = 0.0

    def add(self, statistic, estimate, stderr=None, target=None, tolerance=None,
            passed=None, step="", p: EnsembleParams = None):
        self.rows.append({
            "step": step,
            "N": p.N if p else "",
            "M": p.M if p else "",
            "beta": p.beta if p else "",
            "statistic": statistic,
            "estimate": estimate,
            "stderr": "" if stderr is None else stderr,
            "target": "" if target is None else target,
            "tolerance": "" if tolerance is None else tolerance,
            "passed": "" if passed is None else passed,
        })

    def check(self, statistic, estimate, target, tolerance, stderr=None, step="", p=None):
        ok = bool(abs(estimate - target) <= tolerance)
        self.add(statistic, estimate, stderr, target, tolerance, ok, step, p)
        return ok

    @property
    def failures(self):
        return [r for r in self.rows if r["passed"] is False]

    @property
    def passed(self):
        return not self.failures

    def find(self, statistic, step=None):
        for r in self.rows:
            if r["statistic"] == statistic and (step is None or r["step"] == step):
                return r
        raise KeyError(statistic)

    def to_csv(self, path=None):
        from .csvio import format_value

        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for r in self.rows:
            w.writerow([format_value(r[k]) for k in REPORT_COLUMNS])
        text = buf.getvalue()
        if path is not None:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        return text

    def summary(self):
        lines = [f"experiment: {self.name}", f"master_seed: {self.master_seed}"]
        lines += [f"{k}: {v}" for k, v in self.config.items()]
        lines.append(f"rows: {len(self.rows)}  failures: {len(self.failures)}")
        for r in self.rows:
            if r["passed"] == "":
                continue
            mark = "PASS" if r["passed"] is True else ("FAIL" if r["passed"] is False else str(r["passed"]).upper())
            lines.append(f"  [{mark}] step={r['step']} N={r['N']} {r['statistic']}: "
                         f"estimate={r['estimate']:.6g} target={r['target']} tol={r['tolerance']}")
        lines.append(f"wall_clock_s: {self.wall_clock:.3f}")
        return "\n".join(lines)


# simulation core ------------------------------------------------------------------

@dataclass
class Spectra:
    params: EnsembleParams
    eigenvalues: np.ndarray  # (replicas, N)
    weights: np.ndarray = None  # (replicas, N) or None

    def linear_statistic(self, f):
        """Per-replica ``<L_N, f>``."""
        return np.mean(f(self.eigenvalues), axis=1)

    def spectral_statistic(self, f):
        """Per-replica ``<mu_N, f>``."""
        return np.sum(self.weights * f(self.eigenvalues), axis=1)


def simulate(p: EnsembleParams, replicas: int, master_seed: int, step: int = 0,
             weights: bool = False, workers: int = 1) -> Spectra:
    if replicas < 1:
        raise ParameterError("replicas must be positive")
    eig = np.empty((replicas, p.N))
    wts = np.empty((replicas, p.N)) if weights else None

    def work(lo, hi):
        for i in range(lo, hi):
            lam, q = sample_spectrum(p, SeedSpec(master_seed, i, step), weights)
            eig[i] = lam
            if weights:
                wts[i] = q

    if workers <= 1:
        work(0, replicas)
    else:
        bounds = np.linspace(0, replicas, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            list(pool.map(work, bounds[:-1], bounds[1:]))
    return Spectra(p, eig, wts)


def jackknife(stat, columns, groups=50):
    """Estimate and delete-a-group jackknife standard error of ``stat(*columns)``."""
    columns = [np.asarray(c) for c in columns]
    n = len(columns[0])
    groups = max(2, min(groups, n))
    edges = np.linspace(0, n, groups + 1).astype(int)
    full = stat(*columns)
    leave = []
    for g in range(groups):
        keep = np.r_[0:edges[g], edges[g + 1]:n]
        leave.append(stat(*[c[keep] for c in columns]))
    leave = np.asarray(leave)
    se = np.sqrt((groups - 1) / groups * np.sum((leave - leave.mean()) ** 2))
    return float(full), float(se)


def _var(x):
    return np.var(x, ddof=1)


# experiments ------------------------------------------------------------------

def _cv_mean(y, *controls):
    # intercept of the regression on mean-zero controls
    X = np.column_stack((np.ones(len(y)),) + controls)
    return np.linalg.lstsq(X, y, rcond=None)[0][0]


def run_lln(regime: RegimeSpec, r_max=4, replicas=200, master_seed=0, tol=None,
            ks_tol=0.02, control_variates=True, workers=1) -> ExperimentReport:
    """Moments of ``L_N`` against the limit law along a regime schedule.

    Each step reports, per ``r``: the Monte Carlo estimate of
    ``E<L_N, x^r>`` against the limit moment (pass/fail only when ``tol`` is
    given) and against the exact finite-N mean within 5 standard errors.
    With ``control_variates`` the estimate for ``r >= 2`` regresses out the
    lower-order moments, whose exact finite-N means are known; the plain
    replica mean is still reported as ``moment_r{r}_raw``. MP regimes also
    report the Kolmogorov distance of the pooled eigenvalues.
    """
    if not 1 <= r_max <= DEGREE_CAP:
        raise ParameterError(f"r_max must be in 1..{DEGREE_CAP}")
    t0 = time.perf_counter()
    rep = ExperimentReport("lln", master_seed, config={
        "regime": regime.kind, "gamma": regime.gamma, "c": regime.c,
        "r_max": r_max, "replicas": replicas, "control_variates": control_variates})
    errors = {r: [] for r in range(1, r_max + 1)}
    for s, p in enumerate(regime.steps):
        sp = simulate(p, replicas, master_seed, s, workers=workers)
        vals, exact = {}, {}
        for r in range(1, r_max + 1):
            vals[r] = sp.linear_statistic(lambda x: x**r)
            exact[r] = float(mean_unscaled_moment(p, r))
            raw = float(np.mean(vals[r]))
            raw_se = float(np.std(vals[r], ddof=1) / np.sqrt(replicas))
            if control_variates and r >= 2 and replicas > r + 2:
                cols = [vals[r]] + [vals[k] - exact[k] for k in range(1, r)]
                est, se = jackknife(_cv_mean, cols)
                rep.add(f"moment_r{r}_raw", raw, raw_se, step=s, p=p)
            else:
                est, se = raw, raw_se
            limit = regime.limit_moment(r)
            errors[r].append(abs(est - limit))
            if tol is None:
                rep.add(f"moment_r{r}", est, se, limit, step=s, p=p)
            else:
                rep.check(f"moment_r{r}", est, limit, tol, se, s, p)
            rep.check(f"moment_r{r}_vs_exact", est, exact[r], 5 * se, se, s, p)
            rep.add(f"var_moment_r{r}", *jackknife(_var, [vals[r]]), step=s, p=p)
        if regime.kind != "high_temperature":
            d = stats.kstest(sp.eigenvalues.ravel(), lambda x: mp_cdf(regime.limit_law, x)).statistic
            rep.check("ks_distance_mp", float(d), 0.0, ks_tol, step=s, p=p)
    if len(regime.steps) > 1:
        for r, errs in errors.items():
            shrinking = all(b <= a for a, b in zip(errs, errs[1:]))
            rep.add(f"monotone_shrinkage_r{r}", float(shrinking))
    rep.wall_clock = time.perf_counter() - t0
    return rep


def richardson(values, stderrs):
    """Extrapolate ``v(N)`` with a ``1/N`` correction from the last doubling."""
    v1, v2 = values[-2], values[-1]
    s1, s2 = stderrs[-2], stderrs[-1]
    return 2 * v2 - v1, float(np.hypot(2 * s2, s1))


def run_clt(f, fprime, regime: RegimeSpec, replicas=4000, master_seed=0, target=None,
            rel_tol=0.10, flat_tol=0.15, alpha=0.01, workers=1) -> ExperimentReport:
    """Fluctuations of ``sum f(lambda_i)`` scaled by ``sqrt(beta)``.

    Per step: the variance of the self-centered scaled statistic (equal to
    ``beta N^2 Var<L_N, f>``), compared with ``target`` when one is known
    (in MP regimes it defaults to the limiting double-integral variance),
    and the p-value of a Kolmogorov-Smirnov test against the fitted centered
    normal. Normality is asserted at the largest N only; smaller steps are
    reported. Over the schedule: flatness of the variance estimates and a
    Richardson extrapolation from the last doubling.
    """
    if replicas < 1000:
        raise ParameterError("the CLT harness needs at least 1000 replicas")
    t0 = time.perf_counter()
    if target is None and regime.kind != "high_temperature":
        target = clt_variance_mp(f, regime.gamma, fprime=fprime)
    rep = ExperimentReport("clt", master_seed, config={
        "regime": regime.kind, "gamma": regime.gamma, "c": regime.c, "replicas": replicas})
    variances, ses = [], []
    for s, p in enumerate(regime.steps):
        sp = simulate(p, replicas, master_seed, s, workers=workers)
        lin = np.sum(f(sp.eigenvalues), axis=1)
        z = np.sqrt(p.beta) * (lin - lin.mean())
        v, se = jackknife(_var, [z])
        variances.append(v)
        ses.append(se)
        if target is None:
            rep.add("scaled_variance", v, se, step=s, p=p)
        else:
            rep.check("scaled_variance", v, target, rel_tol * target, se, s, p)
        pval = float(stats.kstest(z, "norm", args=(0.0, np.sqrt(v))).pvalue)
        if s == len(regime.steps) - 1:
            rep.add("ks_normal_pvalue", pval, None, alpha, alpha, bool(pval > alpha), s, p)
        else:
            rep.add("ks_normal_pvalue", pval, None, alpha, alpha, step=s, p=p)
    if len(variances) > 1:
        ext, ext_se = richardson(variances, ses)
        rep.add("richardson_plateau", ext, ext_se, target)
        spread = (max(variances) - min(variances)) / abs(ext if ext else 1.0)
        rep.check("plateau_spread", spread, 0.0, flat_tol)
    rep.wall_clock = time.perf_counter() - t0
    return rep


def check_variance_relation(p: EnsembleParams, f, replicas=10000, master_seed=0,
                            nsigma=5.0, step=0, workers=1) -> ExperimentReport:
    """Mean and variance identities linking ``<L_N, f>`` and ``<mu_N, f>``."""
    t0 = time.perf_counter()
    sp = simulate(p, replicas, master_seed, step, weights=True, workers=workers)
    lin = sp.linear_statistic(f)
    spec = sp.spectral_statistic(f)
    spec2 = sp.spectral_statistic(lambda x: f(x) ** 2)
    bn = p.beta * p.N
    rep = ExperimentReport("variance_relation", master_seed, config={"replicas": replicas})

    # rounding floor: with f constant both identities hold only to ~1e-16
    floor = ROUNDING_FLOOR * max(1.0, float(np.mean(spec2)))
    diff = lin - spec
    d_mean = float(diff.mean())
    d_se = float(diff.std(ddof=1) / np.sqrt(replicas))
    rep.check("same_mean_difference", d_mean, 0.0, nsigma * d_se + floor, d_se, step, p)

    def lhs(a, b, c):
        return _var(a)

    def rhs(a, b, c):
        return (bn + 2) / bn * _var(b) - 2 / bn * (c.mean() - b.mean() ** 2)

    def gap(a, b, c):
        return lhs(a, b, c) - rhs(a, b, c)

    cols = [lin, spec, spec2]
    rep.add("var_L", *jackknife(lhs, cols), step=step, p=p)
    rep.add("var_relation_rhs", *jackknife(rhs, cols), step=step, p=p)
    g, gse = jackknife(gap, cols)
    rep.check("variance_relation_difference", g, 0.0, nsigma * gse + floor, gse, step, p)
    rep.wall_clock = time.perf_counter() - t0
    return rep


def _slack_report(name, lhs_vals, rhs_vals, lhs_stat, rhs_stat, p, master_seed, nsigma, step):
    rep = ExperimentReport(name, master_seed)
    cols = [lhs_vals, rhs_vals]
    rep.add("lhs", *jackknife(lambda a, b: lhs_stat(a), cols), step=step, p=p)
    rep.add("rhs", *jackknife(lambda a, b: rhs_stat(b), cols), step=step, p=p)
    slack, se = jackknife(lambda a, b: rhs_stat(b) - lhs_stat(a), cols)
    ok = slack >= -nsigma * se
    rep.add("slack", slack, se, 0.0, nsigma * se, bool(ok), step, p)
    return rep


def check_poincare_matrix(p: EnsembleParams, f, fprime, replicas=2000, master_seed=0,
                          nsigma=5.0, step=0, workers=1) -> ExperimentReport:
    """``Var<L_N, f> <= 4/(beta M N) E<L_N, x f'(x)^2>``."""
    t0 = time.perf_counter()
    sp = simulate(p, replicas, master_seed, step, workers=workers)
    lin = sp.linear_statistic(f)
    grad = sp.linear_statistic(lambda x: x * fprime(x) ** 2)
    k = 4.0 / (p.beta * p.M * p.N)
    rep = _slack_report("poincare_matrix", lin, grad, _var, lambda b: k * b.mean(),
                        p, master_seed, nsigma, step)
    rep.wall_clock = time.perf_counter() - t0
    return rep


def check_poincare_alpha(p: EnsembleParams, f, fprime, replicas=2000, master_seed=0,
                         nsigma=5.0, step=0, workers=1) -> ExperimentReport:
    """``Var<L_N, f> <= 1/(alpha N) E<L_N, (x f'(x))^2>``, only for ``alpha > 0``."""
    t0 = time.perf_counter()
    alpha = p.alpha
    if not alpha > 0:
        rep = ExperimentReport("poincare_alpha", master_seed, config={"alpha": alpha})
        rep.add("slack", float("nan"), passed="skipped", step=step, p=p)
        return rep
    sp = simulate(p, replicas, master_seed, step, workers=workers)
    lin = sp.linear_statistic(f)
    grad = sp.linear_statistic(lambda x: (x * fprime(x)) ** 2)
    k = 1.0 / (alpha * p.N)
    rep = _slack_report("poincare_alpha", lin, grad, _var, lambda b: k * b.mean(),
                        p, master_seed, nsigma, step)
    rep.config["alpha"] = alpha
    rep.wall_clock = time.perf_counter() - t0
    return rep


def check_chi_poincare(k, f, fprime, draws=100000, master_seed=0, nsigma=5.0, step=0) -> ExperimentReport:
    """``Var f(X) <= E f'(X)^2`` for ``X ~ chi_k``."""
    t0 = time.perf_counter()
    x = sample_chi(k, SeedSpec(master_seed, 0, step), size=draws)
    rep = _slack_report("chi_poincare", f(x), fprime(x) ** 2, _var, np.mean,
                        None, master_seed, nsigma, step)
    rep.config["dof"] = k
    rep.wall_clock = time.perf_counter() - t0
    return rep


def run_as_stability(regime: RegimeSpec, r=2, seed_count=20, master_seed=0,
                     tol=None) -> ExperimentReport:
    """Single-sample deviations ``S_N = <L_N, x^r> - E<L_N, x^r>`` along the schedule.

    The mean is the exact finite-N value, so ``S_N`` carries no bias.
    """
    if not 0 <= r <= 6:
        raise ParameterError("r must be in 0..6")
    t0 = time.perf_counter()
    rep = ExperimentReport("as_stability", master_seed,
                           config={"regime": regime.kind, "r": r, "seed_count": seed_count})
    last = len(regime.steps) - 1
    for s, p in enumerate(regime.steps):
        exact = float(mean_unscaled_moment(p, r))
        dev = np.empty(seed_count)
        for k in range(seed_count):
            lam, _ = sample_spectrum(p, SeedSpec(master_seed, k, s))
            dev[k] = np.mean(lam**r) - exact
        worst = float(np.max(np.abs(dev)))
        rep.add("sd_S", float(np.std(dev, ddof=1)) if seed_count > 1 else 0.0, step=s, p=p)
        if tol is not None and s == last:
            rep.check("max_abs_S", worst, 0.0, tol, step=s, p=p)
        else:
            rep.add("max_abs_S", worst, step=s, p=p)
    rep.wall_clock = time.perf_counter() - t0
    return rep


def run_mean_shift(p: EnsembleParams, poly_coeffs, replicas=2000, master_seed=0,
                   step=0, workers=1) -> ExperimentReport:
    """Exploratory: ``N<L_N, p> - N<mp, p>`` against ``(2/beta - 1)<mu_1, p>``.

    Reported only; finite-N centering makes this a qualitative comparison.
    """
    t0 = time.perf_counter()
    law = MpLaw(p.gamma)

    def poly(x):
        return np.polynomial.polynomial.polyval(x, list(poly_coeffs))

    sp = simulate(p, replicas, master_seed, step, workers=workers)
    shift = p.N * (sp.linear_statistic(poly) - mp_integrate(law, poly))
    rep = ExperimentReport("mean_shift", master_seed)
    rep.add("mean_shift", float(shift.mean()), float(shift.std(ddof=1) / np.sqrt(replicas)),
            (2 / p.beta - 1) * mu1_expectation(p.gamma, list(poly_coeffs)), step=step, p=p)
    rep.wall_clock = time.perf_counter() - t0
    return rep
