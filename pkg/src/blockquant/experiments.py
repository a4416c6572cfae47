"""Monte Carlo experiments for sample quantiles and the circular block bootstrap.

Every experiment is a pure function of an :class:`McConfig`: all randomness
comes from seeds derived as ``derive_seed(base_seed, replicate, stream)``, so
reports are reproducible and independent of the number of worker threads.
Distributions are always compared through the Kolmogorov-Smirnov distance.
"""
from __future__ import annotations

import hashlib
import io
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Iterable, NamedTuple, Sequence, Union

import numpy as np
from scipy import special

from .block_bootstrap import (
    BlockLengthSchedule,
    BootstrapPlan,
    batch_quantiles,
    block_length,
    bootstrap_bahadur_decompose,
    coverage_counts,
    draw_starts,
    resample,
)
from .dist_models import DistributionModel, GTransform, LocalExpansion, local_expansion
from .process_gen import ProcessSpec, derive_seed, generate_values, make_rng
from .quantile_core import Ecdf, decompose_values, order_index

__all__ = [
    "DegenerateVarianceError",
    "ExperimentReport",
    "LimitLawSpec",
    "LongRunVariance",
    "McConfig",
    "bootstrap_contrast",
    "clt_statistics",
    "ks_distance",
    "ks_noise_scale",
    "long_run_variance_oracle",
    "run_bahadur_experiment",
    "run_bootstrap_consistency_experiment",
    "run_clt_experiment",
    "run_fixed_stream_experiment",
    "run_inconsistency_experiment",
    "sample_limit_law",
    "z_rho_given",
    "z_rho_sampler",
]

# stream labels, combined with n so that every (purpose, n) pair gets its own seeds
_DATA, _PROXY, _BOOT, _LIMIT, _ORACLE, _ZOUTER, _ZINNER, _STREAM = range(1, 9)


def _stream(purpose: int, n: int = 0) -> int:
    return (purpose << 40) + int(n)


# --------------------------------------------------------------------------
# Kolmogorov-Smirnov distance
# --------------------------------------------------------------------------

Evaluable = Union[Ecdf, np.ndarray, Sequence[float], Callable]


def _as_ecdf(x) -> Ecdf | None:
    if isinstance(x, Ecdf):
        return x
    if callable(x):
        return None
    return Ecdf(x)


def ks_distance(a: Evaluable, b: Evaluable) -> float:
    """``sup_t |F_a(t) - F_b(t)|``.

    Each argument is an :class:`Ecdf`, a sample (turned into its ECDF) or a
    continuous cdf given as a vectorized callable. Two ECDFs give the exact
    two-sample statistic: both step functions are evaluated at every jump
    of either, which also covers the left limits. Against a continuous cdf
    the ECDF is compared at each jump from both sides.
    """
    ea, eb = _as_ecdf(a), _as_ecdf(b)
    if ea is None and eb is None:
        raise TypeError("at least one argument must be an empirical distribution")
    if ea is not None and eb is not None:
        pts = np.concatenate((ea.sorted_values, eb.sorted_values))
        return float(np.max(np.abs(ea(pts) - eb(pts))))
    e, cdf_fn = (ea, b) if ea is not None else (eb, a)
    u, counts = np.unique(e.sorted_values, return_counts=True)
    right = np.cumsum(counts) / e.n
    left = right - counts / e.n
    g = np.asarray(cdf_fn(u), dtype=float)
    return float(max(np.max(np.abs(right - g)), np.max(np.abs(g - left))))


def ks_noise_scale(n1: int, n2: int | None = None) -> float:
    """Null sampling scale of a KS distance, ``sqrt(1/n1 + 1/n2)``.

    Used as the ``stderr`` entry of KS rows; the 95% null critical value is
    about ``1.36`` times this.
    """
    inv = 1.0 / n1 + (0.0 if n2 is None else 1.0 / n2)
    return math.sqrt(inv)


# --------------------------------------------------------------------------
# Configuration and reports
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class LimitLawSpec:
    """Limit law ``g^{-1}(W)`` with ``W ~ N(0, sigma_lr^2)``."""

    rho: float
    m_coef: float
    sigma_lr: float

    def __post_init__(self) -> None:
        if not self.sigma_lr > 0:
            raise ValueError("sigma_lr must be positive (degenerate long-run variance)")
        GTransform(self.rho, self.m_coef)

    @property
    def g(self) -> GTransform:
        return GTransform(self.rho, self.m_coef)

    def cdf(self, t):
        """``P(g^{-1}(W) <= t) = Phi(g(t) / sigma_lr)``."""
        return special.ndtr(np.asarray(self.g.apply(t)) / self.sigma_lr)


@dataclass(frozen=True)
class LongRunVariance:
    """Estimate of ``lim Var[sqrt(n) F_n(t_p)]``."""

    value: float
    stderr: float
    n: int
    replicates: int

    @property
    def degenerate(self) -> bool:
        return self.value <= 3.0 * self.stderr


class DegenerateVarianceError(RuntimeError):
    """The long-run variance of ``F_n(t_p)`` cannot be told apart from zero."""


@dataclass(frozen=True)
class McConfig:
    """Inputs of a Monte Carlo experiment.

    Parameters
    ----------
    process : ProcessSpec
        Data-generating process; its marginal is the model under study.
    plan : BootstrapPlan
        Block-length schedule and number of resamples ``B``.
    n_grid : sequence of int
        Strictly increasing sample sizes.
    replicates : int
        Number ``R`` of independent data paths per sample size.
    base_seed : int
    p : float, optional
        Quantile level; defaults to the model's own level (1/2 for a
        Gaussian marginal).
    limit_factor : int
        The limit-law sample has ``limit_factor * R`` draws.
    oracle_n, oracle_replicates : int
        Size and replication of the long-run-variance oracle.
    """

    process: ProcessSpec
    plan: BootstrapPlan
    n_grid: tuple[int, ...]
    replicates: int = 2000
    base_seed: int = 0
    p: float | None = None
    limit_factor: int = 10
    oracle_n: int = 2**14
    oracle_replicates: int = 1000

    def __post_init__(self) -> None:
        grid = tuple(int(n) for n in self.n_grid)
        if not grid or any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValueError("n_grid must be nonempty and strictly increasing")
        if grid[0] < 1:
            raise ValueError("sample sizes must be positive")
        object.__setattr__(self, "n_grid", grid)
        if int(self.replicates) < 2:
            raise ValueError("replicates must be >= 2")
        if int(self.plan.num_resamples) < 2:
            raise ValueError("the bootstrap needs at least 2 resamples")
        sched = self.plan.schedule
        if sched.kind == "fixed" and sched.length > grid[0]:
            raise ValueError(f"fixed block length l={sched.length} exceeds n={grid[0]}; need 1 <= l <= n")
        for n in grid:
            block_length(sched, n)
        self.local  # validates p against the model

    @property
    def model(self) -> DistributionModel:
        return self.process.marginal

    @property
    def local(self) -> LocalExpansion:
        return local_expansion(self.model, self.p)

    def to_dict(self) -> dict:
        return {
            "process": self.process.to_dict(),
            "plan": self.plan.to_dict(),
            "n_grid": list(self.n_grid),
            "replicates": int(self.replicates),
            "seed": int(self.base_seed),
            "p": self.local.p,
            "limit_factor": int(self.limit_factor),
            "oracle_n": int(self.oracle_n),
            "oracle_replicates": int(self.oracle_replicates),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "McConfig":
        allowed = {
            "process", "plan", "n_grid", "replicates", "seed", "p",
            "limit_factor", "oracle_n", "oracle_replicates",
        }
        unknown = set(d) - allowed
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        return cls(
            process=ProcessSpec.from_dict(d["process"]),
            plan=BootstrapPlan.from_dict(d["plan"]),
            n_grid=tuple(d["n_grid"]),
            replicates=int(d.get("replicates", 2000)),
            base_seed=int(d.get("seed", 0)),
            p=d.get("p"),
            limit_factor=int(d.get("limit_factor", 10)),
            oracle_n=int(d.get("oracle_n", 2**14)),
            oracle_replicates=int(d.get("oracle_replicates", 1000)),
        )


class Row(NamedTuple):
    n: int
    metric: str
    value: float
    stderr: float
    seed: int


CSV_COLUMNS = ("experiment", "n", "metric", "value", "stderr", "seed")


@dataclass
class ExperimentReport:
    """Rows of ``(n, metric, value, stderr, seed)`` plus the generating config."""

    experiment: str
    rows: list[Row] = field(default_factory=list)
    config: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)

    def add(self, n: int, metric: str, value: float, stderr: float = float("nan"), seed: int = 0) -> None:
        self.rows.append(Row(int(n), metric, float(value), float(stderr), int(seed)))

    def value(self, metric: str, n: int) -> float:
        return self.row(metric, n).value

    def row(self, metric: str, n: int) -> Row:
        for r in self.rows:
            if r.metric == metric and r.n == n:
                return r
        raise KeyError((metric, n))

    def series(self, metric: str) -> list[Row]:
        return sorted((r for r in self.rows if r.metric == metric), key=lambda r: r.n)

    def sorted_rows(self) -> list[Row]:
        return sorted(self.rows, key=lambda r: (r.n, r.metric))

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(",".join(CSV_COLUMNS) + "\n")
        for r in self.sorted_rows():
            buf.write(f"{self.experiment},{r.n},{r.metric},{r.value!r},{r.stderr!r},{r.seed}\n")
        return buf.getvalue()

    def config_hash(self) -> str:
        blob = json.dumps(self.config, sort_keys=True).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def to_json(self) -> str:
        doc = {
            "experiment": self.experiment,
            "config": self.config,
            "config_hash": self.config_hash(),
            "rows": [
                {"n": r.n, "metric": r.metric, "value": _json_float(r.value),
                 "stderr": _json_float(r.stderr), "seed": r.seed}
                for r in self.sorted_rows()
            ],
            "metadata": self.metadata,
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def _json_float(x: float):
    return x if math.isfinite(x) else None


def _map(fn: Callable, items: Iterable, threads: int) -> list:
    items = list(items)
    if threads <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _chunks(total: int, threads: int) -> list[range]:
    size = max(1, math.ceil(total / max(1, threads * 4)))
    return [range(i, min(i + size, total)) for i in range(0, total, size)]


def _quantile_stderr(x: np.ndarray, q: float) -> float:
    """Half-width of the order-statistic interval around the ``q`` sample quantile."""
    xs = np.sort(x)
    r = xs.size
    s = math.sqrt(q * (1 - q) / r)
    lo = xs[max(int(math.floor(r * (q - s))), 0)]
    hi = xs[min(int(math.ceil(r * (q + s))) - 1, r - 1)]
    return float(hi - lo) / 2.0


def _sd_stderr(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1)) / math.sqrt(2.0 * (x.size - 1))


# --------------------------------------------------------------------------
# Oracles and limit laws
# --------------------------------------------------------------------------


def long_run_variance_oracle(
    process: ProcessSpec,
    model: DistributionModel | None = None,
    n: int = 2**14,
    replicates: int = 1000,
    seed: int = 0,
    p: float | None = None,
    threads: int = 1,
) -> LongRunVariance:
    """Brute-force estimate of ``Var[sqrt(n) (F_n(t_p) - p)]`` over independent paths.

    The standard error uses the empirical fourth moment. The caller decides
    what to do with a :attr:`LongRunVariance.degenerate` result.
    """
    if replicates < 2:
        raise ValueError("replicates must be >= 2")
    if model is not None and model != process.marginal:
        raise ValueError("model must be the process marginal")
    loc = local_expansion(process.marginal, p)

    def one(r: int) -> float:
        x = generate_values(process, n, derive_seed(seed, r, _stream(_ORACLE, n)))
        return float(np.count_nonzero(x <= loc.t_p)) / n

    fn = np.array(_map(one, range(replicates), threads))
    y = math.sqrt(n) * (fn - loc.p)
    dev = y - y.mean()
    var = float(dev @ dev) / (replicates - 1)
    m4 = float(np.mean(dev**4))
    se = math.sqrt(max(m4 - var * var, 0.0) / replicates)
    return LongRunVariance(var, se, int(n), int(replicates))


def sample_limit_law(spec: LimitLawSpec, count: int, seed: int = 0) -> np.ndarray:
    """Draws of ``g^{-1}(W)``, ``W ~ N(0, sigma_lr^2)``."""
    w = spec.sigma_lr * make_rng(seed).standard_normal(int(count))
    return np.asarray(spec.g.inverse(w))


def _shift_map(g: GTransform, w1: np.ndarray, w2: float) -> np.ndarray:
    if g.rho == 1.0:
        # g^{-1} is linear: the shift cancels exactly
        return w1 / g.m_coef
    return np.asarray(g.inverse(w1 + w2)) - float(g.inverse(w2))


def z_rho_given(
    rho: float, m_coef: float, w2: float, w1: np.ndarray, reference: Ecdf | None = None
) -> float:
    """KS distance between the laws of ``g^{-1}(W1 + w2) - g^{-1}(w2)`` and ``g^{-1}(W1)``.

    Both laws are estimated from the same draws ``w1`` of ``W1``.
    """
    g = GTransform(rho, m_coef)
    if reference is None:
        reference = Ecdf(g.inverse(w1))
    return ks_distance(Ecdf(_shift_map(g, w1, float(w2))), reference)


def z_rho_sampler(
    rho: float,
    m_coef: float,
    sigma_lr: float,
    count: int = 2000,
    inner_count: int = 5000,
    seed: int = 0,
) -> np.ndarray:
    """Sample of the limiting sup-distance when the bootstrap is centered at ``F_n^{-1}(p)``.

    For each of ``count`` draws of ``W2 ~ N(0, sigma_lr^2)`` the conditional
    law of ``g^{-1}(W1 + W2) - g^{-1}(W2)`` is compared with the law of
    ``g^{-1}(W1)``; one shared set of ``inner_count`` draws of ``W1`` serves
    both sides. ``rho = 1`` gives exactly zero.
    """
    spec = LimitLawSpec(rho, m_coef, sigma_lr)
    g = spec.g
    w1 = sigma_lr * make_rng(derive_seed(seed, 0, _ZINNER)).standard_normal(int(inner_count))
    w2 = sigma_lr * make_rng(derive_seed(seed, 0, _ZOUTER)).standard_normal(int(count))
    ref = Ecdf(g.inverse(w1))
    return np.array([z_rho_given(rho, m_coef, v, w1, ref) for v in w2])


# --------------------------------------------------------------------------
# Experiments
# --------------------------------------------------------------------------


def _paths_quantiles(cfg: McConfig, n: int, purpose: int, threads: int) -> tuple[np.ndarray, np.ndarray]:
    """Empirical quantiles and ``F_n(t_p)`` for ``R`` independent paths."""
    loc = cfg.local
    k = order_index(n, loc.p)

    def one(chunk: range) -> list[tuple[float, float]]:
        out = []
        for r in chunk:
            x = generate_values(cfg.process, n, derive_seed(cfg.base_seed, r, _stream(purpose, n)))
            eq = float(np.partition(x, k - 1)[k - 1])
            out.append((eq, np.count_nonzero(x <= loc.t_p) / n))
        return out

    res = [v for part in _map(one, _chunks(cfg.replicates, threads), threads) for v in part]
    arr = np.array(res)
    return arr[:, 0], arr[:, 1]


def clt_statistics(cfg: McConfig, n: int, threads: int = 1) -> np.ndarray:
    """``n^{1/(2 rho)} (F_n^{-1}(p) - t_p)`` over the ``R`` data paths of size ``n``."""
    loc = cfg.local
    eq, _ = _paths_quantiles(cfg, n, _DATA, threads)
    return n ** (1.0 / (2.0 * loc.rho)) * (eq - loc.t_p)


def _oracle(cfg: McConfig, threads: int) -> LongRunVariance:
    lrv = long_run_variance_oracle(
        cfg.process, None, cfg.oracle_n, cfg.oracle_replicates, cfg.base_seed, cfg.p, threads
    )
    if lrv.degenerate:
        raise DegenerateVarianceError(
            f"long-run variance {lrv.value:.4g} is within 3 standard errors ({lrv.stderr:.2g}) of zero"
        )
    return lrv


def _new_report(name: str, cfg: McConfig, threads: int) -> ExperimentReport:
    return ExperimentReport(name, config=cfg.to_dict(), metadata={"threads": threads})


def run_clt_experiment(cfg: McConfig, threads: int = 1) -> ExperimentReport:
    """KS distance between the law of the scaled quantile error and its limit.

    Metrics per ``n``: ``ks_limit`` (against ``limit_factor * R`` draws of
    ``g^{-1}(W)``) and ``ks_normal`` (against the normal law with the
    statistic's own mean and variance). The oracle's ``sigma2_lr`` is
    reported at ``n = oracle_n``.
    """
    t0 = time.perf_counter()
    report = _new_report("clt", cfg, threads)
    loc = cfg.local
    lrv = _oracle(cfg, threads)
    report.add(lrv.n, "sigma2_lr", lrv.value, lrv.stderr, cfg.base_seed)
    spec = LimitLawSpec(loc.rho, loc.m_coef, math.sqrt(lrv.value))
    count = cfg.limit_factor * cfg.replicates
    limit = Ecdf(sample_limit_law(spec, count, derive_seed(cfg.base_seed, 0, _LIMIT)))
    for n in cfg.n_grid:
        stat = clt_statistics(cfg, n, threads)
        noise = ks_noise_scale(cfg.replicates, count)
        report.add(n, "ks_limit", ks_distance(stat, limit), noise, cfg.base_seed)
        mu, sd = float(stat.mean()), float(stat.std(ddof=1))
        normal = lambda t, mu=mu, sd=sd: special.ndtr((np.asarray(t) - mu) / sd)
        report.add(n, "ks_normal", ks_distance(stat, normal), ks_noise_scale(cfg.replicates), cfg.base_seed)
    report.metadata["wall_time_s"] = time.perf_counter() - t0
    return report


def run_bahadur_experiment(cfg: McConfig, threads: int = 1) -> ExperimentReport:
    """Size of the scaled Bahadur remainder along ``n_grid``.

    Metrics: median and 90th percentile of ``|n^{1/(2 rho)} R_n|`` and of the
    bootstrap analogue ``|(bl)^{1/(2 rho)} R*_n|`` (one resample per path,
    block length from the plan's schedule).
    """
    t0 = time.perf_counter()
    report = _new_report("bahadur", cfg, threads)
    loc = cfg.local
    for n in cfg.n_grid:
        l = block_length(cfg.plan.schedule, n)

        def one(chunk: range) -> list[tuple[float, float]]:
            out = []
            for r in chunk:
                x = generate_values(cfg.process, n, derive_seed(cfg.base_seed, r, _stream(_DATA, n)))
                d = decompose_values(x, loc)
                bs = resample(x, l, derive_seed(cfg.base_seed, r, _stream(_BOOT, n)))
                db = bootstrap_bahadur_decompose(bs, cfg.model, cfg.p)
                out.append((abs(d.scaled_remainder), abs(db.scaled_remainder)))
            return out

        res = np.array([v for part in _map(one, _chunks(cfg.replicates, threads), threads) for v in part])
        for col, prefix in ((0, ""), (1, "boot_")):
            v = res[:, col]
            report.add(n, prefix + "median_abs_scaled_rem", float(np.median(v)), _quantile_stderr(v, 0.5), cfg.base_seed)
            report.add(n, prefix + "q90_abs_scaled_rem", float(np.quantile(v, 0.9)), _quantile_stderr(v, 0.9), cfg.base_seed)
    report.metadata["wall_time_s"] = time.perf_counter() - t0
    return report


def _bootstrap_stats(
    x: np.ndarray, schedule: BlockLengthSchedule, num: int, seed: int, loc: LocalExpansion
) -> np.ndarray:
    """``(bl)^{1/(2 rho)} (F*^{-1}_n(p) - F_n^{-1}(p))`` for ``num`` resamples of ``x``."""
    n = x.size
    l = block_length(schedule, n)
    order = np.argsort(x, kind="stable")
    sx = x[order]
    eq = float(sx[order_index(n, loc.p) - 1])
    cov = coverage_counts(n, l, draw_starts(n, l, num, seed))
    bq = batch_quantiles(sx, order, cov, loc.p)
    bl = (n // l) * l
    return bl ** (1.0 / (2.0 * loc.rho)) * (bq - eq)


def bootstrap_contrast(cfg: McConfig, n: int, threads: int = 1) -> np.ndarray:
    """``D_{n,r}`` for each data path ``r``.

    ``D_{n,r}`` is the KS distance between the bootstrap law of
    ``(bl)^{1/(2 rho)} (F*^{-1}_n(p) - F_n^{-1}(p))`` on path ``r`` and an
    independent Monte Carlo law of ``n^{1/(2 rho)} (F_n^{-1}(p) - t_p)``.
    """
    loc = cfg.local
    proxy_eq, _ = _paths_quantiles(cfg, n, _PROXY, threads)
    proxy = Ecdf(n ** (1.0 / (2.0 * loc.rho)) * (proxy_eq - loc.t_p))
    B = cfg.plan.num_resamples

    def one(r: int) -> float:
        x = generate_values(cfg.process, n, derive_seed(cfg.base_seed, r, _stream(_DATA, n)))
        seed = derive_seed(cfg.base_seed ^ cfg.plan.seed, r, _stream(_BOOT, n))
        return ks_distance(_bootstrap_stats(x, cfg.plan.schedule, B, seed, loc), proxy)

    return np.array(_map(one, range(cfg.replicates), threads))


def _contrast_report(name: str, cfg: McConfig, threads: int) -> ExperimentReport:
    t0 = time.perf_counter()
    report = _new_report(name, cfg, threads)
    R = cfg.replicates
    for n in cfg.n_grid:
        d = bootstrap_contrast(cfg, n, threads)
        report.add(n, "mean_D", float(d.mean()), float(d.std(ddof=1)) / math.sqrt(R), cfg.base_seed)
        report.add(n, "q90_D", float(np.quantile(d, 0.9)), _quantile_stderr(d, 0.9), cfg.base_seed)
        report.add(n, "sd_D", float(d.std(ddof=1)), _sd_stderr(d), cfg.base_seed)
        q25, q75 = np.quantile(d, [0.25, 0.75])
        report.add(n, "iqr_D", float(q75 - q25), float("nan"), cfg.base_seed)
        report.add(n, "block_length", block_length(cfg.plan.schedule, n), 0.0, cfg.base_seed)
    report.metadata["wall_time_s"] = time.perf_counter() - t0
    return report


def run_bootstrap_consistency_experiment(cfg: McConfig, threads: int = 1) -> ExperimentReport:
    """Distribution of ``D_{n,r}`` along ``n_grid``; it should shrink when ``rho = 1``."""
    return _contrast_report("boot-consistency", cfg, threads)


def run_inconsistency_experiment(cfg: McConfig, threads: int = 1) -> ExperimentReport:
    """Same contrast for ``rho != 1``, where ``D_{n,r}`` keeps a nondegenerate spread."""
    if cfg.local.rho == 1.0:
        raise ValueError("the inconsistency experiment needs rho != 1")
    return _contrast_report("inconsistency", cfg, threads)


def run_fixed_stream_experiment(cfg: McConfig, batches: int = 10, threads: int = 1) -> ExperimentReport:
    """``D_n`` along the prefixes of one data path of length ``max(n_grid)``.

    For each ``n`` the prefix ``X_1..X_n`` is bootstrapped ``batches`` times
    with ``B`` resamples each, and every batch is compared with its own
    independent Monte Carlo proxy of ``R`` paths; ``D`` is the batch mean and
    its stderr the batch standard deviation over ``sqrt(batches)``. This is
    a necessary-condition check for almost sure consistency along a single
    realization.
    """
    if batches < 2:
        raise ValueError("batches must be >= 2")
    t0 = time.perf_counter()
    report = _new_report("fixed-stream", cfg, threads)
    report.config["batches"] = int(batches)
    loc = cfg.local
    path = generate_values(cfg.process, cfg.n_grid[-1], derive_seed(cfg.base_seed, 0, _STREAM))
    B = cfg.plan.num_resamples
    for n in cfg.n_grid:
        x = path[:n]

        def one(k: int) -> float:
            sub = McConfig(
                cfg.process, cfg.plan, (n,), cfg.replicates,
                derive_seed(cfg.base_seed, k, _stream(_STREAM, n)), cfg.p,
            )
            proxy_eq, _ = _paths_quantiles(sub, n, _PROXY, 1)
            proxy = Ecdf(n ** (1.0 / (2.0 * loc.rho)) * (proxy_eq - loc.t_p))
            seed = derive_seed(cfg.base_seed ^ cfg.plan.seed, k, _stream(_BOOT, n))
            return ks_distance(_bootstrap_stats(x, cfg.plan.schedule, B, seed, loc), proxy)

        d = np.array(_map(one, range(batches), threads))
        report.add(n, "D", float(d.mean()), float(d.std(ddof=1)) / math.sqrt(batches), cfg.base_seed)
        report.add(n, "block_length", block_length(cfg.plan.schedule, n), 0.0, cfg.base_seed)
    report.metadata["wall_time_s"] = time.perf_counter() - t0
    return report
