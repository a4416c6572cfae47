"""Command-line front end.

Every subcommand resolves one JSON-compatible configuration: built-in
defaults, then the ``--config`` file, then command-line flags. The resolved
configuration is embedded in JSON reports, and a JSON report can itself be
passed to ``--config`` to reproduce it.

Exit codes: 0 success, 2 configuration error, 3 degenerate long-run variance.
"""
from __future__ import annotations

import argparse
import copy
import json
import os
import sys
import time
from typing import Sequence

import numpy as np

from .block_bootstrap import BlockLengthSchedule, BootstrapPlan
from .experiments import (
    DegenerateVarianceError,
    ExperimentReport,
    McConfig,
    long_run_variance_oracle,
    run_bahadur_experiment,
    run_bootstrap_consistency_experiment,
    run_clt_experiment,
    run_fixed_stream_experiment,
    run_inconsistency_experiment,
    z_rho_sampler,
)
from .process_gen import ProcessSpec, generate

EXIT_OK, EXIT_CONFIG, EXIT_RED_FLAG = 0, 2, 3

SUBCOMMANDS = ("simulate", "clt", "bahadur", "boot-consistency", "inconsistency", "zrho", "lrvar")

DEFAULTS = {
    "process": {"kind": "iid", "marginal": {"kind": "power_local", "rho": 1.0, "m": 0.5, "tp": 0.0, "p": 0.5}},
    "plan": {"schedule": {"kind": "power", "c": 1.0, "gamma": 0.5}, "B": 1000, "seed": 0},
    "n_grid": [256, 1024, 4096],
    "replicates": 2000,
    "seed": 0,
    "p": None,
    "limit_factor": 10,
    "oracle_n": 2**14,
    "oracle_replicates": 1000,
    "fixed_stream": False,
    "batches": 10,
    "n": 1000,
    "count": 2000,
    "inner_count": 5000,
    "sigma": 1.0,
}
# accepted in a config file but not embedded in reports: they do not change results
EXECUTION_KEYS = ("format", "output", "threads")


class ConfigError(ValueError):
    pass


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc


def _float_list(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from exc


def _schedule(text: str) -> dict:
    """``fixed:L``, ``power:C,GAMMA`` or ``dyadic:C,GAMMA``."""
    kind, _, args = text.partition(":")
    try:
        if kind == "fixed":
            return {"kind": "fixed", "l": int(args)}
        if kind in ("power", "dyadic", "dyadic_power"):
            c, gamma = (float(v) for v in args.split(","))
            return {"kind": "power" if kind == "power" else "dyadic_power", "c": c, "gamma": gamma}
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"block schedule must be fixed:L, power:C,GAMMA or dyadic:C,GAMMA, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="blockquant",
        description="Sample quantiles and the circular block bootstrap under strong mixing.",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("run")
    g.add_argument("--config", help="JSON config file (or a JSON report to re-run)")
    g.add_argument("--seed", type=int, help="base seed")
    g.add_argument("--output", "-o", help="output file; standard output if omitted")
    g.add_argument("--format", choices=("csv", "json"), help="report format (default csv)")
    g.add_argument("--threads", type=int, help="worker threads (default: available cores)")

    model = argparse.ArgumentParser(add_help=False)
    g = model.add_argument_group("process and marginal")
    g.add_argument("--marginal", choices=("power", "gaussian"), help="marginal family")
    g.add_argument("--rho", type=float, help="local exponent of the power marginal")
    g.add_argument("--m", type=float, help="coefficient M of the power marginal")
    g.add_argument("--p", type=float, help="quantile level")
    g.add_argument("--process", choices=("iid", "gauss_ar1", "m_dependent"), help="dependence structure")
    g.add_argument("--phi", type=float, help="latent AR(1) coefficient (implies --process gauss_ar1)")
    g.add_argument("--weights", type=_float_list, help="moving-average weights (implies --process m_dependent)")

    mc = argparse.ArgumentParser(add_help=False)
    g = mc.add_argument_group("Monte Carlo")
    g.add_argument("--n-grid", type=_int_list, help="comma-separated sample sizes")
    g.add_argument("--replicates", type=int, help="independent data paths R per sample size")
    g.add_argument("--resamples", type=int, help="bootstrap resamples B")
    g.add_argument("--block", type=_schedule, help="block schedule: fixed:L | power:C,GAMMA | dyadic:C,GAMMA")
    g.add_argument("--limit-factor", type=int, help="limit-law draws per replicate")
    g.add_argument("--oracle-n", type=int, help="path length of the long-run-variance oracle")
    g.add_argument("--oracle-replicates", type=int, help="paths used by the long-run-variance oracle")

    p = sub.add_parser("simulate", parents=[common, model], help="generate one sample path")
    p.add_argument("--n", type=int, help="path length")

    for name, text in (
        ("clt", "KS distance of the scaled quantile error to its limit law"),
        ("bahadur", "size of the scaled Bahadur remainder"),
        ("inconsistency", "bootstrap contrast for rho != 1"),
    ):
        sub.add_parser(name, parents=[common, model, mc], help=text)

    p = sub.add_parser("boot-consistency", parents=[common, model, mc], help="bootstrap contrast D_n")
    p.add_argument("--fixed-stream", action="store_true", default=None, help="use prefixes of one data path")
    p.add_argument("--batches", type=int, help="bootstrap batches per n with --fixed-stream")

    p = sub.add_parser("zrho", parents=[common], help="sample the limiting sup-distance Z_rho")
    p.add_argument("--rho", type=float, help="local exponent")
    p.add_argument("--m", type=float, help="coefficient M")
    p.add_argument("--sigma", type=float, help="long-run standard deviation")
    p.add_argument("--count", type=int, help="outer draws of W2")
    p.add_argument("--inner-count", type=int, help="draws of W1")

    p = sub.add_parser("lrvar", parents=[common, model], help="long-run variance oracle")
    p.add_argument("--n", type=int, help="path length (sets oracle_n)")
    p.add_argument("--replicates", type=int, help="independent paths (sets oracle_replicates)")
    return parser


def _load_file(path: str) -> dict:
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if isinstance(doc, dict) and "rows" in doc and "config" in doc:
        doc = doc["config"]
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def resolve_config(args: argparse.Namespace) -> tuple[dict, dict]:
    """Merge defaults, config file and flags; return ``(config, execution)``."""
    cfg = copy.deepcopy(DEFAULTS)
    execution = {"format": "csv", "output": None, "threads": os.cpu_count() or 1}
    if args.config:
        doc = _load_file(args.config)
        file_sub = doc.get("subcommand")
        if file_sub is not None and file_sub != args.subcommand:
            raise ConfigError(f"config is for subcommand {file_sub!r}, not {args.subcommand!r}")
        unknown = set(doc) - set(DEFAULTS) - set(EXECUTION_KEYS) - {"subcommand"}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key, val in doc.items():
            if key in EXECUTION_KEYS:
                execution[key] = val
            elif key != "subcommand":
                cfg[key] = val

    opt = lambda name: getattr(args, name, None)
    for key in EXECUTION_KEYS:
        if opt(key) is not None:
            execution[key] = opt(key)

    proc = cfg["process"]
    marg = proc["marginal"]
    if opt("marginal") == "gaussian" or (opt("marginal") is None and marg.get("kind") == "gaussian"):
        if opt("marginal") == "gaussian" and marg.get("kind") != "gaussian":
            marg = {"kind": "gaussian", "mean": 0.0, "sd": 1.0}
        if opt("rho") is not None and opt("rho") != 1.0:
            raise ConfigError("rho must be 1 for a gaussian marginal")
        if opt("m") is not None:
            raise ConfigError("--m applies to the power marginal only")
    else:
        if marg.get("kind") != "power_local":
            marg = copy.deepcopy(DEFAULTS["process"]["marginal"])
        marg = {k: v for k, v in marg.items() if k not in ("lo", "hi")}
        if opt("rho") is not None:
            marg["rho"] = opt("rho")
        if opt("m") is not None:
            marg["m"] = opt("m")
        if opt("p") is not None:
            marg["p"] = opt("p")
    if opt("p") is not None:
        cfg["p"] = opt("p")
    proc = {"kind": proc.get("kind", "iid"), **{k: v for k, v in proc.items() if k in ("phi", "weights")}}
    if opt("process") is not None:
        proc["kind"] = opt("process")
    if opt("phi") is not None:
        proc["kind"], proc["phi"] = "gauss_ar1", opt("phi")
    if opt("weights") is not None:
        proc["kind"], proc["weights"] = "m_dependent", opt("weights")
    if proc["kind"] == "gauss_ar1":
        proc.setdefault("phi", 0.0)
        proc.pop("weights", None)
    elif proc["kind"] == "m_dependent":
        proc.setdefault("weights", [1.0])
        proc.pop("phi", None)
    else:
        proc.pop("phi", None)
        proc.pop("weights", None)
    proc["marginal"] = marg
    cfg["process"] = proc

    plan = cfg["plan"]
    if opt("block") is not None:
        plan["schedule"] = opt("block")
    if opt("resamples") is not None:
        plan["B"] = opt("resamples")

    if args.subcommand == "lrvar":
        if opt("n") is not None:
            cfg["oracle_n"] = opt("n")
        if opt("replicates") is not None:
            cfg["oracle_replicates"] = opt("replicates")
        args.n = args.replicates = None

    for flag, key in (
        ("seed", "seed"), ("n_grid", "n_grid"), ("replicates", "replicates"),
        ("limit_factor", "limit_factor"), ("oracle_n", "oracle_n"),
        ("oracle_replicates", "oracle_replicates"), ("fixed_stream", "fixed_stream"),
        ("batches", "batches"), ("n", "n"), ("count", "count"),
        ("inner_count", "inner_count"), ("sigma", "sigma"),
    ):
        if opt(flag) is not None:
            cfg[key] = opt(flag)

    if args.subcommand == "zrho":
        if opt("rho") is not None:
            marg["rho"] = opt("rho")
        if opt("m") is not None:
            marg["m"] = opt("m")

    if execution["format"] not in ("csv", "json"):
        raise ConfigError("format must be csv or json")
    if int(execution["threads"]) < 1:
        raise ConfigError("threads must be >= 1")
    cfg["subcommand"] = args.subcommand
    return cfg, execution


def _mc_config(cfg: dict) -> McConfig:
    return McConfig.from_dict(
        {k: cfg[k] for k in ("process", "plan", "n_grid", "replicates", "seed", "p",
                             "limit_factor", "oracle_n", "oracle_replicates")}
    )


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _summarize(report: ExperimentReport) -> None:
    by_n: dict[int, list[str]] = {}
    for r in report.sorted_rows():
        by_n.setdefault(r.n, []).append(f"{r.metric}={r.value:.4g}±{r.stderr:.2g}")
    for n, parts in by_n.items():
        print(f"[{report.experiment}] n={n} " + " ".join(parts), file=sys.stderr)


def _run_simulate(cfg: dict, execution: dict) -> int:
    spec = ProcessSpec.from_dict(cfg["process"])
    sample = generate(spec, int(cfg["n"]), int(cfg["seed"]))
    if execution["format"] == "json":
        doc = {"config": _embedded(cfg), "seed": sample.seed, "values": sample.values.tolist()}
        text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    else:
        text = sample.to_csv()
    _emit(text, execution["output"])
    print(f"[simulate] n={sample.n} mean={float(np.mean(sample.values)):.4g}", file=sys.stderr)
    return EXIT_OK


def _embedded(cfg: dict) -> dict:
    return copy.deepcopy(cfg)


def _run_report(cfg: dict, execution: dict) -> int:
    sub = cfg["subcommand"]
    threads = int(execution["threads"])
    status = EXIT_OK
    if sub == "zrho":
        marg = cfg["process"]["marginal"]
        rho, m = float(marg.get("rho", 1.0)), float(marg.get("m", 0.5))
        if not rho > 0:
            raise ConfigError("rho must be positive")
        if m == 0:
            raise ConfigError("m must be nonzero")
        if not cfg["sigma"] > 0:
            raise ConfigError("sigma must be positive")
        count, seed = int(cfg["count"]), int(cfg["seed"])
        t0 = time.perf_counter()
        z = z_rho_sampler(rho, m, float(cfg["sigma"]), count, int(cfg["inner_count"]), seed)
        report = ExperimentReport("zrho", metadata={"threads": threads})
        report.add(count, "mean_Z", float(z.mean()), float(z.std(ddof=1)) / np.sqrt(count), seed)
        report.add(count, "sd_Z", float(z.std(ddof=1)), float(z.std(ddof=1)) / np.sqrt(2 * (count - 1)), seed)
        report.add(count, "median_Z", float(np.median(z)), float("nan"), seed)
        report.metadata["wall_time_s"] = time.perf_counter() - t0
    elif sub == "lrvar":
        spec = ProcessSpec.from_dict(cfg["process"])
        t0 = time.perf_counter()
        lrv = long_run_variance_oracle(
            spec, None, int(cfg["oracle_n"]), int(cfg["oracle_replicates"]), int(cfg["seed"]), cfg["p"], threads
        )
        report = ExperimentReport("lrvar", metadata={"threads": threads})
        report.add(lrv.n, "sigma2_lr", lrv.value, lrv.stderr, int(cfg["seed"]))
        report.metadata["wall_time_s"] = time.perf_counter() - t0
        if lrv.degenerate:
            print("[lrvar] red flag: long-run variance indistinguishable from 0", file=sys.stderr)
            status = EXIT_RED_FLAG
    else:
        mc = _mc_config(cfg)
        if sub == "clt":
            report = run_clt_experiment(mc, threads)
        elif sub == "bahadur":
            report = run_bahadur_experiment(mc, threads)
        elif sub == "inconsistency":
            report = run_inconsistency_experiment(mc, threads)
        elif cfg["fixed_stream"]:
            report = run_fixed_stream_experiment(mc, int(cfg["batches"]), threads)
        else:
            report = run_bootstrap_consistency_experiment(mc, threads)
    report.config = _embedded(cfg)
    report.metadata["config_hash"] = report.config_hash()
    text = report.to_json() if execution["format"] == "json" else report.to_csv()
    _emit(text, execution["output"])
    _summarize(report)
    return status


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg, execution = resolve_config(args)
        if args.subcommand == "simulate":
            return _run_simulate(cfg, execution)
        return _run_report(cfg, execution)
    except ConfigError as exc:
        print(f"blockquant: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValueError, KeyError, TypeError) as exc:
        print(f"blockquant: invalid configuration: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DegenerateVarianceError as exc:
        print(f"blockquant: hypothesis red flag: {exc}", file=sys.stderr)
        return EXIT_RED_FLAG


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
