"""Stationary, strongly mixing sequences with an exact marginal law.

A stationary standard-Gaussian latent series ``Z`` is built first (i.i.d.,
AR(1) started from its stationary law, or a normalized finite moving
average) and pushed through ``X_i = F^{-1}(Phi(Z_i))``. The monotone map keeps
the mixing coefficients of ``Z``: geometric decay for AR(1), zero beyond lag
``m`` for the moving average.
"""
from __future__ import annotations

import io
import json
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import signal

from .dist_models import DistributionModel, model_from_dict

__all__ = [
    "ProcessSpec",
    "Sample",
    "derive_seed",
    "generate",
    "generate_values",
    "latent_lag_correlation",
    "make_rng",
    "sample_from_csv",
]

_MASK64 = (1 << 64) - 1
# odd multipliers for the replicate index and for the stream label
_REPLICATE_MULT = 0x9E3779B97F4A7C15
_STREAM_MULT = 0xD1B54A32D192ED03

KINDS = ("iid", "gauss_ar1", "m_dependent")


def derive_seed(base_seed: int, index: int, stream: int = 0) -> int:
    """Seed for task ``index`` of ``stream``: ``base ^ (index * C)`` on 64 bits.

    ``stream`` separates independent uses of the same replicate index (data
    paths, bootstrap draws, proxy paths, ...).
    """
    s = (int(base_seed) ^ (int(stream) * _STREAM_MULT)) & _MASK64
    return (s ^ (int(index) * _REPLICATE_MULT)) & _MASK64


def make_rng(seed: int) -> np.random.Generator:
    """PCG64 generator for a 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & _MASK64))


@dataclass(frozen=True)
class ProcessSpec:
    """Recipe for a stationary sequence with marginal ``marginal``.

    Parameters
    ----------
    kind : {"iid", "gauss_ar1", "m_dependent"}
    marginal : DistributionModel
    phi : float
        AR(1) coefficient of the latent Gaussian series, ``|phi| < 1``.
    weights : tuple of float
        Moving-average weights ``w_0, ..., w_m`` for ``m_dependent``.
    """

    kind: str
    marginal: DistributionModel
    phi: float = 0.0
    weights: tuple[float, ...] = (1.0,)

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "gauss_ar1" and not abs(self.phi) < 1:
            raise ValueError(f"|phi| must be < 1, got {self.phi}")
        if self.kind == "m_dependent":
            w = tuple(float(v) for v in self.weights)
            if not w or not any(v != 0 for v in w):
                raise ValueError("weights must be nonempty with a nonzero entry")
            object.__setattr__(self, "weights", w)

    @classmethod
    def iid(cls, marginal: DistributionModel) -> "ProcessSpec":
        return cls("iid", marginal)

    @classmethod
    def ar1(cls, marginal: DistributionModel, phi: float) -> "ProcessSpec":
        return cls("gauss_ar1", marginal, phi=phi)

    @classmethod
    def m_dependent(cls, marginal: DistributionModel, weights: Sequence[float]) -> "ProcessSpec":
        return cls("m_dependent", marginal, weights=tuple(weights))

    @property
    def m(self) -> int:
        return len(self.weights) - 1 if self.kind == "m_dependent" else 0

    @property
    def mixing_note(self) -> str:
        if self.kind == "iid":
            return "independent: alpha(k) = 0 for k >= 1"
        if self.kind == "gauss_ar1":
            return f"Gaussian AR(1), phi={self.phi}: alpha(k) decays geometrically, rate |phi|^k"
        return f"{self.m}-dependent: alpha(k) = 0 for k > {self.m}"

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == "gauss_ar1":
            d["phi"] = self.phi
        elif self.kind == "m_dependent":
            d["m"] = self.m
            d["weights"] = list(self.weights)
        d["marginal"] = self.marginal.to_dict()
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ProcessSpec":
        allowed = {"kind", "phi", "m", "weights", "marginal"}
        unknown = set(d) - allowed
        if unknown:
            raise ValueError(f"unknown process keys: {sorted(unknown)}")
        kind = d.get("kind")
        marginal = model_from_dict(d["marginal"])
        if kind == "m_dependent":
            weights = tuple(float(w) for w in d["weights"])
            if "m" in d and int(d["m"]) != len(weights) - 1:
                raise ValueError("m must equal len(weights) - 1")
            return cls(kind, marginal, weights=weights)
        if kind == "gauss_ar1":
            return cls(kind, marginal, phi=float(d["phi"]))
        return cls(kind, marginal)


@dataclass(frozen=True)
class Sample:
    values: np.ndarray
    spec_id: str = ""
    seed: int = 0

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 1 or v.size < 1:
            raise ValueError("sample must be a nonempty 1-d sequence")
        if not np.all(np.isfinite(v)):
            raise ValueError("sample values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def n(self) -> int:
        return self.values.size

    def __len__(self) -> int:
        return self.values.size

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write(f"# spec: {self.spec_id}\n")
        buf.write(f"# seed: {self.seed}\n")
        buf.write("x\n")
        for v in self.values:
            buf.write(f"{float(v)!r}\n")
        return buf.getvalue()


def sample_from_csv(text: str) -> Sample:
    spec_id, seed, vals = "", 0, []
    for line in text.splitlines():
        if line.startswith("# spec: "):
            spec_id = line[len("# spec: "):]
        elif line.startswith("# seed: "):
            seed = int(line[len("# seed: "):])
        elif line and not line.startswith("#") and line != "x":
            vals.append(float(line))
    return Sample(np.array(vals), spec_id, seed)


def _latent(spec: ProcessSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec.kind == "iid":
        return rng.standard_normal(n)
    if spec.kind == "gauss_ar1":
        phi = spec.phi
        e = rng.standard_normal(n)
        # unit-variance recursion Y_i = phi Y_{i-1} + sqrt(1 - phi^2) e_i,
        # Y_0 drawn from the stationary N(0, 1)
        y0 = e[0]
        if n == 1:
            return e
        innov = math.sqrt(1.0 - phi * phi) * e[1:]
        rest, _ = signal.lfilter([1.0], [1.0, -phi], innov, zi=[phi * y0])
        return np.concatenate(([y0], rest))
    w = np.asarray(spec.weights)
    e = rng.standard_normal(n + spec.m)
    z = np.convolve(e, w, mode="valid")
    return z / math.sqrt(float(w @ w))


def generate_values(spec: ProcessSpec, n: int, seed: int) -> np.ndarray:
    """Raw array version of :func:`generate`."""
    if int(n) < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    z = _latent(spec, int(n), make_rng(seed))
    return spec.marginal.from_normal(z)


def generate(spec: ProcessSpec, n: int, seed: int) -> Sample:
    """Draw ``X_1, ..., X_n`` from ``spec``; deterministic in ``(spec, n, seed)``."""
    values = generate_values(spec, n, seed)
    spec_id = json.dumps(spec.to_dict(), sort_keys=True)
    return Sample(values, spec_id, int(seed))


def latent_lag_correlation(spec: ProcessSpec, lag: int) -> float:
    """Autocorrelation of the latent Gaussian series at ``lag``."""
    lag = abs(int(lag))
    if lag == 0:
        return 1.0
    if spec.kind == "iid":
        return 0.0
    if spec.kind == "gauss_ar1":
        return spec.phi**lag
    w = np.asarray(spec.weights)
    if lag > spec.m:
        return 0.0
    return float(w[:-lag] @ w[lag:] / (w @ w))
