"""Marginal distribution models and the local power transform ``g``.

Two marginals are provided:

``PowerLocalModel``
    ``F(t) = p + M |t - t_p|^rho sgn(t - t_p)`` on its natural support, so the
    local expansion around the quantile ``t_p`` holds with no error term.
``GaussianModel``
    The smooth (``rho = 1``) case with positive density at every quantile.

``GTransform`` implements ``g(x) = M |x|^rho sgn(x)`` and its inverse, which
maps errors of the empirical distribution function onto the quantile scale.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple, Union

import numpy as np
from scipy import special

__all__ = [
    "GTransform",
    "GaussianModel",
    "LocalExpansion",
    "PowerLocalModel",
    "DistributionModel",
    "cdf",
    "generalized_inverse",
    "local_expansion",
    "model_from_dict",
    "quantile",
]


def _check_prob(q: Any) -> np.ndarray:
    arr = np.asarray(q, dtype=float)
    if np.any(~((arr > 0.0) & (arr < 1.0))):
        raise ValueError("probability must lie strictly inside (0, 1)")
    return arr


def _scalar_or_array(x: np.ndarray) -> float | np.ndarray:
    return float(x) if x.ndim == 0 else x


@dataclass(frozen=True)
class GTransform:
    """The odd power map ``g(x) = M |x|^rho sgn(x)``."""

    rho: float
    m_coef: float

    def __post_init__(self) -> None:
        if not self.rho > 0:
            raise ValueError(f"rho must be positive, got {self.rho}")
        if self.m_coef == 0 or not math.isfinite(self.m_coef):
            raise ValueError(f"m_coef must be finite and nonzero, got {self.m_coef}")

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        return _scalar_or_array(self.m_coef * np.abs(x) ** self.rho * np.sign(x))

    def inverse(self, y):
        """The unique ``x`` with ``g(x) = y``."""
        y = np.asarray(y, dtype=float)
        m = self.m_coef
        if self.rho == 1.0:
            return _scalar_or_array(y / m)
        x = (np.abs(y) / abs(m)) ** (1.0 / self.rho) * np.sign(y) * math.copysign(1.0, m)
        return _scalar_or_array(x)

    __call__ = apply


def g_apply(g: GTransform, x):
    return g.apply(x)


def g_inverse(g: GTransform, y):
    return g.inverse(y)


class LocalExpansion(NamedTuple):
    """Local power parameters of a cdf at its ``p``-quantile."""

    rho: float
    m_coef: float
    t_p: float
    p: float

    @property
    def g(self) -> GTransform:
        return GTransform(self.rho, self.m_coef)


@dataclass(frozen=True)
class PowerLocalModel:
    """Distribution with an exact power law at its ``p``-quantile.

    The cdf is ``p + M |t - t_p|^rho sgn(t - t_p)`` clipped to ``[0, 1]``. With
    the defaults ``t_p = 0`` and ``p = 1/2`` and ``M = 1/2`` this is
    ``F(t) = |t|^rho sgn(t) / 2 + 1/2`` on ``[-1, 1]``.

    Parameters
    ----------
    rho : float
        Local exponent; ``rho = 1`` is the differentiable case.
    m_coef : float
        Positive coefficient ``M``.
    t_p : float
        Location of the ``p``-quantile.
    p : float
        Probability level at ``t_p``.
    """

    rho: float
    m_coef: float = 0.5
    t_p: float = 0.0
    p: float = 0.5

    def __post_init__(self) -> None:
        if not (self.rho > 0 and math.isfinite(self.rho)):
            raise ValueError(f"rho must be positive, got {self.rho}")
        # a negative M would make the cdf decreasing
        if not (self.m_coef > 0 and math.isfinite(self.m_coef)):
            raise ValueError(f"m_coef must be positive, got {self.m_coef}")
        if not 0 < self.p < 1:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if not math.isfinite(self.t_p):
            raise ValueError("t_p must be finite")

    @property
    def lo(self) -> float:
        return self.t_p - (self.p / self.m_coef) ** (1.0 / self.rho)

    @property
    def hi(self) -> float:
        return self.t_p + ((1.0 - self.p) / self.m_coef) ** (1.0 / self.rho)

    @property
    def support(self) -> tuple[float, float]:
        return self.lo, self.hi

    def local(self, p: float | None = None) -> LocalExpansion:
        if p is not None and p != self.p:
            raise ValueError("PowerLocalModel carries its own level p; cannot expand elsewhere")
        return LocalExpansion(self.rho, self.m_coef, self.t_p, self.p)

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        h = t - self.t_p
        val = self.p + self.m_coef * np.abs(h) ** self.rho * np.sign(h)
        val = np.clip(val, 0.0, 1.0)
        val = np.where(t <= self.lo, 0.0, np.where(t >= self.hi, 1.0, val))
        return _scalar_or_array(val)

    def _ppf(self, u):
        # accepts the closed interval [0, 1]
        u = np.asarray(u, dtype=float)
        d = u - self.p
        t = self.t_p + np.sign(d) * (np.abs(d) / self.m_coef) ** (1.0 / self.rho)
        return np.clip(t, self.lo, self.hi)

    def quantile(self, q):
        q = _check_prob(q)
        t = _refine_inverse(self.cdf, q, self._ppf(q))
        return _scalar_or_array(t)

    def from_normal(self, z: np.ndarray) -> np.ndarray:
        """Map standard normal variates to this marginal."""
        return self._ppf(special.ndtr(z))

    def to_dict(self) -> dict:
        return {
            "kind": "power_local",
            "rho": self.rho,
            "m": self.m_coef,
            "tp": self.t_p,
            "p": self.p,
            "lo": self.lo,
            "hi": self.hi,
        }


@dataclass(frozen=True)
class GaussianModel:
    mean: float = 0.0
    sd: float = 1.0

    def __post_init__(self) -> None:
        if not (self.sd > 0 and math.isfinite(self.sd)):
            raise ValueError(f"sd must be positive, got {self.sd}")
        if not math.isfinite(self.mean):
            raise ValueError("mean must be finite")

    def cdf(self, t):
        t = np.asarray(t, dtype=float)
        return _scalar_or_array(special.ndtr((t - self.mean) / self.sd))

    def pdf(self, t):
        z = (np.asarray(t, dtype=float) - self.mean) / self.sd
        return _scalar_or_array(np.exp(-0.5 * z * z) / (self.sd * math.sqrt(2 * math.pi)))

    def quantile(self, q):
        q = _check_prob(q)
        t = _refine_inverse(self.cdf, q, self.mean + self.sd * special.ndtri(q))
        return _scalar_or_array(t)

    def local(self, p: float | None = None) -> LocalExpansion:
        p = 0.5 if p is None else p
        t_p = float(self.quantile(p))
        return LocalExpansion(1.0, float(self.pdf(t_p)), t_p, p)

    def from_normal(self, z: np.ndarray) -> np.ndarray:
        return self.mean + self.sd * np.asarray(z, dtype=float)

    def to_dict(self) -> dict:
        return {"kind": "gaussian", "mean": self.mean, "sd": self.sd}


DistributionModel = Union[PowerLocalModel, GaussianModel]


def cdf(model: DistributionModel, t):
    return model.cdf(t)


def quantile(model: DistributionModel, q):
    return model.quantile(q)


def local_expansion(model: DistributionModel, p: float | None = None) -> LocalExpansion:
    """Return ``(rho, M, t_p, p)`` describing ``model`` near its ``p``-quantile."""
    return model.local(p)


def model_from_dict(d: dict) -> DistributionModel:
    d = dict(d)
    kind = d.pop("kind", None)
    if kind == "gaussian":
        unknown = set(d) - {"mean", "sd"}
        if unknown:
            raise ValueError(f"unknown gaussian model keys: {sorted(unknown)}")
        return GaussianModel(float(d.get("mean", 0.0)), float(d.get("sd", 1.0)))
    if kind == "power_local":
        unknown = set(d) - {"rho", "m", "tp", "p", "lo", "hi"}
        if unknown:
            raise ValueError(f"unknown power_local model keys: {sorted(unknown)}")
        model = PowerLocalModel(
            float(d["rho"]),
            float(d.get("m", 0.5)),
            float(d.get("tp", 0.0)),
            float(d.get("p", 0.5)),
        )
        for key, val in (("lo", model.lo), ("hi", model.hi)):
            if key in d and not math.isclose(float(d[key]), val, rel_tol=1e-9, abs_tol=1e-12):
                raise ValueError(f"{key}={d[key]} inconsistent with (rho, m, tp, p); expected {val}")
        return model
    raise ValueError(f"unknown model kind {kind!r}")


def _refine_inverse(cdf_fn: Callable, q: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Move a closed-form inverse up to the smallest float above it with ``cdf(t) >= q``.

    Points already satisfying the inequality are left alone. Others are
    bracketed by doubling steps and then bisected down to adjacent floats.
    """
    t = np.array(t, dtype=float)
    q = np.broadcast_to(q, t.shape)
    low = np.asarray(cdf_fn(t)) < q
    if not low.any():
        return t
    lo, ql = t[low], q[low]
    step = np.spacing(np.abs(lo)) + np.finfo(float).tiny
    hi = lo + step
    for _ in range(2100):
        bad = np.asarray(cdf_fn(hi)) < ql
        if not bad.any():
            break
        lo = np.where(bad, hi, lo)
        step = np.where(bad, 2 * step, step)
        hi = np.where(bad, hi + step, hi)
    for _ in range(2100):
        mid = lo + (hi - lo) / 2
        active = (mid > lo) & (mid < hi)
        if not active.any():
            break
        ok = np.asarray(cdf_fn(mid)) >= ql
        hi = np.where(active & ok, mid, hi)
        lo = np.where(active & ~ok, mid, lo)
    t[low] = hi
    return t


def generalized_inverse(
    cdf_fn: Callable[[float], float],
    q: float,
    lo: float,
    hi: float,
    tol: float = 1e-12,
) -> float:
    """``inf {t : cdf(t) >= q}`` by bisection on ``[lo, hi]``.

    Requires ``cdf(lo) < q <= cdf(hi)``; the returned point satisfies
    ``cdf(t) >= q`` and lies within ``tol`` of the infimum.
    """
    if not 0 < q < 1:
        raise ValueError("q must lie in (0, 1)")
    if cdf_fn(hi) < q:
        raise ValueError("cdf(hi) < q: upper bracket too small")
    if cdf_fn(lo) >= q:
        return lo
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if cdf_fn(mid) >= q:
            hi = mid
        else:
            lo = mid
    return hi
