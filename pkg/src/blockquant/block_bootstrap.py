"""Circular block bootstrap.

The sample is extended periodically (``X_{i+n} = X_i``), ``b = floor(n / l)``
block starts are drawn uniformly from all ``n`` positions, and the ``b``
length-``l`` windows are concatenated into ``X*_1, ..., X*_{bl}``. Any
``n - bl`` leftover positions are not padded.

Besides the object API (:func:`resample`, :func:`bootstrap_ecdf`, ...) the
module has batch helpers working on coverage counts: how many times each
original position appears in a resample. The bootstrap quantile and
``F*_n(t)`` depend on a resample only through these counts, which lets a
whole batch of ``B`` resamples be processed as one ``(B, n)`` count array
(stored as float32, exact for counts below 2**24).
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dist_models import DistributionModel, local_expansion
from .process_gen import Sample, make_rng
from .quantile_core import BahadurDecomposition, Ecdf, _values, decompose_values, order_index

__all__ = [
    "BlockLengthSchedule",
    "BootstrapPlan",
    "BootstrapSample",
    "batch_ecdf_at",
    "batch_quantiles",
    "block_length",
    "bootstrap_bahadur_decompose",
    "bootstrap_ecdf",
    "bootstrap_quantile",
    "coverage_counts",
    "draw_starts",
    "dyadic_anchor",
    "expected_bootstrap_ecdf",
    "resample",
]

SCHEDULE_KINDS = ("fixed", "power", "dyadic_power")


def dyadic_anchor(n: int) -> int:
    """``a_n = 2^k`` with ``2^k <= n < 2^{k+1}``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return 1 << (int(n).bit_length() - 1)


@dataclass(frozen=True)
class BlockLengthSchedule:
    """Block length as a function of the sample size.

    ``fixed``
        ``l_n = length``.
    ``power``
        ``l_n = floor(c n^gamma)``.
    ``dyadic_power``
        ``l_n = floor(c a_n^gamma)`` with ``a_n`` the largest power of two
        not above ``n``, so ``l`` is constant on ``[2^k, 2^{k+1} - 1]``.

    All kinds are clipped to ``[1, n]``.
    """

    kind: str = "power"
    c: float = 1.0
    gamma: float = 0.5
    length: int = 1

    def __post_init__(self) -> None:
        if self.kind not in SCHEDULE_KINDS:
            raise ValueError(f"schedule kind must be one of {SCHEDULE_KINDS}, got {self.kind!r}")
        if self.kind == "fixed":
            if int(self.length) < 1:
                raise ValueError("fixed block length must be >= 1")
        else:
            if not self.c > 0:
                raise ValueError("c must be positive")
            if not 0 < self.gamma < 1:
                raise ValueError("gamma must lie in (0, 1)")

    @classmethod
    def fixed(cls, length: int) -> "BlockLengthSchedule":
        return cls("fixed", length=int(length))

    @classmethod
    def power(cls, c: float = 1.0, gamma: float = 0.5) -> "BlockLengthSchedule":
        return cls("power", c=c, gamma=gamma)

    @classmethod
    def dyadic_power(cls, c: float = 1.0, gamma: float = 0.5) -> "BlockLengthSchedule":
        return cls("dyadic_power", c=c, gamma=gamma)

    def __call__(self, n: int) -> int:
        return block_length(self, n)

    def rate_constants(self) -> tuple[float, float, float]:
        """``(C1, C2, eps1)`` with ``C1 n^eps1 <= l_n <= C2 n^(1 - eps1)`` for all ``n``.

        Only meaningful for the power kinds. The lower constant absorbs the
        floor (``floor(x) >= x / 2`` for ``x >= 1``), the dyadic anchor
        (``a_n > n / 2``) and the clip at 1.
        """
        if self.kind == "fixed":
            raise ValueError("a fixed block length has no growth rate")
        eps1 = min(self.gamma, 1.0 - self.gamma)
        c1 = min(1.0, self.c / 2.0)
        if self.kind == "dyadic_power":
            c1 = min(1.0, self.c * 2.0 ** (-1.0 - self.gamma))
        c2 = max(1.0, self.c)
        return c1, c2, eps1

    def to_dict(self) -> dict:
        if self.kind == "fixed":
            return {"kind": "fixed", "l": int(self.length)}
        return {"kind": self.kind, "c": self.c, "gamma": self.gamma}

    @classmethod
    def from_dict(cls, d: dict) -> "BlockLengthSchedule":
        kind = d.get("kind")
        if kind == "fixed":
            unknown = set(d) - {"kind", "l"}
            if unknown:
                raise ValueError(f"unknown schedule keys: {sorted(unknown)}")
            return cls.fixed(int(d["l"]))
        unknown = set(d) - {"kind", "c", "gamma"}
        if unknown:
            raise ValueError(f"unknown schedule keys: {sorted(unknown)}")
        return cls(kind, c=float(d.get("c", 1.0)), gamma=float(d.get("gamma", 0.5)))


def block_length(schedule: BlockLengthSchedule, n: int) -> int:
    n = int(n)
    if n < 1:
        raise ValueError("n must be >= 1")
    if schedule.kind == "fixed":
        raw = schedule.length
    else:
        base = dyadic_anchor(n) if schedule.kind == "dyadic_power" else n
        # the small offset keeps exact powers such as 100**0.5 from flooring down
        raw = math.floor(schedule.c * base**schedule.gamma + 1e-9)
    return min(max(int(raw), 1), n)


@dataclass(frozen=True)
class BootstrapPlan:
    schedule: BlockLengthSchedule
    num_resamples: int = 1000
    seed: int = 0

    def __post_init__(self) -> None:
        if int(self.num_resamples) < 1:
            raise ValueError("num_resamples must be >= 1")

    def to_dict(self) -> dict:
        return {"schedule": self.schedule.to_dict(), "B": int(self.num_resamples), "seed": int(self.seed)}

    @classmethod
    def from_dict(cls, d: dict) -> "BootstrapPlan":
        unknown = set(d) - {"schedule", "B", "seed"}
        if unknown:
            raise ValueError(f"unknown plan keys: {sorted(unknown)}")
        return cls(
            BlockLengthSchedule.from_dict(d["schedule"]),
            int(d.get("B", 1000)),
            int(d.get("seed", 0)),
        )


@dataclass(frozen=True)
class BootstrapSample:
    """A circular block resample.

    ``block_starts`` are 0-based positions into the source sample.
    """

    values: np.ndarray
    block_starts: np.ndarray
    block_length: int
    source_size: int

    @property
    def num_blocks(self) -> int:
        return self.block_starts.size

    def __len__(self) -> int:
        return self.values.size


def _check_length(n: int, l: int) -> None:
    if not 1 <= l <= n:
        raise ValueError(f"block length must satisfy 1 <= l <= n, got l={l}, n={n}")


def draw_starts(n: int, l: int, num: int | None, seed: int) -> np.ndarray:
    """Uniform block starts in ``0..n-1``: shape ``(b,)`` or ``(num, b)``."""
    _check_length(n, l)
    b = n // l
    size = b if num is None else (num, b)
    return make_rng(seed).integers(n, size=size)


def resample(
    sample: Sample | np.ndarray,
    l: int,
    seed: int = 0,
    starts: np.ndarray | None = None,
) -> BootstrapSample:
    """Draw one circular block resample of ``b = floor(n / l)`` blocks.

    ``starts`` (0-based) overrides the random draw.
    """
    x = _values(sample)
    n = x.size
    l = int(l)
    _check_length(n, l)
    if starts is None:
        starts = draw_starts(n, l, None, seed)
    else:
        starts = np.asarray(starts, dtype=np.int64)
        if np.any((starts < 0) | (starts >= n)):
            raise ValueError("block starts must lie in [0, n)")
    idx = (starts[:, None] + np.arange(l)[None, :]) % n
    return BootstrapSample(x[idx.ravel()], starts, l, n)


def bootstrap_ecdf(bs: BootstrapSample) -> Ecdf:
    return Ecdf(bs.values)


def bootstrap_quantile(bs: BootstrapSample, q: float) -> float:
    return Ecdf(bs.values).quantile(q)


def expected_bootstrap_ecdf(sample: Sample | np.ndarray, l: int, t: float) -> float:
    """``E* F*_n(t)`` by exhaustive averaging over all ``n`` block starts."""
    x = _values(sample)
    n = x.size
    l = int(l)
    _check_length(n, l)
    below = (x <= t).astype(np.int64)
    # window count for every start j: sum of below[j..j+l-1] circularly
    ext = np.concatenate((below, below[: l - 1]))
    csum = np.concatenate(([0], np.cumsum(ext)))
    window = csum[l : l + n] - csum[:n]
    # every resampled block is a draw from these n windows, so b cancels
    return int(window.sum()) / (n * l)


def bootstrap_bahadur_decompose(
    bs: BootstrapSample,
    model: DistributionModel,
    p: float | None = None,
    scale: str = "bl",
) -> BahadurDecomposition:
    """Bahadur split of the bootstrap quantile, centered at the true ``t_p``.

    ``scale="bl"`` multiplies the remainder by ``(bl)^{1/(2 rho)}``;
    ``scale="n"`` uses the source size instead.
    """
    if scale not in ("bl", "n"):
        raise ValueError("scale must be 'bl' or 'n'")
    size = bs.values.size if scale == "bl" else bs.source_size
    return decompose_values(bs.values, local_expansion(model, p), scale_size=size)


def coverage_counts(n: int, l: int, starts: np.ndarray) -> np.ndarray:
    """Multiplicity of every source position in each resample.

    ``starts`` has shape ``(B, b)``; the result has shape ``(B, n)`` and each
    row sums to ``b * l``.
    """
    starts = np.atleast_2d(np.asarray(starts, dtype=np.int64))
    nb, b = starts.shape
    width = n + 1
    row = (np.arange(nb, dtype=np.int64) * width)[:, None]
    end = starts + l
    wraps = end > n
    # difference array: +1 at start, -1 at end; wrapped blocks restart at 0
    plus = starts + row
    minus = np.where(wraps, n, end) + row
    flat_plus = [plus.ravel()]
    flat_minus = [minus.ravel()]
    if wraps.any():
        r_idx, _ = np.nonzero(wraps)
        flat_plus.append(r_idx * width)
        flat_minus.append(r_idx * width + (end[wraps] - n))
    size = nb * width
    diff = np.bincount(np.concatenate(flat_plus), minlength=size)
    diff -= np.bincount(np.concatenate(flat_minus), minlength=size)
    # float32 is exact for counts below 2**24 and keeps the products on BLAS
    return np.cumsum(diff.reshape(nb, width)[:, :n], axis=1, dtype=np.float32)


def batch_quantiles(sorted_x: np.ndarray, order: np.ndarray, cov: np.ndarray, q: float) -> np.ndarray:
    """Bootstrap ``q``-quantiles for each row of ``cov``.

    ``order`` is the argsort of the source sample and ``sorted_x`` the sorted
    values. Only a window of ranks around ``q n`` is scanned; rows whose
    quantile falls outside it are redone over all ranks.
    """
    n = order.size
    total = int(round(float(cov[0].sum())))
    k = order_index(total, q)
    center = int(q * n)
    half = int(6 * math.sqrt(n)) + 8
    lo, hi = max(center - half, 0), min(center + half, n)
    below = np.zeros(n, dtype=cov.dtype)
    below[order[:lo]] = 1
    base = cov @ below
    cum = np.cumsum(cov[:, order[lo:hi]], axis=1) + base[:, None]
    pos = lo + (cum < k).sum(axis=1)
    bad = (base >= k) | (cum[:, -1] < k)
    if bad.any():
        full = np.cumsum(cov[bad][:, order], axis=1)
        pos[bad] = (full < k).sum(axis=1)
    return sorted_x[pos]


def batch_ecdf_at(x: np.ndarray, cov: np.ndarray, t: float) -> np.ndarray:
    """``F*_n(t)`` for each row of ``cov``."""
    total = float(cov[0].sum())
    return (cov @ (x <= t).astype(cov.dtype)) / total
