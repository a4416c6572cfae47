"""Empirical distribution function, empirical quantile and the Bahadur split."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .dist_models import DistributionModel, LocalExpansion, local_expansion
from .process_gen import Sample

__all__ = [
    "BahadurDecomposition",
    "Ecdf",
    "bahadur_decompose",
    "decompose_values",
    "ecdf_eval",
    "empirical_quantile",
    "order_index",
]

ArrayOrSample = Union[Sample, np.ndarray, "list[float]"]


def order_index(n: int, q: float) -> int:
    """Smallest ``k`` in ``1..n`` with ``k / n >= q``.

    This is ``ceil(n q)`` computed so that it agrees bit-for-bit with the
    comparison ``F_n(t) >= q`` where ``F_n`` returns ``count / n``.
    """
    if not 0 < q < 1:
        raise ValueError(f"q must lie in (0, 1), got {q}")
    k = min(max(math.ceil(n * q), 1), n)
    while k > 1 and (k - 1) / n >= q:
        k -= 1
    while k < n and k / n < q:
        k += 1
    return k


def _values(x: ArrayOrSample) -> np.ndarray:
    if isinstance(x, Sample):
        return x.values
    return np.asarray(x, dtype=float)


class Ecdf:
    """Right-continuous empirical distribution function of a sample.

    Stores a sorted copy; evaluation is a binary search.

    >>> e = Ecdf([1, 2, 3, 4])
    >>> e(2.5), e(2), e(0)
    (0.5, 0.5, 0.0)
    """

    __slots__ = ("sorted_values", "n")

    def __init__(self, values: ArrayOrSample):
        v = np.sort(_values(values).ravel())
        if v.size == 0:
            raise ValueError("empty sample")
        v.setflags(write=False)
        self.sorted_values = v
        self.n = v.size

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = np.searchsorted(self.sorted_values, t, side="right") / self.n
        return float(out) if out.ndim == 0 else out

    eval = __call__

    def quantile(self, q: float) -> float:
        """``inf {t : F_n(t) >= q}``, the ``ceil(nq)``-th order statistic."""
        return float(self.sorted_values[order_index(self.n, q) - 1])

    def __repr__(self) -> str:
        return f"Ecdf(n={self.n})"


def ecdf_eval(e: Ecdf, t):
    return e(t)


def empirical_quantile(e: Ecdf | ArrayOrSample, q: float) -> float:
    if not isinstance(e, Ecdf):
        e = Ecdf(e)
    return e.quantile(q)


@dataclass(frozen=True)
class BahadurDecomposition:
    """``F_n^{-1}(p) - t_p = g^{-1}(p - F_n(t_p)) + R_n``.

    Attributes
    ----------
    empirical_quantile : float
    linearized_term : float
        ``g^{-1}(p - F_n(t_p))``.
    remainder : float
        ``R_n``, obtained as the exact difference.
    scaled_remainder : float
        ``size^{1/(2 rho)} R_n``.
    size : int
        Number of observations used for the scaling.
    """

    empirical_quantile: float
    linearized_term: float
    remainder: float
    scaled_remainder: float
    size: int
    t_p: float

    def to_row(self, seed: int = 0) -> dict:
        return {
            "n": self.size,
            "seed": seed,
            "eq": self.empirical_quantile,
            "lin": self.linearized_term,
            "rem": self.remainder,
            "scaled_rem": self.scaled_remainder,
        }


def decompose_values(
    values: np.ndarray, loc: LocalExpansion, scale_size: int | None = None
) -> BahadurDecomposition:
    e = Ecdf(values)
    eq = e.quantile(loc.p)
    lin = float(loc.g.inverse(loc.p - e(loc.t_p)))
    rem = (eq - loc.t_p) - lin
    size = e.n if scale_size is None else int(scale_size)
    return BahadurDecomposition(eq, lin, rem, size ** (1.0 / (2.0 * loc.rho)) * rem, size, loc.t_p)


def bahadur_decompose(
    sample: ArrayOrSample, model: DistributionModel, p: float | None = None
) -> BahadurDecomposition:
    """Split the quantile error of ``sample`` into its ``g^{-1}`` part and ``R_n``.

    ``model`` supplies ``(rho, M, t_p, p)``; a ``GaussianModel`` needs ``p``
    (default 1/2) and is expanded with ``rho = 1`` and ``M = f(t_p)``.
    """
    return decompose_values(_values(sample), local_expansion(model, p))
