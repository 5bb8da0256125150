"""The mixed gauge ``h(r) = r**n + lam * r**(n-1)``.

All arithmetic is plain 64-bit floating point.  The gauge vanishes at
``r = 0`` for every ``n``; at ``n = 1`` this makes ``h`` jump from 0 to
``lam`` at the origin, which is intended.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError

__all__ = ["GaugeParams", "evaluate", "evaluate_powers", "cell_powers", "scale_identity_residual"]


@dataclass(frozen=True)
class GaugeParams:
    """Dimension ``n`` and boundary penalty weight ``lam`` (a length)."""

    n: int
    lam: float

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, int) or self.n < 1:
            raise DomainError(f"dimension must be an integer >= 1, got {self.n!r}")
        lam = float(self.lam)
        if not math.isfinite(lam) or lam < 0:
            raise DomainError(f"lambda must be finite and >= 0, got {self.lam!r}")
        object.__setattr__(self, "lam", lam)

    def with_lam(self, lam: float) -> "GaugeParams":
        return GaugeParams(self.n, lam)


def _check_r(r: float) -> float:
    r = float(r)
    if not math.isfinite(r) or r < 0:
        raise DomainError(f"gauge argument must be finite and >= 0, got {r!r}")
    return r


def evaluate(params: GaugeParams, r: float) -> float:
    """Return ``r**n + lam * r**(n-1)``, with ``h(0) = 0``."""
    r = _check_r(r)
    if r == 0.0:
        return 0.0
    n = params.n
    if n == 1:
        return r + params.lam
    return r**n + params.lam * r ** (n - 1)


def evaluate_powers(params: GaugeParams, rn: float, rn1: float) -> float:
    """Gauge from precomputed ``r**n`` and ``r**(n-1)``."""
    return rn + params.lam * rn1


def cell_powers(n: int, side: float, convention: str = "diameter"):
    """``(diam**n, diam**(n-1))`` of a cube of the given side.

    Under the diameter convention ``diam = side * sqrt(n)``; the powers are
    formed as ``side**k * n**(k/2)`` so that even powers stay exact
    (``diam**2 == 2 * side**2`` in the plane).
    """
    if convention == "side":
        return side**n, side ** (n - 1)
    return side**n * _root_pow(n, n), side ** (n - 1) * _root_pow(n, n - 1)


def _root_pow(n: int, k: int) -> float:
    # n ** (k / 2), exact when k is even
    return float(n ** (k // 2)) * (math.sqrt(n) if k % 2 else 1.0)


def scale_identity_residual(params: GaugeParams, t: float, r: float) -> float:
    """``h_lam(t*r) - t**n * h_{lam/t}(r)``; zero up to rounding for any t > 0."""
    t = float(t)
    if not math.isfinite(t) or t <= 0:
        raise DomainError(f"scale factor must be finite and > 0, got {t!r}")
    r = _check_r(r)
    lhs = evaluate(params, t * r)
    rhs = t**params.n * evaluate(params.with_lam(params.lam / t), r)
    return lhs - rhs
