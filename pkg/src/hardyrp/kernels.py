"""Approximation-identity kernels concentrating at a pair of points +-p.

The family f_{p,n} is built from the bump g_n and the resonant kernel
d_{p,n}; as the sharpness n grows, (1/pi) int f_{p,n} phi converges to the
symmetric average (phi(p) + phi(-p))/2 at continuity points p.  The
comparison kernel dtilde_{p,n} has a printed arctan antiderivative, which
gives the mass of the window (p - 1/sqrt(n), p + 1/sqrt(n)) in closed form,
and the sandwich factors b_{p,n} <= d/dtilde <= B_{p,n} on that window are
also closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

__all__ = [
    "KernelParams",
    "eval_g",
    "eval_d",
    "eval_f",
    "eval_dtilde",
    "halfmass",
    "halfmass_quadrature",
    "sandwich_factors",
    "approx_identity",
    "approx_identity_regions",
]


@dataclass(frozen=True)
class KernelParams:
    """Evaluation point p > 1/sqrt(n) and integer sharpness n >= 2."""

    p: float
    n: int

    def __post_init__(self):
        if self.n < 2 or self.n != int(self.n):
            raise ValueError("sharpness n must be an integer >= 2")
        if not self.p > 1.0 / math.sqrt(self.n):
            raise ValueError("evaluation point must satisfy p > 1/sqrt(n)")

    @property
    def window(self) -> tuple[float, float]:
        r = 1.0 / math.sqrt(self.n)
        return self.p - r, self.p + r


def eval_g(n: int, x):
    """g_n(x) = x^2 / (n (1/n^2 + x^2)(1 + x^2/n^2)); bounded by 1/n."""
    x = np.asarray(x, dtype=float)
    n2 = 1.0 / (n * n)
    out = x * x / (n * (n2 + x * x) * (1.0 + x * x * n2))
    return out if out.shape else float(out)


def _resonance(p: float, n: int, x):
    # the shared denominator (x^2 - p^2 - 1/n^2)^2 + 4 x^2/n^2 localizes at +-p
    n2 = 1.0 / (n * n)
    u = x * x - p * p - n2
    return u, u * u + 4.0 * x * x * n2


def eval_d(p: float, n: int, x):
    """d_{p,n}(x), the signed kernel resonant at x = +-p."""
    x = np.asarray(x, dtype=float)
    n2 = 1.0 / (n * n)
    u, den = _resonance(p, n, x)
    num = u * (1.0 - x * x) + 2.0 * x * x * (n2 + 1.0)
    out = eval_g(n, x) * num / den
    return out if out.shape else float(out)


def eval_f(p: float, n: int, x):
    """f_{p,n} = d_{p,n} + g_n (1/p^2 on (-1,1), 1 on |x| > 1)."""
    x = np.asarray(x, dtype=float)
    corr = np.where(np.abs(x) < 1.0, 1.0 / (p * p),
                    np.where(np.abs(x) > 1.0, 1.0, 0.0))
    out = eval_d(p, n, x) + eval_g(n, x) * corr
    return out if out.shape else float(out)


def eval_dtilde(p: float, n: int, x):
    """The comparison kernel with the closed-form arctan antiderivative."""
    x = np.asarray(x, dtype=float)
    n2 = 1.0 / (n * n)
    g_t = p * x / (n * (n2 + p * p) * (1.0 + p * p * n2))
    u = x * x - p * p - n2
    den = u * u + 4.0 * p * p * n2   # 4p^2/n^2 here, unlike d_{p,n}
    out = g_t * 2.0 * p * p * (n2 + 1.0) / den
    return out if out.shape else float(out)


def _antiderivative(p: float, n: int, x: float) -> float:
    # (1/pi) int dtilde = [D_{p,n}]/pi with
    # D_{p,n}(x) = c * arctan((x^2 - p^2 - 1/n^2)/(2p/n))
    n2 = 1.0 / (n * n)
    c = p * p * (1.0 + n2) / (2.0 * (n2 + p * p) * (1.0 + p * p * n2))
    return c * math.atan((x * x - p * p - n2) / (2.0 * p / n))


def halfmass(p: float, n: int) -> float:
    """(1/pi) int of dtilde_{p,n} over the window; tends to 1/2 as n grows.

    Evaluated from the closed-form antiderivative, no quadrature.
    """
    params = KernelParams(p, n)
    lo, hi = params.window
    return (_antiderivative(p, n, hi) - _antiderivative(p, n, lo)) / math.pi


def halfmass_quadrature(p: float, n: int) -> float:
    """The same window mass by adaptive quadrature, as a cross-check."""
    lo, hi = KernelParams(p, n).window
    val, _ = quad(lambda x: eval_dtilde(p, n, x), lo, hi,
                  points=[p], limit=400, epsabs=1e-13, epsrel=1e-11)
    return val / math.pi


def sandwich_factors(p: float, n: int) -> tuple[float, float]:
    """(b_{p,n}, B_{p,n}) with b dtilde <= d <= B dtilde on the window.

    Both factors tend to 1; each is a product of a bump ratio bound, a
    numerator bound over 2p^2(1+1/n^2), and a denominator ratio bound.
    """
    KernelParams(p, n)
    n2 = 1.0 / (n * n)
    r = 1.0 / math.sqrt(n)
    lo, hi = p - r, p + r

    def bump_ratio(x: float) -> float:
        return (x * (n2 + p * p) * (1.0 + p * p * n2)
                / (p * (n2 + x * x) * (1.0 + x * x * n2)))

    A, a = bump_ratio(hi), bump_ratio(lo)

    def numerator(top: float, bottom: float) -> float:
        return (-bottom ** 4 + top * top * (3.0 * n2 + 3.0 + p * p)
                - (p * p + n2))

    V, v = numerator(hi, lo), numerator(lo, hi)
    w = 2.0 * p * p * (n2 + 1.0)
    U = 1.0 + (1.0 / n + 2.0 * r) / (p * p)
    u = 1.0 + (1.0 / n - 2.0 * r) / (p * p)
    return a * v / w / U, A * V / w / u


def approx_identity_regions(phi: Callable, p: float, n: int
                            ) -> tuple[float, float, float]:
    """(inner, window, outer) pieces of (1/pi) int f_{p,n} phi.

    The line splits at +-(p -+ 1/sqrt(n)): inner covers |x| < p - 1/sqrt(n),
    window the two resonance intervals, outer the rest.  phi must satisfy
    int x^2/(1+x^2)^2 |phi| < inf; the kernel supplies the decay beyond
    that.  Each region integral is exposed so the vanishing of inner and
    outer contributions can be observed separately.
    """
    params = KernelParams(p, n)
    lo, hi = params.window

    def integrand(x: float) -> float:
        return eval_f(p, n, x) * phi(x)

    def seg(a: float, b: float, pts=()) -> float:
        inside = sorted(t for t in pts if a < t < b)
        if np.isinf(b) or np.isinf(a):
            edges = [a] + inside + [b]
            return sum(quad(integrand, s, t, limit=400)[0]
                       for s, t in zip(edges[:-1], edges[1:]))
        return quad(integrand, a, b, points=inside or None, limit=400)[0]

    # the indicator of f flips at +-1, which may land in any region
    inner = seg(-lo, lo, pts=(-1.0, 0.0, 1.0))
    window = seg(lo, hi, pts=(p, 1.0)) + seg(-hi, -lo, pts=(-p, -1.0))
    outer = seg(hi, np.inf, pts=(1.0,)) + seg(-np.inf, -hi, pts=(-1.0,))
    return inner / math.pi, window / math.pi, outer / math.pi


def approx_identity(phi: Callable, p: float, n: int) -> float:
    """(1/pi) int f_{p,n} phi, approximating (phi(p) + phi(-p))/2."""
    inner, window, outer = approx_identity_regions(phi, p, n)
    return inner + window + outer
