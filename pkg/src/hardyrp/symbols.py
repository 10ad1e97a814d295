"""Outer functions and the reflection-positive symbols built from measures.

An outer function is determined by its boundary modulus K through

    Out(C, K)(z) = C exp( (1/(pi i)) int_R [1/(p-z) - p/(1+p^2)] log K(p) dp )

whenever I(K) = int |log K(p)|/(1+p^2) dp is finite.  For a finite measure
nu on [0, inf] the module builds F_nu = Out(sqrt(psi_big(nu, .))), the
unimodular symbol h_nu = F_nu / (F_nu o (-id)) on the boundary, and the
transformed measure d(T nu)(l) = |F_nu(il)|^{-2} (1+l^2)/l dnu(l).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline

from .hardy import SymbolFunction
from .measures import BoundaryMeasure, psi_big, total_mass
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, integrate_line

__all__ = [
    "BoundaryModulus",
    "OuterFunction",
    "log_integral",
    "out_eval",
    "out_on_axis",
    "f_nu",
    "f_nu_axis",
    "f_nu_boundary",
    "h_nu",
    "h_nu_symbol",
    "boundary_phase_difference",
    "t_map",
    "lambda_eval",
]

MIN_IM = 1e-3  # the evaluator refuses points closer to the boundary


@dataclass(frozen=True)
class BoundaryModulus:
    """Nonnegative boundary modulus K with declared singular points.

    The singular points (zeros or poles of K, where log K fails to be
    smooth) steer the panel splitting of every integral against log K.
    """

    fn: Callable[[float], float]
    singularities: tuple[float, ...] = ()
    symmetric: bool = False
    name: str = "K"

    def __call__(self, p: float) -> float:
        return float(self.fn(p))

    def log(self, p: float) -> float:
        v = self(p)
        if v <= 0.0:
            raise ValueError(f"boundary modulus vanishes at p = {p}")
        return math.log(v)

    @classmethod
    def power_law(cls, exponent: float) -> "BoundaryModulus":
        return cls(lambda p, a=exponent: abs(p) ** a, (0.0,), True,
                   name=f"|p|^{exponent}")

    @classmethod
    def from_callable(cls, fn, singularities=(), symmetric=False, name="K"):
        return cls(fn, tuple(singularities), symmetric, name)

    def __mul__(self, other: "BoundaryModulus") -> "BoundaryModulus":
        return BoundaryModulus(
            lambda p: self.fn(p) * other.fn(p),
            tuple(sorted(set(self.singularities) | set(other.singularities))),
            self.symmetric and other.symmetric,
            name=f"{self.name}*{other.name}",
        )

    def __truediv__(self, other: "BoundaryModulus") -> "BoundaryModulus":
        return BoundaryModulus(
            lambda p: self.fn(p) / other.fn(p),
            tuple(sorted(set(self.singularities) | set(other.singularities))),
            self.symmetric and other.symmetric,
            name=f"{self.name}/{other.name}",
        )


def log_integral(K: BoundaryModulus,
                 cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """I(K) = int |log K(p)| / (1+p^2) dp; finite iff K admits an outer function."""
    val = integrate_line(lambda p: abs(K.log(p)) / (1.0 + p * p), cfg,
                         singularities=K.singularities)
    return float(val.real)


def out_eval(C: complex, K: BoundaryModulus, z: complex,
             cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> complex:
    """Evaluate the outer function Out(C, K) at z in the upper half-plane.

    Refuses Im z < 1e-3: so close to the boundary the Herglotz kernel peaks
    too sharply for the quadrature; use the boundary formulas instead.
    """
    z = complex(z)
    if z.imag < MIN_IM:
        raise ValueError(
            f"out_eval requires Im z >= {MIN_IM}; use boundary formulas below"
        )
    if abs(C) - 1.0 > 1e-12 or abs(C) < 1.0 - 1e-12:
        raise ValueError("leading constant must be unimodular")
    sing = list(K.singularities)
    if z.imag < 0.1:
        sing.append(z.real)  # the kernel 1/(p-z) peaks near Re z

    def integrand(p: float) -> complex:
        return (1.0 / (p - z) - p / (1.0 + p * p)) * K.log(p)

    val = integrate_line(integrand, cfg, singularities=sing)
    return C * np.exp(val / (np.pi * 1j))


def out_on_axis(K: BoundaryModulus, lam: float,
                cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> float:
    """Out(K)(i lam) = exp((1/pi) int lam/(p^2+lam^2) log K(p) dp), K even.

    Strictly positive real; the stable route for points on the imaginary
    axis (no branch noise).
    """
    if not K.symmetric:
        raise ValueError("axis formula requires a symmetric modulus")
    if lam <= 0:
        raise ValueError("axis point must satisfy lam > 0")
    # substituting p = lam q normalizes the kernel to 1/(1+q^2), so the
    # quadrature is equally well conditioned at every magnitude of lam
    val = integrate_line(
        lambda q: K.log(lam * q) / (1.0 + q * q), cfg,
        singularities=tuple(s / lam for s in K.singularities),
    )
    return float(np.exp(val.real / np.pi))


def boundary_phase_difference(K: BoundaryModulus, x: float) -> float:
    """arg Out(K)(x) - arg Out(K)(-x) for an even modulus.

    On the boundary arg Out(K)(x) = -(1/pi) PV int [1/(p-x) - p/(1+p^2)]
    log K(p) dp; in the difference the normalizing term cancels and, K
    being even, the principal-value pair collapses to

        -(4x/pi) int_0^inf (log K(p) - log K(x)) / (p^2 - x^2) dp

    with a removable singularity at p = x (PV int_0^inf dp/(p^2-x^2) = 0).
    """
    if not K.symmetric:
        raise ValueError("boundary phase formula requires a symmetric modulus")
    if x == 0.0:
        raise ValueError("phase undefined at x = 0")
    ax = abs(x)
    Lx = K.log(ax)

    def integrand(theta: float) -> float:
        p = math.tan(theta)
        num = K.log(p) - Lx
        den = p * p - ax * ax
        if den == 0.0:
            return 0.0
        return num / den * (1.0 + p * p)

    pts = sorted({math.atan(ax)} |
                 {math.atan(abs(s)) for s in K.singularities if s != 0.0})
    val, _ = quad(integrand, 0.0, np.pi / 2.0, points=pts, limit=400,
                  epsabs=1e-12, epsrel=1e-10)
    delta = -(4.0 * ax / np.pi) * val
    return delta if x > 0 else -delta


@dataclass
class OuterFunction:
    """Outer function with cached axis values."""

    K: BoundaryModulus
    C: complex = 1.0 + 0.0j
    _axis_cache: dict = field(default_factory=dict, repr=False)

    def __call__(self, z: complex) -> complex:
        return out_eval(self.C, self.K, z)

    def on_axis(self, lam: float) -> float:
        v = self._axis_cache.get(lam)
        if v is None:
            v = out_on_axis(self.K, lam)
            self._axis_cache[lam] = v
        return v

    def boundary_modulus(self, x: float) -> float:
        return self.K(x)


# -- measure-driven constructions --------------------------------------------

def _sqrt_psi_modulus(nu: BoundaryMeasure) -> BoundaryModulus:
    if nu.is_zero:
        raise ValueError("the zero measure has no outer function")
    if not nu.density:
        return BoundaryModulus(
            lambda p: math.sqrt(psi_big(nu, p)), (0.0,), True, name="sqrt(psi)"
        )
    # with density pieces every psi value is itself a quadrature; the outer
    # and phase integrals would then integrate quadrature noise and stall.
    # log psi is smooth in log p, so a cubic spline built once per measure
    # gives cheap, noise-free evaluations; outside the spline window the end
    # slopes continue the power-law behavior (psi sits between p^0 and p^-2)
    spl = nu._psi_cache.get("logspline")
    if spl is None:
        u = np.linspace(-40.0, 40.0, 4001)
        v = np.array([math.log(psi_big(nu, math.exp(uj))) for uj in u])
        spl = CubicSpline(u, v)
        nu._psi_cache["logspline"] = spl
    lo, hi = -40.0, 40.0
    slo, shi = float(spl(lo, 1)), float(spl(hi, 1))
    vlo, vhi = float(spl(lo)), float(spl(hi))

    def K(p: float) -> float:
        u0 = math.log(abs(p))
        if u0 < lo:
            v0 = vlo + slo * (u0 - lo)
        elif u0 > hi:
            v0 = vhi + shi * (u0 - hi)
        else:
            v0 = float(spl(u0))
        return math.exp(0.5 * v0)

    return BoundaryModulus(K, (0.0,), True, name="sqrt(psi)")


def f_nu(nu: BoundaryMeasure) -> OuterFunction:
    """The outer function with boundary modulus sqrt(psi_big(nu, .))."""
    return OuterFunction(_sqrt_psi_modulus(nu))


def f_nu_axis(nu: BoundaryMeasure, lam: float) -> float:
    """F_nu(i lam), real and positive."""
    return f_nu(nu).on_axis(lam)


def h_nu(nu: BoundaryMeasure, x) -> complex:
    """The unimodular symbol h_nu(x) = F_nu(x) / F_nu(-x) on the boundary.

    Computed as exp(i (arg F_nu(x) - arg F_nu(-x))); the moduli cancel
    exactly, so |h_nu| = 1 and h_nu(-x)* = h_nu(x) hold by construction.
    """
    K = _sqrt_psi_modulus(nu)
    if np.ndim(x) == 0:
        return complex(np.exp(1j * boundary_phase_difference(K, float(x))))
    return np.array([np.exp(1j * boundary_phase_difference(K, float(xj)))
                     for xj in np.asarray(x).ravel()]).reshape(np.shape(x))


def h_nu_symbol(nu: BoundaryMeasure) -> SymbolFunction:
    """h_nu packaged as a multiplier symbol with pointwise caching."""
    K = _sqrt_psi_modulus(nu)
    cache: dict[float, complex] = {}

    def fn(x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        out = np.empty(x.shape, dtype=complex)
        for j, xj in enumerate(x.ravel()):
            v = cache.get(xj)
            if v is None:
                v = complex(np.exp(1j * boundary_phase_difference(K, xj)))
                cache[xj] = v
            out.ravel()[j] = v
        return out

    return SymbolFunction(fn, 1.0, True, True, name="h_nu")


def f_nu_boundary(nu: BoundaryMeasure, x: float) -> complex:
    """Boundary value F_nu(x) = sqrt(psi_big(nu, x)) exp(i arg F_nu(x)).

    For an even modulus arg F_nu is odd, so it equals half the phase
    difference arg F_nu(x) - arg F_nu(-x); modulus and phase are computed
    separately, making |F_nu(x)|^2 = psi_big(nu, x) exact.
    """
    K = _sqrt_psi_modulus(nu)
    x = float(x)
    return math.sqrt(psi_big(nu, x)) * complex(
        np.exp(0.5j * boundary_phase_difference(K, x))
    )


def t_map(nu: BoundaryMeasure) -> BoundaryMeasure:
    """The transformed measure d(T nu)(l) = |F_nu(il)|^{-2} (1+l^2)/l dnu(l).

    Atoms at 0 and infinity are annihilated by the construction; atoms and
    densities on (0, inf) are reweighted by (1+l^2)/(l F_nu(il)^2), using
    the axis formula for F_nu (real positive, no branch noise).  The result
    is invariant under scaling of nu.
    """
    F = f_nu(nu)

    def factor(lam: float) -> float:
        a = F.on_axis(lam)
        return (1.0 + lam * lam) / (lam * a * a)

    return BoundaryMeasure(
        0.0, 0.0,
        [(lam, w * factor(lam)) for lam, w in nu.atoms],
        [p.reweighted(factor) for p in nu.density],
    )


def lambda_eval(z) -> complex:
    """The distinguished ratio i z / (z + i)^2; |.| = |x|/(1+x^2) on R."""
    z = np.asarray(z, dtype=complex)
    out = 1j * z / (z + 1j) ** 2
    return out if out.shape else complex(out)
