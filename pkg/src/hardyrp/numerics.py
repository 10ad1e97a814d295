"""Shared numeric kernels.

Adaptive real-line quadrature (with integrable logarithmic singularities at
declared points), branch-tracked winding numbers of sampled closed curves,
and Hermitian eigendecomposition for small dense matrices.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy.integrate import quad

__all__ = [
    "QuadratureConfig",
    "CurveSample",
    "QuadratureError",
    "UnderSampledCurveError",
    "integrate_line",
    "winding_number",
    "eig_hermitian",
]

_HALF_PI = np.pi / 2.0


class QuadratureError(RuntimeError):
    """Quadrature failed to converge; carries the partial value."""

    def __init__(self, message: str, value: complex, error: float):
        super().__init__(message)
        self.value = value
        self.error = error


class UnderSampledCurveError(RuntimeError):
    """Consecutive curve samples turn by >= pi/2; refinement required."""


def _max_panels_cap() -> int | None:
    raw = os.environ.get("HARDYRP_MAX_PANELS")
    return int(raw) if raw else None


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and subdivision budget for real-line integrals.

    compactify selects the change of variables: "tangent" maps the whole
    line onto (-pi/2, pi/2) via x = tan(theta); "identity" integrates the
    (finite) interval as given.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_subdivisions: int = 2 ** 14
    compactify: str = "tangent"

    def __post_init__(self):
        if self.abs_tol <= 0 or self.rel_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 8:
            raise ValueError("max_subdivisions must be >= 8")
        if self.compactify not in ("tangent", "identity"):
            raise ValueError(f"unknown compactification {self.compactify!r}")

    @property
    def effective_subdivisions(self) -> int:
        cap = _max_panels_cap()
        if cap is None:
            return self.max_subdivisions
        return min(self.max_subdivisions, cap)


DEFAULT_QUADRATURE = QuadratureConfig()


@dataclass
class CurveSample:
    """Ordered samples of a closed curve in the punctured plane.

    exclusion_radius is the caller's promise that the curve stays at least
    this far from the origin; a sample violating it is rejected.
    """

    values: NDArray[np.complex128]
    exclusion_radius: float = 0.0
    closure_tol: float = 1e-9
    min_modulus: float = field(init=False)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=np.complex128)
        if self.values.ndim != 1 or self.values.size < 4:
            raise ValueError("curve needs at least 4 samples")
        moduli = np.abs(self.values)
        self.min_modulus = float(moduli.min())
        if self.min_modulus < self.exclusion_radius:
            raise ValueError(
                f"curve sample has modulus {self.min_modulus:.3e} below the "
                f"exclusion radius {self.exclusion_radius:.3e}"
            )
        scale = max(1.0, float(moduli.max()))
        if abs(self.values[0] - self.values[-1]) > self.closure_tol * scale:
            raise ValueError("curve is not closed within tolerance")


def integrate_line(
    f: Callable[[float], complex],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
    singularities: Sequence[float] = (),
    interval: tuple[float, float] | None = None,
) -> complex:
    """Integrate a complex-valued function over the real line.

    With the default "tangent" compactification the integral runs over all
    of R via x = tan(theta); integrable singularities of f (log-type zeros
    of an underlying modulus, kinks, jumps) must be declared so the
    adaptive subdivision can split panels there.  Pass interval=(a, b) with
    compactify="identity" in cfg for a finite range.

    Raises QuadratureError (carrying the partial value) when the error
    estimate stays above max(abs_tol, rel_tol * |value|).
    """
    limit = cfg.effective_subdivisions
    if cfg.compactify == "tangent":
        if interval is not None:
            raise ValueError("interval only valid with identity compactification")
        a, b = -_HALF_PI, _HALF_PI

        def g(theta: float) -> complex:
            x = np.tan(theta)
            return f(x) * (1.0 + x * x)

        points = sorted(float(np.arctan(s)) for s in singularities)
    else:
        if interval is None:
            raise ValueError("identity compactification requires an interval")
        a, b = interval
        g = f
        points = sorted(float(s) for s in singularities if a < s < b)

    def part(h):
        return quad(h, a, b, points=points or None, limit=limit,
                    epsabs=cfg.abs_tol, epsrel=cfg.rel_tol)

    re, re_err = part(lambda t: np.real(g(t)))
    im, im_err = part(lambda t: np.imag(g(t)))
    value = complex(re, im)
    if not np.isfinite(value):
        raise ValueError("integrand produced a non-finite value")
    err = float(np.hypot(re_err, im_err))
    if err > max(cfg.abs_tol, cfg.rel_tol * abs(value)) * 10.0:
        raise QuadratureError(
            f"quadrature error estimate {err:.3e} above tolerance", value, err
        )
    return value


def winding_number(curve: CurveSample) -> int:
    """Winding number of a sampled closed curve around the origin.

    Computed by unwrapped-argument summation: the total turn of arg(z)
    along the samples divided by 2 pi.  Never uses log directly, so no
    branch-cut residue can occur; instead an UnderSampledCurveError demands
    refinement whenever a single step turns by pi/2 or more.
    """
    args = np.angle(curve.values)
    steps = np.diff(args)
    steps = (steps + np.pi) % (2.0 * np.pi) - np.pi
    max_step = float(np.abs(steps).max())
    if max_step >= _HALF_PI:
        raise UnderSampledCurveError(
            f"largest argument step {max_step:.3f} rad >= pi/2; refine sampling"
        )
    total = float(steps.sum())
    w = total / (2.0 * np.pi)
    k = int(round(w))
    if abs(w - k) > 1e-6:
        raise UnderSampledCurveError(
            f"total turn {w:.6f} is not close to an integer"
        )
    return k


def eig_hermitian(
    A: NDArray[np.complex128], herm_tol: float = 1e-10
) -> tuple[NDArray[np.float64], NDArray[np.complex128]]:
    """Eigendecomposition A = U diag(w) U* of a Hermitian matrix.

    Returns eigenvalues ascending and the unitary U of column eigenvectors.
    Rejects input whose anti-Hermitian part exceeds herm_tol * max(1, |A|).
    """
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("expected a square matrix")
    scale = max(1.0, float(np.linalg.norm(A)))
    if np.linalg.norm(A - A.conj().T) > herm_tol * scale:
        raise ValueError("matrix is not Hermitian within tolerance")
    w, U = np.linalg.eigh(A)
    return w, U
