"""Matrix-valued rational Pick functions.

A rational Pick function is F(z) = C + z D + sum_j A_j / (lambda_j - z) with
C Hermitian, D and the residues A_j positive semidefinite and real poles
lambda_j.  Its degree rk(D) + sum_j rk(A_j) equals the multiplicity of the
one-parameter group it generates; the module computes that number three
independent ways: by ranks, and by two winding-number contour counts pulled
back to a circle of radius r > 1 through the disc model.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg
from numpy.typing import NDArray

from .hardy import cayley, cayley_inverse
from .numerics import CurveSample, UnderSampledCurveError, winding_number

__all__ = [
    "RationalPickFunction",
    "BlaschkePotapovProduct",
    "MobiusTransform",
    "pick_eval",
    "is_pick",
    "is_regular",
    "default_probes",
    "degree_rank",
    "multiplicity_winding",
    "degree_winding",
    "bp_eval",
    "bp_degree",
    "blaschke_factor",
    "compose_scalar",
    "boundary_unitary",
    "load_pick",
    "dump_pick",
]

RANK_TOL = 1e-9
HERM_TOL = 1e-10


def _as_matrix(M, n: int, name: str) -> NDArray[np.complex128]:
    M = np.asarray(M, dtype=complex)
    if M.shape != (n, n):
        raise ValueError(f"{name} must be {n}x{n}")
    return M


def _check_psd(M: NDArray[np.complex128], name: str) -> None:
    if np.linalg.norm(M - M.conj().T) > HERM_TOL * max(1.0, np.linalg.norm(M)):
        raise ValueError(f"{name} must be Hermitian")
    w = np.linalg.eigvalsh(M)
    if w.size and w.min() < -HERM_TOL * max(1.0, abs(w).max()):
        raise ValueError(f"{name} must be positive semidefinite")


@dataclass(frozen=True)
class RationalPickFunction:
    """F(z) = C + z D + sum_j A_j / (lambda_j - z)."""

    C: NDArray[np.complex128]
    D: NDArray[np.complex128]
    poles: tuple[tuple[float, NDArray[np.complex128]], ...] = ()

    def __post_init__(self):
        C = np.asarray(self.C, dtype=complex)
        n = C.shape[0]
        object.__setattr__(self, "C", _as_matrix(C, n, "C"))
        object.__setattr__(self, "D", _as_matrix(self.D, n, "D"))
        if np.linalg.norm(self.C - self.C.conj().T) > HERM_TOL * max(
                1.0, np.linalg.norm(self.C)):
            raise ValueError("C must be Hermitian")
        _check_psd(self.D, "D")
        poles = tuple((float(l), _as_matrix(A, n, "residue")) for l, A in self.poles)
        locs = [l for l, _ in poles]
        if len(set(locs)) != len(locs):
            raise ValueError("pole locations must be distinct")
        for _, A in poles:
            _check_psd(A, "residue")
        object.__setattr__(self, "poles", poles)

    @property
    def dim(self) -> int:
        return self.C.shape[0]

    def __call__(self, z: complex) -> NDArray[np.complex128]:
        return pick_eval(self, z)

    @classmethod
    def scalar(cls, c: float = 0.0, d: float = 0.0,
               poles: Sequence[tuple[float, float]] = ()) -> "RationalPickFunction":
        return cls(np.array([[c]], dtype=complex), np.array([[d]], dtype=complex),
                   tuple((l, np.array([[a]], dtype=complex)) for l, a in poles))


def pick_eval(F: RationalPickFunction, z: complex) -> NDArray[np.complex128]:
    z = complex(z)
    if any(z == complex(l) for l, _ in F.poles):
        raise ZeroDivisionError(f"evaluation at the pole {z}")
    M = F.C + z * F.D
    for l, A in F.poles:
        M = M + A / (l - z)
    return M


def default_probes(count: int = 200) -> NDArray[np.complex128]:
    """Probe points on a two-parameter log grid over the upper half-plane."""
    res = np.concatenate([[0.0], np.logspace(-2, 2, 7), -np.logspace(-2, 2, 6)])
    ims = np.logspace(-3, 3, 16)
    grid = (res[:, None] + 1j * ims[None, :]).ravel()
    return grid[:count]


def is_pick(F, probes: Sequence[complex] | None = None, tol: float = 1e-10) -> bool:
    """True iff Im F(z) is positive semidefinite at every probe point."""
    ev = F if callable(F) else (lambda z: pick_eval(F, z))
    if probes is None:
        probes = default_probes()
    for z in probes:
        M = ev(z)
        im = (M - M.conj().T) / 2j
        w = np.linalg.eigvalsh((im + im.conj().T) / 2)
        if w.min() < -tol * max(1.0, abs(w).max()):
            return False
    return True


def is_regular(F, probes: Sequence[complex] | None = None,
               tol: float = 1e-9) -> bool:
    """True iff Spec F(z) stays in the open upper half-plane at the probes.

    This is a sampled certificate: the probes default to a 200-point log
    grid, which catches constant directions and real spectrum for the
    function classes handled here.
    """
    ev = F if callable(F) else (lambda z: pick_eval(F, z))
    if probes is None:
        probes = default_probes()
    for z in probes:
        w = np.linalg.eigvals(ev(z))
        if w.imag.min() <= tol:
            return False
    return True


def _rank(M: NDArray[np.complex128]) -> int:
    s = np.linalg.svd(M, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_TOL * s[0]))


def degree_rank(F: RationalPickFunction) -> int:
    """deg F = rk(D) + sum_j rk(A_j)."""
    return _rank(F.D) + sum(_rank(A) for _, A in F.poles)


# -- winding-number degree computations --------------------------------------

def _matrix_blaschke(M: NDArray[np.complex128], lam: complex) -> NDArray[np.complex128]:
    """phi_lam(M) = (M - lam)(M - conj(lam))^{-1}, via a linear solve."""
    n = M.shape[0]
    I = np.eye(n)
    return np.linalg.solve((M - np.conj(lam) * I).T, (M - lam * I).T).T


def _mirror_roots(F: RationalPickFunction, lam: complex) -> NDArray[np.complex128]:
    """All z with det(F(z) - conj(lam)) = 0; they lie in the lower half-plane.

    Uses the state-space linearization: with A_j = B_j B_j^* of minimal rank
    and Delta(z) = diag((lambda_j - z) I), the block matrix
    [[C - conj(lam) + z D, B], [-B^*, Delta(z)]] has the Schur complement
    F(z) - conj(lam), so the finite eigenvalues of its linear pencil are
    exactly the wanted roots (no artifacts at the pole locations).
    """
    n = F.dim
    blocks = []
    for l, A in F.poles:
        w, V = np.linalg.eigh((A + A.conj().T) / 2)
        keep = w > 1e-12 * max(float(w.max()), 1.0)
        if keep.any():
            blocks.append((l, V[:, keep] * np.sqrt(w[keep])))
    r = sum(B.shape[1] for _, B in blocks)
    if r == 0 and not np.any(F.D):
        return np.empty(0, dtype=complex)
    N = n + r
    M0 = np.zeros((N, N), dtype=complex)
    M1 = np.zeros((N, N), dtype=complex)
    M0[:n, :n] = F.C - np.conj(lam) * np.eye(n)
    M1[:n, :n] = F.D
    col = n
    for l, B in blocks:
        k = B.shape[1]
        M0[:n, col:col + k] = B
        M0[col:col + k, :n] = -B.conj().T
        M0[col:col + k, col:col + k] = l * np.eye(k)
        M1[col:col + k, col:col + k] = -np.eye(k)
        col += k
    w = scipy.linalg.eig(M0, -M1, right=False)
    return w[np.isfinite(w)]


def _contour_plan(F: RationalPickFunction, lam: complex,
                  r0: float) -> tuple[float, list[tuple[float, float]]]:
    """Safe circle radius plus the angular features needing dense sampling.

    The winding formulas are valid on circles below the disc-model images of
    the mirror solutions det(F(z) - conj(lam)) = 0; halving the gap to the
    closest of them keeps the contour inside the annulus of validity.  Each
    near-circle mirror root sits opposite a reflected zero at the reciprocal
    modulus, pinching the contour in an angular window comparable to the
    remaining margin, and the determinant also has fixed poles on the circle
    at the images of the function's poles and of infinity; all of these are
    returned as (angle, length scale) pairs.
    """
    ws = cayley(_mirror_roots(F, lam))
    mods = np.abs(ws)
    genuine = mods > 1.0 + 1e-9
    rho = float(mods[genuine].min()) if genuine.any() else np.inf
    rs = min(r0, 1.0 + (rho - 1.0) / 2.0)
    feats: list[tuple[float, float]] = []
    for wk, m in zip(ws[genuine], mods[genuine]):
        if m < 2.0:
            feats.append((float(np.angle(wk)), min(m - rs, rs - 1.0 / m)))
    feats.append((0.0, rs - 1.0))                     # image of infinity
    for l, _ in F.poles:
        feats.append((float(np.angle(cayley(l))), rs - 1.0))
    return rs, feats


def _winding_with_features(fn, rs: float,
                           feats: Sequence[tuple[float, float]],
                           base: int = 4096) -> int:
    """Winding of fn on the circle of radius rs, oversampling each feature."""
    span = np.arcsinh(60.0)
    last: Exception | None = None
    for refine in range(5):
        grids = [np.linspace(0.0, 2.0 * np.pi, (base << refine) + 1)[:-1]]
        local = (200 << refine) + 1
        for theta, d in feats:
            off = d * np.sinh(np.linspace(-span, span, local))
            grids.append(np.mod(theta + off, 2.0 * np.pi))
        t = np.unique(np.concatenate(grids))
        t = np.append(t, t[0] + 2.0 * np.pi)
        vals = np.asarray(fn(rs * np.exp(1j * t)), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise ValueError("curve degenerated; singular contour point")
        scale = float(np.median(np.abs(vals)))
        try:
            return winding_number(CurveSample(vals, 1e-13 * scale))
        except UnderSampledCurveError as exc:
            last = exc
    raise last


def _winding_on_circle(fn: Callable[[complex], complex], r0: float = 1.25,
                       max_shrinks: int = 16, agreements: int = 3) -> int:
    """Winding number of t -> fn(r e^{it}) around 0, shrinking r toward 1.

    Used when the obstruction set of the underlying extension is unknown
    (general callables): counts on a geometric radius schedule toward 1
    become eventually constant once the circle stops enclosing obstructions.
    A run of `agreements` equal counts can still sit above an obstruction
    shell, so each candidate plateau is confirmed at a radius 16x closer to
    the circle before it is accepted; a disagreement restarts the shrink
    from the confirmation radius.
    """
    r = r0
    streak = 0
    prev: int | None = None
    last_error: Exception | None = None

    def count(radius: float) -> int | None:
        nonlocal last_error
        try:
            return _winding_at_radius(fn, radius)
        except (UnderSampledCurveError, ValueError,
                np.linalg.LinAlgError, ZeroDivisionError) as exc:
            last_error = exc
            return None

    for _ in range(max_shrinks + 1):
        v = count(r)
        streak = streak + 1 if (v is not None and v == prev) else (
            1 if v is not None else 0)
        if streak >= agreements:
            r_conf = 1.0 + (r - 1.0) / 16.0
            if count(r_conf) == v:
                return v
            streak = 0
            prev = None
            r = r_conf
            continue
        prev = v
        r = 1.0 + (r - 1.0) / 2.0
    raise RuntimeError(
        f"winding count failed to stabilize down to r = {r:.6f}: {last_error}"
    )


def _winding_at_radius(fn, r: float, n0: int = 512) -> int:
    """fn maps an array of circle points to an array of curve values."""
    n = max(512, n0)
    while True:
        t = np.linspace(0.0, 2.0 * np.pi, n + 1)
        vals = np.asarray(fn(r * np.exp(1j * t)), dtype=complex)
        scale = float(np.abs(vals).max())
        if scale == 0.0 or not np.all(np.isfinite(vals)):
            raise ValueError("curve degenerated; shrink the radius")
        curve = CurveSample(vals, exclusion_radius=1e-12 * scale)
        try:
            return winding_number(curve)
        except UnderSampledCurveError:
            if n >= 2 ** 20:
                raise
            n *= 2


def _pick_eval_batch(F: RationalPickFunction,
                     z: NDArray[np.complex128]) -> NDArray[np.complex128]:
    M = np.broadcast_to(F.C, (z.size,) + F.C.shape).astype(complex)
    M = M + z[:, None, None] * F.D
    for l, A in F.poles:
        M = M + A / (l - z)[:, None, None]
    return M


def multiplicity_winding(F, lam: complex = 1j, r: float = 1.25) -> int:
    """Multiplicity by zero counting of det(phi_lam o F) in the disc model.

    Accepts a RationalPickFunction or any callable z -> matrix holomorphic
    off the real line; the curve runs through the lower half-plane where a
    Pick function's matrix Blaschke transform has modulus >= 1.
    """
    if isinstance(F, RationalPickFunction):
        def fn(w):
            M = _pick_eval_batch(F, 1j * (1.0 + w) / (1.0 - w))
            num = np.swapaxes(M - lam * np.eye(F.dim), -1, -2)
            den = np.swapaxes(M - np.conj(lam) * np.eye(F.dim), -1, -2)
            return np.linalg.det(np.swapaxes(np.linalg.solve(den, num), -1, -2))

        rs, feats = _contour_plan(F, lam, r)
        return _winding_with_features(fn, rs, feats)

    def fn(w):
        return np.array([
            complex(np.linalg.det(_matrix_blaschke(F(cayley_inverse(wk)), lam)))
            for wk in np.atleast_1d(w)])

    return _winding_on_circle(fn, r)


def degree_winding(F, lam: complex = 1j, r: float = 1.25) -> int:
    """Degree by pole-order counting of det(F - conj(lam)) in the disc model."""
    if isinstance(F, RationalPickFunction):
        def fn(w):
            M = _pick_eval_batch(F, 1j * (1.0 + w) / (1.0 - w))
            return np.linalg.det(M - np.conj(lam) * np.eye(F.dim))

        rs, feats = _contour_plan(F, lam, r)
        return -_winding_with_features(fn, rs, feats)

    def fn(w):
        return np.array([
            complex(np.linalg.det(
                F(cayley_inverse(wk))
                - np.conj(lam) * np.eye(np.shape(F(cayley_inverse(wk)))[0])))
            for wk in np.atleast_1d(w)])

    return -_winding_on_circle(fn, r)


# -- Blaschke-Potapov products ------------------------------------------------

def blaschke_factor(omega: complex, z) -> complex:
    """Scalar Blaschke factor (z - omega)/(z - conj(omega)) for the half-plane."""
    z = np.asarray(z, dtype=complex)
    out = (z - omega) / (z - np.conj(omega))
    return out if out.shape else complex(out)


@dataclass(frozen=True)
class BlaschkePotapovProduct:
    """u prod_j (phi_{omega_j} P_j + (1 - P_j)) with u unitary, P_j projections."""

    u: NDArray[np.complex128]
    factors: tuple[tuple[complex, NDArray[np.complex128]], ...] = ()

    def __post_init__(self):
        u = np.asarray(self.u, dtype=complex)
        n = u.shape[0]
        object.__setattr__(self, "u", _as_matrix(u, n, "u"))
        if np.linalg.norm(u.conj().T @ u - np.eye(n)) > 1e-10:
            raise ValueError("u must be unitary")
        factors = tuple((complex(w), _as_matrix(P, n, "projection"))
                        for w, P in self.factors)
        for w, P in factors:
            if w.imag <= 0:
                raise ValueError("factor zeros must lie in the upper half-plane")
            if (np.linalg.norm(P @ P - P) > 1e-10
                    or np.linalg.norm(P - P.conj().T) > 1e-10):
                raise ValueError("P must be an orthogonal projection")
        object.__setattr__(self, "factors", factors)

    @property
    def dim(self) -> int:
        return self.u.shape[0]

    def __call__(self, z: complex) -> NDArray[np.complex128]:
        return bp_eval(self, z)


def bp_eval(phi: BlaschkePotapovProduct, z: complex) -> NDArray[np.complex128]:
    z = complex(z)
    n = phi.dim
    M = phi.u.copy()
    for omega, P in phi.factors:
        if z == np.conj(omega):
            raise ZeroDivisionError(f"evaluation at the pole {z}")
        M = M @ (blaschke_factor(omega, z) * P + (np.eye(n) - P))
    return M


def bp_degree(phi: BlaschkePotapovProduct) -> int:
    """deg phi = total rank of the factor projections."""
    return sum(_rank(P) for _, P in phi.factors)


# -- Moebius transforms and composition ---------------------------------------

@dataclass(frozen=True)
class MobiusTransform:
    """z -> (a z + b)/(c z + d) with real coefficients, a d - b c = 1."""

    a: float
    b: float
    c: float
    d: float

    def __post_init__(self):
        if abs(self.a * self.d - self.b * self.c - 1.0) > 1e-12:
            raise ValueError("coefficients must satisfy ad - bc = 1")

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = (self.a * z + self.b) / (self.c * z + self.d)
        return out if out.shape else complex(out)

    def as_pick(self) -> RationalPickFunction:
        # (az+b)/(cz+d) = a/c + (1/c^2)/(-d/c - z) for c != 0, else b/d + a^2 z
        if self.c == 0.0:
            return RationalPickFunction.scalar(self.b / self.d, self.a ** 2)
        return RationalPickFunction.scalar(
            self.a / self.c, 0.0, [(-self.d / self.c, 1.0 / self.c ** 2)]
        )


def _apply_scalar_to_matrix(f: Callable[[complex], complex],
                            M: NDArray[np.complex128]) -> NDArray[np.complex128]:
    """f(M) by diagonalization; eigenvalues ordered for determinism."""
    w, V = np.linalg.eig(M)
    order = np.lexsort((w.imag, w.real))
    w, V = w[order], V[:, order]
    fw = np.array([f(complex(v)) for v in w])
    return V @ np.diag(fw) @ np.linalg.inv(V)


def compose_scalar(f, F, g) -> Callable[[complex], NDArray[np.complex128]]:
    """The matrix function z -> f(F(g(z))) for scalar Pick f and g.

    f is applied through the eigendecomposition of F(g(z)).  f and g may be
    RationalPickFunction instances of dimension 1 or plain callables.
    """

    def as_scalar(h):
        if isinstance(h, RationalPickFunction):
            if h.dim != 1:
                raise ValueError("outer compositions must be scalar")
            return lambda z: complex(pick_eval(h, z)[0, 0])
        return h

    fs, gs = as_scalar(f), as_scalar(g)
    Fe = F if callable(F) else (lambda z: pick_eval(F, z))

    def composed(z: complex) -> NDArray[np.complex128]:
        return _apply_scalar_to_matrix(fs, Fe(gs(complex(z))))

    return composed


def boundary_unitary(F: RationalPickFunction, t: float, x: float
                     ) -> NDArray[np.complex128]:
    """exp(i t F(x)) for real x away from the poles; unitary since F(x) = F(x)*."""
    M = pick_eval(F, float(x))
    M = (M + M.conj().T) / 2
    w, U = np.linalg.eigh(M)
    return U @ np.diag(np.exp(1j * t * w)) @ U.conj().T


# -- JSON serialization --------------------------------------------------------

def _decode_matrix(rows) -> NDArray[np.complex128]:
    return np.array([[complex(e[0], e[1]) for e in row] for row in rows])


def _encode_matrix(M: NDArray[np.complex128]):
    return [[[float(e.real), float(e.imag)] for e in row] for row in np.asarray(M)]


def load_pick(source) -> RationalPickFunction:
    """Build a Pick function from a JSON dict, JSON string, or file path."""
    if isinstance(source, dict):
        spec = source
    elif isinstance(source, str) and source.lstrip().startswith("{"):
        spec = json.loads(source)
    else:
        with open(source) as fh:
            spec = json.load(fh)
    n = int(spec["dim"])
    C = _decode_matrix(spec["C"])
    D = _decode_matrix(spec["D"])
    if C.shape != (n, n) or D.shape != (n, n):
        raise ValueError("matrix dimensions disagree with dim")
    poles = [(float(p["lambda"]), _decode_matrix(p["A"]))
             for p in spec.get("poles", [])]
    return RationalPickFunction(C, D, tuple(poles))


def dump_pick(F: RationalPickFunction) -> dict:
    return {
        "dim": F.dim,
        "C": _encode_matrix(F.C),
        "D": _encode_matrix(F.D),
        "poles": [{"lambda": l, "A": _encode_matrix(A)} for l, A in F.poles],
    }
