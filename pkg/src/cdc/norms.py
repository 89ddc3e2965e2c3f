"""BMO-type sup norms, square functions and H1 norms.

Square functions are evaluated in closed form.  Writing ``f = sum_j a_j phi_j``
and ``Gamma(phi_j, phi_k) = sum_m beta[j, k, m] phi_m`` every time integrand
is a sum of exponentials, so

    int_0^inf T_s Gamma(T_s f) ds
        = sum_{j,k,m} conj(a_j) a_k beta[j,k,m] phi_m / -(lam_j + lam_k + lam_m).

An independent route (``square_function_quadrature``) integrates the same
integrands numerically with matrix exponentials and the pointwise Gamma.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .errors import KernelComponent, ResonanceDivergence
from .gamma import gamma
from .quadrature import integrate_log
from .semigroup import MAX_STATES, Generator, SpectralDecomposition, TimeGrid, lp_norm, trace

KERNEL_TOL = 1e-10
RESONANCE_TOL = 1e-14


@dataclass(frozen=True)
class NormReport:
    value: float
    argmax_t: float
    tail_value: float
    grid: TimeGrid
    refinement_error: float = 0.0

    def to_dict(self) -> dict:
        return {"value": self.value, "argmaxT": self.argmax_t, "tailValue": self.tail_value,
                "gridResolution": self.grid.to_dict(), "refinementError": self.refinement_error}


@dataclass(frozen=True)
class SquareFunctionResult:
    field: np.ndarray
    h1_norm: float
    method: str

    def to_dict(self) -> dict:
        return {"field": [float(v) for v in self.field], "h1Norm": self.h1_norm,
                "method": self.method}


# --------------------------------------------------------------------------
# sup-over-time norms

def _kernel_operator(sd: SpectralDecomposition) -> np.ndarray:
    return sd.cached("E", lambda: sd.operator(sd.kernel_mask.astype(float)))


def _profile(sd: SpectralDecomposition, F, times, quantity) -> np.ndarray:
    """Rows: times then the t = inf limit.  Columns: fields.  Values: max_x quantity."""
    F = np.asarray(F)
    single = F.ndim == 1
    if single:
        F = F[:, None]
    rows = []
    for t in times:
        rows.append(np.max(quantity(sd.semigroup_matrix(t), F), axis=0))
    rows.append(np.max(quantity(_kernel_operator(sd), F), axis=0))
    out = np.sqrt(np.maximum(np.array(rows), 0.0))
    return out[:, 0] if single else out


def _bmo_quantity(K, F):
    # the variance is shift invariant; centering first limits cancellation
    F = F - F.mean(axis=0)
    return np.real(K @ np.abs(F) ** 2 - np.abs(K @ F) ** 2)


def _BMO_quantity(K, F):
    return np.real(K @ np.abs(F - K @ F) ** 2)


def _report(sd, f, grid, quantity, refine: bool) -> NormReport:
    if grid is None:
        grid = TimeGrid.for_spectrum(sd)
    times = grid.times
    prof = _profile(sd, f, times, quantity)
    i = int(np.argmax(prof))
    value = float(prof[i])
    argmax = float(times[i]) if i < len(times) else float("inf")
    err = 0.0
    if refine:
        fine = _profile(sd, f, grid.refined().times, quantity)
        err = abs(float(fine.max()) - value)
    return NormReport(value, argmax, float(prof[-1]), grid, err)


def bmo_profile(sd: SpectralDecomposition, F, times) -> np.ndarray:
    """``||T_t|f|^2 - |T_t f|^2||_inf^{1/2}`` for each t (last row: t = inf)."""
    return _profile(sd, F, times, _bmo_quantity)


def BMO_profile(sd: SpectralDecomposition, F, times) -> np.ndarray:
    """``||T_t|f - T_t f|^2||_inf^{1/2}`` for each t (last row: t = inf)."""
    return _profile(sd, F, times, _BMO_quantity)


def bmo_norm(sd: SpectralDecomposition, f, grid: TimeGrid | None = None,
             refine: bool = True) -> NormReport:
    return _report(sd, f, grid, _bmo_quantity, refine)


def BMO_norm(sd: SpectralDecomposition, f, grid: TimeGrid | None = None,
             refine: bool = True) -> NormReport:
    return _report(sd, f, grid, _BMO_quantity, refine)


def bmo_values(sd: SpectralDecomposition, F, grid: TimeGrid | None = None) -> np.ndarray:
    grid = grid or TimeGrid.for_spectrum(sd)
    return bmo_profile(sd, F, grid.times).max(axis=0)


def BMO_values(sd: SpectralDecomposition, F, grid: TimeGrid | None = None) -> np.ndarray:
    grid = grid or TimeGrid.for_spectrum(sd)
    return BMO_profile(sd, F, grid.times).max(axis=0)


def _jn_quantity(p: float):
    def quantity(K, F):
        centre = K @ F
        # |f(y) - (T_t f)(x)|^p averaged against K[x, y], evaluated at the same x
        dev = np.abs(F[None, :, :] - centre[:, None, :]) ** p
        return np.einsum("xy,xyb->xb", K, dev)
    return quantity


def jn_values(sd: SpectralDecomposition, F, p: float, grid: TimeGrid | None = None) -> np.ndarray:
    if p <= 0:
        raise ValueError("p must be positive")
    grid = grid or TimeGrid.for_spectrum(sd)
    prof = _profile(sd, F, grid.times, _jn_quantity(p))
    # _profile takes a square root; undo it and take the p-th root instead
    return (prof**2).max(axis=0) ** (1.0 / p)


def jn_norm(sd: SpectralDecomposition, f, p: float, grid: TimeGrid | None = None) -> NormReport:
    grid = grid or TimeGrid.for_spectrum(sd)
    prof = (_profile(sd, f, grid.times, _jn_quantity(p)) ** 2) ** (1.0 / p)
    i = int(np.argmax(prof))
    argmax = float(grid.times[i]) if i < len(grid.times) else float("inf")
    return NormReport(float(prof[i]), argmax, float(prof[-1]), grid)


def doubling_sup(sd: SpectralDecomposition, F, grid: TimeGrid | None = None) -> np.ndarray:
    """``sup_t ||T_t f - T_{2t} f||_inf``."""
    grid = grid or TimeGrid.for_spectrum(sd)
    F = np.asarray(F)
    best = np.zeros(F.shape[1:]) if F.ndim > 1 else 0.0
    for t in grid.times:
        m = np.exp(t * sd.eigenvalues) - np.exp(2 * t * sd.eigenvalues)
        best = np.maximum(best, np.max(np.abs(sd.apply_multiplier(m, F)), axis=0))
    return best


# --------------------------------------------------------------------------
# Gamma tensor and square functions

@dataclass(frozen=True)
class GammaTensor:
    """``C[x, j, k] = Gamma(phi_j, phi_k)(x)`` and ``beta[j, k, m] = <phi_m, C[:, j, k]>``."""

    C: np.ndarray
    beta: np.ndarray
    active: np.ndarray  # j, k both off the kernel


def gamma_tensor(sd: SpectralDecomposition, gen: Generator) -> GammaTensor:
    def build():
        n = sd.n
        if n > MAX_STATES:
            raise MemoryError(f"dense Gamma tensor for n={n} exceeds the cap {MAX_STATES}")
        Phi = sd.basis
        lam = sd.eigenvalues
        P = Phi[:, :, None] * Phi[:, None, :]
        QP = (gen.Q @ P.reshape(n, n * n)).reshape(n, n, n)
        C = 0.5 * (QP - (lam[:, None] + lam[None, :])[None] * P)
        beta = ((Phi * sd.mu[:, None]).T @ C.reshape(n, n * n)).reshape(n, n, n)
        beta = beta.transpose(1, 2, 0)
        off = ~sd.kernel_mask
        active = off[:, None] & off[None, :]
        return GammaTensor(C, beta, active)

    return sd.cached("gamma_tensor", build)


def _off_kernel_coefficients(sd: SpectralDecomposition, F) -> np.ndarray:
    a = sd.coefficients(F).astype(complex)
    kd = sd.kernel_dim
    norm = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    if kd:
        kpart = np.max(np.abs(a[:kd]), axis=0)
        if np.any(kpart > KERNEL_TOL * np.maximum(norm, 1e-300)):
            raise KernelComponent("field has a ker(L) component; project it off first")
        a[:kd] = 0.0
    return a


def _pair_products(a: np.ndarray, b: np.ndarray | None = None) -> np.ndarray:
    """``conj(a_j) b_k`` flattened to (n*n, k)."""
    b = a if b is None else b
    n = a.shape[0]
    return (np.conj(a)[:, None, :] * b[None, :, :]).reshape(n * n, -1)


def _s_weights(sd: SpectralDecomposition, gt: GammaTensor, s: float = 0.0) -> np.ndarray:
    lam = sd.eigenvalues
    pair = lam[:, None] + lam[None, :]
    total = pair[:, :, None] + lam[None, None, :]
    den = np.where(gt.active[:, :, None], -total, 1.0)
    if np.any(gt.active[:, :, None] & (den <= RESONANCE_TOL)):
        raise ResonanceDivergence("non-decaying mode in the square-function integral")
    w = np.where(gt.active[:, :, None], gt.beta / den, 0.0)
    if s:
        w = w * np.exp(s * (1.5 * pair[:, :, None] + 0.5 * lam[None, None, :]))
    return w


def _g_weights(sd: SpectralDecomposition, gt: GammaTensor, s: float = 0.0) -> np.ndarray:
    lam = sd.eigenvalues
    pair = lam[:, None] + lam[None, :]
    den = np.where(gt.active, -pair, 1.0)
    if np.any(gt.active & (den <= RESONANCE_TOL)):
        raise ResonanceDivergence("non-decaying mode in the square-function integral")
    w = np.where(gt.active[None], gt.C / den[None], 0.0)
    if s:
        # G_s^2 = int_s^inf Gamma(T_{2y} f) dy
        w = 0.5 * w * np.exp(2 * s * pair)[None]
    return w


def _finish(raw: np.ndarray) -> np.ndarray:
    return np.sqrt(np.maximum(np.real(raw), 0.0))


def s_squared(sd: SpectralDecomposition, gen: Generator, F, s: float = 0.0) -> np.ndarray:
    """Pointwise ``S_s(f)^2`` (``s = 0`` gives ``S_Gamma(f)^2``); batched over columns."""
    F = np.asarray(F)
    single = F.ndim == 1
    a = _off_kernel_coefficients(sd, F[:, None] if single else F)
    gt = gamma_tensor(sd, gen)
    n = sd.n
    coeff = _s_weights(sd, gt, s).reshape(n * n, n).T @ _pair_products(a)
    out = np.real(sd.synthesize(coeff))
    return out[:, 0] if single else out


def g_squared(sd: SpectralDecomposition, gen: Generator, F, s: float = 0.0) -> np.ndarray:
    """Pointwise ``G_Gamma(f)^2`` for s = 0, else the truncated ``G_s^2``."""
    F = np.asarray(F)
    single = F.ndim == 1
    a = _off_kernel_coefficients(sd, F[:, None] if single else F)
    gt = gamma_tensor(sd, gen)
    n = sd.n
    out = np.real(_g_weights(sd, gt, s).reshape(n, n * n) @ _pair_products(a))
    return out[:, 0] if single else out


def square_function_s(sd: SpectralDecomposition, gen: Generator, f) -> SquareFunctionResult:
    field = _finish(s_squared(sd, gen, f))
    return SquareFunctionResult(field, float(trace(sd, field)), "spectralExact")


def square_function_g(sd: SpectralDecomposition, gen: Generator, f) -> SquareFunctionResult:
    field = _finish(g_squared(sd, gen, f))
    return SquareFunctionResult(field, float(trace(sd, field)), "spectralExact")


def h1_norms(sd: SpectralDecomposition, gen: Generator, F) -> tuple:
    """``(||S_Gamma f||_1, ||G_Gamma f||_1)``; arrays when F is a batch."""
    hS = trace(sd, _finish(s_squared(sd, gen, F)))
    hG = trace(sd, _finish(g_squared(sd, gen, F)))
    if np.ndim(hS) == 0:
        return float(hS), float(hG)
    return hS, hG


def truncated_s(sd: SpectralDecomposition, gen: Generator, f, s: float) -> np.ndarray:
    """``S_s = (int_s^inf T_{y - s/2} Gamma(T_{y + s/2} f) dy)^{1/2}``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    return _finish(s_squared(sd, gen, f, s))


def truncated_g(sd: SpectralDecomposition, gen: Generator, f, s: float) -> np.ndarray:
    """``G_s = (int_s^inf Gamma(T_{2y} f) dy)^{1/2}``; note ``G_0 = G_Gamma / sqrt 2``."""
    if s < 0:
        raise ValueError("s must be nonnegative")
    if s == 0:
        return _finish(0.5 * g_squared(sd, gen, f))
    return _finish(g_squared(sd, gen, f, s))


def truncated_s_derivative(sd: SpectralDecomposition, gen: Generator, f, s: float) -> np.ndarray:
    """Exact ``d/ds S_s``, from ``d(S_s^2)/ds`` and the chain rule."""
    F = np.asarray(f)
    single = F.ndim == 1
    a = _off_kernel_coefficients(sd, F[:, None] if single else F)
    gt = gamma_tensor(sd, gen)
    n = sd.n
    lam = sd.eigenvalues
    rate = 1.5 * (lam[:, None, None] + lam[None, :, None]) + 0.5 * lam[None, None, :]
    w = _s_weights(sd, gt, s)
    pp = _pair_products(a)
    sq = np.real(sd.synthesize(w.reshape(n * n, n).T @ pp))
    dsq = np.real(sd.synthesize((w * rate).reshape(n * n, n).T @ pp))
    root = np.sqrt(np.maximum(sq, 0.0))
    out = np.where(root > 0, dsq / (2 * np.where(root > 0, root, 1.0)), 0.0)
    return out[:, 0] if single else out


# --------------------------------------------------------------------------
# Meyer's identity, spectral route

def _exp_quotient(s: float, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """``int_0^s e^{(s-t) b} e^{t a} dt`` evaluated stably, elementwise."""
    a, b = np.broadcast_arrays(np.asarray(a, float), np.asarray(b, float))
    d = a - b
    z = s * d
    out = np.full(a.shape, s) * np.exp(s * b)
    neg = z < 0
    pos = z > 0
    out[neg] = np.exp(s * b[neg]) * np.expm1(z[neg]) / d[neg]
    out[pos] = -np.exp(s * a[pos]) * np.expm1(-z[pos]) / d[pos]
    return out


def meyer_sides(sd: SpectralDecomposition, gen: Generator, F, s: float):
    """Return ``(T_s|f|^2 - |T_s f|^2, int_0^s T_{s-t} Gamma(T_t f) dt)`` pointwise."""
    F = np.asarray(F)
    K = sd.semigroup_matrix(s)
    lhs = np.real(K @ np.abs(F) ** 2 - np.abs(K @ F) ** 2)
    single = F.ndim == 1
    a = sd.coefficients(F[:, None] if single else F).astype(complex)
    gt = gamma_tensor(sd, gen)
    lam = sd.eigenvalues
    n = sd.n
    pair = lam[:, None, None] + lam[None, :, None]
    w = gt.beta * _exp_quotient(s, pair, np.broadcast_to(lam[None, None, :], (n, n, n)))
    rhs = np.real(sd.synthesize(w.reshape(n * n, n).T @ _pair_products(a)))
    if single:
        rhs = rhs[:, 0]
    return lhs, rhs


# --------------------------------------------------------------------------
# quadrature route

def square_function_quadrature(gen: Generator, sd: SpectralDecomposition, F, kind: str = "S",
                               rtol: float = 1e-10) -> np.ndarray:
    """Pointwise squared square function by adaptive Gauss-Legendre in log time.

    Uses ``expm(sQ)`` and the defining formula of Gamma, so it shares no
    arithmetic with the spectral route beyond the cutoffs.
    """
    F = np.asarray(F)
    if kind not in ("S", "G"):
        raise ValueError("kind must be 'S' or 'G'")
    gap = sd.spectral_gap
    if gap == 0:
        return np.zeros(F.shape)
    s_lo = 1e-13 / max(sd.spectral_radius, 1e-300)
    s_hi = np.log(1e18) / gap

    def integrand(nodes):
        vals = []
        for s in nodes:
            K = expm(s * gen.Q)
            KF = K @ F
            g = np.real(gamma(gen, KF, KF))
            vals.append(K @ g if kind == "S" else g)
        return np.array(vals)

    return integrate_log(integrand, s_lo, s_hi, rtol=rtol)


def l1_norm(sd: SpectralDecomposition, f) -> np.ndarray:
    return lp_norm(sd.mu, f, 1)
