"""Subordinated Poisson semigroup ``P_t = exp(-t sqrt(-L))`` and Carleson measures."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import erf

from .errors import CurvatureFailed, NegativeInput
from .gamma import check_curvature
from .norms import BMO_values, NormReport
from .quadrature import integrate
from .semigroup import Generator, SpectralDecomposition, TimeGrid, lp_norm

SBD_TOL = 1e-12
CARLESON_CONSTANT = 37.0


@dataclass(frozen=True)
class PoissonSemigroup:
    base: SpectralDecomposition
    sd: SpectralDecomposition  # same eigenbasis, eigenvalues -sqrt(-lam)

    @property
    def rates(self) -> np.ndarray:
        """``sqrt(-lam_k)`` for each mode."""
        return -self.sd.eigenvalues

    def apply(self, t: float, f) -> np.ndarray:
        return self.sd.apply_multiplier(np.exp(-t * self.rates), f)

    def matrix(self, t: float) -> np.ndarray:
        return self.sd.semigroup_matrix(t)

    def generator_matrix(self) -> np.ndarray:
        """Matrix of ``-sqrt(-L)``."""
        return self.sd.generator_matrix()

    def harmonicity_residual(self, gen: Generator, t: float, f) -> float:
        """``||(d^2/dt^2 + L) P_t f||_2`` with the time derivative taken spectrally."""
        r = self.rates
        d2 = self.sd.apply_multiplier(r**2 * np.exp(-t * r), f)
        res = d2 + gen.Q @ self.apply(t, f)
        return float(np.max(lp_norm(self.sd.mu, res, 2)))


def subordinate(sd: SpectralDecomposition) -> PoissonSemigroup:
    lam = np.sqrt(np.maximum(-sd.eigenvalues, 0.0))
    psd = SpectralDecomposition(-lam, sd.basis, sd.mu, sd.kernel_dim,
                                float(max(np.sqrt(sd.scale), 1e-300)), label="poisson")
    return PoissonSemigroup(sd, psd)


def poisson_by_subordination(gen: Generator, y: float, F, rtol: float = 1e-11) -> np.ndarray:
    """``P_y F`` from the subordination integral against the heat semigroup.

    With ``u = y^2 / (4 v^2)`` the integral becomes
    ``(2/sqrt(pi)) int_0^inf exp(-v^2) T_{y^2/(4v^2)} dv``.  Near v = 0 the
    heat semigroup has relaxed to its ergodic limit, so ``[0, v_c]``
    contributes ``erf(v_c) T_{t_c} F`` in closed form.  ``T_u`` is evaluated
    with ``expm`` rather than any spectral calculus.
    """
    F = np.asarray(F)
    if y == 0:
        return F.copy()
    ev = np.linalg.eigvalsh(_symmetrized(gen))
    nz = np.abs(ev) > 1e-12 * gen.scale * gen.n
    if not np.any(nz):
        return F.astype(np.result_type(F, float)).copy()
    gap = float(np.min(-ev[nz]))
    t_c = 45.0 / gap
    v_c = y / (2.0 * np.sqrt(t_c))
    v_hi = 7.0
    c = 2.0 / np.sqrt(np.pi)
    head = erf(v_c) * (expm(t_c * gen.Q) @ F)
    if v_c >= v_hi:
        return head

    def integrand(v):
        return np.array([c * np.exp(-vi * vi) * (expm(y * y / (4 * vi * vi) * gen.Q) @ F)
                         for vi in v])

    return head + integrate(integrand, v_c, v_hi, rtol=rtol, initial_panels=16)


def _symmetrized(gen: Generator) -> np.ndarray:
    sq = np.sqrt(gen.mu)
    S = sq[:, None] * gen.Q / sq[None, :]
    return 0.5 * (S + S.T)


# --------------------------------------------------------------------------
# subordination inequalities

@dataclass(frozen=True)
class SubordinationReport:
    samples: int
    pairs: int
    max_violation_ratio: float
    max_violation_difference: float
    violations: int
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {"samples": self.samples, "pairs": self.pairs,
                "maxViolationRatio": self.max_violation_ratio,
                "maxViolationDifference": self.max_violation_difference,
                "violations": self.violations, "tolerance": self.tolerance,
                "passed": self.passed}


def check_subordination_inequalities(ps: PoissonSemigroup, F, grid: TimeGrid | None = None,
                                     tol: float = SBD_TOL) -> SubordinationReport:
    """Check, for nonnegative f and grid pairs t <= y,

    (a) ``P_y f / y <= P_t f / t`` and
    (b) ``|(P_y - P_{y+t}) f| <= (8t/y) P_{y/2} f``,

    pointwise.  Violations are measured relative to ``||f||_inf``.
    """
    F = np.asarray(F, dtype=float)
    if F.ndim == 1:
        F = F[:, None]
    if np.any(F < 0):
        raise NegativeInput("subordination inequalities need f >= 0")
    grid = grid or TimeGrid.for_spectrum(ps.sd, points_per_decade=4)
    times = grid.times
    r = ps.rates
    A = ps.sd.coefficients(F)
    Phi = ps.sd.basis
    scale = np.maximum(F.max(axis=0), 1e-300)

    def P(t):
        return Phi @ (np.exp(-t * r)[:, None] * A)

    cache = {t: P(t) for t in times}
    worst_a = -np.inf
    worst_b = -np.inf
    count = 0
    pairs = 0
    for i, y in enumerate(times):
        Py = cache[y]
        Phalf = P(y / 2)
        for t in times[: i + 1]:
            pairs += 1
            va = (t * Py - y * cache[t]) / (y * scale)
            vb = (np.abs(Py - P(y + t)) - (8 * t / y) * Phalf) / scale
            ma, mb = float(va.max()), float(vb.max())
            worst_a = max(worst_a, ma)
            worst_b = max(worst_b, mb)
            count += int(np.sum(va.max(axis=0) > tol)) + int(np.sum(vb.max(axis=0) > tol))
    return SubordinationReport(F.shape[1], pairs, worst_a, worst_b, count, tol)


# --------------------------------------------------------------------------
# Carleson measures

@dataclass(frozen=True)
class CarlesonMeasure:
    """Density ``nu_t = densities[i]`` for ``t`` in ``[breakpoints[i], breakpoints[i+1])``."""

    breakpoints: np.ndarray
    densities: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.breakpoints, dtype=float)
        d = np.atleast_2d(np.asarray(self.densities, dtype=float))
        if b.ndim != 1 or b.size < 2 or np.any(np.diff(b) <= 0) or b[0] < 0:
            raise ValueError("breakpoints must be increasing and nonnegative")
        if d.shape[0] != b.size - 1:
            raise ValueError(f"need {b.size - 1} densities, got {d.shape[0]}")
        if np.any(d < 0) or not np.all(np.isfinite(d)):
            raise ValueError("densities must be finite and nonnegative")
        object.__setattr__(self, "breakpoints", b)
        object.__setattr__(self, "densities", d)

    @classmethod
    def from_dict(cls, data: dict) -> "CarlesonMeasure":
        return cls(np.asarray(data["breakpoints"]), np.asarray(data["densities"]))

    def to_dict(self) -> dict:
        return {"breakpoints": self.breakpoints.tolist(), "densities": self.densities.tolist()}

    @property
    def widths(self) -> np.ndarray:
        return np.diff(self.breakpoints)

    def cumulative(self, T: float) -> np.ndarray:
        """``int_0^T nu_s ds``, exact for slabs."""
        lo = self.breakpoints[:-1]
        overlap = np.clip(T - lo, 0.0, self.widths)
        return overlap @ self.densities

    def zero(self) -> bool:
        return not np.any(self.densities)


def carleson_norm(ps: PoissonSemigroup, nu: CarlesonMeasure, alpha: float,
                  grid: TimeGrid | None = None) -> NormReport:
    """``sup_t ||P_t int_0^{alpha t} nu_s ds||_inf``.

    The grid is augmented with ``breakpoints / alpha`` (the kinks of the
    inner integral) and with the t -> inf limit.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    grid = grid or TimeGrid.for_spectrum(ps.sd)

    def sweep(times):
        vals = [float(np.max(np.abs(ps.apply(t, nu.cumulative(alpha * t))))) for t in times]
        E = ps.sd.kernel_projection(nu.cumulative(np.inf))
        vals.append(float(np.max(np.abs(E))))
        return np.array(vals)

    kinks = nu.breakpoints[nu.breakpoints > 0] / alpha
    times = np.unique(np.concatenate([grid.times, kinks]))
    vals = sweep(times)
    i = int(np.argmax(vals))
    fine_times = np.unique(np.concatenate([grid.refined().times, kinks]))
    err = abs(float(sweep(fine_times).max()) - float(vals[i]))
    argmax = float(times[i]) if i < len(times) else float("inf")
    return NormReport(float(vals[i]), argmax, float(vals[-1]), grid, err)


def _slab_integral(rates: np.ndarray, t0: float, t1: float) -> np.ndarray:
    """``int_{t0}^{t1} exp(-t r) dt`` for each rate r."""
    out = np.full(rates.shape, t1 - t0, dtype=float)
    nz = rates > 0
    r = rates[nz]
    out[nz] = np.exp(-t0 * r) * (-np.expm1(-(t1 - t0) * r)) / r
    return out


def embedding_norm(ps: PoissonSemigroup, nu: CarlesonMeasure, F, p: float) -> np.ndarray:
    """``||P_. f||_{L_p(nu)}`` for each column of F.

    p = 2 is exact through eigen-multiplier antiderivatives; other p use
    adaptive Gauss-Legendre on each slab.
    """
    F = np.asarray(F)
    single = F.ndim == 1
    if single:
        F = F[:, None]
    mu = ps.sd.mu
    if p == 2:
        A = ps.sd.coefficients(F)
        Phi = ps.sd.basis
        r = ps.rates
        total = np.zeros((A.shape[0], A.shape[0]))
        for i in range(nu.densities.shape[0]):
            if not np.any(nu.densities[i]):
                continue
            W = (Phi * (mu * nu.densities[i])[:, None]).T @ Phi
            E = _slab_integral(r[:, None] + r[None, :], nu.breakpoints[i], nu.breakpoints[i + 1])
            total += W * E
        val = np.real(np.einsum("jb,jk,kb->b", np.conj(A), total, A))
        out = np.sqrt(np.maximum(val, 0.0))
    else:
        acc = np.zeros(F.shape[1])
        for i in range(nu.densities.shape[0]):
            w = mu * nu.densities[i]
            if not np.any(w):
                continue

            def integrand(ts, w=w):
                return np.array([w @ np.abs(ps.apply(t, F)) ** p for t in ts])

            acc += integrate(integrand, nu.breakpoints[i], nu.breakpoints[i + 1], rtol=1e-10)
        out = acc ** (1.0 / p)
    return out[0] if single else out


def sup_on_support(ps: PoissonSemigroup, nu: CarlesonMeasure, F, nodes: int = 8) -> np.ndarray:
    """``||P_. f||_{L_inf(nu)}`` sampled at Gauss nodes of each slab."""
    F = np.asarray(F)
    x, _ = np.polynomial.legendre.leggauss(nodes)
    best = np.zeros(F.shape[1:]) if F.ndim > 1 else 0.0
    for i in range(nu.densities.shape[0]):
        support = nu.densities[i] > 0
        if not np.any(support):
            continue
        t0, t1 = nu.breakpoints[i], nu.breakpoints[i + 1]
        for t in np.concatenate([[t0], t0 + 0.5 * (t1 - t0) * (x + 1)]):
            best = np.maximum(best, np.max(np.abs(ps.apply(t, F))[support], axis=0))
    return best


def poisson_integral(ps: PoissonSemigroup, nu: CarlesonMeasure, g) -> np.ndarray:
    """``int_0^inf P_t(g nu_t) dt``, exact slab by slab."""
    g = np.asarray(g)
    out = np.zeros(g.shape, dtype=np.result_type(g, float))
    for i in range(nu.densities.shape[0]):
        dens = nu.densities[i] if g.ndim == 1 else nu.densities[i][:, None]
        m = _slab_integral(ps.rates, nu.breakpoints[i], nu.breakpoints[i + 1])
        out = out + ps.sd.apply_multiplier(m, g * dens)
    return out


@dataclass(frozen=True)
class EmbeddingReport:
    p: float
    samples: int
    carleson_norm: float
    empirical_cp: float
    linf_endpoint_ratio: float
    bmo_bound_ratio: float

    def to_dict(self) -> dict:
        return {"p": self.p, "samples": self.samples, "carlesonNorm": self.carleson_norm,
                "empiricalCp": self.empirical_cp, "linfEndpointRatio": self.linf_endpoint_ratio,
                "bmoBoundRatio": self.bmo_bound_ratio,
                "bmoBoundHolds": self.bmo_bound_ratio <= CARLESON_CONSTANT}


def carleson_embedding_check(ps: PoissonSemigroup, gen: Generator | None, nu: CarlesonMeasure,
                             p: float, F, G=None, require_curvature: bool = True) -> EmbeddingReport:
    """Empirical embedding constant and the two endpoint ingredients.

    * ``empirical_cp``: worst ``||P f||_{L_p(nu)} / (||f||_p ||nu||_{P,4}^{1/p})``.
    * ``linf_endpoint_ratio``: worst ``||P f||_{L_inf(nu)} / ||f||_inf`` (must be <= 1).
    * ``bmo_bound_ratio``: worst ``||int P_t(g nu_t) dt||_{BMO(P)} / ||nu||_{P,4}``
      over bounded g (the argument gives 37).
    """
    if not 1 < p < np.inf:
        raise ValueError("need 1 < p < inf")
    if require_curvature and gen is not None:
        rep = check_curvature(gen, ps.base)
        if not rep.holds:
            raise CurvatureFailed(f"Gamma_2 >= 0 fails (min eigenvalue {rep.min_eigen:.3g})")
    F = np.asarray(F)
    if F.ndim == 1:
        F = F[:, None]
    if nu.zero():
        return EmbeddingReport(p, F.shape[1], 0.0, 0.0, 0.0, 0.0)
    cn = carleson_norm(ps, nu, 4.0).value
    num = embedding_norm(ps, nu, F, p)
    den = lp_norm(ps.sd.mu, F, p) * cn ** (1.0 / p)
    cp = float(np.max(num / np.maximum(den, 1e-300)))
    linf = float(np.max(sup_on_support(ps, nu, F) / np.maximum(np.abs(F).max(axis=0), 1e-300)))
    bound = 0.0
    if G is not None:
        G = np.asarray(G)
        if G.ndim == 1:
            G = G[:, None]
        H = poisson_integral(ps, nu, G)
        bound = float(np.max(BMO_values(ps.sd, H)) / cn)
    return EmbeddingReport(p, F.shape[1], cn, cp, linf, bound)
