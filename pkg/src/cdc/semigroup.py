"""Standard Markov semigroups on a finite state space.

A generator ``Q`` acts on functions by ``(Lf)(x) = sum_y Q[x, y] f(y)``; the
semigroup is ``T_t = exp(tQ)``.  Everything time-dependent is evaluated
through one symmetric eigen-solve of ``D^{1/2} Q D^{-1/2}`` with
``D = diag(mu)``, so every operator becomes a multiplier on eigenvalues.

Fields are numpy arrays of shape ``(n,)`` or batches of shape ``(n, k)``
(one field per column).
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import EigenFailure, NotConservative, NotPositivityPreserving, NotSymmetric

AXIOM_TOL = 1e-12
RECONSTRUCTION_TOL = 1e-10
MAX_STATES = 128


@dataclass(frozen=True)
class StateSpace:
    mu: np.ndarray

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        if mu.ndim != 1 or mu.size < 1:
            raise ValueError("mu must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(mu)) or np.any(mu <= 0):
            raise ValueError("every mu_x must be finite and positive")
        mu.setflags(write=False)
        object.__setattr__(self, "mu", mu)

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def total_mass(self) -> float:
        return float(self.mu.sum())


@dataclass(frozen=True)
class Generator:
    space: StateSpace
    Q: np.ndarray

    @property
    def n(self) -> int:
        return self.space.n

    @property
    def mu(self) -> np.ndarray:
        return self.space.mu

    @property
    def scale(self) -> float:
        """Largest absolute entry of Q (1.0 for the zero generator)."""
        m = float(np.max(np.abs(self.Q)))
        return m if m > 0 else 1.0

    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(np.round(self.Q, 12).tobytes())
        h.update(np.round(self.mu, 12).tobytes())
        return h.hexdigest()[:16]


def validate_generator(Q, mu, max_states: int = MAX_STATES) -> Generator:
    """Check the standard-semigroup axioms and wrap ``Q`` as a Generator.

    Raises
    ------
    NotPositivityPreserving
        Some off-diagonal rate is negative.
    NotConservative
        Some row does not sum to zero, so ``T_t 1 != 1``.
    NotSymmetric
        Detailed balance ``mu_x Q_xy = mu_y Q_yx`` fails.
    """
    Q = np.array(Q, dtype=float)
    space = StateSpace(mu)
    n = space.n
    if Q.shape != (n, n):
        raise ValueError(f"Q has shape {Q.shape}, expected ({n}, {n})")
    if n > max_states:
        raise ValueError(f"n={n} exceeds the configured cap of {max_states} states")
    if not np.all(np.isfinite(Q)):
        raise ValueError("Q has non-finite entries")
    m = float(np.max(np.abs(Q)))
    tol = AXIOM_TOL * (m if m > 0 else 1.0)

    off = Q - np.diag(np.diag(Q))
    bad = np.argwhere(off < -tol)
    if bad.size:
        x, y = (int(v) for v in bad[0])
        raise NotPositivityPreserving(
            f"negative off-diagonal rate Q[{x},{y}] = {Q[x, y]:.3g}", (x, y))

    rows = Q.sum(axis=1)
    bad = np.flatnonzero(np.abs(rows) > tol)
    if bad.size:
        x = int(bad[0])
        raise NotConservative(f"row {x} sums to {rows[x]:.3g}, not 0", (x,))

    flux = space.mu[:, None] * Q
    # detailed balance is a statement about flux, so compare against its own scale
    ftol = AXIOM_TOL * max(float(np.max(np.abs(flux))), 1e-300)
    bad = np.argwhere(np.abs(flux - flux.T) > ftol)
    if bad.size:
        x, y = (int(v) for v in bad[0])
        raise NotSymmetric(
            f"detailed balance fails at ({x},{y}): "
            f"mu_x Q_xy = {flux[x, y]:.6g} but mu_y Q_yx = {flux[y, x]:.6g}", (x, y))

    Q.setflags(write=False)
    return Generator(space, Q)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Eigen-system of a mu-symmetric generator.

    ``basis[:, k]`` is the k-th eigenfunction, orthonormal in the
    mu-weighted inner product; eigenvalues are sorted in decreasing order
    so the kernel modes come first.
    """

    eigenvalues: np.ndarray
    basis: np.ndarray
    mu: np.ndarray
    kernel_dim: int
    scale: float = 1.0
    label: str = "heat"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.mu.size

    @property
    def kernel_mask(self) -> np.ndarray:
        mask = np.zeros(self.n, dtype=bool)
        mask[: self.kernel_dim] = True
        return mask

    @property
    def spectral_gap(self) -> float:
        """Smallest nonzero |eigenvalue| (0.0 if L = 0)."""
        if self.kernel_dim == self.n:
            return 0.0
        return float(-self.eigenvalues[self.kernel_dim])

    @property
    def spectral_radius(self) -> float:
        return float(-self.eigenvalues[-1])

    def coefficients(self, f) -> np.ndarray:
        """Mode amplitudes ``<phi_k, f>_mu`` (batched over columns)."""
        f = np.asarray(f)
        w = self.mu if f.ndim == 1 else self.mu[:, None]
        return self.basis.T @ (w * f)

    def synthesize(self, a) -> np.ndarray:
        return self.basis @ a

    def apply_multiplier(self, m, f) -> np.ndarray:
        """Apply the spectral multiplier ``m`` (one value per mode) to ``f``."""
        a = self.coefficients(f)
        m = np.asarray(m)
        return self.synthesize(m * a if a.ndim == 1 else m[:, None] * a)

    def operator(self, m) -> np.ndarray:
        """Dense matrix K with ``(Kf)(x) = sum_y K[x, y] f(y)`` for the multiplier m."""
        return (self.basis * np.asarray(m)) @ (self.basis.T * self.mu)

    def semigroup_matrix(self, t: float) -> np.ndarray:
        return self.operator(np.exp(t * self.eigenvalues))

    def kernel_projection(self, f) -> np.ndarray:
        return self.apply_multiplier(self.kernel_mask.astype(float), f)

    def project_off_kernel(self, f) -> np.ndarray:
        return self.apply_multiplier((~self.kernel_mask).astype(float), f)

    def generator_matrix(self) -> np.ndarray:
        return self.operator(self.eigenvalues)

    def cached(self, key: str, build: Callable[[], object]):
        if key not in self._cache:
            self._cache[key] = build()
        return self._cache[key]


def decompose(gen: Generator) -> SpectralDecomposition:
    mu = gen.mu
    sq = np.sqrt(mu)
    S = sq[:, None] * gen.Q / sq[None, :]
    S = 0.5 * (S + S.T)
    try:
        lam, U = np.linalg.eigh(S)
    except np.linalg.LinAlgError as exc:
        raise EigenFailure(str(exc)) from exc
    order = np.argsort(-lam, kind="stable")
    lam = lam[order]
    U = U[:, order]
    scale = gen.scale
    ktol = 1e-12 * scale * max(gen.n, 1)
    lam = np.where(np.abs(lam) <= ktol, 0.0, lam)
    if np.any(lam > 0):
        raise EigenFailure(f"positive eigenvalue {lam.max():.3g} for a Markov generator")
    basis = U / sq[:, None]
    kernel_dim = int(np.count_nonzero(lam == 0.0))
    # constant mode first, sign-fixed, when the chain is irreducible
    if kernel_dim == 1:
        basis[:, 0] = 1.0 / np.sqrt(mu.sum())
    sd = SpectralDecomposition(lam, basis, mu.copy(), kernel_dim, scale)
    resid = np.max(np.abs(sd.generator_matrix() - gen.Q))
    if not np.isfinite(resid) or resid > RECONSTRUCTION_TOL * scale:
        raise EigenFailure(f"reconstruction residual {resid:.3g} exceeds tolerance")
    return sd


def apply_semigroup(sd: SpectralDecomposition, t: float, f) -> np.ndarray:
    """``T_t f``."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t == 0:
        return np.array(f, dtype=np.result_type(f, float), copy=True)
    return sd.apply_multiplier(np.exp(t * sd.eigenvalues), f)


def average_multiplier(eigenvalues: np.ndarray, t: float) -> np.ndarray:
    """Eigen-multiplier of ``M_t = (1/t) int_0^t T_s ds``: (e^{t lam} - 1)/(t lam)."""
    z = t * np.asarray(eigenvalues, dtype=float)
    out = np.ones_like(z)
    nz = z != 0
    out[nz] = np.expm1(z[nz]) / z[nz]
    return out


def apply_average(sd: SpectralDecomposition, t: float, f) -> np.ndarray:
    """``M_t f`` computed exactly through the eigen-multiplier."""
    if t <= 0:
        raise ValueError("t must be positive")
    return sd.apply_multiplier(average_multiplier(sd.eigenvalues, t), f)


def trace(space: StateSpace | SpectralDecomposition | np.ndarray, f) -> complex:
    """``tau(f) = sum_x f(x) mu_x`` (batched over columns)."""
    mu = space if isinstance(space, np.ndarray) else space.mu
    f = np.asarray(f)
    return mu @ f


def lp_norm(mu: np.ndarray, f, p: float) -> np.ndarray:
    """mu-weighted L_p norm; ``p = np.inf`` gives the max norm."""
    a = np.abs(np.asarray(f))
    if np.isinf(p):
        return a.max(axis=0)
    w = mu if a.ndim == 1 else mu[:, None]
    return (w * a**p).sum(axis=0) ** (1.0 / p)


@dataclass(frozen=True)
class TimeGrid:
    """Geometric time grid standing in for ``sup_{0 < t < inf}``."""

    t_min: float
    t_max: float
    points_per_decade: int = 16

    def __post_init__(self):
        if not (0 < self.t_min < self.t_max):
            raise ValueError("need 0 < t_min < t_max")
        if self.points_per_decade < 1:
            raise ValueError("points_per_decade must be positive")

    @property
    def times(self) -> np.ndarray:
        decades = np.log10(self.t_max / self.t_min)
        count = max(int(np.ceil(decades * self.points_per_decade)) + 1, 2)
        return np.geomspace(self.t_min, self.t_max, count)

    def refined(self) -> "TimeGrid":
        return TimeGrid(self.t_min, self.t_max, 2 * self.points_per_decade)

    @classmethod
    def for_spectrum(cls, sd: SpectralDecomposition, points_per_decade: int = 16) -> "TimeGrid":
        rad = sd.spectral_radius
        gap = sd.spectral_gap
        if rad == 0.0:
            return cls(1e-4, 1e3, points_per_decade)
        return cls(1e-4 / rad, 1e3 / gap, points_per_decade)

    def to_dict(self) -> dict:
        return {"t_min": self.t_min, "t_max": self.t_max,
                "points_per_decade": self.points_per_decade}
