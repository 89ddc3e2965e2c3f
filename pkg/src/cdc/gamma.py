"""Carre du champ and its iterate, with the CD(0, inf) curvature test.

Normalization: ``2 Gamma(f, h) = L(f* h) - (L f*) h - f* (L h)`` and
``2 Gamma_2(f, h) = L Gamma(f, h) - Gamma(f, L h) - Gamma(L f, h)``.
Both forms are conjugate-linear in the first slot.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .semigroup import Generator, SpectralDecomposition, TimeGrid, decompose

CURVATURE_RTOL = 1e-10


def _L(gen: Generator, f) -> np.ndarray:
    return gen.Q @ f


def gamma(gen: Generator, f, h) -> np.ndarray:
    """Pointwise ``Gamma(f, h)`` straight from the defining identity."""
    f = np.asarray(f)
    h = np.asarray(h)
    fc = np.conj(f)
    return 0.5 * (_L(gen, fc * h) - _L(gen, fc) * h - fc * _L(gen, h))


def gamma2(gen: Generator, f, h) -> np.ndarray:
    """Pointwise ``Gamma_2(f, h)``."""
    f = np.asarray(f)
    h = np.asarray(h)
    return 0.5 * (_L(gen, gamma(gen, f, h)) - gamma(gen, f, _L(gen, h))
                  - gamma(gen, _L(gen, f), h))


def gamma_matrices(gen: Generator) -> np.ndarray:
    """Array ``G`` of shape (n, n, n) with ``Gamma(f, h)(x) = f^H G[x] h``."""
    n = gen.n
    G = np.zeros((n, n, n))
    for x in range(n):
        v = gen.Q[x].copy()
        v[x] = 0.0
        M = np.diag(v)
        M[x, :] -= v
        M[:, x] -= v
        M[x, x] += v.sum()
        G[x] = 0.5 * M
    return G


def gamma2_matrices(gen: Generator, G: np.ndarray | None = None) -> np.ndarray:
    """Array ``H`` of shape (n, n, n) with ``Gamma_2(f, h)(x) = f^H H[x] h``."""
    if G is None:
        G = gamma_matrices(gen)
    Q = gen.Q
    n = gen.n
    LG = (Q @ G.reshape(n, n * n)).reshape(n, n, n)
    H = 0.5 * (LG - G @ Q - np.matmul(Q.T, G))
    return 0.5 * (H + H.transpose(0, 2, 1))


@dataclass(frozen=True)
class CurvatureReport:
    holds: bool
    min_eigen: float
    worst_point: int
    cross_check_agrees: bool
    status: str
    semigroup_min: float
    sampled_min: float
    tolerance: float

    def to_dict(self) -> dict:
        d = asdict(self)
        return {
            "holds": d["holds"],
            "minEigen": d["min_eigen"],
            "worstPoint": d["worst_point"],
            "crossCheckAgrees": d["cross_check_agrees"],
            "status": d["status"],
            "semigroupMin": d["semigroup_min"],
            "sampledMin": d["sampled_min"],
            "tolerance": d["tolerance"],
        }


def semigroup_gap_forms(G: np.ndarray, K: np.ndarray) -> np.ndarray:
    """Quadratic forms of ``T_v Gamma(f) - Gamma(T_v f)`` at each point, K = T_v."""
    n = K.shape[0]
    TG = (K @ G.reshape(n, n * n)).reshape(n, n, n)
    A = TG - np.matmul(K.T, np.matmul(G, K))
    return 0.5 * (A + A.transpose(0, 2, 1))


def check_curvature(gen: Generator, sd: SpectralDecomposition | None = None,
                    grid: TimeGrid | None = None, samples: int = 16,
                    seed: int = 0) -> CurvatureReport:
    """Decide Gamma_2 >= 0 and cross-check it against Gamma(T_v f) <= T_v Gamma(f).

    Route (a) is the exact pointwise PSD test of the Gamma_2 forms.  Route
    (b) never touches Gamma_2: for each v on a coarse time grid it takes the
    minimum eigenvalue of the forms of ``T_v Gamma(f) - Gamma(T_v f)`` and
    also evaluates that difference on random complex fields.
    """
    if sd is None:
        sd = decompose(gen)
    if grid is None:
        grid = TimeGrid.for_spectrum(sd, points_per_decade=4)
    n = gen.n
    G = gamma_matrices(gen)
    H = gamma2_matrices(gen, G)
    qnorm = float(np.linalg.norm(gen.Q, 2)) if n > 0 else 0.0
    tol_a = CURVATURE_RTOL * max(qnorm, qnorm**2, 1e-300)
    eig_min = np.linalg.eigvalsh(H)[:, 0]
    worst = int(np.argmin(eig_min))
    min_eigen = float(eig_min[worst])
    holds = min_eigen >= -tol_a

    gscale = max(float(np.max(np.abs(G))), 1e-300)
    tol_b = CURVATURE_RTOL * gscale
    rng = np.random.default_rng(seed)
    F = rng.normal(size=(n, samples)) + 1j * rng.normal(size=(n, samples))
    gF = np.real(gamma(gen, F, F))
    sem_min = np.inf
    samp_min = np.inf
    for v in grid.times:
        K = sd.semigroup_matrix(v)
        A = semigroup_gap_forms(G, K)
        sem_min = min(sem_min, float(np.linalg.eigvalsh(A)[:, 0].min()))
        KF = K @ F
        diff = K @ gF - np.real(gamma(gen, KF, KF))
        fscale = np.max(np.abs(gF)) + 1e-300
        samp_min = min(samp_min, float(np.min(diff)) / fscale)
    holds_b = sem_min >= -tol_b and samp_min >= -CURVATURE_RTOL
    if not holds:
        status = "fails"
    elif min_eigen < 0:
        status = "boundary"
    else:
        status = "holds"
    return CurvatureReport(bool(holds), min_eigen, worst, bool(holds == holds_b),
                           status, float(sem_min), float(samp_min), tol_a)
