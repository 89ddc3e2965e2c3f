"""Random test fields drawn in the eigenbasis."""

from __future__ import annotations

import numpy as np

from .semigroup import SpectralDecomposition


def eigen_fields(sd: SpectralDecomposition, count: int, rng: np.random.Generator,
                 decay: float | None = None, off_kernel: bool = True,
                 complex_valued: bool = True) -> np.ndarray:
    """Complex Gaussian amplitudes with variance ``(1 + k)^(-decay)`` on mode k.

    When ``decay`` is None each column draws its own decay from [0, 2], so a
    batch mixes rough and smooth fields.  Kernel modes are zeroed when
    ``off_kernel`` is set.  Columns are normalized to unit L_2(mu) norm.
    """
    n = sd.n
    if decay is None:
        decays = rng.uniform(0.0, 2.0, size=count)
    else:
        decays = np.full(count, float(decay))
    k = np.arange(n)[:, None]
    std = (1.0 + k) ** (-decays[None, :] / 2)
    a = rng.normal(size=(n, count))
    if complex_valued:
        a = (a + 1j * rng.normal(size=(n, count))) / np.sqrt(2)
    a = a * std
    if off_kernel:
        a[: sd.kernel_dim] = 0.0
    norms = np.sqrt(np.sum(np.abs(a) ** 2, axis=0))
    a = a / np.where(norms > 0, norms, 1.0)
    return sd.synthesize(a)


def positive_fields(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Nonnegative fields: squared moduli of Gaussians, with a few sparse columns."""
    F = np.abs(rng.normal(size=(n, count)) + 1j * rng.normal(size=(n, count))) ** 2
    sparse = rng.random((n, count)) < 0.3
    mask = rng.random(count) < 0.25
    F[:, mask] *= sparse[:, mask]
    empty = F.max(axis=0) == 0
    F[0, empty] = 1.0
    return F


def deltas(n: int) -> np.ndarray:
    return np.eye(n)


def bounded_fields(n: int, count: int, rng: np.random.Generator) -> np.ndarray:
    """Complex fields with ``|g| <= 1``."""
    return rng.uniform(0, 1, size=(n, count)) * np.exp(2j * np.pi * rng.random((n, count)))


def correlated_pairs(sd: SpectralDecomposition, count: int, rng: np.random.Generator):
    """``(F, G)`` where about half the columns of G are perturbations of F."""
    F = eigen_fields(sd, count, rng)
    G = eigen_fields(sd, count, rng, off_kernel=False)
    mix = rng.random(count) < 0.5
    G[:, mix] = F[:, mix] + 0.1 * eigen_fields(sd, int(mix.sum()), rng)
    return F, G
