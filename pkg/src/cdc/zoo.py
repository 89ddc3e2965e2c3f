"""Generator families and their declarative JSON configuration.

A config is a mapping such as ``{"type": "cycle", "n": 8}`` or
``{"type": "explicit", "Q": [[-1, 1], [1, -1]], "mu": [1, 1]}``.
``mu`` defaults to the uniform probability measure.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .semigroup import Generator, validate_generator

FAMILIES = ("cycle", "path", "complete", "star", "hypercube", "birth-death",
            "random-reversible", "explicit")


def _from_conductances(C: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """Q_xy = C_xy / mu_x for symmetric conductances C; reversible w.r.t. mu."""
    C = 0.5 * (C + C.T)
    np.fill_diagonal(C, 0.0)
    Q = C / mu[:, None]
    Q -= np.diag(Q.sum(axis=1))
    return Q


def _adjacency(kind: str, n: int) -> np.ndarray:
    A = np.zeros((n, n))
    if kind == "cycle":
        for i in range(n):
            j = (i + 1) % n
            if i != j:
                A[i, j] = A[j, i] = 1.0
    elif kind == "path":
        for i in range(n - 1):
            A[i, i + 1] = A[i + 1, i] = 1.0
    elif kind == "complete":
        A[:] = 1.0
        np.fill_diagonal(A, 0.0)
    elif kind == "star":
        A[0, 1:] = A[1:, 0] = 1.0
    elif kind == "hypercube":
        d = int(round(np.log2(n)))
        if 2**d != n:
            raise ConfigError(f"hypercube needs n a power of two, got {n}", "n")
        for i in range(n):
            for b in range(d):
                A[i, i ^ (1 << b)] = 1.0
    else:
        raise ConfigError(f"unknown graph family {kind!r}", "type")
    return A


def _resolve_mu(spec, n: int, rng: np.random.Generator) -> np.ndarray:
    if spec is None or spec == "uniform":
        return np.full(n, 1.0 / n)
    if spec == "random":
        mu = rng.uniform(0.5, 2.0, size=n)
        return mu / mu.sum()
    mu = np.asarray(spec, dtype=float)
    if mu.shape != (n,):
        raise ConfigError(f"expected {n} weights, got shape {mu.shape}", "mu")
    return mu


def make_generator(config: dict) -> Generator:
    """Build and validate a Generator from a config mapping."""
    if not isinstance(config, dict) or "type" not in config:
        raise ConfigError("generator config needs a 'type'", "type")
    kind = config["type"]
    rng = np.random.default_rng(config.get("seed", 0))
    rate = float(config.get("rate", 1.0))

    if kind == "explicit":
        if "Q" not in config:
            raise ConfigError("explicit generator needs 'Q'", "Q")
        Q = np.asarray(config["Q"], dtype=float)
        if Q.ndim == 1:
            n = int(config.get("n", round(np.sqrt(Q.size))))
            if n * n != Q.size:
                raise ConfigError("flat Q length is not a perfect square", "Q")
            Q = Q.reshape(n, n)
        n = Q.shape[0]
        mu = _resolve_mu(config.get("mu"), n, rng)
        return validate_generator(Q, mu)

    if "n" not in config:
        raise ConfigError(f"{kind} generator needs 'n'", "n")
    n = int(config["n"])
    if n < 1:
        raise ConfigError("n must be positive", "n")

    if kind in ("cycle", "path", "complete", "star", "hypercube"):
        A = rate * _adjacency(kind, n)
        mu = _resolve_mu(config.get("mu"), n, rng)
        # unit conductances per edge; reduces to the graph Laplacian for uniform mu
        Q = _from_conductances(A / n, mu)
        return validate_generator(Q, mu)

    if kind == "birth-death":
        births = np.asarray(config.get("births", rng.uniform(0.5, 2.0, size=max(n - 1, 0))), float)
        deaths = np.asarray(config.get("deaths", rng.uniform(0.5, 2.0, size=max(n - 1, 0))), float)
        if births.shape != (n - 1,) or deaths.shape != (n - 1,):
            raise ConfigError(f"births/deaths need {n - 1} entries", "births")
        Q = np.zeros((n, n))
        for i in range(n - 1):
            Q[i, i + 1] = rate * births[i]
            Q[i + 1, i] = rate * deaths[i]
        Q -= np.diag(Q.sum(axis=1))
        mu = np.ones(n)
        for i in range(n - 1):
            mu[i + 1] = mu[i] * births[i] / deaths[i]
        return validate_generator(Q, mu / mu.sum())

    if kind == "random-reversible":
        density = float(config.get("density", 0.5))
        mu = _resolve_mu(config.get("mu", "random"), n, rng)
        C = rng.uniform(0.1, 1.0, size=(n, n)) * (rng.random((n, n)) < density)
        # a spanning path keeps the chain irreducible
        for i in range(n - 1):
            C[i, i + 1] = max(C[i, i + 1], 0.1)
        C = np.triu(C, 1)
        C = C + C.T
        Q = _from_conductances(rate * C / n, mu)
        return validate_generator(Q, mu)

    raise ConfigError(f"unknown generator type {kind!r}", "type")


def load_generator(path) -> Generator:
    with open(Path(path)) as fh:
        return make_generator(json.load(fh))


def zero_generator(n: int) -> Generator:
    return validate_generator(np.zeros((n, n)), np.full(n, 1.0 / n))


def two_state(a: float, b: float) -> Generator:
    """Chain [[-a, a], [b, -b]], reversible for mu proportional to (b, a)."""
    return validate_generator([[-a, a], [b, -b]], np.array([b, a]) / (a + b))


def family(kind: str, n: int, seed: int = 0) -> Generator:
    return make_generator({"type": kind, "n": n, "seed": seed})


def describe() -> list[dict]:
    """One line per family for ``cdc zoo list``."""
    notes = {
        "cycle": "nearest-neighbour walk on Z_n, unit rates",
        "path": "walk on {0..n-1} with reflecting ends",
        "complete": "jump to any other state at unit rate",
        "star": "hub-and-spokes graph",
        "hypercube": "bit-flip walk on {0,1}^d, n = 2^d",
        "birth-death": "random birth/death rates; mu from detailed balance",
        "random-reversible": "random sparse conductances, random mu",
        "explicit": "user-supplied Q (row-major) and mu",
    }
    return [{"type": k, "description": notes[k]} for k in FAMILIES]
