"""Finite group von Neumann algebras and Fourier-multiplier semigroups.

An algebra element ``f = sum_g a_g lambda_g`` is stored as its coefficient
vector ``a`` (length N).  The left regular representation turns it into the
N x N matrix ``lambda(f)[x, y] = a[x y^-1]``; the trace is
``tau(f) = a_e = Tr(lambda(f)) / N``, so ``tau(1) = 1``.

The semigroup is ``T_t lambda_g = exp(-t psi(g)) lambda_g`` for a
conditionally negative length function psi.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from collections import deque

import numpy as np

from .errors import (ConfigError, CurvatureFailed, GroupError, KernelComponent,
                     NonzeroAtIdentity, NotConditionallyNegative, NotSymmetricPsi)
from .gamma import gamma as comm_gamma
from .norms import BMO_values, bmo_values
from .norms import h1_norms as comm_h1
from .semigroup import TimeGrid, decompose, validate_generator
from .suites import DualityReport, SuiteReport

MAX_ORDER = 24
PSI_TOL = 1e-10


# --------------------------------------------------------------------------
# groups

@dataclass(frozen=True)
class FiniteGroup:
    mul: np.ndarray  # mul[g, h] = index of g h
    name: str = "table"
    labels: tuple = ()
    cyclic_factors: tuple = ()  # set for abelian groups built as products of Z_n
    default_generators: tuple = ()
    inv: np.ndarray = field(init=False)
    identity: int = field(init=False)

    def __post_init__(self):
        mul = np.asarray(self.mul, dtype=int)
        N = mul.shape[0]
        if mul.shape != (N, N) or N < 1:
            raise GroupError("multiplication table must be square")
        if N > MAX_ORDER:
            raise GroupError(f"group order {N} exceeds the cap {MAX_ORDER}")
        if mul.min() < 0 or mul.max() >= N:
            raise GroupError("table entries out of range")
        for row in (*mul, *mul.T):
            if np.unique(row).size != N:
                raise GroupError("table is not a Latin square")
        ids = [e for e in range(N) if np.array_equal(mul[e], np.arange(N))
               and np.array_equal(mul[:, e], np.arange(N))]
        if not ids:
            raise GroupError("no identity element")
        e = ids[0]
        # associativity: (gh)k = g(hk) for all triples
        left = mul[mul[:, :, None], np.arange(N)[None, None, :]]
        right = mul[np.arange(N)[:, None, None], mul[None, :, :]]
        if not np.array_equal(left, right):
            raise GroupError("multiplication is not associative")
        inv = np.argmax(mul == e, axis=1)
        mul.setflags(write=False)
        inv.setflags(write=False)
        object.__setattr__(self, "mul", mul)
        object.__setattr__(self, "inv", inv)
        object.__setattr__(self, "identity", int(e))

    @property
    def order(self) -> int:
        return self.mul.shape[0]

    @property
    def abelian(self) -> bool:
        return bool(np.array_equal(self.mul, self.mul.T))

    def quotient_index(self) -> np.ndarray:
        """``Q[g, h]`` = index of ``g^-1 h``."""
        return self.mul[self.inv[:, None], np.arange(self.order)[None, :]]


def cyclic(n: int) -> FiniteGroup:
    i = np.arange(n)
    return FiniteGroup((i[:, None] + i[None, :]) % n, f"Z{n}", tuple(range(n)), (n,),
                       tuple(sorted({1 % n, (n - 1) % n})))


def abelian_product(*orders: int) -> FiniteGroup:
    elems = list(itertools.product(*[range(m) for m in orders]))
    index = {e: k for k, e in enumerate(elems)}
    mul = np.array([[index[tuple((a + b) % m for a, b, m in zip(x, y, orders))]
                     for y in elems] for x in elems])
    gens = set()
    for pos, m in enumerate(orders):
        for step in (1, m - 1):
            v = [0] * len(orders)
            v[pos] = step % m
            gens.add(index[tuple(v)])
    gens.discard(0)
    name = "x".join(f"Z{m}" for m in orders)
    return FiniteGroup(mul, name, tuple(elems), tuple(orders), tuple(sorted(gens)))


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n; element (k, e) is r^k s^e."""
    elems = [(k, e) for e in range(2) for k in range(n)]
    index = {x: i for i, x in enumerate(elems)}

    def prod(x, y):
        k1, e1 = x
        k2, e2 = y
        return ((k1 + (-1) ** e1 * k2) % n, e1 ^ e2)

    mul = np.array([[index[prod(x, y)] for y in elems] for x in elems])
    gens = {index[(1 % n, 0)], index[((n - 1) % n, 0)], index[(0, 1)]}
    gens.discard(0)
    return FiniteGroup(mul, f"D{n}", tuple(elems), (), tuple(sorted(gens)))


def symmetric(k: int) -> FiniteGroup:
    elems = list(itertools.permutations(range(k)))
    index = {p: i for i, p in enumerate(elems)}
    mul = np.array([[index[tuple(p[q[i]] for i in range(k))] for q in elems] for p in elems])
    gens = []
    for i in range(k - 1):
        t = list(range(k))
        t[i], t[i + 1] = t[i + 1], t[i]
        gens.append(index[tuple(t)])
    return FiniteGroup(mul, f"S{k}", tuple(elems), (), tuple(sorted(gens)))


def _matrix_group(generators, name: str) -> FiniteGroup:
    def key(M):
        return tuple(np.round(M, 8).ravel().tolist())

    ident = np.eye(generators[0].shape[0], dtype=complex)
    elems = [ident]
    seen = {key(ident)}
    queue = deque([ident])
    while queue:
        A = queue.popleft()
        for g in generators:
            B = A @ g
            if key(B) not in seen:
                seen.add(key(B))
                elems.append(B)
                queue.append(B)
                if len(elems) > MAX_ORDER:
                    raise GroupError("generated group is too large")
    index = {key(M): i for i, M in enumerate(elems)}
    mul = np.array([[index[key(A @ B)] for B in elems] for A in elems])
    gens = sorted({index[key(g)] for g in generators} | {index[key(np.linalg.inv(g))]
                                                        for g in generators})
    return FiniteGroup(mul, name, tuple(range(len(elems))), (), tuple(gens))


def quaternion() -> FiniteGroup:
    i = np.array([[1j, 0], [0, -1j]])
    j = np.array([[0, 1], [-1, 0]], dtype=complex)
    return _matrix_group([i, j], "Q8")


def make_group(config: dict) -> FiniteGroup:
    kind = config.get("type")
    try:
        if kind == "cyclic":
            return cyclic(int(config["n"]))
        if kind == "dihedral":
            return dihedral(int(config["n"]))
        if kind == "symmetric":
            k = int(config["n"])
            if k > 4:
                raise ConfigError(f"S{k} exceeds the order cap {MAX_ORDER}", "n")
            return symmetric(k)
        if kind == "quaternion":
            return quaternion()
        if kind == "product":
            return abelian_product(*[int(m) for m in config["orders"]])
        if kind == "table":
            return FiniteGroup(np.asarray(config["table"], dtype=int))
    except KeyError as exc:
        raise ConfigError(f"{kind} group needs {exc.args[0]!r}", str(exc.args[0])) from exc
    raise ConfigError(f"unknown group type {kind!r}", "type")


# --------------------------------------------------------------------------
# length functions

def _validate_psi(G: FiniteGroup, psi) -> np.ndarray:
    psi = np.asarray(psi)
    if np.iscomplexobj(psi):
        if np.max(np.abs(psi.imag)) > PSI_TOL:
            raise GroupError("psi must be real")
        psi = psi.real
    psi = psi.astype(float)
    if psi.shape != (G.order,):
        raise GroupError(f"psi needs {G.order} values")
    scale = max(float(np.max(np.abs(psi))), 1.0)
    if abs(psi[G.identity]) > PSI_TOL * scale:
        raise NonzeroAtIdentity(f"psi(e) = {psi[G.identity]:.3g}")
    bad = np.flatnonzero(np.abs(psi - psi[G.inv]) > PSI_TOL * scale)
    if bad.size:
        g = int(bad[0])
        raise NotSymmetricPsi(f"psi({g}) = {psi[g]:.6g} but psi({g}^-1) = {psi[G.inv[g]]:.6g}")
    psi = psi.copy()
    psi[G.identity] = 0.0
    return psi


def word_length(G: FiniteGroup, generators=None) -> np.ndarray:
    """Graph distance from the identity in the Cayley graph (BFS)."""
    gens = list(generators if generators is not None else G.default_generators)
    gens = sorted(set(gens) | {int(G.inv[g]) for g in gens})
    dist = np.full(G.order, -1)
    dist[G.identity] = 0
    queue = deque([G.identity])
    while queue:
        x = queue.popleft()
        for s in gens:
            y = G.mul[x, s]
            if dist[y] < 0:
                dist[y] = dist[x] + 1
                queue.append(y)
    if np.any(dist < 0):
        raise GroupError("generators do not generate the group")
    return dist.astype(float)


def indicator(G: FiniteGroup) -> np.ndarray:
    """``1 - delta_e``."""
    psi = np.ones(G.order)
    psi[G.identity] = 0.0
    return psi


def cocycle(G: FiniteGroup, vector=None, seed: int = 0) -> np.ndarray:
    """``||pi(g) v - v||^2`` for the left regular permutation representation pi."""
    v = np.asarray(vector, float) if vector is not None else \
        np.random.default_rng(seed).normal(size=G.order)
    # (pi(g) v)(x) = v(g^-1 x)
    moved = v[G.mul[G.inv[:, None], np.arange(G.order)[None, :]]]
    return np.sum((moved - v[None, :]) ** 2, axis=1)


def make_psi(G: FiniteGroup, spec) -> np.ndarray:
    if isinstance(spec, dict):
        kind = spec.get("type")
        scale = float(spec.get("scale", 1.0))
        if kind == "word-length":
            psi = word_length(G, spec.get("generators"))
        elif kind == "indicator":
            psi = indicator(G)
        elif kind == "cocycle":
            psi = cocycle(G, spec.get("vector"), int(spec.get("seed", 0)))
        elif kind == "table":
            psi = np.asarray(spec["values"], dtype=float)
        else:
            raise ConfigError(f"unknown psi type {kind!r}", "psi")
        return _validate_psi(G, scale * psi)
    if spec in ("word-length", "indicator", "cocycle"):
        return make_psi(G, {"type": spec})
    return _validate_psi(G, np.asarray(spec, dtype=float))


# --------------------------------------------------------------------------
# conditional negativity and the Gromov form

def gromov_form(G: FiniteGroup, psi) -> np.ndarray:
    """``K(g, h) = (psi(g) + psi(h) - psi(g^-1 h)) / 2``."""
    psi = np.asarray(psi, float)
    return 0.5 * (psi[:, None] + psi[None, :] - psi[G.quotient_index()])


@dataclass(frozen=True)
class ConditionalNegativityReport:
    conditionally_negative: bool
    max_eigen: float
    schoenberg_min_eigen: float
    gromov_min_eigen: float
    gromov_squared_min_eigen: float
    dual_generator_valid: bool | None
    quotient_dimension: int
    tolerance: float

    def to_dict(self) -> dict:
        return {"conditionallyNegative": self.conditionally_negative,
                "maxEigen": self.max_eigen, "schoenbergMinEigen": self.schoenberg_min_eigen,
                "gromovMinEigen": self.gromov_min_eigen,
                "gromovSquaredMinEigen": self.gromov_squared_min_eigen,
                "dualGeneratorValid": self.dual_generator_valid,
                "quotientDimension": self.quotient_dimension, "tolerance": self.tolerance}


def _psi_scale(psi) -> float:
    return max(float(np.max(np.abs(psi))), 1e-300)


def check_conditionally_negative(G: FiniteGroup, psi, grid: TimeGrid | None = None
                                 ) -> ConditionalNegativityReport:
    """Exact mean-zero Gram test plus Schoenberg's positive-definiteness check."""
    psi = _validate_psi(G, psi)
    N = G.order
    scale = _psi_scale(psi)
    tol = PSI_TOL * scale
    M = psi[G.quotient_index()]
    # orthonormal basis of the mean-zero subspace
    B = np.linalg.svd(np.eye(N) - 1.0 / N)[0][:, : N - 1]
    max_eig = float(np.linalg.eigvalsh(B.T @ M @ B).max()) if N > 1 else 0.0
    cn = max_eig <= tol
    if grid is None:
        nz = psi[psi > tol]
        grid = TimeGrid(1e-3 / nz.max(), 1e2 / nz.min(), 4) if nz.size else TimeGrid(1e-3, 1e2, 4)
    sch = min(float(np.linalg.eigvalsh(np.exp(-t * M)).min()) for t in grid.times)
    K = gromov_form(G, psi)
    k_min = float(np.linalg.eigvalsh(K).min())
    k2_min = float(np.linalg.eigvalsh(K * K).min())
    dual_ok = None
    if G.cyclic_factors:
        try:
            dual_generator(G, psi)
            dual_ok = True
        except GroupError:
            dual_ok = False
    rank = int(np.linalg.matrix_rank(K, tol=1e-9 * max(scale, 1.0)))
    return ConditionalNegativityReport(bool(cn), max_eig, sch, k_min, k2_min, dual_ok, rank, tol)


def require_conditionally_negative(G: FiniteGroup, psi) -> np.ndarray:
    psi = _validate_psi(G, psi)
    rep = check_conditionally_negative(G, psi)
    if not rep.conditionally_negative:
        raise NotConditionallyNegative(
            f"mean-zero Gram of psi has eigenvalue {rep.max_eigen:.3g} > 0")
    return psi


# --------------------------------------------------------------------------
# abelian dual picture

def characters(G: FiniteGroup) -> np.ndarray:
    """``X[k, g] = chi_k(g)`` for a product of cyclic groups, in the element order of G."""
    if not G.cyclic_factors:
        raise GroupError("characters are only tabulated for products of cyclic groups")
    orders = G.cyclic_factors
    elems = G.labels if len(orders) > 1 else [(g,) for g in G.labels]
    elems = np.array(elems, dtype=float).reshape(G.order, len(orders))
    phase = (elems / np.array(orders, float)) @ elems.T
    return np.exp(2j * np.pi * phase)


def to_dual(G: FiniteGroup, a) -> np.ndarray:
    """``F(chi) = sum_g a_g chi(g)``: the function on the dual group representing lambda(a)."""
    return characters(G) @ np.asarray(a)


def from_dual(G: FiniteGroup, F) -> np.ndarray:
    return np.conj(characters(G)).T @ np.asarray(F) / G.order


def dual_generator(G: FiniteGroup, psi):
    """The Markov generator on the dual group with uniform measure.

    ``q(chi, eta) = -(1/N) sum_g psi(g) chi(g) conj(eta(g))``; validated as a
    standard-semigroup generator, which is Schoenberg's theorem made explicit.
    """
    psi = _validate_psi(G, psi)
    X = characters(G)
    q = -(X * psi[None, :]) @ np.conj(X).T / G.order
    if np.max(np.abs(q.imag)) > 1e-10 * _psi_scale(psi):
        raise GroupError("dual generator is not real")
    try:
        return validate_generator(q.real, np.full(G.order, 1.0 / G.order))
    except ValueError as exc:
        raise GroupError(f"dual generator invalid: {exc}") from exc


# --------------------------------------------------------------------------
# the algebra

@dataclass(frozen=True)
class GroupAlgebra:
    G: FiniteGroup
    psi: np.ndarray
    K: np.ndarray = field(init=False, repr=False)
    quotient: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        psi = require_conditionally_negative(self.G, self.psi)
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "K", gromov_form(self.G, psi))
        object.__setattr__(self, "quotient", self.G.quotient_index())

    @property
    def N(self) -> int:
        return self.G.order

    @property
    def kernel_mask(self) -> np.ndarray:
        return self.psi <= PSI_TOL * max(_psi_scale(self.psi), 1.0)

    # representation and products ------------------------------------------
    def regular(self, a) -> np.ndarray:
        """``lambda(a)[x, y] = a[x y^-1]``."""
        a = np.asarray(a)
        idx = self.G.mul[np.arange(self.N)[:, None], self.G.inv[None, :]]
        return a[idx]

    def product(self, a, b) -> np.ndarray:
        """Coefficients of ``lambda(a) lambda(b)`` (convolution)."""
        return (self.regular(a) @ self.regular(b))[:, self.G.identity]

    def adjoint(self, a) -> np.ndarray:
        return np.conj(np.asarray(a)[self.G.inv])

    def modulus_squared(self, a) -> np.ndarray:
        """``|a|^2 = a* a``."""
        return self.product(self.adjoint(a), a)

    def trace(self, a) -> complex:
        return np.asarray(a)[self.G.identity]

    def from_matrix(self, X) -> np.ndarray:
        """Coefficients of a matrix in the image of lambda (its column at e)."""
        return np.asarray(X)[:, self.G.identity]

    def function(self, a, fn) -> np.ndarray:
        """Hermitian functional calculus ``fn(lambda(a))`` back in coefficients."""
        X = self.regular(a)
        X = 0.5 * (X + np.conj(X.T))
        w, V = np.linalg.eigh(X)
        return self.from_matrix((V * fn(w)) @ np.conj(V.T))

    def sqrt(self, a) -> np.ndarray:
        return self.function(a, lambda w: np.sqrt(np.maximum(w, 0.0)))

    def op_norm(self, a) -> float:
        return float(np.linalg.norm(self.regular(a), 2))

    def l1_norm(self, a) -> float:
        """``tau(|a|)``, ``|a| = (a* a)^{1/2}``."""
        return float(np.sum(np.linalg.svd(self.regular(a), compute_uv=False)) / self.N)

    # semigroup ---------------------------------------------------------------
    def generator(self, a) -> np.ndarray:
        return -self.psi * np.asarray(a)

    def semigroup(self, t: float, a) -> np.ndarray:
        return np.exp(-t * self.psi) * np.asarray(a)

    def average(self, t: float, a) -> np.ndarray:
        """``M_t a`` with multiplier ``(1 - exp(-t psi)) / (t psi)``."""
        z = t * self.psi
        m = np.ones_like(z)
        nz = z != 0
        m[nz] = -np.expm1(-z[nz]) / z[nz]
        return m * np.asarray(a)

    def kernel_projection(self, a) -> np.ndarray:
        return np.where(self.kernel_mask, np.asarray(a), 0)

    def time_grid(self, points_per_decade: int = 16) -> TimeGrid:
        nz = self.psi[~self.kernel_mask]
        if nz.size == 0:
            return TimeGrid(1e-4, 1e3, points_per_decade)
        return TimeGrid(1e-4 / nz.max(), 1e3 / nz.min(), points_per_decade)

    # gradient forms ------------------------------------------------------------
    def _assemble(self, W, a, b) -> np.ndarray:
        """``sum_{g,h} conj(a_g) b_h W(g, h) lambda_{g^-1 h}``."""
        vals = (np.conj(np.asarray(a))[:, None] * np.asarray(b)[None, :] * W).ravel()
        out = np.zeros(self.N, dtype=complex)
        np.add.at(out, self.quotient.ravel(), vals)
        return out

    def gamma(self, a, b) -> np.ndarray:
        """Gromov-form route to ``Gamma(f, h)``."""
        return self._assemble(self.K, a, b)

    def gamma2(self, a, b) -> np.ndarray:
        return self._assemble(self.K * self.K, a, b)

    def gamma_definition(self, a, b) -> np.ndarray:
        """``(L(f* h) - L(f*) h - f* L(h)) / 2`` computed with algebra products."""
        fs = self.adjoint(a)
        L = self.generator
        return 0.5 * (L(self.product(fs, b)) - self.product(L(fs), b) - self.product(fs, L(b)))

    def gamma2_definition(self, a, b) -> np.ndarray:
        L = self.generator
        return 0.5 * (L(self.gamma_definition(a, b)) - self.gamma_definition(a, L(b))
                      - self.gamma_definition(L(a), b))

    # norms ---------------------------------------------------------------------
    def _sup(self, a, quantity, grid: TimeGrid | None) -> float:
        grid = grid or self.time_grid()
        vals = [self.op_norm(quantity(t)) for t in grid.times]
        vals.append(self.op_norm(quantity(np.inf)))
        return float(np.sqrt(max(vals)))

    def _T(self, t, a):
        return self.kernel_projection(a) if np.isinf(t) else self.semigroup(t, a)

    def bmo(self, a, grid: TimeGrid | None = None) -> float:
        """``sup_t ||T_t(a* a) - (T_t a)*(T_t a)||^{1/2}``."""
        a = np.asarray(a, dtype=complex)
        return self._sup(a, lambda t: self._T(t, self.modulus_squared(a))
                         - self.modulus_squared(self._T(t, a)), grid)

    def BMO(self, a, grid: TimeGrid | None = None) -> float:
        """``sup_t ||T_t |a - T_t a|^2||^{1/2}``."""
        a = np.asarray(a, dtype=complex)
        return self._sup(a, lambda t: self._T(t, self.modulus_squared(a - self._T(t, a))), grid)

    def _check_kernel(self, a):
        a = np.asarray(a, dtype=complex)
        k = np.abs(a[self.kernel_mask])
        if k.size and k.max() > 1e-10 * max(np.linalg.norm(a), 1e-300):
            raise KernelComponent("element has a component on psi^-1(0); project it off first")
        return np.where(self.kernel_mask, 0, a)

    def _pair_weights(self, extra: bool) -> np.ndarray:
        psi = self.psi
        den = psi[:, None] + psi[None, :]
        if extra:
            den = den + psi[self.quotient]
        return np.where(den > 0, self.K / np.where(den > 0, den, 1.0), 0.0)

    def s_squared(self, a) -> np.ndarray:
        """Coefficients of ``int_0^inf T_s Gamma(T_s f) ds``."""
        a = self._check_kernel(a)
        return self._assemble(self._pair_weights(True), a, a)

    def g_squared(self, a) -> np.ndarray:
        """Coefficients of ``int_0^inf Gamma(T_s f) ds``."""
        a = self._check_kernel(a)
        return self._assemble(self._pair_weights(False), a, a)

    def h1_norms(self, a) -> tuple[float, float]:
        hS = float(np.real(self.trace(self.sqrt(self.s_squared(a)))))
        hG = float(np.real(self.trace(self.sqrt(self.g_squared(a)))))
        return hS, hG

    def norms(self, a, grid: TimeGrid | None = None) -> dict:
        a = np.asarray(a, dtype=complex)
        off = np.where(self.kernel_mask, 0, a)
        hS, hG = self.h1_norms(off)
        return {"bmo": self.bmo(a, grid), "BMO": self.BMO(a, grid), "h1S": hS, "h1G": hG}


# --------------------------------------------------------------------------
# checks and suites

def _random_elements(N: int, count: int, rng: np.random.Generator) -> np.ndarray:
    return (rng.normal(size=(count, N)) + 1j * rng.normal(size=(count, N))) / np.sqrt(2 * N)


@dataclass(frozen=True)
class GroupCurvatureReport:
    holds: bool
    min_eigen: float
    gromov_min_eigen: float
    semigroup_min: float
    sampled_gamma2_min: float
    cross_check_agrees: bool
    tolerance: float

    def to_dict(self) -> dict:
        return {"holds": self.holds, "minEigen": self.min_eigen,
                "gromovMinEigen": self.gromov_min_eigen, "semigroupMin": self.semigroup_min,
                "sampledGamma2Min": self.sampled_gamma2_min,
                "crossCheckAgrees": self.cross_check_agrees, "tolerance": self.tolerance}


def check_group_curvature(alg: GroupAlgebra, samples: int = 16, seed: int = 0
                          ) -> GroupCurvatureReport:
    """Gamma_2 >= 0 via PSD of ``K o K``; cross-checked through the semigroup kernels

    ``W_v(g, h) = K(g, h) (exp(-v psi(g^-1 h)) - exp(-v (psi(g) + psi(h))))``
    whose positivity is ``Gamma(T_v f) <= T_v Gamma(f)``.
    """
    scale = max(_psi_scale(alg.psi) ** 2, 1e-300)
    tol = 1e-10 * scale
    K2min = float(np.linalg.eigvalsh(alg.K * alg.K).min())
    Kmin = float(np.linalg.eigvalsh(alg.K).min())
    psi = alg.psi
    sem = np.inf
    for v in alg.time_grid(2).times:
        W = alg.K * (np.exp(-v * psi[alg.quotient]) - np.exp(-v * (psi[:, None] + psi[None, :])))
        sem = min(sem, float(np.linalg.eigvalsh(W).min()))
    rng = np.random.default_rng(seed)
    sampled = np.inf
    for a in _random_elements(alg.N, samples, rng):
        X = alg.regular(alg.gamma2(a, a))
        sampled = min(sampled, float(np.linalg.eigvalsh(0.5 * (X + np.conj(X.T))).min()))
    holds = K2min >= -tol
    holds_b = sem >= -1e-10 * max(_psi_scale(psi), 1e-300)
    return GroupCurvatureReport(bool(holds), K2min, Kmin, sem, sampled,
                                bool(holds == holds_b), tol)


def _subsuite(name, assertions, metrics, seed, tol=None):
    return SuiteReport(name, assertions, metrics, "", None, seed, tol)


def verify_gromov_formula(alg: GroupAlgebra, samples: int = 50, seed: int = 0,
                          tol: float = 1e-12) -> "SuiteReport":
    rng = np.random.default_rng(seed)
    err1 = err2 = 0.0
    for a, b in zip(_random_elements(alg.N, samples, rng), _random_elements(alg.N, samples, rng)):
        err1 = max(err1, float(np.max(np.abs(alg.gamma(a, b) - alg.gamma_definition(a, b)))))
        err2 = max(err2, float(np.max(np.abs(alg.gamma2(a, b) - alg.gamma2_definition(a, b)))))
    scale = max(_psi_scale(alg.psi), 1.0)
    return _subsuite("gromovFormula", {"gamma": err1 <= tol * scale,
                                       "gamma2": err2 <= tol * scale ** 2},
                     {"gammaError": err1, "gamma2Error": err2, "samples": samples}, seed, tol)


def verify_operator_kadison_schwarz(alg: GroupAlgebra, samples: int = 20, seed: int = 0
                                    ) -> "SuiteReport":
    rng = np.random.default_rng(seed)
    worst = np.inf
    for a in _random_elements(alg.N, samples, rng):
        for t in alg.time_grid(2).times:
            d = alg.semigroup(t, alg.modulus_squared(a)) - alg.modulus_squared(alg.semigroup(t, a))
            X = alg.regular(d)
            worst = min(worst, float(np.linalg.eigvalsh(0.5 * (X + np.conj(X.T))).min()))
    return _subsuite("operatorKadisonSchwarz", {"holds": worst >= -1e-12},
                     {"minEigen": worst, "samples": samples}, seed, 1e-12)


def verify_two_convexity(N: int = 12, samples: int = 500, seed: int = 0) -> "SuiteReport":
    """``tau[(A+B)^{1/2}] <= tau[A^{1/2}] + tau[B^{1/2}]`` on random PSD pairs."""
    rng = np.random.default_rng(seed)

    def tr_sqrt(X):
        return float(np.sum(np.sqrt(np.maximum(np.linalg.eigvalsh(X), 0.0)))) / X.shape[0]

    worst = -np.inf
    for _ in range(samples):
        rank = int(rng.integers(1, N + 1))
        A0 = rng.normal(size=(N, rank)) + 1j * rng.normal(size=(N, rank))
        B0 = rng.normal(size=(N, rank)) + 1j * rng.normal(size=(N, rank))
        A = A0 @ np.conj(A0.T)
        B = (B0 @ np.conj(B0.T)) * rng.uniform(0.01, 100)
        worst = max(worst, tr_sqrt(A + B) - tr_sqrt(A) - tr_sqrt(B))
    return _subsuite("twoConvexity", {"holds": worst <= 1e-10}, {"maxExcess": worst,
                                                                  "samples": samples}, seed, 1e-10)


def verify_abelian_consistency(G: FiniteGroup, psi, samples: int = 10, seed: int = 0,
                               tol: float = 1e-8) -> "SuiteReport":
    """Group stack vs. the commutative stack on the dual group."""

    alg = GroupAlgebra(G, psi)
    gen = dual_generator(G, alg.psi)
    sd = decompose(gen)
    grid = alg.time_grid()
    rng = np.random.default_rng(seed)
    worst = {"bmo": 0.0, "BMO": 0.0, "h1S": 0.0, "h1G": 0.0, "semigroup": 0.0, "gamma": 0.0}
    for a in _random_elements(G.order, samples, rng):
        F = to_dual(G, a)
        nc = alg.norms(a, grid)
        Fo = to_dual(G, np.where(alg.kernel_mask, 0, a))
        cs, cg = comm_h1(sd, gen, Fo) if np.any(~sd.kernel_mask) else (0.0, 0.0)
        comm = {"bmo": float(bmo_values(sd, F, grid)), "BMO": float(BMO_values(sd, F, grid)),
                "h1S": cs, "h1G": cg}
        for k in comm:
            worst[k] = max(worst[k], abs(nc[k] - comm[k]) / max(abs(comm[k]), 1.0))
        t = grid.times[len(grid.times) // 2]
        Tc = sd.apply_multiplier(np.exp(t * sd.eigenvalues), F)
        worst["semigroup"] = max(worst["semigroup"],
                                 float(np.max(np.abs(to_dual(G, alg.semigroup(t, a)) - Tc))))
        worst["gamma"] = max(worst["gamma"], float(np.max(np.abs(
            to_dual(G, alg.gamma(a, a)) - comm_gamma(gen, F, F)))))
    return _subsuite(f"abelianConsistency.{G.name}", {k: v < tol for k, v in worst.items()},
                     {"maxRelativeDifference": worst, "samples": samples}, seed, tol)


def verify_group_duality(alg: GroupAlgebra, samples: int = 200, seed: int = 0):
    """Noncommutative duality ratios over sampled (f, g)."""
    rep = check_group_curvature(alg)
    if not rep.holds:
        raise CurvatureFailed("Gamma_2 >= 0 fails for this length function")
    rng = np.random.default_rng(seed)
    grid = alg.time_grid(8)
    r1, r2 = [], []
    skipped = 0
    for i in range(samples):
        f = np.where(alg.kernel_mask, 0, _random_elements(alg.N, 1, rng)[0])
        g = f + 0.1 * _random_elements(alg.N, 1, rng)[0] if i % 2 else \
            _random_elements(alg.N, 1, rng)[0]
        pairing = abs(np.sum(f * np.conj(g)))
        if not np.any(f):
            skipped += 1
            continue
        hS, hG = alg.h1_norms(f)
        b = alg.bmo(g, grid)
        if b <= 1e-12 or hS <= 1e-12:
            skipped += 1
            continue
        r1.append(pairing / (np.sqrt(hS * hG) * b))
        r2.append(pairing / (hS * b))
    m1 = float(max(r1)) if r1 else 0.0
    m2 = float(max(r2)) if r2 else 0.0
    return DualityReport(samples, skipped, m1, m2, alg.G.name, seed, grid.to_dict(),
                         {"group": alg.G.name, "order": alg.N})


@dataclass(frozen=True)
class GroupHypothesisReport:
    bilinear_constant: float
    atom_h1_sup: float
    samples: int
    t_points: int
    seed: int

    def to_dict(self) -> dict:
        return {"bilinearConstant": self.bilinear_constant, "atomH1Sup": self.atom_h1_sup,
                "samples": self.samples, "tPoints": self.t_points, "seed": self.seed}


def verify_group_hypotheses(alg: GroupAlgebra, samples: int = 20, t_points: int = 12,
                                seed: int = 0) -> GroupHypothesisReport:
    """Estimate the bilinear constant and bound atom H1 norms.

    Bilinear: ``tau[(M_{8t} |h (T_t g)^{1/2}|^2)^{1/2}] / ((tau g)^{1/2} (tau|h|^2)^{1/2})``
    over positive ``g = k* k``.  Atoms: ``h (T_t g)^{1/2} - T_t(h (T_t g)^{1/2})`` with
    ``||h|| <= 1`` and ``tau(g) <= 1``.
    """
    rng = np.random.default_rng(seed)
    base = alg.time_grid()
    times = np.geomspace(base.t_min, base.t_max, t_points)
    c = 0.0
    atom_sup = 0.0
    for _ in range(samples):
        k = _random_elements(alg.N, 1, rng)[0]
        g = alg.modulus_squared(k)
        g = g / np.real(alg.trace(g))
        h = _random_elements(alg.N, 1, rng)[0]
        h = h / alg.op_norm(h)
        tau_h2 = float(np.real(alg.trace(alg.modulus_squared(h))))
        for t in times:
            root = alg.sqrt(alg.semigroup(t, g))
            x = alg.product(h, root)
            lhs = float(np.real(alg.trace(alg.sqrt(alg.average(8 * t, alg.modulus_squared(x))))))
            c = max(c, lhs / np.sqrt(tau_h2))
            atom = x - alg.semigroup(t, x)
            atom = np.where(alg.kernel_mask, 0, atom)
            if np.any(atom):
                atom_sup = max(atom_sup, alg.h1_norms(atom)[0])
    return GroupHypothesisReport(c, atom_sup, samples, t_points, seed)


GROUP_LIBRARY = (
    ("cyclic", {"type": "cyclic", "n": 6}),
    ("cyclic8", {"type": "cyclic", "n": 8}),
    ("klein", {"type": "product", "orders": [2, 2]}),
    ("S3", {"type": "symmetric", "n": 3}),
    ("D4", {"type": "dihedral", "n": 4}),
    ("Q8", {"type": "quaternion"}),
    ("S4", {"type": "symmetric", "n": 4}),
)
