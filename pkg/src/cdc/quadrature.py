"""Globally adaptive composite Gauss-Legendre quadrature for vector integrands.

Used only as an independent oracle against the closed-form spectral integrals.
"""

from __future__ import annotations

import heapq
from functools import lru_cache
from typing import Callable

import numpy as np


@lru_cache(maxsize=8)
def _rule(order: int):
    return np.polynomial.legendre.leggauss(order)


def _panel(fn, a: float, b: float, order: int):
    x, w = _rule(order)
    half = 0.5 * (b - a)
    nodes = a + half * (x + 1.0)
    vals = np.asarray(fn(nodes))
    return half * np.tensordot(w, vals, axes=(0, 0))


def integrate(fn: Callable[[np.ndarray], np.ndarray], a: float, b: float, *,
              rtol: float = 1e-10, atol: float = 0.0, order: int = 16,
              initial_panels: int = 8, max_panels: int = 4000) -> np.ndarray:
    """Integrate ``fn`` over ``[a, b]``.

    ``fn`` maps a 1-d array of nodes to an array whose first axis runs over
    the nodes.  Each panel's error is estimated by comparing it with the sum
    over its two halves; the worst panel is bisected until the summed error
    estimate is below ``max(atol, rtol * max|I|)``.
    """
    edges = np.linspace(a, b, initial_panels + 1)
    heap = []
    total = None
    counter = 0
    for lo, hi in zip(edges[:-1], edges[1:]):
        coarse = _panel(fn, lo, hi, order)
        mid = 0.5 * (lo + hi)
        fine = _panel(fn, lo, mid, order) + _panel(fn, mid, hi, order)
        err = float(np.max(np.abs(fine - coarse)))
        heapq.heappush(heap, (-err, counter, lo, hi, fine))
        counter += 1
        total = fine if total is None else total + fine

    while True:
        err_sum = sum(-h[0] for h in heap)
        scale = float(np.max(np.abs(total))) if np.size(total) else 0.0
        if err_sum <= max(atol, rtol * scale) or len(heap) >= max_panels:
            break
        neg_err, _, lo, hi, val = heapq.heappop(heap)
        total = total - val
        mid = 0.5 * (lo + hi)
        for plo, phi in ((lo, mid), (mid, hi)):
            coarse = _panel(fn, plo, phi, order)
            pm = 0.5 * (plo + phi)
            fine = _panel(fn, plo, pm, order) + _panel(fn, pm, phi, order)
            err = float(np.max(np.abs(fine - coarse)))
            heapq.heappush(heap, (-err, counter, plo, phi, fine))
            counter += 1
            total = total + fine
    return total


def integrate_log(fn: Callable[[np.ndarray], np.ndarray], s_lo: float, s_hi: float,
                  **kwargs) -> np.ndarray:
    """Integrate ``fn(s) ds`` over ``[s_lo, s_hi]`` after the substitution s = e^u."""

    def g(u):
        s = np.exp(u)
        vals = np.asarray(fn(s))
        return vals * s.reshape((-1,) + (1,) * (vals.ndim - 1))

    return integrate(g, np.log(s_lo), np.log(s_hi), **kwargs)
