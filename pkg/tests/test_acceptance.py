"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``[PASS]``/``[FAIL]`` line (visible in ``pytest -v``
output) before asserting.
"""

from __future__ import annotations

import json
import time

import numpy as np
import pytest

from cdc.cli import main
from cdc.gamma import check_curvature
from cdc.groups import (GROUP_LIBRARY, GroupAlgebra, check_group_curvature, cocycle, cyclic,
                        indicator, make_group, symmetric, verify_abelian_consistency,
                        verify_gromov_formula, verify_two_convexity, word_length)
from cdc.norms import g_squared, h1_norms, s_squared, square_function_quadrature
from cdc.poisson import check_subordination_inequalities, poisson_by_subordination, subordinate
from cdc.sampling import eigen_fields, positive_fields
from cdc.semigroup import decompose
from cdc.suites import (estimate_hypotheses, john_nirenberg_ratios, size_sweep,
                          duality_sweep, equivalence_sweep, verify_carleson,
                          verify_generator_axioms, verify_meyer_identity, verify_norm_equivalence)
from cdc.zoo import family, two_state

ZOO = ("cycle", "path", "complete", "star", "hypercube", "birth-death", "random-reversible")
SIZES = (2, 4, 8, 16, 32, 64)
CURVED = ("cycle", "path", "complete")


@pytest.fixture
def verdict(capsys):
    def emit(criterion: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {criterion:>2}: {detail}")
        assert ok, detail
    return emit


def test_criterion_01_axioms_on_zoo(verdict):
    start = time.perf_counter()
    failed = []
    for kind in ZOO:
        for n in SIZES:
            rep = verify_generator_axioms(family(kind, n, seed=0))
            if not rep.passed:
                failed.append(f"{kind}/{n}:{rep.failed}")
    elapsed = time.perf_counter() - start
    verdict(1, not failed and elapsed < 30,
            f"{len(ZOO)} families x n in {SIZES}, failures={failed}, {elapsed:.1f}s (< 30 s)")


def test_criterion_02_meyer_constant(verdict):
    pairs, worst, fits = 0, 0.0, []
    for kind, n in (("path", 8), ("random-reversible", 6), ("cycle", 5)):
        gen = family(kind, n, seed=1)
        rep = verify_meyer_identity(gen, decompose(gen), samples=40, s_points=8, seed=2)
        pairs += rep.metrics["pairs"]
        worst = max(worst, rep.metrics["residual"])
        fits.append(rep.metrics["integerC"])
        assert "gammaConvention" in rep.metrics and "fittedC" in rep.metrics
    ok = pairs >= 200 and worst < 1e-8 and set(fits) == {2}
    verdict(2, ok, f"c={sorted(set(fits))} over {pairs} (f, s) pairs, relative residual "
                   f"{worst:.2e} (< 1e-8)")


def test_criterion_03_dual_path_oracles(verdict):
    rng = np.random.default_rng(3)
    sq_err, p_err, count = 0.0, 0.0, 0
    for kind, n in (("cycle", 4), ("path", 8), ("complete", 12), ("random-reversible", 16)):
        gen = family(kind, n, seed=4)
        sd = decompose(gen)
        F = eigen_fields(sd, 25, rng)
        count += F.shape[1]
        for exact_fn, k in ((s_squared, "S"), (g_squared, "G")):
            exact = exact_fn(sd, gen, F)
            quad = square_function_quadrature(gen, sd, F, kind=k)
            sq_err = max(sq_err, float(np.max(np.abs(exact - quad) / np.abs(exact).max(axis=0))))
        ps = subordinate(sd)
        G = rng.normal(size=(n, 4))
        for y in (1e-3, 0.1, 1.0, 10.0):
            a = ps.apply(y, G)
            b = poisson_by_subordination(gen, y, G)
            p_err = max(p_err, float(np.max(np.abs(a - b)) / np.max(np.abs(a))))
    ok = count >= 100 and sq_err < 1e-6 and p_err < 1e-6
    verdict(3, ok, f"square functions over {count} samples rel err {sq_err:.1e}; "
                   f"P_t routes rel err {p_err:.1e} (< 1e-6)")


def test_criterion_04_curvature(verdict):
    group_fail, combos = [], 0
    for name, cfg in GROUP_LIBRARY:
        G = make_group(cfg)
        lengths = {"indicator": indicator(G), "cocycle": cocycle(G, seed=0)}
        if name != "Q8":  # word length on {i, j} is not conditionally negative for Q8
            lengths["word-length"] = word_length(G)
        for label, psi in lengths.items():
            rep = check_group_curvature(GroupAlgebra(G, psi))
            combos += 1
            if not (rep.holds and rep.cross_check_agrees):
                group_fail.append(f"{name}/{label}")
    disagree = [f"{k}/{n}" for k in ZOO for n in SIZES
                if not check_curvature(family(k, n, seed=0)).cross_check_agrees]
    ok = not group_fail and not disagree and combos >= 10
    verdict(4, ok, f"{len(GROUP_LIBRARY)} groups, {combos} (group, psi) pairs with Gamma_2 >= 0 "
                   f"(failures {group_fail}); check agreement on {len(ZOO) * len(SIZES)} "
                   f"zoo members (disagreements {disagree})")


def test_criterion_05_hgs(verdict):
    rng = np.random.default_rng(5)
    total, worst = 0, -np.inf
    for kind, n in (("cycle", 8), ("path", 12), ("complete", 6), ("hypercube", 16)):
        gen = family(kind, n)
        sd = decompose(gen)
        assert check_curvature(gen, sd).holds
        hS, hG = h1_norms(sd, gen, eigen_fields(sd, 250, rng))
        total += hS.size
        worst = max(worst, float(np.max(hG - 2 * hS)))
    verdict(5, total >= 1000 and worst <= 1e-10,
            f"max(h1G - 2 h1S) = {worst:.2e} over {total} samples")


def test_criterion_06_john_nirenberg(verdict):
    diff, ranges = 0.0, {}
    for n in (4, 8, 16, 32):
        gen = family("cycle", n)
        rep = john_nirenberg_ratios(gen, decompose(gen), samples=500, seed=6)
        diff = max(diff, rep.metrics["p2Difference"])
        ranges[n] = rep.metrics
    sweeps = {}
    for p in (1, 4):
        sweeps[f"p{p}Max"] = size_sweep({n: m[f"p{p}RatioMax"] for n, m in ranges.items()})
        sweeps[f"p{p}InvMin"] = size_sweep({n: 1 / m[f"p{p}RatioMin"] for n, m in ranges.items()})
    stable = all(s["stable"] for s in sweeps.values())
    spans = {p: (min(m[f"p{p}RatioMin"] for m in ranges.values()),
                 max(m[f"p{p}RatioMax"] for m in ranges.values())) for p in (1, 4)}
    verdict(6, diff < 1e-12 and stable,
            f"|jn_2 - bmo| <= {diff:.1e} on 500 samples x 4 sizes; ratio spans "
            f"p=1 [{spans[1][0]:.3f}, {spans[1][1]:.3f}], p=4 [{spans[4][0]:.3f}, "
            f"{spans[4][1]:.3f}], stable within 2x: {stable}")


def test_criterion_07_duality_sweep(verdict):
    start = time.perf_counter()
    rep = duality_sweep(CURVED, (4, 8, 16, 32), samples=500, seed=7)
    elapsed = time.perf_counter() - start
    growth = max(g for kind in CURVED for key in ("maxRatioC1", "maxRatioC2")
                 for g in rep.metrics[kind][key]["growth"])
    verdict(7, rep.passed and elapsed < 300,
            f"finite, stable ratios on {CURVED} (worst growth {growth:.2f} <= 2), 500 pairs "
            f"per size, {elapsed:.1f}s (< 300 s)")


def test_criterion_08_subordination_inequalities(verdict):
    rng = np.random.default_rng(8)
    violations, pairs, worst = 0, 0, -np.inf
    for kind, n in (("cycle", 8), ("path", 6), ("star", 5), ("random-reversible", 10)):
        sd = decompose(family(kind, n, seed=8))
        rep = check_subordination_inequalities(subordinate(sd), positive_fields(n, 500, rng))
        violations += rep.violations
        pairs += rep.pairs
        worst = max(worst, rep.max_violation_ratio, rep.max_violation_difference)
    verdict(8, violations == 0,
            f"{violations} violations over 500 nonnegative samples x {pairs} (t, y) pairs "
            f"(worst normalized excess {worst:.1e})")


def test_criterion_09_carleson(verdict):
    bound, cp = 0.0, {}
    for n in (4, 8, 16, 32):
        gen = family("cycle", n)
        rep = verify_carleson(gen, decompose(gen), measures=20, samples=10, seed=9, p=2.0)
        assert rep.metrics["pairs"] >= 200
        bound = max(bound, rep.metrics["bmoBoundRatio"])
        cp[n] = rep.metrics["empiricalCp"]
    sweep = size_sweep(cp)
    inv = size_sweep({n: 1 / v for n, v in cp.items()})
    ok = bound <= 37 and all(np.isfinite(list(cp.values()))) and sweep["stable"] and inv["stable"]
    verdict(9, ok, f"BMO(P) bound ratio <= {bound:.3f} (<= 37) on 200 (g, nu) per size; "
                   f"c_2 = {', '.join(f'{v:.3f}' for v in cp.values())}")


def test_criterion_10_norm_equivalence(verdict):
    hyp = estimate_hypotheses(two_state(1.0, 1.0))
    gen = family("cycle", 8)
    single = verify_norm_equivalence(gen, decompose(gen), atoms=100, t_points=50, samples=100)
    sweep = equivalence_sweep(CURVED, (4, 8, 16, 32), atoms=100, t_points=50, seed=10)
    ok = abs(hyp.r - 1) <= 0.05 and single.passed and sweep.passed
    verdict(10, ok, f"r = {hyp.r:.4f}; atom H1 sup {single.metrics['atomH1Sup']:.3f} over "
                    f"50 t x 100 atoms; two-sided ratio sweeps stable: {sweep.passed}")


def test_criterion_11_noncommutative(verdict):
    worst_ab = 0.0
    for n in (2, 3, 4, 6, 8):
        G = cyclic(n)
        for psi in (word_length(G), cocycle(G, seed=n)):
            rep = verify_abelian_consistency(G, psi, samples=10, seed=11, tol=1e-8)
            worst_ab = max(worst_ab, *rep.metrics["maxRelativeDifference"].values())
            assert rep.passed, rep.metrics
    S3 = symmetric(3)
    gromov = verify_gromov_formula(GroupAlgebra(S3, word_length(S3)), samples=50, seed=11)
    convex = verify_two_convexity(12, samples=500, seed=11)
    ok = worst_ab < 1e-8 and gromov.passed and convex.passed
    verdict(11, ok, f"abelian consistency {worst_ab:.1e} (< 1e-8) on Z_2..Z_8; Gromov vs "
                    f"definition {gromov.metrics['gammaError']:.1e} (< 1e-12) on S3; "
                    f"2-convexity on 500 PSD pairs")


def test_criterion_12_determinism(verdict, tmp_path):
    cfg = tmp_path / "scenario.json"
    cfg.write_text(json.dumps({"generator": {"type": "cycle", "n": 8}, "suites": ["all"],
                               "seed": 7}))
    blobs = []
    for name in ("first", "second"):
        out = tmp_path / name
        assert main(["run", str(cfg), "--out", str(out)]) == 0
        blobs.append((out / "report.json").read_bytes())
    verdict(12, blobs[0] == blobs[1],
            f"two runs of cdc run (cycle C_8, all suites, seed 7) byte-identical "
            f"({len(blobs[0])} bytes)")
