"""Self-contained property checks behind ``sgtimber rule-checks``.

Each check compares the library against an oracle that does not share its
code path (brute-force expansions, closed-form moments, explicit Lagrange
products) and returns a :class:`CheckResult`.
"""
from __future__ import annotations

import itertools
import math
import time
from dataclasses import dataclass

import numpy as np

from .montecarlo import mc_expectation
from .multiindex import combination_coefficients, smolyak_set
from .params import ParameterSpace, sample_uniform
from .rules import clenshaw_curtis_nodes, level_to_knots_doubling
from .sparse_grid import build_sparse_grid, evaluate_on_grid, reduce


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


def telescoping_coefficients(indices) -> dict:
    """Expand ``sum_{i in I} prod_n (Q_{i_n} - Q_{i_n - 1})`` and collect the tensor terms."""
    out: dict = {}
    for idx in indices:
        for s in itertools.product((0, 1), repeat=len(idx)):
            lower = tuple(a - b for a, b in zip(idx, s))
            if min(lower) >= 1:
                out[lower] = out.get(lower, 0) + (-1) ** sum(s)
    return {k: v for k, v in out.items() if v != 0}


def uniform_monomial_moment(alpha, ranges) -> float:
    """``E[prod p_n^alpha_n]`` for independent uniforms."""
    val = 1.0
    for k, (a, b) in zip(alpha, ranges):
        val *= (b ** (k + 1) - a ** (k + 1)) / ((k + 1) * (b - a))
    return val


def lagrange_product(nodes_per_dim, values, x) -> float:
    """Tensor Lagrange interpolant by the explicit product formula."""
    total = 0.0
    for multi in itertools.product(*[range(len(nd)) for nd in nodes_per_dim]):
        basis = 1.0
        for n, j in enumerate(multi):
            nd = nodes_per_dim[n]
            for k, xk in enumerate(nd):
                if k != j:
                    basis *= (x[n] - xk) / (nd[j] - xk)
        total += values[multi] * basis
    return total


def check_combination(max_dim: int = 3, max_level: int = 4) -> CheckResult:
    bad = []
    for N in range(1, max_dim + 1):
        for w in range(max_level + 1):
            idx = smolyak_set(N, w)
            c = combination_coefficients(idx)
            if sum(c.values()) != 1 or c != telescoping_coefficients(idx):
                bad.append((N, w))
    sizes = [reduce(build_sparse_grid(ParameterSpace([(0.3, 1.0), (-1.0, 2.0)]), smolyak_set(2, w))).size
             for w in range(5)]
    ok = not bad and sizes == [1, 5, 13, 29, 65]
    return CheckResult("combination coefficients", ok, f"mismatches={bad} N=2 sizes={sizes}")


def check_quadrature(max_level: int = 4) -> CheckResult:
    ranges = [(0.0, 1.0), (0.3, 1.0), (-1.0, 2.0)]
    space = ParameterSpace(ranges)
    worst = 0.0
    for w in range(max_level + 1):
        grid = reduce(build_sparse_grid(space, smolyak_set(3, w)))
        for alpha in itertools.product(range(w + 1), repeat=3):
            if sum(alpha) > w:
                continue
            q = grid.weights @ np.prod(grid.points ** np.array(alpha), axis=1)
            exact = uniform_monomial_moment(alpha, ranges)
            worst = max(worst, abs(q - exact) / max(abs(exact), 1e-300))
    return CheckResult("quadrature exactness", bool(worst <= 1e-10), f"max relative error {worst:.2e}")


def check_interpolation(max_level: int = 3, samples: int = 100, seed: int = 7) -> CheckResult:
    space = ParameterSpace([(0.0, 1.0), (-0.5, 2.0)])

    def f(p):
        return math.exp(0.7 * p[0]) * math.cos(p[1]) + p[0] * p[1] ** 3

    nodal = oracle = 0.0
    queries = sample_uniform(space, samples, seed)
    for w in range(max_level + 1):
        grid = build_sparse_grid(space, smolyak_set(2, w))
        s = evaluate_on_grid(f, grid)
        nodal = max(nodal, float(np.max(np.abs(s(s.reduced.points) - s.values[:, 0]))))
        ref = np.zeros(samples)
        for idx, c, tg in grid.terms:
            nodes = [r.nodes for r in tg.rules]
            vals = np.array([f(p) for p in itertools.product(*nodes)]).reshape(tg.shape)
            ref += c * np.array([lagrange_product(nodes, vals, q) for q in queries])
        oracle = max(oracle, float(np.max(np.abs(s(queries) - ref))))
    ok = nodal <= 1e-10 and oracle <= 1e-12
    return CheckResult("interpolation contract", ok, f"nodal {nodal:.2e}, per-tensor oracle {oracle:.2e}")


def check_nesting(max_level: int = 7) -> CheckResult:
    ok = True
    for a, b in [(-1.0, 1.0), (0.3, 1.0), (0.03, 0.1), (1.0, 8.0)]:
        for k in range(1, max_level):
            coarse = set(clenshaw_curtis_nodes(level_to_knots_doubling(k), a, b).tolist())
            fine = set(clenshaw_curtis_nodes(level_to_knots_doubling(k + 1), a, b).tolist())
            ok &= coarse <= fine
    return CheckResult("Clenshaw-Curtis nesting", bool(ok), "levels bit-identical across refinements" if ok else "broken")


def mc_slope(seeds: int = 20, counts=(100, 1000, 10000, 100000)) -> float:
    """Mean log-log slope of the Monte Carlo error for ``E[p^2] = 1/3`` on ``U(0, 1)``."""
    space = ParameterSpace([(0.0, 1.0)])
    logs = []
    for seed in range(seeds):
        est = mc_expectation(lambda p: p[0] ** 2, space, max(counts), seed, checkpoints=counts)
        logs.append([math.log(abs(e.mean - 1.0 / 3.0)) for e in est])
    return float(np.polyfit(np.log(counts), np.mean(logs, axis=0), 1)[0])


def check_mc_rate() -> CheckResult:
    slope = mc_slope()
    return CheckResult("Monte Carlo rate", -0.65 <= slope <= -0.35, f"slope {slope:.3f}")


ALL_CHECKS = (check_combination, check_quadrature, check_interpolation, check_nesting, check_mc_rate)


def run_rule_checks() -> list[CheckResult]:
    results = []
    for check in ALL_CHECKS:
        t = time.perf_counter()
        r = check()
        results.append(CheckResult(r.name, r.passed, r.detail, time.perf_counter() - t))
    return results
