"""Independent numerical validation of operators along three routes.

Symbolic: exact annihilation on monomials through pushforward moments.
Quadrature: Gauss-Hermite integration of (A f)(P(z)) for smooth
non-polynomial f. Monte Carlo: seeded chunked sampling with a five
standard-error gate, so a correct operator fails a single test with
probability below 1e-6.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

import numpy as np

from .gaussian import QuadratureRule, chunk_indices, chunk_normals, gauss_hermite_rule
from .noncentral import (NoncentralParams, density_integral, noncentral_pdf,
                         sample_noncentral)
from .operators import DiffOperator, expectation_applied
from .poly import Polynomial
from .testfunctions import TestFunction, default_suite, monomial

Target = Union[Polynomial, NoncentralParams]


@dataclass(frozen=True)
class CheckResult:
    name: str
    residual: float
    tolerance: float
    passed: bool
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"name": self.name, "residual": self.residual,
                "tolerance": self.tolerance, "pass": self.passed,
                "params": self.params}


@dataclass(frozen=True)
class VerificationReport:
    method: str  # symbolic | quadrature | monte-carlo | density
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_dict(self) -> dict:
        return {"method": self.method,
                "tests": [c.to_dict() for c in self.checks],
                "pass": self.passed}


def verify_symbolic(op: DiffOperator, P: Polynomial,
                    max_degree: int = 30) -> VerificationReport:
    """Exact E[(A x^n)(W)] for n = 0..max_degree; pass only on exact zeros."""
    checks = []
    for n in range(max_degree + 1):
        residual = expectation_applied(op, P, Polynomial.monomial(n))
        checks.append(CheckResult(
            name=f"monomial({n})", residual=float(residual), tolerance=0.0,
            passed=(residual == 0), params={"degree": n}))
    return VerificationReport(method="symbolic", checks=tuple(checks))


def operator_values(op: DiffOperator, f: TestFunction, w: np.ndarray) -> np.ndarray:
    """(A f) evaluated at the points w."""
    total = np.zeros_like(w, dtype=float)
    for m, pm in enumerate(op.coefficients):
        if pm.is_zero:
            continue
        total = total + pm.eval_float(w) * f.derivative(w, m)
    return total


def target_expectation(target: Target, h: TestFunction,
                       rule: Optional[QuadratureRule] = None) -> float:
    """Quadrature estimate of E[h(W)] for W = P(Z) or W noncentral chi-square."""
    if isinstance(target, Polynomial):
        if rule is None:
            rule = gauss_hermite_rule(201)
        z, wts = rule.arrays()
        return float(np.dot(wts, h(target.eval_float(z))))
    from scipy.integrate import quad
    cutoff = target.density_cutoff()
    value, _ = quad(lambda x: h(x) * noncentral_pdf(x, target), 0.0, cutoff,
                    epsabs=1e-13, epsrel=1e-12, limit=400)
    return value


def verify_quadrature(op: DiffOperator, P: Polynomial,
                      suite: Sequence[TestFunction] = (),
                      nodes: int = 201, tol: float = 1e-8) -> VerificationReport:
    """Residual sum(w_i * (A f)(P(z_i))) per suite function."""
    if nodes < 50:
        raise ValueError("need at least 50 quadrature nodes")
    suite = tuple(suite) or default_suite()
    for f in suite:
        f.derivative(0.0, op.order)  # raises when the order is unavailable
    rule = gauss_hermite_rule(nodes)
    z, wts = rule.arrays()
    w = P.eval_float(z)
    checks = []
    for f in suite:
        residual = float(np.dot(wts, operator_values(op, f, w)))
        checks.append(CheckResult(
            name=f.name, residual=residual, tolerance=tol,
            passed=abs(residual) <= tol, params={"nodes": nodes}))
    return VerificationReport(method="quadrature", checks=tuple(checks))


def verify_monte_carlo(op: DiffOperator, target: Target, f: TestFunction,
                       samples: int = 1_000_000, seed: int = 0) -> VerificationReport:
    """Seeded Monte Carlo estimate of E[(A f)(W)] with a 5-standard-error gate.

    Sampling is chunked by (seed, chunk index), so the estimate is identical
    regardless of chunking or threading.
    """
    if samples < 10_000:
        raise ValueError("need at least 1e4 samples")
    total = 0.0
    total_sq = 0.0
    if isinstance(target, Polynomial):
        for idx in chunk_indices(samples):
            z = chunk_normals(seed, idx, samples)
            vals = operator_values(op, f, target.eval_float(z))
            total += float(vals.sum())
            total_sq += float(np.dot(vals, vals))
    else:
        for idx, x in sample_noncentral(target, seed, samples):
            vals = operator_values(op, f, x)
            total += float(vals.sum())
            total_sq += float(np.dot(vals, vals))
    mean = total / samples
    variance = max(total_sq / samples - mean * mean, 0.0) * samples / (samples - 1)
    se = float(np.sqrt(variance / samples))
    check = CheckResult(
        name=f.name, residual=mean, tolerance=5.0 * se,
        passed=abs(mean) <= 5.0 * se,
        params={"samples": samples, "seed": seed, "standard_error": se})
    return VerificationReport(method="monte-carlo", checks=(check,))


def verify_all(op: DiffOperator, P: Polynomial,
               suite: Sequence[TestFunction] = (),
               methods: Sequence[str] = ("symbolic", "quadrature", "monte-carlo"),
               max_degree: int = 30, nodes: int = 201, tol: float = 1e-8,
               samples: int = 1_000_000, seed: int = 0) -> list[VerificationReport]:
    """Run the requested verification routes against one operator."""
    suite = tuple(suite) or default_suite()
    reports = []
    for method in methods:
        if method == "symbolic":
            reports.append(verify_symbolic(op, P, max_degree))
        elif method == "quadrature":
            reports.append(verify_quadrature(op, P, suite, nodes, tol))
        elif method in ("mc", "monte-carlo"):
            checks = []
            for f in suite:
                rep = verify_monte_carlo(op, P, f, samples, seed)
                checks.extend(rep.checks)
            reports.append(VerificationReport(method="monte-carlo",
                                              checks=tuple(checks)))
        else:
            raise ValueError(f"unknown verification method {method!r}")
    return reports


def vector_quadrature_residual(vec, P: Polynomial, f: TestFunction,
                               nodes: int = 201) -> float:
    """Numerical value of a term vector: sum of coeff * E[Z^i f^(j)(P(Z))].

    A sound identity has value zero up to rule error, so this is the
    numerical soundness check for generated identities.
    """
    rule = gauss_hermite_rule(nodes)
    z, wts = rule.arrays()
    w = P.eval_float(z)
    total = 0.0
    for (i, j), c in vec.items():
        total += float(c) * float(np.dot(wts, z ** i * f.derivative(w, j)))
    return total


def verify_noncentral_operator(params: NoncentralParams,
                               suite: Sequence[TestFunction] = (),
                               tol: float = 1e-8) -> VerificationReport:
    """Integrate (A f)(x) against the noncentral chi-square density.

    The operator is the second-order one for (k, lam); residuals are taken
    over (0, cutoff) with the exponentially small tail neglected, and the
    cutoff is recorded in each check.
    """
    from .catalog import noncentral_chi2_operator
    op = noncentral_chi2_operator(params.k, params.lam)
    suite = tuple(suite) or default_suite()
    cutoff = params.density_cutoff()
    checks = []
    for f in suite:
        f.derivative(0.0, op.order)
        residual = density_integral(
            params, lambda x, f=f: float(operator_values(op, f, np.asarray(x))))
        checks.append(CheckResult(
            name=f.name, residual=residual, tolerance=tol,
            passed=abs(residual) <= tol,
            params={"k": params.k, "lambda": params.lam, "cutoff": cutoff}))
    return VerificationReport(method="density", checks=tuple(checks))


def mutation_controls(op: DiffOperator, P: Polynomial,
                      suite: Sequence[TestFunction] = (),
                      nodes: int = 201, tol: float = 1e-8) -> list[tuple[int, int, bool]]:
    """Bump each stored coefficient by +1 and record whether quadrature fails.

    Returns (order, degree, detected) triples; detected means at least one
    suite function exceeded tolerance, which a faithful operator suite must
    achieve for every slot.
    """
    suite = tuple(suite) or default_suite()
    results = []
    for m, pm in enumerate(op.coefficients):
        width = max(pm.degree + 1, 1)
        for d in range(width):
            bumped = list(pm.coeffs) + [0] * (d + 1 - len(pm.coeffs))
            bumped[d] += 1
            rows = [list(p.coeffs) for p in op.coefficients]
            rows[m] = bumped
            mutant = DiffOperator.from_rows(rows)
            report = verify_quadrature(mutant, P, suite, nodes, tol)
            results.append((m, d, not report.passed))
    return results
