"""Truncated Laplacian solvers and geometry, backed by the C++ core."""

import json

from . import _core
from ._core import (
    BracketFailure,
    HypothesisViolation,
    NonexistenceThreshold,
    RadialProfile,
    critical_drift_gap_check,
    critical_eigen_profile,
    eigenvalues,
    interior_ball_delta,
    mu_lower_bound,
    pk_minus,
    pk_plus,
    profile_const_b,
    profile_minus_b,
    profile_weighted,
)

__all__ = [
    "BracketFailure",
    "HypothesisViolation",
    "NonexistenceThreshold",
    "RadialProfile",
    "classify",
    "critical_drift_gap_check",
    "critical_eigen_profile",
    "eigenvalues",
    "estimate_mu1",
    "interior_ball_delta",
    "mu_lower_bound",
    "pk_minus",
    "pk_plus",
    "profile_const_b",
    "profile_minus_b",
    "profile_weighted",
    "psi",
    "solve",
    "verify",
]


def _domain(domain):
    """Accept a dict, a JSON string, or a path to a JSON file."""
    if isinstance(domain, dict):
        return json.dumps(domain)
    text = str(domain)
    if text.lstrip().startswith("{"):
        return text
    with open(text) as fh:
        return fh.read()


def classify(domain):
    return _core.classify(_domain(domain))


def psi(domain, x):
    return _core.psi(_domain(domain), x)


def solve(domain, h, k=1, b=0.0, f=-1.0, b_sign="plus", method="policy"):
    return _core.solve(_domain(domain), h, k, str(b), f, b_sign, method)


def estimate_mu1(domain, h, tol=1e-2):
    return _core.estimate_mu1(_domain(domain), h, tol)


def verify(suite="all", seed=42, tolerance_scale=1.0):
    return json.loads(_core.verify(suite, seed, tolerance_scale))
