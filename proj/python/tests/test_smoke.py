import math

import numpy as np
import pytest

import trunclap

DISK = {"dim": 2, "body": {"type": "ball", "center": [0, 0], "radius": 1}}
SQUARE = {"dim": 2, "body": {"type": "box", "lo": [-1, -1], "hi": [1, 1]}}


def test_truncated_sums():
    m = np.diag([3.0, -1.0, 2.0])
    assert trunclap.pk_plus(m, 2) == pytest.approx(5.0)
    assert trunclap.pk_minus(m, 1) == pytest.approx(-1.0)
    rng = np.random.default_rng(0)
    a = rng.standard_normal((4, 4))
    a = a + a.T
    assert trunclap.pk_plus(a, 2) == pytest.approx(np.sort(np.linalg.eigvalsh(a))[-2:].sum(), abs=1e-12)
    assert trunclap.eigenvalues(a) == pytest.approx(np.linalg.eigvalsh(a), abs=1e-12)


def test_radial_profiles():
    p = trunclap.profile_const_b(0.5, 1.0, 1)
    assert p(0.0) == pytest.approx(4 * math.log(2) - 2, abs=1e-12)
    assert p.regime == "const_b"
    w = trunclap.profile_weighted("radial:r", 0.8, 1)
    assert w(0.0) == pytest.approx(-0.5 * math.log(0.36), abs=1e-8)
    with pytest.raises(trunclap.NonexistenceThreshold):
        trunclap.profile_const_b(1.2, 1.0, 1)


def test_classify():
    assert trunclap.classify(SQUARE)["d"] == 1
    assert trunclap.classify(SQUARE)["gj"] == {1: False}
    assert trunclap.classify(DISK)["cj_max"] == 2


def test_solve_disk():
    out = trunclap.solve(DISK, h=1 / 16, b=0)
    assert out["outcome"] == "converged"
    r2 = (out["positions"] ** 2).sum(axis=1)
    assert np.max(np.abs(out["field"] - 0.5 * (1 - r2))) < 1e-10


def test_psi_and_delta():
    assert trunclap.psi(DISK, [0.0, 0.0]) == pytest.approx(0.5)
    assert trunclap.interior_ball_delta(1.0, 0.5, 1.0) == pytest.approx(0.5 - math.sqrt(3) / 4)


def test_eigen_helpers():
    assert trunclap.mu_lower_bound(1, 0.0, 1.0) == 2.0
    c = trunclap.critical_drift_gap_check(1.0, 1)
    assert c["max_residual"] < 1e-8
    assert c["perturbed_failure_detected"]


def test_verify_suite():
    summary = trunclap.verify("radial")
    assert summary["failures"] == 0
    assert trunclap.verify("radial", tolerance_scale=0.0)["failures"] > 0
    with pytest.raises(ValueError):
        trunclap.verify("nonsense")
