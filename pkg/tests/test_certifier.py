import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from curvlab.certifier import (
    FAMILY_EQUAL_B,
    FAMILY_ISOLATED_WEYL,
    FAMILY_NONE,
    FAMILY_ZERO,
    SQRT6,
    AppendixPoint,
    CertifyConfig,
    canonicalize,
    classify_equality,
    eval_F,
    eval_I,
    eval_I_vec,
    eval_J,
    grad_I_vec,
    kkt_residual,
    multistart_minimize,
    permutation_orbit,
    project_constraints,
    recover_multipliers,
    sample_constraint_set,
    step4_point,
    step4_root,
)
from curvlab.errors import DegenerateInputError, InvalidArgumentError
from curvlab.lambda2 import SpectralData

vec9 = arrays(np.float64, 9, elements=st.floats(-5, 5, allow_nan=False))


def point(b=(0, 0, 0), x=(0, 0, 0), y=(0, 0, 0)):
    return AppendixPoint(np.array(b, float), np.array(x, float), np.array(y, float))


def reference_I(v):
    """Term-by-term transcription, used as an oracle for the vectorised version."""
    b, x, y = v[0:3], v[3:6], v[6:9]
    nb, nx, ny = b @ b, x @ x, y @ y
    return (
        SQRT6 * (4 * nb + 3 * (nx + ny)) * math.sqrt(2 * nb + nx + ny)
        - 54 * x[0] * x[1] * x[2]
        - 54 * y[0] * y[1] * y[2]
        - 72 * b[0] * b[1] * b[2]
        - 18 * sum((x[i] + y[i]) * b[i] ** 2 for i in range(3))
    )


# evaluation


def test_I_examples():
    assert eval_I(point()) == 0.0
    for b in (0.1, 1.0, 3.0):
        assert eval_I(point(b=(b, b, b))) == pytest.approx(0.0, abs=1e-12 * b**3)
    a = 0.7
    assert eval_I(point(x=(-a, -a, 2 * a), y=(-a, -a, 2 * a))) == pytest.approx(216 * (math.sqrt(2) - 1) * a**3)


def test_J_examples():
    assert eval_J([-1, -1, 2], [0, 0, 0]) == pytest.approx(0.0, abs=1e-12)
    assert eval_J([0, 0, 0], [0, 0, 0]) == 0.0
    assert eval_J([-1, -1, 2], [-1, -1, 2]) == pytest.approx(216 * (math.sqrt(2) - 1))
    assert eval_J([-1, -1, 2], [-1, -1, 2]) == pytest.approx(89.47, abs=5e-3)


@given(vec9)
def test_J_is_I_on_b_zero(v):
    v[0:3] = 0.0
    # I is a difference of terms of size |v|^3, so compare on that scale
    scale = max(1.0, float(v @ v) ** 1.5)
    assert abs(eval_J(v[3:6], v[6:9]) - eval_I(v)) <= 1e-12 * scale


@given(vec9)
def test_vectorised_I_matches_reference(v):
    scale = max(1.0, float(v @ v) ** 1.5)
    assert abs(eval_I(v) - reference_I(v)) <= 1e-12 * scale


def test_F_examples():
    z = np.zeros(3)
    cp2 = SpectralData(np.array([-2.0, -2.0, 4.0]), z, z, z)
    assert eval_F(cp2) == pytest.approx(0.0, abs=1e-10)
    s3s1 = SpectralData(z, z, np.full(3, 0.5), np.array([0.5, 0.5, -0.5]))
    assert eval_F(s3s1) == pytest.approx(0.0, abs=1e-12)
    off = SpectralData(np.array([-1.0, 0.0, 1.0]), z, z, z)
    assert eval_F(off) == pytest.approx(12 * math.sqrt(12))


@settings(max_examples=200)
@given(vec9, st.sampled_from([0.1, 2.0, 10.0]))
def test_homogeneity(v, t):
    scale = max(1.0, t**3 * float(v @ v) ** 1.5)
    assert abs(eval_I(t * v) - t**3 * eval_I(v)) <= 1e-10 * scale


@settings(max_examples=200)
@given(vec9)
def test_symmetries(v):
    base = eval_I(v)
    scale = max(1.0, float(v @ v) ** 1.5)
    for w in permutation_orbit(v):
        assert abs(eval_I(w) - base) <= 1e-12 * scale
    swapped = np.concatenate([v[0:3], v[6:9], v[3:6]])
    assert abs(eval_I(swapped) - base) <= 1e-12 * scale


@settings(max_examples=100)
@given(vec9)
def test_chamber_reduction_does_not_increase_I(v):
    v[3:6] -= v[3:6].mean()
    v[6:9] -= v[6:9].mean()
    assert eval_I(canonicalize(v)) <= eval_I(v) + 1e-10 * max(1.0, abs(eval_I(v)))


def test_gradient_matches_differences():
    rng = np.random.default_rng(0)
    for _ in range(50):
        v = rng.normal(size=9)
        g = grad_I_vec(v)
        h = 1e-6
        fd = np.array([(eval_I(v + h * e) - eval_I(v - h * e)) / (2 * h) for e in np.eye(9)])
        np.testing.assert_allclose(g, fd, rtol=1e-6, atol=1e-6)


# constraints


def test_project_constraints_examples():
    with pytest.raises(DegenerateInputError):
        project_constraints([0, 0, 0, 1, 1, 1, 0, 0, 0])
    p = project_constraints([0, 0, 0, -1, -1, 2, 0, 0, 0])
    np.testing.assert_allclose(p.x, np.array([-1, -1, 2]) / math.sqrt(6), atol=1e-15)
    assert p.phi1 == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(InvalidArgumentError):
        project_constraints([1.0, 2.0])


@given(vec9)
def test_projection_postconditions(v):
    try:
        p = project_constraints(v)
    except DegenerateInputError:
        return
    assert abs(p.x.sum()) <= 1e-12 and abs(p.y.sum()) <= 1e-12
    assert p.phi1 == pytest.approx(1.0, abs=1e-12)
    assert np.all(p.b >= 0) and np.all(np.diff(p.b) >= 0)
    assert np.all(np.diff(p.x) >= 0) and np.all(np.diff(p.y) >= 0)


def test_nonnegative_on_a_million_samples():
    pts = sample_constraint_set(1_000_000, seed=7)
    assert pts.shape[0] == 1_000_000
    assert eval_I_vec(pts).min() >= -1e-10


# KKT


def test_kkt_equal_b_family():
    b = 1.0 / math.sqrt(6)
    p = point(b=(b, b, b))
    mu = 2 * SQRT6 - 18 * b
    assert mu == pytest.approx(-SQRT6)
    assert np.abs(kkt_residual(p, mu, -1.5, -1.5)).max() <= 1e-12
    m = recover_multipliers(p)
    assert (m.mu, m.beta, m.gamma) == pytest.approx((-SQRT6, -1.5, -1.5))
    assert m.residual <= 1e-12


def test_kkt_isolated_weyl_family():
    a = 1.0 / math.sqrt(6)
    p = point(x=(-a, -a, 2 * a))
    res = kkt_residual(p, -27.0 * a, 27.0 * a * a, 0.0)
    assert res.shape == (6,)
    assert np.abs(res).max() <= 1e-12
    assert recover_multipliers(p).residual <= 1e-12


def test_kkt_negative_control():
    p = project_constraints(np.random.default_rng(1).normal(size=9))
    assert np.abs(kkt_residual(p, 0.0, 0.0, 0.0)).max() > 0.1
    assert recover_multipliers(p).residual > 1e-3


# classification


def test_classify_examples():
    a = 1.0 / math.sqrt(6)
    assert classify_equality(point(x=(-a, -a, 2 * a))) == FAMILY_ISOLATED_WEYL
    assert classify_equality(point(y=(2 * a, -a, -a))) == FAMILY_ISOLATED_WEYL
    assert classify_equality(point(b=(a, a, a))) == FAMILY_EQUAL_B
    assert classify_equality(point()) == FAMILY_ZERO
    generic = project_constraints(np.random.default_rng(2).normal(size=9))
    assert classify_equality(generic) == FAMILY_NONE


def test_classified_points_are_zeros_with_multipliers():
    a = 1.0 / math.sqrt(6)
    for p in (point(x=(-a, -a, 2 * a)), point(y=(-a, -a, 2 * a)), point(b=(a, a, a))):
        assert eval_I(p) <= 1e-10
        assert recover_multipliers(p).residual <= 1e-8


# multistart


@pytest.fixture(scope="module")
def default_report():
    return multistart_minimize()


def test_default_certificate(default_report):
    r = default_report
    assert -1e-8 <= r.global_min_estimate <= 1e-6
    assert r.equality_family in (FAMILY_ZERO, FAMILY_ISOLATED_WEYL, FAMILY_EQUAL_B)
    assert r.kkt_residual_at_argmin <= 1e-8
    assert r.passed
    assert (r.n_samples, r.n_starts, r.seed) == (100_000, 200, 42)


def test_every_zero_minimum_is_classified(default_report):
    for m in default_report.local_minima:
        if m.value <= 1e-8:
            assert m.family in (FAMILY_ISOLATED_WEYL, FAMILY_EQUAL_B)
            assert m.kkt_residual <= 1e-8


def test_b0_slice_recovers_isolated_weyl():
    r = multistart_minimize(n_samples=20_000, n_starts=20, slice="b0")
    assert r.equality_family == FAMILY_ISOLATED_WEYL
    assert abs(r.global_min_estimate) <= 1e-8
    xs, ys = r.argmin.x, r.argmin.y
    vertex = xs if np.abs(ys).max() < 1e-6 else ys
    a = vertex.max() / 2
    np.testing.assert_allclose(np.sort(vertex), [-a, -a, 2 * a], atol=1e-6)


def test_xy0_slice_recovers_equal_b():
    r = multistart_minimize(n_samples=20_000, n_starts=20, slice="xy0")
    assert r.equality_family == FAMILY_EQUAL_B
    np.testing.assert_allclose(r.argmin.b, np.full(3, 1 / math.sqrt(6)), atol=1e-6)
    assert abs(r.global_min_estimate) <= 1e-8


def test_multistart_is_deterministic():
    a = multistart_minimize(n_samples=5000, n_starts=10, seed=3).to_dict()
    b = multistart_minimize(n_samples=5000, n_starts=10, seed=3).to_dict()
    assert a == b


def test_config_validation():
    with pytest.raises(InvalidArgumentError):
        multistart_minimize(n_samples=0)
    with pytest.raises(InvalidArgumentError):
        multistart_minimize(slice="diagonal")
    with pytest.raises(InvalidArgumentError):
        CertifyConfig(tol=-1.0).validate()


# branch root


def test_branch_root():
    r = step4_root()
    assert r.a == pytest.approx(0.1617, abs=5e-4)
    assert r.I_value > 0.6
    assert r.I_value == pytest.approx(0.657, abs=0.01)
    assert r.residual_linear <= 1e-12 and r.residual_circle <= 1e-12


def test_branch_root_independent_quadratic():
    # oracle: the quadratic solved by numpy
    roots = np.roots([1377.0, -72.0 * SQRT6, -7.5])
    a = roots[roots > 0][0]
    r = step4_root()
    assert r.a == pytest.approx(a, rel=1e-12)
    assert r.s == pytest.approx((SQRT6 - 36 * a) / 9, rel=1e-12)
    assert r.s == pytest.approx(-0.3748, abs=1e-4)


def test_branch_point_is_on_constraint_set():
    r = step4_root()
    p = step4_point(r)
    assert p.phi1 == pytest.approx(1.0, abs=1e-12)
    assert eval_I(p) == pytest.approx(r.I_value, rel=1e-10)
    assert recover_multipliers(p).residual <= 1e-10
