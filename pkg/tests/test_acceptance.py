"""Acceptance gate: one test per criterion, each recording a PASS/FAIL line.

The summary is printed at the end of the pytest run by ``conftest.py``.
"""

import json
import math

import numpy as np
import pytest

from curvlab import charts
from curvlab.certifier import (
    FAMILY_EQUAL_B,
    FAMILY_ISOLATED_WEYL,
    eval_I,
    eval_I_vec,
    multistart_minimize,
    sample_constraint_set,
    step4_root,
)
from curvlab.cli import main, results_payload
from curvlab.lambda2 import (
    BASIS,
    BASIS_MINUS,
    BASIS_PLUS,
    F_spectral,
    spectral_of,
)
from curvlab.models import (
    gauss_bonnet_check,
    get_model,
    symmetric_identity_suite,
    theorem_hypothesis_check,
    weitzenbock_constants,
)
from curvlab.tensor_core import invariants, random_traceless, trE3_lower_bound_slack

PI2 = math.pi**2
X = np.array([0.3, -0.2, 0.1, 0.25])
W_POLY = charts.monomial(0.1, [1, 1, 0, 0])
W_SINE = charts.ScalarFunction("sine", {"amplitude": 0.05, "axis": 0})
RATIO_BAND = (3.4, 4.6)


def close(a, b, tol):
    return abs(a - b) <= tol


def test_criterion_01_gauss_bonnet(criterion):
    expected = {"s4": 16 * PI2, "rp4": 8 * PI2, "cp2": 24 * PI2, "s3xs1": 0.0, "s2xs2": 32 * PI2}
    checks = []
    for name, value in expected.items():
        gb = gauss_bonnet_check(get_model(name))
        checks.append((f"{name} residual", gb.residual <= 1e-9))
        checks.append((f"{name} value", close(gb.integral, value, 1e-9)))
        checks.append((f"{name} split form", gb.residual_split <= 1e-9))
    criterion(1, checks)


def test_criterion_02_weyl_energy_equality(criterion):
    cp2 = theorem_hypothesis_check(get_model("cp2"))
    s3s1 = theorem_hypothesis_check(get_model("s3xs1"))
    s2s2 = theorem_hypothesis_check(get_model("s2xs2"))
    criterion(
        2,
        [
            ("cp2 = 48 pi^2", abs(cp2.weyl_integral / (48 * PI2) - 1) <= 1e-9),
            ("cp2 threshold", abs(cp2.threshold / (48 * PI2) - 1) <= 1e-9),
            ("cp2 tag", cp2.tag.value == "EQUALITY"),
            ("s3xs1 both zero", abs(s3s1.weyl_integral) <= 1e-9 and s3s1.threshold == 0.0),
            ("s3xs1 tag", s3s1.tag.value == "EQUALITY"),
            ("s2xs2 = 256 pi^2/3", abs(s2s2.weyl_integral / (256 * PI2 / 3) - 1) <= 1e-9),
            ("s2xs2 threshold 64 pi^2", abs(s2s2.threshold / (64 * PI2) - 1) <= 1e-9),
            ("s2xs2 tag", s2s2.tag.value == "FAILS"),
        ],
    )


def test_criterion_03_pinching_boundary(criterion):
    wp = {name: invariants(get_model(name).decomposition).wp for name in ("cp2", "s3xs1", "s4", "s2xs2")}
    criterion(
        3,
        [
            ("cp2", close(wp["cp2"], 1 / 6, 1e-12)),
            ("s3xs1", close(wp["s3xs1"], 1 / 6, 1e-12)),
            ("s4", wp["s4"] == 0.0),
            ("s2xs2", close(wp["s2xs2"], 1 / 3, 1e-12)),
        ],
    )


def test_criterion_04_weitzenbock_constants(criterion):
    lhs, rhs = weitzenbock_constants(get_model("cp2"))
    checks = [("72 det W+ = 1152", close(lhs, 1152.0, 1e-9)), ("R|W+|^2/2 = 1152", close(rhs, 1152.0, 1e-9))]
    for name in ("s4", "rp4", "cp2", "s3xs1", "s2xs2"):
        suite = symmetric_identity_suite(get_model(name), alpha=1.0)
        for key, value in suite.items():
            if value is not None:
                checks.append((f"{name} {key}", abs(value) <= 1e-9))
    f_cp2 = symmetric_identity_suite(get_model("cp2"))["F_integrand"]
    checks.append(("cp2 F integrand defined", f_cp2 is not None))
    criterion(4, checks)


@pytest.fixture(scope="module")
def certificate():
    return multistart_minimize(n_samples=100_000, n_starts=200, seed=42)


def test_criterion_05_certificate(criterion, certificate):
    r = certificate
    zeros = [m for m in r.local_minima if m.value <= 1e-8]
    criterion(
        5,
        [
            ("global minimum in [-1e-8, 1e-6]", -1e-8 <= r.global_min_estimate <= 1e-6),
            ("some local minimum reaches zero", len(zeros) > 0),
            ("zeros classify into (ii)/(iii)", all(m.family in (FAMILY_ISOLATED_WEYL, FAMILY_EQUAL_B) for m in zeros)),
            ("KKT residual at zeros <= 1e-8", all(m.kkt_residual <= 1e-8 for m in zeros)),
            ("argmin KKT <= 1e-8", r.kkt_residual_at_argmin <= 1e-8),
        ],
    )


def test_criterion_06_branch_root(criterion):
    r = step4_root()
    criterion(
        6,
        [
            ("a = 0.1617 +- 5e-4", close(r.a, 0.1617, 5e-4)),
            ("I > 0.6", r.I_value > 0.6),
            ("I ~ 0.657", close(r.I_value, 0.657, 0.01)),
            ("linear residual", r.residual_linear <= 1e-12),
            ("circle residual", r.residual_circle <= 1e-12),
        ],
    )


def _batch_traceless(rng, n, size):
    a = rng.normal(size=(n, size, size))
    a = 0.5 * (a + np.swapaxes(a, 1, 2))
    return a - np.trace(a, axis1=1, axis2=2)[:, None, None] / size * np.eye(size)


def _mixed_blocks(e):
    d = np.eye(4)
    kn = (
        np.einsum("nik,jl->nijkl", e, d)
        + np.einsum("ik,njl->nijkl", d, e)
        - np.einsum("nil,jk->nijkl", e, d)
        - np.einsum("il,njk->nijkl", d, e)
    )
    return 0.125 * np.einsum("aij,nijkl,bkl->nab", BASIS_PLUS, kn, BASIS_MINUS)


def test_criterion_07_property_suites(criterion):
    rng = np.random.default_rng(2024)
    checks = []

    e6 = random_traceless(rng, 1_000_000)
    slack = trE3_lower_bound_slack(e6)
    checks.append(("trE3 + |E|^3/sqrt3 >= 0 (1e6)", (slack / np.maximum(1.0, np.sum(e6**2, axis=(1, 2)) ** 1.5)).min() >= -1e-10))

    n = 100_000
    e = _batch_traceless(rng, n, 4)
    mixed = _mixed_blocks(e)
    b = np.sort(np.linalg.svd(mixed, compute_uv=False), axis=1)
    norm_e2 = np.sum(e * e, axis=(1, 2))
    tr3 = np.einsum("nij,njk,nki->n", e, e, e)
    checks.append(("trE3 + 24 b1b2b3 >= 0", ((tr3 + 24 * np.prod(b, axis=1)) / np.maximum(1, norm_e2**1.5)).min() >= -1e-10))
    checks.append(("|E|^2 = 4 sum b^2", (np.abs(norm_e2 - 4 * np.sum(b**2, axis=1)) / np.maximum(1, norm_e2)).max() <= 1e-10))

    wp = _batch_traceless(rng, n, 3)
    wm = _batch_traceless(rng, n, 3)
    dec_res, dec_slack, cubic = 0.0, np.inf, 0.0
    for lo in range(0, n, 5000):
        sl = slice(lo, lo + 5000)
        tp = np.einsum("nab,aij,bkl->nijkl", wp[sl], BASIS_PLUS, BASIS_PLUS)
        tm = np.einsum("nab,aij,bkl->nijkl", wm[sl], BASIS_MINUS, BASIS_MINUS)
        weyl = tp + tm
        contraction = np.einsum("nijkl,nik,njl->n", weyl, e[sl], e[sl])
        m = mixed[sl]
        mt = np.swapaxes(m, 1, 2)
        pairing = 4 * (np.einsum("nab,nba->n", wp[sl], m @ mt) + np.einsum("nab,nba->n", wm[sl], mt @ m))
        b2 = b[sl] ** 2
        bound = 4 * (np.sum(np.linalg.eigvalsh(wp[sl]) * b2, 1) + np.sum(np.linalg.eigvalsh(wm[sl]) * b2, 1))
        scale = np.maximum(1.0, np.abs(contraction))
        dec_res = max(dec_res, float((np.abs(contraction - pairing) / scale).max()))
        dec_slack = min(dec_slack, float(((bound - pairing) / scale).min()))

        n2 = np.sum(tp**2, axis=(1, 2, 3, 4))
        det = np.linalg.det(wp[sl])
        cs = np.maximum(1.0, n2**1.5)
        res_i = np.abs(np.einsum("nijkl,njskl->nis", tp, tp) + 0.25 * n2[:, None, None] * np.eye(4)).max(axis=(1, 2))
        res_ii = np.abs(np.einsum("nmsij,nijkl,nmskl->n", tp, tp, tp, optimize=True) - 24 * det)
        res_iii = np.abs(4 * np.einsum("nmiks,nijkl,njmsl->n", weyl, tp, tp, optimize=True) - 48 * det)
        cubic = max(cubic, float((res_i / np.maximum(1, n2)).max()), float((res_ii / cs).max()), float((res_iii / cs).max()))
    checks.append(("decoupling identity", dec_res <= 1e-10))
    checks.append(("decoupling bound", dec_slack >= -1e-10))
    checks.append(("cubic Weyl contractions", cubic <= 1e-10))

    pts = sample_constraint_set(n, seed=11)
    base = eval_I_vec(pts)
    hom = max(
        float((np.abs(eval_I_vec(t * pts) - t**3 * base) / np.maximum(1.0, np.abs(t**3 * base))).max())
        for t in (0.1, 2.0, 10.0)
    )
    checks.append(("I homogeneity", hom <= 1e-10))

    f2i = 0.0
    lps = rng.normal(size=(n, 3))
    lms = rng.normal(size=(n, 3))
    lps -= lps.mean(axis=1, keepdims=True)
    lms -= lms.mean(axis=1, keepdims=True)
    for lp, lm, bb in zip(lps, lms, np.abs(rng.normal(size=(n, 3)))):
        f = F_spectral(lp, lm, bb)
        f2i = max(f2i, abs(f - 2 * eval_I(np.concatenate([bb, lp, lm]))) / max(1.0, abs(f)))
    checks.append(("F = 2I", f2i <= 1e-12))
    criterion(7, checks)


def _ratio(f):
    return f(1e-2) / f(5e-3)


def test_criterion_08_convergence(criterion):
    cp2, s2s2 = charts.fubini_study(), charts.s2xs2()
    ratios = {
        "bianchi stereo-s4": _ratio(lambda h: charts.bianchi_contraction_residual(charts.stereographic_s4(), X, h, False)),
        "bianchi conformally-flat": _ratio(
            lambda h: charts.bianchi_contraction_residual(charts.conformally_flat(W_POLY), X, h, False)
        ),
        "bianchi exp(2w) cp2": _ratio(lambda h: charts.bianchi_contraction_residual(cp2.conformal(W_POLY), X, h, False)),
        "weyl-conformal cp2": _ratio(lambda h: charts.weyl_conformal_residual(cp2, W_POLY, X, h, False).tensor_residual),
        "weyl-conformal s2xs2": _ratio(
            lambda h: charts.weyl_conformal_residual(s2s2, W_POLY, X, h, False).tensor_residual
        ),
        "sigma2 cp2": _ratio(lambda h: charts.sigma2_divergence_residual(cp2, W_SINE, 1.0, X, h, False).residual),
        "sigma2 s2xs2": _ratio(lambda h: charts.sigma2_divergence_residual(s2s2, W_SINE, 1.0, X, h, False).residual),
        "bach exp(2w) cp2": _ratio(lambda h: np.abs(charts.bach_fd(cp2.conformal(W_POLY), X, h, False)).max()),
        "bach exp(2w) s2xs2": _ratio(lambda h: np.abs(charts.bach_fd(s2s2.conformal(W_SINE), X, h, False)).max()),
    }
    checks = [(f"{k} ratio {v:.3f}", RATIO_BAND[0] <= v <= RATIO_BAND[1]) for k, v in ratios.items()]
    for w in (W_POLY, W_SINE, charts.ScalarFunction("sphere_factor")):
        b = charts.bach_fd(charts.conformally_flat(w), X)
        checks.append((f"bach conformally flat {w.family}", np.abs(b).max() <= 1e-6))
    checks.append(("bach stereo-s4", np.abs(charts.bach_fd(charts.stereographic_s4(), X)).max() <= 1e-6))
    criterion(8, checks)


def test_criterion_09_oracle_closure(criterion):
    checks = []
    for name in ("s4", "cp2", "s3xs1", "s2xs2"):
        m = get_model(name)
        chart = m.chart_metric()
        d = charts.curvature_at(chart, chart.center)
        exact = m.decomposition
        checks.append((f"{name} R", close(d.scalar, exact.scalar, 1e-3)))
        checks.append((f"{name} E", np.abs(d.traceless_ricci - exact.traceless_ricci).max() <= 1e-5))
        checks.append((f"{name} W", np.abs(d.weyl - exact.weyl).max() <= 1e-5))
    spec = spectral_of(charts.curvature_at(charts.fubini_study(), np.zeros(4)))
    checks.append(("cp2 lambda+", np.abs(spec.lambda_plus - np.array([-2.0, -2.0, 4.0])).max() <= 1e-3))
    criterion(9, checks)


def test_criterion_10_determinism(criterion, capsys):
    payloads = []
    for _ in range(2):
        assert main(["certify"]) == 0
        payloads.append(results_payload(json.loads(capsys.readouterr().out)))
    criterion(10, [("identical payloads", payloads[0] == payloads[1])])
