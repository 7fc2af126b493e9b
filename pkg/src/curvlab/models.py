"""Closed-form curvature, Euler characteristic and volume of the model spaces.

Every model is homogeneous, so one curvature decomposition describes the
whole space and integrals are the volume times a constant integrand.

Normalisations: ``S^4(r)`` has radius ``r``; ``CP^2`` carries the
Fubini-Study metric with holomorphic sectional curvature 4 (``R = 24``);
``S^3 x S^1(L)`` is the unit 3-sphere times a circle of radius ``L``;
``S^2 x S^2(r)`` has two factors of radius ``r``.  ``RP^4`` shares the
curvature of ``S^4`` with half the volume and ``chi = 1``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from . import charts
from .errors import InvalidArgumentError, NotFoundError, UnsupportedModelError
from .lambda2 import block_to_tensor, integrand_F, spectral_of, weitzenbock_symmetric_residual
from .tensor_core import CurvatureDecomposition, decompose, invariants, kulkarni_nomizu

PI2 = math.pi**2
GB_TOL = 1e-9

MODEL_NAMES = ("s4", "rp4", "cp2", "s3xs1", "s2xs2")


@dataclass(frozen=True)
class ModelSpace:
    name: str
    params: dict
    decomposition: CurvatureDecomposition
    euler_char: int
    volume: float
    is_symmetric: bool = True
    is_einstein: bool = False
    chart: Optional[str] = None
    chart_params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.volume <= 0:
            raise InvalidArgumentError("volume must be positive")
        if self.is_einstein and np.abs(self.decomposition.traceless_ricci).max() > 1e-12:
            raise InvalidArgumentError("an Einstein model must have E = 0")

    def chart_metric(self) -> charts.ChartMetric:
        """The matching coordinate chart; its ``center`` corresponds to the catalog frame."""
        return charts.get_preset(self.chart, **self.chart_params)


def _positive(value, name):
    value = float(value)
    if not value > 0 or not math.isfinite(value):
        raise InvalidArgumentError(f"{name} must be a positive finite number")
    return value


def _round_sphere(radius):
    g = np.eye(4)
    return decompose(kulkarni_nomizu(g, g) / (2.0 * radius**2))


def get_model(name: str, radius: float = 1.0, length: float = 1.0) -> ModelSpace:
    """Catalog entry by name; ``radius`` and ``length`` are ignored where they do not apply."""
    if name in ("s4", "rp4"):
        r = _positive(radius, "radius")
        vol = 8.0 * PI2 * r**4 / 3.0
        chi = 2
        if name == "rp4":
            vol, chi = vol / 2.0, 1
        return ModelSpace(
            name, {"radius": r}, _round_sphere(r), chi, vol, True, True, "stereo-s4", {"radius": r}
        )
    if name == "cp2":
        # the Kahler form (first basis element) spans the eigenvalue R/6 = 4
        weyl = block_to_tensor(np.diag([4.0, -2.0, -2.0]))
        d = CurvatureDecomposition.from_parts(weyl=weyl, scalar=24.0)
        return ModelSpace(name, {}, d, 3, PI2 / 2.0, True, True, "cp2", {})
    if name == "s3xs1":
        length = _positive(length, "length")
        d = CurvatureDecomposition.from_parts(traceless_ricci=np.diag([0.5, 0.5, 0.5, -1.5]), scalar=6.0)
        return ModelSpace(name, {"length": length}, d, 0, 4.0 * math.pi**3 * length, True, False, "s3xs1", {})
    if name == "s2xs2":
        r = _positive(radius, "radius")
        riem = np.zeros((4, 4, 4, 4))
        for i, j in ((0, 1), (2, 3)):
            riem[i, j, i, j] = riem[j, i, j, i] = 1.0 / r**2
            riem[i, j, j, i] = riem[j, i, i, j] = -1.0 / r**2
        return ModelSpace(
            name, {"radius": r}, decompose(riem), 4, 16.0 * PI2 * r**4, True, True, "s2xs2", {"radius": r}
        )
    raise NotFoundError(f"unknown model {name!r}; expected one of {MODEL_NAMES}")


class GaussBonnet(NamedTuple):
    integral: float
    expected: float
    residual: float
    residual_split: float


def gauss_bonnet_check(m: ModelSpace) -> GaussBonnet:
    """``|Vol (|W|^2/4 - |E|^2/2 + R^2/24) - 8 pi^2 chi|`` and the ``|W|^2/4 + sigma2`` form."""
    rep = invariants(m.decomposition)
    expected = 8.0 * PI2 * m.euler_char
    integral = m.volume * rep.gb_integrand
    split = m.volume * (0.25 * rep.normW2 + rep.sigma2)
    return GaussBonnet(integral, expected, abs(integral - expected), abs(split - expected))


class Hypothesis(str, enum.Enum):
    STRICT = "STRICT"
    EQUALITY = "EQUALITY"
    FAILS = "FAILS"


class HypothesisReport(NamedTuple):
    weyl_integral: float
    threshold: float
    sigma2_minus_weyl: float
    excess: float
    tag: Hypothesis
    consistent: bool


def theorem_hypothesis_check(m: ModelSpace, tol: float = GB_TOL) -> HypothesisReport:
    """Compare ``int |W|^2`` against ``16 pi^2 chi``.

    ``sigma2_minus_weyl`` is ``int (sigma2 - |W|^2/4)`` and ``excess`` is
    ``int (-|E|^2/2 + R^2/24 - |W|^2/4)``; by Gauss-Bonnet both are positive
    exactly when the strict inequality holds, which ``consistent`` records.
    """
    rep = invariants(m.decomposition)
    weyl_integral = m.volume * rep.normW2
    threshold = 16.0 * PI2 * m.euler_char
    s2w = m.volume * (rep.sigma2 - 0.25 * rep.normW2)
    excess = m.volume * (-0.5 * rep.normE2 + rep.scalar**2 / 24.0 - 0.25 * rep.normW2)
    scale = max(1.0, abs(threshold))
    if abs(weyl_integral - threshold) <= tol * scale:
        tag = Hypothesis.EQUALITY
    elif weyl_integral < threshold:
        tag = Hypothesis.STRICT
    else:
        tag = Hypothesis.FAILS
    strict = tag is Hypothesis.STRICT
    consistent = (s2w > tol * scale) == strict and (excess > tol * scale) == strict
    return HypothesisReport(weyl_integral, threshold, s2w, excess, tag, consistent)


IDENTITY_NAMES = (
    "selfdual_weitzenbock",
    "bach_flat_weyl",
    "bach_flat_ricci",
    "weyl_ricci_divergence",
    "key_integrand",
    "F_integrand",
)


def symmetric_identity_suite(m: ModelSpace, alpha: float = 1.0) -> dict:
    """Residuals of the integral identities of a locally symmetric Bach-flat model.

    Integral identities are the pointwise residual times the volume.
    ``F_integrand`` is pointwise and is ``None`` where ``sigma2 != |W|^2/4``.
    """
    if not m.is_symmetric:
        raise UnsupportedModelError(f"model {m.name!r} is not locally symmetric")
    w = weitzenbock_symmetric_residual(m.decomposition)
    f = integrand_F(m.decomposition, alpha)
    v = m.volume
    return {
        "selfdual_weitzenbock": v * w.selfdual,
        "bach_flat_weyl": v * w.bach_flat_weyl,
        "bach_flat_ricci": v * w.bach_flat_ricci,
        "weyl_ricci_divergence": v * w.divergence,
        "key_integrand": v * f.key_integrand,
        "F_integrand": f.f_value,
    }


def weitzenbock_constants(m: ModelSpace) -> tuple:
    """``(72 det W+, R |W+|^2 / 2)`` of a model."""
    spec = spectral_of(m.decomposition)
    wp2 = 4.0 * float(np.sum(spec.lambda_plus**2))
    return 72.0 * spec.det_plus, 0.5 * m.decomposition.scalar * wp2
