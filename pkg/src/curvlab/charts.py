"""Finite-difference curvature of closed-form coordinate metrics.

Every tensor field is a vectorised function of a stack of points with shape
``(N, 4)``.  Derivatives are nested central differences: differentiating a
field evaluates it at the ``8N`` shifted points and stacks the new index in
axis 1.  Nested differences commute exactly, so the Riemann tensor built
from second metric derivatives has the algebraic curvature symmetries to
rounding, whatever the step.

Covariant derivatives are coordinate differences plus explicit Christoffel
corrections.  Results are pushed to the orthonormal frame given by the
Cholesky factor of ``g(x)`` before any norm is taken.  One Richardson level,
``(4 Q(h/2) - Q(h)) / 3``, is applied to the final tensor by default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Optional

import numpy as np

from .errors import DomainError, InvalidArgumentError, InvalidMetricError, NotFoundError
from .tensor_core import CurvatureDecomposition, decompose, invariants

H_MIN, H_MAX = 1e-4, 1e-1
PD_TOL = 1e-10

# ---------------------------------------------------------------------------
# scalar functions (conformal factors and test functions)


@dataclass(frozen=True)
class ScalarFunction:
    """A smooth function on 4-space drawn from a fixed family.

    Families and their parameters:

    ``constant``       ``value``
    ``polynomial``     ``terms``: list of ``{"coef": c, "powers": [p0, p1, p2, p3]}``
    ``sphere_factor``  ``radius`` (default 1): ``log(2 r / (1 + |x|^2))``
    ``sine``           ``amplitude``, ``axis``, ``frequency`` (1), ``phase`` (0)
    """

    family: str
    params: dict = field(default_factory=dict)

    FAMILIES = ("constant", "polynomial", "sphere_factor", "sine")

    def __post_init__(self):
        if self.family not in self.FAMILIES:
            raise InvalidArgumentError(f"unknown function family {self.family!r}")
        if self.family == "polynomial":
            for t in self.params.get("terms", []):
                if len(t.get("powers", ())) != 4 or any(int(p) < 0 for p in t["powers"]):
                    raise InvalidArgumentError("polynomial powers must be 4 non-negative integers")
        if self.family == "sine" and int(self.params.get("axis", 0)) not in range(4):
            raise InvalidArgumentError("sine axis must be 0..3")

    @classmethod
    def from_dict(cls, spec: dict) -> "ScalarFunction":
        spec = dict(spec)
        family = spec.pop("family", None)
        if family is None:
            raise InvalidArgumentError("function spec needs a 'family' key")
        return cls(family, spec)

    def to_dict(self) -> dict:
        return {"family": self.family, **self.params}

    def __call__(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.family == "constant":
            return np.full(x.shape[:-1], float(p.get("value", 0.0)))
        if self.family == "polynomial":
            out = np.zeros(x.shape[:-1])
            for t in p.get("terms", []):
                out = out + float(t["coef"]) * np.prod(x ** np.asarray(t["powers"], dtype=float), axis=-1)
            return out
        if self.family == "sphere_factor":
            r = float(p.get("radius", 1.0))
            return np.log(2.0 * r / (1.0 + np.sum(x * x, axis=-1)))
        a = float(p.get("amplitude", 1.0))
        k = float(p.get("frequency", 1.0))
        return a * np.sin(k * x[..., int(p.get("axis", 0))] + float(p.get("phase", 0.0)))


def constant(c: float) -> ScalarFunction:
    return ScalarFunction("constant", {"value": float(c)})


def monomial(coef: float, powers) -> ScalarFunction:
    return ScalarFunction("polynomial", {"terms": [{"coef": float(coef), "powers": list(powers)}]})


# ---------------------------------------------------------------------------
# charts


@dataclass(frozen=True)
class ChartMetric:
    """A metric on an open coordinate box, evaluated pointwise.

    ``evaluator`` maps points of shape ``(..., 4)`` to matrices of shape
    ``(..., 4, 4)``.
    """

    evaluator: Callable[[np.ndarray], np.ndarray]
    lower: np.ndarray
    upper: np.ndarray
    label: str
    center: np.ndarray = field(default_factory=lambda: np.zeros(4))

    def __call__(self, x) -> np.ndarray:
        return self.evaluator(np.asarray(x, dtype=float))

    def conformal(self, w: ScalarFunction) -> "ChartMetric":
        """The chart of ``e^{2w} g``."""
        base = self.evaluator

        def ev(x):
            return np.exp(2.0 * w(x))[..., None, None] * base(x)

        return ChartMetric(ev, self.lower, self.upper, f"exp(2w)*{self.label}", self.center)


def _box(lo, hi):
    return np.full(4, float(lo)), np.full(4, float(hi))


def flat() -> ChartMetric:
    def ev(x):
        return np.broadcast_to(np.eye(4), x.shape[:-1] + (4, 4)).copy()

    return ChartMetric(ev, *_box(-10, 10), "flat")


def conformally_flat(w: ScalarFunction, bound: float = 3.0) -> ChartMetric:
    """``e^{2w} delta`` on the box ``[-bound, bound]^4``."""

    def ev(x):
        return np.exp(2.0 * w(x))[..., None, None] * np.eye(4)

    return ChartMetric(ev, *_box(-bound, bound), "conformally-flat")


def stereographic_s4(radius: float = 1.0) -> ChartMetric:
    """Round sphere of radius ``r``: ``4 r^2 / (1 + |x|^2)^2 delta``."""
    if radius <= 0:
        raise InvalidArgumentError("radius must be positive")

    def ev(x):
        f = 4.0 * radius**2 / (1.0 + np.sum(x * x, axis=-1)) ** 2
        return f[..., None, None] * np.eye(4)

    return ChartMetric(ev, *_box(-3, 3), "stereo-s4")


def fubini_study() -> ChartMetric:
    """Affine chart of the Fubini-Study metric with holomorphic sectional curvature 4.

    Coordinates are ``z1 = x0 + i x1``, ``z2 = x2 + i x3``; the Hermitian
    matrix ``((1+|z|^2) delta_ab - conj(z_a) z_b) / (1+|z|^2)^2`` is taken
    in the real form ``Re(u^T H conj(v))``.
    """

    def ev(x):
        z = x[..., 0::2] + 1j * x[..., 1::2]
        s = 1.0 + np.sum(np.abs(z) ** 2, axis=-1)
        h = (s[..., None, None] * np.eye(2) - np.conj(z)[..., :, None] * z[..., None, :]) / (s**2)[..., None, None]
        hr, hi = h.real, h.imag
        g = np.empty(x.shape[:-1] + (4, 4))
        g[..., 0::2, 0::2] = hr
        g[..., 1::2, 1::2] = hr
        g[..., 0::2, 1::2] = hi
        g[..., 1::2, 0::2] = -hi
        return g

    return ChartMetric(ev, *_box(-3, 3), "cp2")


def s3xs1() -> ChartMetric:
    """``delta / |x|^2``, the product of the unit 3-sphere with a line, centred at ``(0,0,0,1)``."""

    def ev(x):
        return (1.0 / np.sum(x * x, axis=-1))[..., None, None] * np.eye(4)

    lo = np.array([-0.5, -0.5, -0.5, 0.5])
    hi = np.array([0.5, 0.5, 0.5, 1.5])
    return ChartMetric(ev, lo, hi, "s3xs1", np.array([0.0, 0.0, 0.0, 1.0]))


def s2xs2(radius: float = 1.0) -> ChartMetric:
    """Product of two 2-spheres of equal radius, each in a stereographic chart."""
    if radius <= 0:
        raise InvalidArgumentError("radius must be positive")
    c = 4.0 * radius**2

    def ev(x):
        f1 = c / (1.0 + x[..., 0] ** 2 + x[..., 1] ** 2) ** 2
        f2 = c / (1.0 + x[..., 2] ** 2 + x[..., 3] ** 2) ** 2
        g = np.zeros(x.shape[:-1] + (4, 4))
        g[..., 0, 0] = g[..., 1, 1] = f1
        g[..., 2, 2] = g[..., 3, 3] = f2
        return g

    return ChartMetric(ev, *_box(-3, 3), "s2xs2")


PRESETS = ("flat", "stereo-s4", "cp2", "s3xs1", "s2xs2", "conformally-flat")


def get_preset(name: str, radius: float = 1.0, w: Optional[ScalarFunction] = None) -> ChartMetric:
    if name == "flat":
        return flat()
    if name == "stereo-s4":
        return stereographic_s4(radius)
    if name == "cp2":
        return fubini_study()
    if name == "s3xs1":
        return s3xs1()
    if name == "s2xs2":
        return s2xs2(radius)
    if name == "conformally-flat":
        return conformally_flat(w if w is not None else monomial(0.1, [2, 0, 0, 0]))
    raise NotFoundError(f"unknown chart preset {name!r}; expected one of {PRESETS}")


# ---------------------------------------------------------------------------
# finite-difference field calculus


def _d(fld, h):
    """Central-difference gradient of a field; the new index is axis 1."""
    offsets = h * np.eye(4)

    def df(x):
        n = x.shape[0]
        xp = (x[:, None, :] + offsets).reshape(-1, 4)
        xm = (x[:, None, :] - offsets).reshape(-1, 4)
        v = fld(np.concatenate([xp, xm]))
        diff = (v[: 4 * n] - v[4 * n :]) / (2.0 * h)
        return diff.reshape((n, 4) + v.shape[1:])

    return df


class _Fields:
    """Coordinate tensor fields of one metric at one step size (all indices down)."""

    def __init__(self, metric, h):
        self.metric = metric
        self.h = h
        self.dg = _d(metric, h)
        self.ddg = _d(self.dg, h)

    def ginv(self, x):
        return np.linalg.inv(self.metric(x))

    def christoffel(self, x, g=None, dg=None):
        """``Gamma^i_jk`` with shape ``(N, i, j, k)``."""
        g = self.metric(x) if g is None else g
        dg = self.dg(x) if dg is None else dg
        # dg[n, k, i, j] = d_k g_ij
        first = 0.5 * (np.einsum("njlk->nljk", dg) + np.einsum("nklj->nljk", dg) - np.einsum("nljk->nljk", dg))
        return np.einsum("nil,nljk->nijk", np.linalg.inv(g), first)

    def riemann(self, x):
        """``R_ijkl`` with ``R_0101 > 0`` on the round sphere."""
        g = self.metric(x)
        dg = self.dg(x)
        ddg = self.ddg(x)  # ddg[n, a, b, i, j] = d_a d_b g_ij
        gam = self.christoffel(x, g, dg)
        gam_low = np.einsum("nmi,nijk->nmjk", g, gam)  # Gamma_{m jk}
        # R_ijkl = 1/2 (g_il,jk + g_jk,il - g_ik,jl - g_jl,ik) + Gamma_{m il} Gamma^m_jk - Gamma_{m ik} Gamma^m_jl
        second = 0.5 * (
            np.einsum("njkil->nijkl", ddg)
            + np.einsum("niljk->nijkl", ddg)
            - np.einsum("njlik->nijkl", ddg)
            - np.einsum("nikjl->nijkl", ddg)
        )
        quad = np.einsum("nmil,nmjk->nijkl", gam_low, gam) - np.einsum("nmik,nmjl->nijkl", gam_low, gam)
        # sectional-curvature convention: R_ijij = K(e_i, e_j)
        return second + quad

    def ricci(self, x, riem=None, ginv=None):
        riem = self.riemann(x) if riem is None else riem
        ginv = self.ginv(x) if ginv is None else ginv
        return np.einsum("nik,nijkl->njl", ginv, riem)

    def pieces(self, x):
        """Metric, inverse, Riemann, Ricci, scalar, Schouten and Weyl at ``x``."""
        g = self.metric(x)
        gi = np.linalg.inv(g)
        riem = self.riemann(x)
        ric = self.ricci(x, riem, gi)
        r = np.einsum("nij,nij->n", gi, ric)
        a = ric - r[:, None, None] / 6.0 * g
        weyl = riem - 0.5 * _kn(a, g)
        return g, gi, riem, ric, r, a, weyl

    def weyl(self, x):
        return self.pieces(x)[6]

    def schouten(self, x):
        return self.pieces(x)[5]

    def scalar(self, x):
        return self.pieces(x)[4]

    def traceless_ricci(self, x):
        g, _, _, ric, r, _, _ = self.pieces(x)
        return ric - 0.25 * r[:, None, None] * g

    def covariant(self, fld):
        """``nabla T`` for a covariant tensor field, derivative index first."""
        dfld = _d(fld, self.h)

        def cov(x):
            t = fld(x)
            out = dfld(x).copy()
            gam = self.christoffel(x)
            rank = t.ndim - 1
            letters = "abcdef"[:rank]
            for s in range(rank):
                src = letters[:s] + "p" + letters[s + 1 :]
                out -= np.einsum(f"npm{letters[s]},n{src}->nm{letters}", gam, t)
            return out

        return cov


def _kn(h, k):
    """Kulkarni-Nomizu product for stacks of symmetric matrices."""
    return (
        np.einsum("nik,njl->nijkl", h, k)
        + np.einsum("njl,nik->nijkl", h, k)
        - np.einsum("nil,njk->nijkl", h, k)
        - np.einsum("njk,nil->nijkl", h, k)
    )


def _frame(g):
    """Orthonormal frame matrix ``F`` with ``F^T g F = I`` from the Cholesky factor."""
    l = np.linalg.cholesky(g)
    return np.linalg.inv(l).T


def to_frame(t, g):
    """Frame components of a covariant tensor given coordinate components and ``g``."""
    f = _frame(g)
    out = t
    for _ in range(t.ndim):
        out = np.tensordot(out, f, axes=([0], [0]))
    return out


def _richardson(q, richardson: bool):
    if not richardson:
        return q(1.0)
    coarse = q(1.0)
    fine = q(0.5)
    if isinstance(coarse, tuple):
        return tuple((4.0 * f - c) / 3.0 for f, c in zip(fine, coarse))
    return (4.0 * fine - coarse) / 3.0


# ---------------------------------------------------------------------------
# validation


def _check(chart: ChartMetric, x, h, levels: int = 4):
    x = np.asarray(x, dtype=float)
    if x.shape != (4,):
        raise InvalidArgumentError("point must have 4 coordinates")
    if not (H_MIN <= h <= H_MAX):
        raise InvalidArgumentError(f"step h={h} outside [{H_MIN}, {H_MAX}]")
    margin = levels * h
    if np.any(x - margin <= chart.lower) or np.any(x + margin >= chart.upper):
        raise DomainError(f"point {x.tolist()} is within {margin} of the chart boundary")
    g = chart(x[None])[0]
    if not np.allclose(g, g.T, atol=1e-12) or np.linalg.eigvalsh(g)[0] <= PD_TOL:
        raise InvalidMetricError(f"metric of chart {chart.label!r} is not positive definite at {x.tolist()}")
    return x


def _as_point(x):
    return np.asarray(x, dtype=float)[None]


# ---------------------------------------------------------------------------
# operations


def curvature_at(
    chart: ChartMetric, x, h: float = 1e-2, richardson: bool = True
) -> CurvatureDecomposition:
    """Weyl, trace-free Ricci and scalar curvature at ``x`` in the Cholesky frame."""
    x = _check(chart, x, h, levels=2)
    g = chart(x[None])[0]

    def q(scale):
        return to_frame(_Fields(chart, h * scale).riemann(_as_point(x))[0], g)

    return decompose(_richardson(q, richardson))


class JetData(NamedTuple):
    metric: np.ndarray
    first: np.ndarray  # first[k, i, j] = d_k g_ij
    second: np.ndarray  # second[a, b, i, j] = d_a d_b g_ij
    h: float
    mixed_residual: float
    mixed_constant: float


def jet_at(chart: ChartMetric, x, h: float = 1e-2) -> JetData:
    """Metric with first and second derivatives at ``x``.

    The second derivatives use different-step differences in the two
    directions, so their mixed-partial asymmetry measures the truncation
    error; ``mixed_constant`` is that residual divided by ``h^2``.
    """
    x = _check(chart, x, h, levels=2)
    p = _as_point(x)

    def q(scale):
        hh = h * scale
        return _d(chart.evaluator, hh)(p)[0], _d(_d(chart.evaluator, hh), hh)(p)[0]

    first, second = _richardson(q, True)
    lopsided = _d(_d(chart.evaluator, h), 0.5 * h)(p)[0]
    res = float(np.abs(lopsided - np.swapaxes(lopsided, 0, 1)).max())
    return JetData(chart(p)[0], first, second, h, res, res / h**2)


def bianchi_contraction_residual(chart: ChartMetric, x, h: float = 1e-2, richardson: bool = True) -> float:
    """Frame norm of ``(div W)_ijl - 1/2 (dA)_ijl``.

    ``(div W)_ijl = nabla^m W_ijml`` and ``(dA)_ijl = nabla_i A_jl - nabla_j A_il``;
    the contracted second Bianchi identity says this vanishes.
    """
    x = _check(chart, x, h, levels=3)
    g = chart(x[None])[0]
    gi = np.linalg.inv(g)

    def q(scale):
        f = _Fields(chart, h * scale)
        p = _as_point(x)
        nw = f.covariant(f.weyl)(p)[0]  # nw[m, i, j, k, l]
        na = f.covariant(f.schouten)(p)[0]  # na[m, j, l]
        div_w = np.einsum("mn,nijml->ijl", gi, nw)
        da = na - np.swapaxes(na, 0, 1)
        return div_w - 0.5 * da

    return float(np.sqrt(np.sum(to_frame(_richardson(q, richardson), g) ** 2)))


def bach_fd(chart: ChartMetric, x, h: float = 1e-2, richardson: bool = True) -> np.ndarray:
    """Bach tensor ``nabla^k nabla^l W_kijl + 1/2 R^kl W_kijl`` in the Cholesky frame."""
    x = _check(chart, x, h, levels=4)
    g = chart(x[None])[0]

    def q(scale):
        f = _Fields(chart, h * scale)
        p = _as_point(x)
        nnw = f.covariant(f.covariant(f.weyl))(p)[0]  # nnw[k, l, a, i, j, b] = nabla_k nabla_l W_aijb
        gi, ric, weyl = f.ginv(p)[0], f.pieces(p)[3][0], f.weyl(p)[0]
        ric_up = gi @ ric @ gi
        term1 = np.einsum("ka,lb,klaijb->ij", gi, gi, nnw)
        term2 = 0.5 * np.einsum("kl,kijl->ij", ric_up, weyl)
        return term1 + term2

    b = to_frame(_richardson(q, richardson), g)
    return 0.5 * (b + b.T)


class WeylConformal(NamedTuple):
    tensor_residual: float
    norm_residual: float


def weyl_conformal_residual(
    chart: ChartMetric, w: ScalarFunction, x, h: float = 1e-2, richardson: bool = True
) -> WeylConformal:
    """Compare the (1,3) Weyl tensors of ``g`` and ``e^{2w} g`` at ``x``.

    ``tensor_residual`` is the largest coordinate-component difference;
    ``norm_residual`` is ``| |W_hat|^2_hat - e^{-4w} |W|^2 |``.
    """
    x = _check(chart, x, h, levels=2)
    other = chart.conformal(w)
    _check(other, x, h, levels=2)

    def q(scale):
        out = []
        for c in (chart, other):
            f = _Fields(c, h * scale)
            p = _as_point(x)
            gi = f.ginv(p)[0]
            out.append(np.einsum("im,mjkl->ijkl", gi, f.weyl(p)[0]))
        return tuple(out)

    w13, w13_hat = _richardson(q, richardson)
    g = chart(x[None])[0]
    g_hat = other(x[None])[0]

    def norm2(w13, metric):
        low = np.einsum("im,mjkl->ijkl", metric, w13)
        return float(np.sum(to_frame(low, metric) ** 2))

    factor = math.exp(-4.0 * float(w(x)))
    return WeylConformal(
        float(np.abs(w13 - w13_hat).max()),
        abs(norm2(w13_hat, g_hat) - factor * norm2(w13, g)),
    )


class Sigma2Divergence(NamedTuple):
    residual: float
    lhs: float
    rhs: float
    m_identity_residual: float


def _sigma2_weyl(d: CurvatureDecomposition, alpha: float) -> float:
    rep = invariants(d)
    return rep.sigma2 - 0.25 * alpha * rep.normW2


def sigma2_divergence_residual(
    chart0: ChartMetric, w: ScalarFunction, alpha: float, x, h: float = 1e-2, richardson: bool = True
) -> Sigma2Divergence:
    """Check the divergence form of the conformal ``sigma_2`` equation at ``x``.

    With ``g = e^{2w} g0`` and
    ``M_ij = 2 S0_ij + 2 nabla_i nabla_j w - 2 (Lap w) g0_ij - 2 w_i w_j``,
    ``-div(M grad w) + sigma2(A0) - alpha/4 |W0|^2 = (sigma2(A_g) - alpha/4 |W_g|^2) e^{4w}``.
    Also reports the largest frame-component difference in
    ``M = S + S0 + |grad w|^2 g0``.
    """
    if alpha < 0:
        raise InvalidArgumentError("alpha must be non-negative")
    x = _check(chart0, x, h, levels=3)
    chart = chart0.conformal(w)
    _check(chart, x, h, levels=3)

    def wfield(pts):
        return w(pts)

    def q(scale):
        hh = h * scale
        f0 = _Fields(chart0, hh)
        dw = _d(wfield, hh)

        def s_tensor(fields, pts):
            g, _, _, ric, r, _, _ = fields.pieces(pts)
            return -ric + 0.5 * r[:, None, None] * g

        def m_tensor(pts):
            g = chart0(pts)
            gi = np.linalg.inv(g)
            grad = dw(pts)
            hess = _d(dw, hh)(pts) - np.einsum("nkij,nk->nij", f0.christoffel(pts), grad)
            lap = np.einsum("nij,nij->n", gi, hess)
            return (
                2.0 * s_tensor(f0, pts)
                + 2.0 * hess
                - 2.0 * lap[:, None, None] * g
                - 2.0 * np.einsum("ni,nj->nij", grad, grad)
            )

        def flux(pts):
            gi = np.linalg.inv(chart0(pts))
            return np.einsum("nia,nab,nbc,nc->ni", gi, m_tensor(pts), gi, dw(pts))

        p = _as_point(x)
        div = np.einsum("nii->n", _d(flux, hh)(p)) + np.einsum("niik,nk->n", f0.christoffel(p), flux(p))
        g0 = chart0(p)
        grad = dw(p)
        norm_grad = float(grad[0] @ np.linalg.inv(g0[0]) @ grad[0])
        identity = m_tensor(p)[0] - (
            s_tensor(_Fields(chart, hh), p)[0] + s_tensor(f0, p)[0] + norm_grad * g0[0]
        )
        return np.array([-div[0]]), identity

    div_term, identity = _richardson(q, richardson)
    d0 = curvature_at(chart0, x, h, richardson)
    dg = curvature_at(chart, x, h, richardson)
    lhs = float(div_term[0]) + _sigma2_weyl(d0, alpha)
    rhs = _sigma2_weyl(dg, alpha) * math.exp(4.0 * float(w(x)))
    g0 = chart0(x[None])[0]
    return Sigma2Divergence(
        abs(lhs - rhs), lhs, rhs, float(np.abs(to_frame(identity, g0)).max())
    )


def paneitz_apply(chart: ChartMetric, u: ScalarFunction, x, h: float = 1e-2, richardson: bool = True) -> float:
    """``(P u)(x)`` with ``P u = Lap^2 u - div((2/3 R g - 2 Ric) grad u)``."""
    x = _check(chart, x, h, levels=4)

    def ufield(pts):
        return u(pts)

    def q(scale):
        hh = h * scale
        f = _Fields(chart, hh)
        du = _d(ufield, hh)

        def laplacian(fld):
            dfld = _d(fld, hh)

            def lap(pts):
                gi = f.ginv(pts)
                hess = _d(dfld, hh)(pts) - np.einsum("nkij,nk->nij", f.christoffel(pts), dfld(pts))
                return np.einsum("nij,nij->n", gi, hess)

            return lap

        def flux(pts):
            g, gi, _, ric, r, _, _ = f.pieces(pts)
            t = (2.0 / 3.0) * r[:, None, None] * g - 2.0 * ric
            return np.einsum("nia,nab,nbc,nc->ni", gi, t, gi, du(pts))

        p = _as_point(x)
        bilap = laplacian(laplacian(ufield))(p)[0]
        div = np.einsum("nii->n", _d(flux, hh)(p))[0] + np.einsum("niik,nk->n", f.christoffel(p), flux(p))[0]
        return np.array([bilap - div])

    return float(_richardson(q, richardson)[0])


class GradientData(NamedTuple):
    gradE2: float
    gradR2: float
    gradW2: float
    alpha: float
    gradV2: float
    kato_slack: float


def gradient_data_at(
    chart: ChartMetric, x, h: float = 1e-2, alpha: float = 1.0, richardson: bool = True
) -> GradientData:
    """Frame norms of ``nabla E``, ``nabla R`` and ``nabla W``.

    ``gradV2 = alpha |nabla W|^2 + 2 |nabla E|^2``.  ``kato_slack`` is
    ``gradV2 - |nabla |V||^2`` with ``|V|^2 = alpha |W|^2 + 2 |E|^2``; Kato's
    inequality makes it non-negative.  It is ``inf`` where ``V = 0``.
    """
    if alpha < 0:
        raise InvalidArgumentError("alpha must be non-negative")
    x = _check(chart, x, h, levels=3)
    g = chart(x[None])[0]
    gi = np.linalg.inv(g)

    def q(scale):
        f = _Fields(chart, h * scale)
        p = _as_point(x)

        def v2(pts):
            gg, gii, _, ric, r, _, weyl = f.pieces(pts)
            e = ric - 0.25 * r[:, None, None] * gg
            e2 = np.einsum("nia,njb,nab,nij->n", gii, gii, e, e)
            w2 = np.einsum("nia,njb,nkc,nld,nabcd,nijkl->n", gii, gii, gii, gii, weyl, weyl)
            return alpha * w2 + 2.0 * e2

        return (
            f.covariant(f.traceless_ricci)(p)[0],
            _d(f.scalar, h * scale)(p)[0],
            f.covariant(f.weyl)(p)[0],
            _d(v2, h * scale)(p)[0],
            v2(p),
        )

    ne, nr, nw, dv2, v2 = _richardson(q, richardson)
    grad_e2 = float(np.sum(to_frame(ne, g) ** 2))
    grad_r2 = float(nr @ gi @ nr)
    grad_w2 = float(np.sum(to_frame(nw, g) ** 2))
    grad_v2 = alpha * grad_w2 + 2.0 * grad_e2
    v2 = float(v2[0])
    if v2 <= 1e-14:
        kato = math.inf
    else:
        kato = grad_v2 - float(dv2 @ gi @ dv2) / (4.0 * v2)
    return GradientData(grad_e2, grad_r2, grad_w2, alpha, grad_v2, kato)
