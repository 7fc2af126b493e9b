"""Pointwise algebra of four-dimensional curvature tensors.

All tensors are expressed in an orthonormal frame, so the metric is the
4x4 identity and index position does not matter.  Norms of (0,4) tensors
use the full contraction ``T_ijkl T_ijkl``; the endomorphism norm on
2-forms is a quarter of that (see :func:`end_norm2`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .errors import (
    InconsistentInputError,
    InvalidArgumentError,
    InvalidCurvatureError,
)

DIM = 4
G = np.eye(DIM)
SYMMETRY_TOL = 1e-12
INPUT_TOL = 1e-8
SQRT3 = np.sqrt(3.0)


def _as_sym2(h, name="tensor", tol=INPUT_TOL) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (DIM, DIM):
        raise InvalidArgumentError(f"{name} must be 4x4, got shape {h.shape}")
    scale = max(1.0, float(np.abs(h).max()))
    if np.abs(h - h.T).max() > tol * scale:
        raise InvalidArgumentError(f"{name} is not symmetric")
    return 0.5 * (h + h.T)


def kulkarni_nomizu(h, k) -> np.ndarray:
    """Kulkarni-Nomizu product of two symmetric 2-tensors.

    ``(h o k)_ijkl = h_ik k_jl + h_jl k_ik - h_il k_jk - h_jk k_il``.
    With this normalisation ``g o g`` has ``(g o g)_0101 = 2`` and the
    decomposition ``Riem = W + 1/2 E o g + R/24 g o g`` reconstructs the
    round sphere exactly.
    """
    h = _as_sym2(h, "h")
    k = _as_sym2(k, "k")
    return (
        np.einsum("ik,jl->ijkl", h, k)
        + np.einsum("jl,ik->ijkl", h, k)
        - np.einsum("il,jk->ijkl", h, k)
        - np.einsum("jk,il->ijkl", h, k)
    )


def symmetry_residual(riem) -> float:
    """Largest violation of the algebraic curvature symmetries."""
    r = np.asarray(riem, dtype=float)
    return float(
        max(
            np.abs(r + r.transpose(1, 0, 2, 3)).max(),
            np.abs(r + r.transpose(0, 1, 3, 2)).max(),
            np.abs(r - r.transpose(2, 3, 0, 1)).max(),
            np.abs(r + r.transpose(0, 2, 3, 1) + r.transpose(0, 3, 1, 2)).max(),
        )
    )


def curvature_tensor(components, tol=INPUT_TOL) -> np.ndarray:
    """Validate a rank-4 array as an algebraic curvature tensor.

    Raises :class:`InvalidCurvatureError` when the symmetry residual,
    relative to the largest component, exceeds ``tol``.
    """
    r = np.asarray(components, dtype=float)
    if r.shape != (DIM,) * 4:
        raise InvalidCurvatureError(f"expected shape (4, 4, 4, 4), got {r.shape}")
    if not np.all(np.isfinite(r)):
        raise InvalidCurvatureError("non-finite curvature component")
    scale = max(1.0, float(np.abs(r).max()))
    res = symmetry_residual(r)
    if res > tol * scale:
        raise InvalidCurvatureError(f"curvature symmetry residual {res:.3e} exceeds {tol:g}")
    return r


def ricci(riem) -> np.ndarray:
    return np.einsum("ijil->jl", riem)


def end_norm2(t) -> float:
    """Norm squared of a (0,4) tensor viewed as an endomorphism of 2-forms."""
    return 0.25 * float(np.sum(np.asarray(t) ** 2))


@dataclass(frozen=True)
class CurvatureDecomposition:
    """Orthogonal splitting ``Riem = W + 1/2 E o g + R/24 g o g``."""

    weyl: np.ndarray
    traceless_ricci: np.ndarray
    scalar: float

    @property
    def E(self) -> np.ndarray:
        return self.traceless_ricci

    @property
    def R(self) -> float:
        return self.scalar

    @property
    def ricci(self) -> np.ndarray:
        return self.traceless_ricci + 0.25 * self.scalar * G

    @property
    def schouten(self) -> np.ndarray:
        """``A = Ric - R/6 g = E + R/12 g``."""
        return self.traceless_ricci + self.scalar / 12.0 * G

    @property
    def S(self) -> np.ndarray:
        """``S = -Ric + R/2 g``, the first Newton tensor of ``A``."""
        return -self.ricci + 0.5 * self.scalar * G

    @property
    def Z(self) -> np.ndarray:
        return self.weyl + 0.5 * kulkarni_nomizu(self.traceless_ricci, G)

    @property
    def riemann(self) -> np.ndarray:
        return (
            self.weyl
            + 0.5 * kulkarni_nomizu(self.traceless_ricci, G)
            + self.scalar / 24.0 * kulkarni_nomizu(G, G)
        )

    @classmethod
    def from_parts(cls, weyl=None, traceless_ricci=None, scalar=0.0, tol=INPUT_TOL):
        """Build from user-supplied pieces, validating trace-freeness."""
        w = np.zeros((DIM,) * 4) if weyl is None else curvature_tensor(weyl, tol)
        e = np.zeros((DIM, DIM)) if traceless_ricci is None else _as_sym2(traceless_ricci, "E", tol)
        scale = max(1.0, float(np.abs(e).max()), float(np.abs(w).max()))
        if abs(np.trace(e)) > tol * scale:
            raise InvalidCurvatureError("traceless_ricci has non-zero trace")
        if np.abs(np.einsum("ijil->jl", w)).max() > tol * scale:
            raise InvalidCurvatureError("weyl has a non-zero contraction")
        return cls(w, e, float(scalar))


def decompose(riem, tol=INPUT_TOL) -> CurvatureDecomposition:
    """Split a curvature tensor into Weyl, trace-free Ricci and scalar parts."""
    r = curvature_tensor(riem, tol)
    ric = ricci(r)
    ric = 0.5 * (ric + ric.T)
    scal = float(np.trace(ric))
    e = ric - 0.25 * scal * G
    w = r - 0.5 * kulkarni_nomizu(e, G) - scal / 24.0 * kulkarni_nomizu(G, G)
    return CurvatureDecomposition(w, e, scal)


def sigma_k(eigenvalues, k: int) -> float:
    """Elementary symmetric polynomial of degree ``k``."""
    coeffs = np.poly(np.asarray(eigenvalues, dtype=float))
    return float((-1) ** k * coeffs[k])


@dataclass(frozen=True)
class InvariantReport:
    scalar: float
    normE2: float
    normW2: float
    normW2_end: float
    normZ2: float
    sigma1: float
    sigma2: float
    wp: Optional[float]
    q_alg: float
    gb_integrand: float
    trE3: float
    sigma2_closed_form: float = field(default=0.0, repr=False)

    def as_dict(self) -> dict:
        return {
            "scalar": self.scalar,
            "normE2": self.normE2,
            "normW2": self.normW2,
            "normW2_end": self.normW2_end,
            "normZ2": self.normZ2,
            "sigma1": self.sigma1,
            "sigma2": self.sigma2,
            "wp": self.wp,
            "q_alg": self.q_alg,
            "gb_integrand": self.gb_integrand,
            "trE3": self.trE3,
        }


def invariants(d: CurvatureDecomposition) -> InvariantReport:
    """Scalar invariants of a decomposed curvature tensor.

    ``sigma2`` comes from the eigenvalues of the Schouten tensor; the closed
    form ``-|E|^2/2 + R^2/24`` is kept alongside for cross-checking.  ``wp`` is
    ``None`` when ``|R| <= 1e-12``.
    """
    e, r = d.traceless_ricci, d.scalar
    normE2 = float(np.sum(e * e))
    normW2 = float(np.sum(d.weyl**2))
    lam = np.linalg.eigvalsh(d.schouten)
    s1 = float(np.sum(lam))
    s2 = sigma_k(lam, 2)
    normZ2 = normW2 + 2.0 * normE2
    wp = normZ2 / r**2 if abs(r) > 1e-12 else None
    return InvariantReport(
        scalar=r,
        normE2=normE2,
        normW2=normW2,
        normW2_end=normW2 / 4.0,
        normZ2=normZ2,
        sigma1=s1,
        sigma2=s2,
        wp=wp,
        q_alg=0.5 * s2,
        gb_integrand=0.25 * normW2 - 0.5 * normE2 + r * r / 24.0,
        trE3=float(np.trace(e @ e @ e)),
        sigma2_closed_form=-0.5 * normE2 + r * r / 24.0,
    )


class Pinching(str, enum.Enum):
    SPHERE_PINCHED = "SPHERE_PINCHED"
    BOUNDARY = "BOUNDARY"
    FAILS = "FAILS"


class PinchingResult(NamedTuple):
    tag: Pinching
    reason: str


def pinching_classify(rep: InvariantReport, tol: float = 1e-10) -> PinchingResult:
    """Compare the weak pinching quantity against the 1/6 threshold."""
    if rep.wp is None:
        return PinchingResult(Pinching.FAILS, "R = 0")
    if rep.scalar <= 0:
        return PinchingResult(Pinching.FAILS, "R < 0")
    if abs(rep.wp - 1.0 / 6.0) <= tol:
        return PinchingResult(Pinching.BOUNDARY, "WP = 1/6")
    if rep.wp < 1.0 / 6.0:
        return PinchingResult(Pinching.SPHERE_PINCHED, "R > 0 and WP < 1/6")
    return PinchingResult(Pinching.FAILS, "WP > 1/6")


class TraceSlack(NamedTuple):
    slack_trE3: float
    slack_scalar: Optional[float]


def sharp_trace_inequalities(d: CurvatureDecomposition) -> TraceSlack:
    """Slack in ``trE^3 >= -|E|^3/sqrt(3)`` and, if sigma2 >= 0, in ``R >= 2 sqrt(3)|E|``."""
    e = d.traceless_ricci
    norm_e = float(np.sqrt(np.sum(e * e)))
    slack1 = float(np.trace(e @ e @ e)) + norm_e**3 / SQRT3
    sigma2 = -0.5 * norm_e**2 + d.scalar**2 / 24.0
    slack2 = d.scalar - 2.0 * SQRT3 * norm_e if sigma2 >= 0 else None
    return TraceSlack(slack1, slack2)


def trE3_lower_bound_slack(e: np.ndarray) -> np.ndarray:
    """Vectorised ``trE^3 + |E|^3/sqrt(3)`` for a stack of trace-free matrices."""
    e = np.asarray(e, dtype=float)
    ev = np.linalg.eigvalsh(e)
    norm = np.sqrt(np.sum(ev**2, axis=-1))
    return np.sum(ev**3, axis=-1) + norm**3 / SQRT3


class ChainRecord(NamedTuple):
    residual_constraint: float
    slack: float


def lemma31_chain(normV2, R, lam, gradV2, gradR2, tol=INPUT_TOL) -> ChainRecord:
    """Check ``R^2/6 = |V|^2 + 4 lambda`` and report the slack of ``|grad V|^2 >= |grad R|^2/6``.

    The slack is reported, never asserted: the inequality is a theorem about
    genuine geometric data, not about arbitrary numbers.
    """
    if lam < 0 or R <= 0 or gradV2 < 0 or gradR2 < 0 or normV2 < 0:
        raise InvalidArgumentError("need lambda >= 0, R > 0 and non-negative norms")
    residual = R * R / 6.0 - normV2 - 4.0 * lam
    if abs(residual) > tol * max(1.0, R * R):
        raise InconsistentInputError(f"R^2/6 - |V|^2 - 4 lambda = {residual:.3e}")
    return ChainRecord(float(residual), float(gradV2 - gradR2 / 6.0))


def weyl_ricci_contraction(weyl, e) -> float:
    """``W_ijkl E_ik E_jl``."""
    return float(np.einsum("ijkl,ik,jl->", weyl, e, e))


def bach_algebraic(d: CurvatureDecomposition) -> np.ndarray:
    """Zero-derivative part ``1/2 R^kl W_kijl`` of the Bach tensor."""
    b = 0.5 * np.einsum("kl,kijl->ij", d.ricci, d.weyl)
    return 0.5 * (b + b.T)


def homothety_scale(d: CurvatureDecomposition, t: float) -> CurvatureDecomposition:
    """Curvature of ``t^2 g`` in a frame orthonormal for the rescaled metric."""
    if not t > 0:
        raise InvalidArgumentError("scale factor must be positive")
    f = 1.0 / (t * t)
    return CurvatureDecomposition(d.weyl * f, d.traceless_ricci * f, d.scalar * f)


def reverse_orientation(t: np.ndarray) -> np.ndarray:
    """Apply the reflection ``e_3 -> -e_3`` to a tensor of any rank.

    Reflection swaps self-dual and anti-self-dual 2-forms.
    """
    t = np.asarray(t, dtype=float)
    s = np.array([1.0, 1.0, 1.0, -1.0])
    out = t
    for axis in range(t.ndim):
        shape = [1] * t.ndim
        shape[axis] = DIM
        out = out * s.reshape(shape)
    return out


def random_curvature(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """Random algebraic curvature tensor from Kulkarni-Nomizu sums.

    Sums of ``h o h`` for random symmetric ``h`` span the whole space of
    algebraic curvature tensors, so this samples all three components.
    """
    r = np.zeros((DIM,) * 4)
    for _ in range(3):
        a = rng.normal(size=(DIM, DIM))
        h = 0.5 * (a + a.T)
        r += rng.normal() * kulkarni_nomizu(h, h)
    return scale * r


def random_traceless(rng: np.random.Generator, size=None) -> np.ndarray:
    shape = (DIM, DIM) if size is None else (size, DIM, DIM)
    a = rng.normal(size=shape)
    a = 0.5 * (a + np.swapaxes(a, -1, -2))
    tr = np.trace(a, axis1=-2, axis2=-1) / DIM
    return a - tr[..., None, None] * G
