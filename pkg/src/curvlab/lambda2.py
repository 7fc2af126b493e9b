"""Curvature operator on 2-forms and its self-dual/anti-self-dual splitting.

2-forms are antisymmetric 4x4 arrays with the inner product
``<a, b> = 1/2 a_ij b_ij`` and a (0,4) tensor acts by
``Z(w)_ij = 1/2 Z_ijkl w_kl``.  Under that identification the constant
curvature part ``R/24 g o g`` acts as ``R/12`` times the identity.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .errors import InconsistentInputError, InternalConsistencyError, InvalidArgumentError
from .tensor_core import CurvatureDecomposition, curvature_tensor, weyl_ricci_contraction

_S = 1.0 / np.sqrt(2.0)
CHECK_TOL = 1e-10


def _e(i, j):
    m = np.zeros((4, 4))
    m[i, j], m[j, i] = 1.0, -1.0
    return m


# (omega+, eta+, theta+, omega-, eta-, theta-)
BASIS = np.array(
    [
        _S * (_e(0, 1) + _e(2, 3)),
        _S * (_e(0, 2) - _e(1, 3)),
        _S * (_e(0, 3) + _e(1, 2)),
        _S * (_e(0, 1) - _e(2, 3)),
        _S * (_e(0, 2) + _e(1, 3)),
        _S * (_e(0, 3) - _e(1, 2)),
    ]
)
BASIS_PLUS = BASIS[:3]
BASIS_MINUS = BASIS[3:]


def curvature_operator(riem) -> np.ndarray:
    """6x6 matrix ``<Riem(beta_b), beta_a>`` in the oriented basis above."""
    r = curvature_tensor(riem)
    m = 0.25 * np.einsum("aij,ijkl,bkl->ab", BASIS, r, BASIS)
    return 0.5 * (m + m.T)


def block_to_tensor(block, basis=BASIS_PLUS) -> np.ndarray:
    """(0,4) tensor of a symmetric endomorphism given on a 3-dimensional basis of 2-forms."""
    return np.einsum("ab,aij,bkl->ijkl", np.asarray(block, dtype=float), basis, basis)


@dataclass(frozen=True)
class SingerThorpeBlocks:
    w_plus: np.ndarray
    w_minus: np.ndarray
    mixed: np.ndarray  # maps anti-self-dual forms to self-dual ones
    scalar: float

    def assemble(self) -> np.ndarray:
        shift = self.scalar / 12.0 * np.eye(3)
        top = np.hstack([self.w_plus + shift, self.mixed])
        bottom = np.hstack([self.mixed.T, self.w_minus + shift])
        return np.vstack([top, bottom])

    def swapped(self) -> "SingerThorpeBlocks":
        """Blocks of the same curvature for the opposite orientation."""
        return SingerThorpeBlocks(self.w_minus, self.w_plus, self.mixed.T, self.scalar)


def singer_thorpe(op, scalar: float, tol: float = 1e-8) -> SingerThorpeBlocks:
    """Split the curvature operator into ``W+ + R/12``, ``W- + R/12`` and ``B``."""
    op = np.asarray(op, dtype=float)
    mismatch = np.trace(op) - scalar / 2.0
    if abs(mismatch) > tol * max(1.0, abs(scalar)):
        raise InconsistentInputError(f"trace of operator differs from R/2 by {mismatch:.3e}")
    shift = scalar / 12.0 * np.eye(3)
    return SingerThorpeBlocks(
        w_plus=op[:3, :3] - shift,
        w_minus=op[3:, 3:] - shift,
        mixed=op[:3, 3:].copy(),
        scalar=float(scalar),
    )


def blocks_of(d: CurvatureDecomposition) -> SingerThorpeBlocks:
    return singer_thorpe(curvature_operator(d.riemann), d.scalar)


def _diagonal_frame_eigenvalues(e: np.ndarray) -> np.ndarray:
    # keep the caller's frame when it already diagonalises E
    off = e - np.diag(np.diag(e))
    if np.abs(off).max() <= 1e-14 * max(1.0, np.abs(e).max()):
        return np.diag(e).copy()
    return np.linalg.eigvalsh(e)


def mu_values(e) -> np.ndarray:
    """``mu_i = (E_11 + E_{i+1,i+1})/2`` in a frame diagonalising ``E``."""
    ev = _diagonal_frame_eigenvalues(np.asarray(e, dtype=float))
    return 0.5 * (ev[0] + ev[1:])


@dataclass(frozen=True)
class SpectralData:
    lambda_plus: np.ndarray
    lambda_minus: np.ndarray
    b: np.ndarray
    mu: np.ndarray

    @property
    def det_plus(self) -> float:
        return float(np.prod(self.lambda_plus))

    @property
    def det_minus(self) -> float:
        return float(np.prod(self.lambda_minus))


def spectral(blocks: SingerThorpeBlocks, e, tol: float = CHECK_TOL) -> SpectralData:
    """Sorted spectra of ``W+``, ``W-`` and ``BB*``, cross-checked against ``E``."""
    e = np.asarray(e, dtype=float)
    lp = np.linalg.eigvalsh(0.5 * (blocks.w_plus + blocks.w_plus.T))
    lm = np.linalg.eigvalsh(0.5 * (blocks.w_minus + blocks.w_minus.T))
    b = np.sort(np.linalg.svd(blocks.mixed, compute_uv=False))
    mu = mu_values(e)
    norm_e2 = float(np.sum(e * e))
    scale = max(1.0, norm_e2)
    if abs(norm_e2 - 4.0 * np.sum(b**2)) > tol * scale:
        raise InconsistentInputError("|E|^2 != 4 sum b_i^2: E does not match the mixed block")
    tr3 = float(np.trace(e @ e @ e))
    if abs(tr3 - 24.0 * np.prod(mu)) > tol * max(1.0, scale**1.5):
        raise InconsistentInputError("trE^3 != 24 mu1 mu2 mu3")
    return SpectralData(lp, lm, b, mu)


def spectral_of(d: CurvatureDecomposition) -> SpectralData:
    return spectral(blocks_of(d), d.traceless_ricci)


class CubicIdentities(NamedTuple):
    residual_i: float
    residual_ii: float
    residual_iii: float


def weyl_cubic_identities(w_plus, weyl=None) -> CubicIdentities:
    """Residuals of the three contraction identities for the self-dual Weyl part.

    (i)   ``W+_ijkl W+_jskl = -1/4 |W+|^2 delta_is``
    (ii)  ``W+_msij W+_ijkl W+_mskl = 24 det W+``
    (iii) ``4 W_miks W+_ijkl W+_jmsl = 48 det W+``

    ``weyl`` is the full Weyl tensor for (iii); it defaults to the self-dual
    part alone (the anti-self-dual part does not contribute).  Residuals are
    relative to ``max(1, |W+|^3)``.
    """
    w_plus = np.asarray(w_plus, dtype=float)
    wp = block_to_tensor(w_plus)
    full = wp if weyl is None else np.asarray(weyl, dtype=float)
    n2 = float(np.sum(wp**2))
    det = float(np.linalg.det(w_plus))
    scale = max(1.0, n2**1.5)
    lhs_i = np.einsum("ijkl,jskl->is", wp, wp)
    res_i = float(np.abs(lhs_i + 0.25 * n2 * np.eye(4)).max()) / max(1.0, n2)
    res_ii = abs(float(np.einsum("msij,ijkl,mskl->", wp, wp, wp)) - 24.0 * det) / scale
    res_iii = abs(4.0 * float(np.einsum("miks,ijkl,jmsl->", full, wp, wp)) - 48.0 * det) / scale
    return CubicIdentities(res_i, res_ii, res_iii)


class Decoupling(NamedTuple):
    contraction: float
    pairing: float
    bound: float


def decoupling(spec: SpectralData, blocks: SingerThorpeBlocks, e, weyl) -> Decoupling:
    """Weyl-Ricci contraction, its 2-form pairing, and the spectral upper bound.

    ``W_ijkl E_ik E_jl = 4<W+, BB*> + 4<W-, B*B> <= 4 sum (lambda_i^+ + lambda_i^-) b_i^2``
    with both spectra ascending.
    """
    e = np.asarray(e, dtype=float)
    contraction = weyl_ricci_contraction(weyl, e)
    bb = blocks.mixed @ blocks.mixed.T
    btb = blocks.mixed.T @ blocks.mixed
    pairing = 4.0 * float(np.trace(blocks.w_plus @ bb) + np.trace(blocks.w_minus @ btb))
    b2 = spec.b**2
    bound = 4.0 * float(np.dot(spec.lambda_plus, b2) + np.dot(spec.lambda_minus, b2))
    scale = max(1.0, float(np.sum(weyl**2)) ** 0.5 * float(np.sum(e * e)))
    if abs(contraction - pairing) > CHECK_TOL * scale:
        raise InternalConsistencyError(
            f"W_ijkl E_ik E_jl = {contraction!r} but 2-form pairing = {pairing!r}"
        )
    return Decoupling(contraction, pairing, bound)


def F_spectral(lambda_plus, lambda_minus, b) -> float:
    """Spectral lower bound for the pointwise integrand on the constraint set."""
    lp = np.asarray(lambda_plus, dtype=float)
    lm = np.asarray(lambda_minus, dtype=float)
    b = np.asarray(b, dtype=float)
    b2 = float(np.sum(b**2))
    l2 = float(np.sum(lp**2) + np.sum(lm**2))
    return (
        -108.0 * np.prod(lp)
        - 108.0 * np.prod(lm)
        - 144.0 * np.prod(b)
        - 36.0 * float(np.dot(lp + lm, b**2))
        + np.sqrt(48.0 * b2 + 24.0 * l2) * (4.0 * b2 + 3.0 * l2)
    )


class IntegrandF(NamedTuple):
    f_value: Optional[float]
    f_spectral: Optional[float]
    key_integrand: float


def integrand_F(d: CurvatureDecomposition, alpha: float = 1.0, tol: float = 1e-8) -> IntegrandF:
    """Pointwise integrands of the Bach-flat inequality.

    ``key_integrand`` is the alpha-dependent integrand
    ``6trE^3 + R|E|^2 - 3(alpha+2) W.E.E - 108 alpha (det W+ + det W-) + 3/4 alpha R |W|^2``.

    ``f_value`` is the alpha = 1 limit with ``R`` replaced by
    ``sqrt(12|E|^2 + 24||W+||^2 + 24||W-||^2)``; it and its spectral lower bound
    ``f_spectral`` are only defined where ``sigma2(A) = |W|^2/4``.
    """
    if alpha < 0:
        raise InvalidArgumentError("alpha must be non-negative")
    blocks = blocks_of(d)
    spec = spectral(blocks, d.traceless_ricci)
    e, r = d.traceless_ricci, d.scalar
    norm_e2 = float(np.sum(e * e))
    norm_w2 = float(np.sum(d.weyl**2))
    tr3 = float(np.trace(e @ e @ e))
    wee = weyl_ricci_contraction(d.weyl, e)
    dets = spec.det_plus + spec.det_minus
    key = (
        6.0 * tr3
        + r * norm_e2
        - 3.0 * (alpha + 2.0) * wee
        - 108.0 * alpha * dets
        + 0.75 * alpha * r * norm_w2
    )
    sigma2 = -0.5 * norm_e2 + r * r / 24.0
    if abs(sigma2 - 0.25 * norm_w2) > tol * max(1.0, abs(sigma2)):
        return IntegrandF(None, None, float(key))
    r_c = np.sqrt(12.0 * norm_e2 + 24.0 * float(np.sum(spec.lambda_plus**2) + np.sum(spec.lambda_minus**2)))
    f_value = -108.0 * dets + 6.0 * tr3 - 9.0 * wee + r_c * (norm_e2 + 0.75 * norm_w2)
    f_spec = F_spectral(spec.lambda_plus, spec.lambda_minus, spec.b)
    return IntegrandF(float(f_value), float(f_spec), float(key))


class WeitzenbockResiduals(NamedTuple):
    selfdual: float
    bach_flat_weyl: float
    bach_flat_ricci: float
    divergence: float


def weitzenbock_symmetric_residual(d: CurvatureDecomposition) -> WeitzenbockResiduals:
    """Pointwise forms of the Bach-flat integral identities when all derivatives vanish.

    Valid for locally symmetric data: the gradient terms are dropped, so each
    residual should be zero.
    """
    blocks = blocks_of(d)
    spec = spectral(blocks, d.traceless_ricci)
    e, r = d.traceless_ricci, d.scalar
    wp2 = 4.0 * float(np.sum(spec.lambda_plus**2))
    w2 = float(np.sum(d.weyl**2))
    wee = weyl_ricci_contraction(d.weyl, e)
    return WeitzenbockResiduals(
        selfdual=72.0 * spec.det_plus - 0.5 * r * wp2,
        bach_flat_weyl=72.0 * spec.det_plus + 72.0 * spec.det_minus - 0.5 * r * w2 + 2.0 * wee,
        bach_flat_ricci=6.0 * float(np.trace(e @ e @ e)) + r * float(np.sum(e * e)) - 6.0 * wee,
        divergence=0.5 * wee,
    )


def random_decomposition(rng: np.random.Generator, scalar_scale: float = 10.0) -> CurvatureDecomposition:
    """Random point data with independent ``W+``, ``W-``, ``E`` and ``R``."""

    def traceless3():
        a = rng.normal(size=(3, 3))
        a = 0.5 * (a + a.T)
        return a - np.trace(a) / 3.0 * np.eye(3)

    weyl = block_to_tensor(traceless3(), BASIS_PLUS) + block_to_tensor(traceless3(), BASIS_MINUS)
    a = rng.normal(size=(4, 4))
    e = 0.5 * (a + a.T)
    e -= np.trace(e) / 4.0 * np.eye(4)
    return CurvatureDecomposition(weyl, e, float(scalar_scale * rng.normal()))
