"""Numerical certification of the cubic inequality ``I(B, X, Y) >= 0``.

A point is a 9-vector ``(b1, b2, b3, x1, x2, x3, y1, y2, y3)``.  The
constraint manifold is ``2|B|^2 + |X|^2 + |Y|^2 = 1`` together with
``sum x = sum y = 0``.  ``I`` is homogeneous of degree three, so the
normalisation loses nothing.

The certificate is statistical: uniform sampling on the constraint set,
followed by projected gradient descent from the best samples.  It is not
an interval-arithmetic proof.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import DegenerateInputError, InvalidArgumentError

SQRT6 = math.sqrt(6.0)

FAMILY_ZERO = "(i)"
FAMILY_ISOLATED_WEYL = "(ii)"
FAMILY_EQUAL_B = "(iii)"
FAMILY_POSITIVE = "interior-positive"
FAMILY_NONE = "none"

SLICES = ("full", "b0", "xy0")


@dataclass(frozen=True)
class AppendixPoint:
    b: np.ndarray
    x: np.ndarray
    y: np.ndarray

    @classmethod
    def from_vector(cls, v) -> "AppendixPoint":
        v = np.asarray(v, dtype=float)
        return cls(v[0:3].copy(), v[3:6].copy(), v[6:9].copy())

    def vector(self) -> np.ndarray:
        return np.concatenate([self.b, self.x, self.y])

    @property
    def phi1(self) -> float:
        return float(2.0 * self.b @ self.b + self.x @ self.x + self.y @ self.y)

    def to_dict(self) -> dict:
        return {"b": self.b.tolist(), "x": self.x.tolist(), "y": self.y.tolist()}


def _split(v):
    v = np.asarray(v, dtype=float)
    return v[..., 0:3], v[..., 3:6], v[..., 6:9]


def eval_I_vec(v) -> np.ndarray:
    """``I`` evaluated on a stack of 9-vectors (last axis)."""
    b, x, y = _split(v)
    b2 = np.sum(b * b, axis=-1)
    xy2 = np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)
    return (
        SQRT6 * (4.0 * b2 + 3.0 * xy2) * np.sqrt(2.0 * b2 + xy2)
        - 54.0 * np.prod(x, axis=-1)
        - 54.0 * np.prod(y, axis=-1)
        - 72.0 * np.prod(b, axis=-1)
        - 18.0 * np.sum((x + y) * b * b, axis=-1)
    )


def eval_I(p) -> float:
    """``I`` at a single point (an :class:`AppendixPoint` or a 9-vector)."""
    v = p.vector() if isinstance(p, AppendixPoint) else p
    return float(eval_I_vec(v))


def eval_J(x, y) -> float:
    """``I`` restricted to ``B = 0``: ``3 sqrt6 (|X|^2+|Y|^2)^{3/2} - 54 x1x2x3 - 54 y1y2y3``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    s = float(x @ x + y @ y)
    return 3.0 * SQRT6 * s * math.sqrt(s) - 54.0 * float(np.prod(x)) - 54.0 * float(np.prod(y))


def eval_F(spec) -> float:
    """``F = 2 I`` with ``x = lambda+``, ``y = lambda-`` and ``B = b``."""
    v = np.concatenate([spec.b, spec.lambda_plus, spec.lambda_minus])
    return 2.0 * eval_I(v)


def grad_I_vec(v) -> np.ndarray:
    """Analytic gradient of ``I`` (last axis); singular only at the origin."""
    b, x, y = _split(v)
    b2 = np.sum(b * b, axis=-1, keepdims=True)
    xy2 = np.sum(x * x, axis=-1, keepdims=True) + np.sum(y * y, axis=-1, keepdims=True)
    phi = 2.0 * b2 + xy2
    root = np.sqrt(phi)
    t = 4.0 * b2 + 3.0 * xy2
    # d/dv of sqrt6 * t * sqrt(phi)
    gb = SQRT6 * (8.0 * b * root + t * 2.0 * b / root)
    gx = SQRT6 * (6.0 * x * root + t * x / root)
    gy = SQRT6 * (6.0 * y * root + t * y / root)

    def cyc_prod(u):
        return np.stack([u[..., 1] * u[..., 2], u[..., 0] * u[..., 2], u[..., 0] * u[..., 1]], axis=-1)

    gb = gb - 72.0 * cyc_prod(b) - 36.0 * (x + y) * b
    gx = gx - 54.0 * cyc_prod(x) - 18.0 * b * b
    gy = gy - 54.0 * cyc_prod(y) - 18.0 * b * b
    return np.concatenate([gb, gx, gy], axis=-1)


def phi1_vec(v) -> np.ndarray:
    b, x, y = _split(v)
    return 2.0 * np.sum(b * b, axis=-1) + np.sum(x * x, axis=-1) + np.sum(y * y, axis=-1)


def _retract(v) -> np.ndarray:
    v = np.array(v, dtype=float, copy=True)
    v[..., 3:6] -= v[..., 3:6].mean(axis=-1, keepdims=True)
    v[..., 6:9] -= v[..., 6:9].mean(axis=-1, keepdims=True)
    return v / np.sqrt(phi1_vec(v))[..., None]


def canonicalize(v) -> np.ndarray:
    """Chamber reduction: ``0 <= b1 <= b2 <= b3``, ``x`` and ``y`` ascending.

    None of these moves increases ``I`` (rearrangement inequality for the
    ``x_i b_i^2`` coupling, and ``b1 b2 b3 >= 0`` after taking moduli).
    """
    v = np.asarray(v, dtype=float)
    b = np.sort(np.abs(v[..., 0:3]), axis=-1)
    x = np.sort(v[..., 3:6], axis=-1)
    y = np.sort(v[..., 6:9], axis=-1)
    return np.concatenate([b, x, y], axis=-1)


def project_constraints(raw) -> AppendixPoint:
    """Map a raw 9-vector onto the constraint set, in the ordered chamber."""
    v = np.array(raw, dtype=float, copy=True)
    if v.shape != (9,):
        raise InvalidArgumentError("raw point must have 9 entries")
    v[3:6] -= v[3:6].mean()
    v[6:9] -= v[6:9].mean()
    v = canonicalize(v)
    phi = float(phi1_vec(v))
    if phi <= 1e-24:
        raise DegenerateInputError("point vanishes after removing the x and y means")
    return AppendixPoint.from_vector(v / math.sqrt(phi))


def project_constraints_batch(raw) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    v = raw.copy()
    v[:, 3:6] -= v[:, 3:6].mean(axis=1, keepdims=True)
    v[:, 6:9] -= v[:, 6:9].mean(axis=1, keepdims=True)
    v = canonicalize(v)
    phi = phi1_vec(v)
    keep = phi > 1e-24
    return v[keep] / np.sqrt(phi[keep])[:, None]


def _kkt_system(v):
    """Linear system ``A @ (mu, beta, gamma) = rhs`` for the nine Lagrange equations."""
    b, x, y = v[0:3], v[3:6], v[6:9]
    cyc = [(1, 2), (0, 2), (0, 1)]
    rows, rhs = [], []
    for i, (j, k) in enumerate(cyc):
        rows.append([b[i], 0.0, 0.0])
        rhs.append(-9.0 * (x[i] + y[i]) * b[i] - 18.0 * b[j] * b[k] + 2.0 * SQRT6 * b[i])
    for i, (j, k) in enumerate(cyc):
        rows.append([x[i], 1.0, 0.0])
        rhs.append(-27.0 * x[j] * x[k] - 9.0 * b[i] ** 2 + 3.0 * SQRT6 * x[i])
    for i, (j, k) in enumerate(cyc):
        rows.append([y[i], 0.0, 1.0])
        rhs.append(-27.0 * y[j] * y[k] - 9.0 * b[i] ** 2 + 3.0 * SQRT6 * y[i])
    return np.array(rows), np.array(rhs)


def kkt_residual(p, mu: float, beta: float, gamma: float) -> np.ndarray:
    """Residuals of the Lagrange equations at ``p`` for given multipliers.

    For ``B = 0`` these are the six equations ``-27 x_j x_k = mu x_i + beta``
    (and the ``y`` analogues with ``gamma``); otherwise the nine equations
    with ``mu - 2 sqrt6`` on the ``b`` rows and ``mu - 3 sqrt6`` on the
    ``x``, ``y`` rows.  The two forms use differently shifted ``mu``.
    """
    v = p.vector() if isinstance(p, AppendixPoint) else np.asarray(p, dtype=float)
    if not np.any(v[0:3]):
        x, y = v[3:6], v[6:9]
        cyc = [(1, 2), (0, 2), (0, 1)]
        rx = [-27.0 * x[j] * x[k] - mu * x[i] - beta for i, (j, k) in enumerate(cyc)]
        ry = [-27.0 * y[j] * y[k] - mu * y[i] - gamma for i, (j, k) in enumerate(cyc)]
        return np.array(rx + ry)
    a, rhs = _kkt_system(v)
    return rhs - a @ np.array([mu, beta, gamma])


class Multipliers(NamedTuple):
    mu: float
    beta: float
    gamma: float
    residual: float


def recover_multipliers(p) -> Multipliers:
    """Least-squares multipliers for the nine-equation system; max-abs residual."""
    v = p.vector() if isinstance(p, AppendixPoint) else np.asarray(p, dtype=float)
    a, rhs = _kkt_system(v)
    sol, *_ = np.linalg.lstsq(a, rhs, rcond=None)
    res = float(np.abs(rhs - a @ sol).max())
    return Multipliers(float(sol[0]), float(sol[1]), float(sol[2]), res)


def classify_equality(p, tol: float = 1e-6) -> str:
    """Match a point against the three equality families after chamber sorting."""
    v = p.vector() if isinstance(p, AppendixPoint) else np.asarray(p, dtype=float)
    if np.abs(v).max() <= tol:
        return FAMILY_ZERO
    c = canonicalize(v)
    b, x, y = c[0:3], c[3:6], c[6:9]

    def is_weyl_vertex(u):
        a = math.sqrt(float(u @ u) / 6.0)
        return a > tol and np.abs(u - np.array([-a, -a, 2.0 * a])).max() <= tol

    if np.abs(b).max() <= tol:
        if np.abs(y).max() <= tol and is_weyl_vertex(x):
            return FAMILY_ISOLATED_WEYL
        if np.abs(x).max() <= tol and is_weyl_vertex(y):
            return FAMILY_ISOLATED_WEYL
    if np.abs(x).max() <= tol and np.abs(y).max() <= tol:
        if b[0] > tol and b[2] - b[0] <= tol:
            return FAMILY_EQUAL_B
    return FAMILY_NONE


def _slice_mask(slice_name: str) -> np.ndarray:
    if slice_name not in SLICES:
        raise InvalidArgumentError(f"unknown slice {slice_name!r}; expected one of {SLICES}")
    mask = np.ones(9)
    if slice_name == "b0":
        mask[0:3] = 0.0
    elif slice_name == "xy0":
        mask[3:9] = 0.0
    return mask


def projected_gradient(v, mask=None) -> np.ndarray:
    """Gradient of ``I`` projected onto the tangent space of the constraint set."""
    v = np.atleast_2d(v)
    g = grad_I_vec(v)
    if mask is not None:
        g = g * mask
    g = g.copy()
    # normals to sum x = 0 and sum y = 0
    g[:, 3:6] -= g[:, 3:6].mean(axis=1, keepdims=True)
    g[:, 6:9] -= g[:, 6:9].mean(axis=1, keepdims=True)
    # normal to phi1 = 1 (orthogonal to the two above on the constraint set)
    n = np.concatenate([4.0 * v[:, 0:3], 2.0 * v[:, 3:9]], axis=1)
    if mask is not None:
        n = n * mask
    nn = np.sum(n * n, axis=1, keepdims=True)
    g = g - np.sum(g * n, axis=1, keepdims=True) / nn * n
    return g


class DescentResult(NamedTuple):
    points: np.ndarray
    values: np.ndarray
    grad_norms: np.ndarray
    iterations: np.ndarray


def descend(starts, slice_name: str = "full", gtol: float = 1e-10, max_iter: int = 20000) -> DescentResult:
    """Projected gradient descent with step halving, run on a batch of starts.

    Steps use a Barzilai-Borwein trial length, halved until the Armijo
    condition holds; the iterate is pulled back onto the constraint set and
    into the chamber after every step.
    """
    mask = _slice_mask(slice_name)
    v = canonicalize(_retract(np.atleast_2d(starts) * mask))
    n = v.shape[0]
    f = eval_I_vec(v)
    g = projected_gradient(v, mask)
    gn = np.linalg.norm(g, axis=1)
    step = np.full(n, 0.05)
    iters = np.zeros(n, dtype=int)
    active = gn >= gtol
    for _ in range(max_iter):
        if not active.any():
            break
        idx = np.flatnonzero(active)
        va, fa, ga, sa = v[idx], f[idx], g[idx], step[idx]
        gn2 = np.sum(ga * ga, axis=1)
        accepted = np.zeros(idx.size, dtype=bool)
        vnew = va.copy()
        fnew = fa.copy()
        t = sa.copy()
        for _halving in range(60):
            todo = ~accepted
            if not todo.any():
                break
            trial = canonicalize(_retract(va[todo] - t[todo, None] * ga[todo]))
            ft = eval_I_vec(trial)
            ok = ft <= fa[todo] - 1e-4 * t[todo] * gn2[todo]
            sub = np.flatnonzero(todo)
            vnew[sub[ok]] = trial[ok]
            fnew[sub[ok]] = ft[ok]
            accepted[sub[ok]] = True
            t[sub[~ok]] *= 0.5
        # a start that cannot decrease any further is stationary to rounding
        stalled = ~accepted
        gnew = projected_gradient(vnew, mask)
        s_vec = vnew - va
        y_vec = gnew - ga
        sy = np.sum(s_vec * y_vec, axis=1)
        ss = np.sum(s_vec * s_vec, axis=1)
        bb = np.where(sy > 1e-300, ss / np.where(sy > 1e-300, sy, 1.0), 2.0 * t)
        step[idx] = np.clip(bb, 1e-8, 1.0)
        v[idx], f[idx], g[idx] = vnew, fnew, gnew
        gn[idx] = np.linalg.norm(gnew, axis=1)
        iters[idx] += 1
        active[idx] = (gn[idx] >= gtol) & ~stalled
    return DescentResult(v, f, gn, iters)


def _lagrange_residual(z, free):
    v = np.zeros(9)
    v[free] = z[: free.size]
    m1, m2, m3 = z[free.size :]
    g = grad_I_vec(v)
    n1 = np.concatenate([4.0 * v[0:3], 2.0 * v[3:9]])
    n2 = np.r_[0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0]
    n3 = np.r_[0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0]
    stat = (g - m1 * n1 - m2 * n2 - m3 * n3)[free]
    return np.concatenate([stat, [phi1_vec(v) - 1.0, v[3:6].sum(), v[6:9].sum()]])


def newton_polish(v, slice_name: str = "full", iterations: int = 12) -> np.ndarray:
    """Newton iterations on the Lagrange system from a near-critical point.

    Near a minimiser ``I`` is close to zero and line searches on function
    values stall at rounding level, while the gradient is still of order
    ``1e-7``; Newton on the stationarity equations drives it to rounding
    level.  The Jacobian is a central difference of the analytic gradient.
    """
    mask = _slice_mask(slice_name)
    free = np.flatnonzero(mask)
    v = np.asarray(v, dtype=float) * mask
    g = grad_I_vec(v)
    n1 = np.concatenate([4.0 * v[0:3], 2.0 * v[3:9]])
    m1 = float(g @ n1) / float(n1 @ n1)
    z = np.concatenate([v[free], [m1, 0.0, 0.0]])
    best = z.copy()
    best_res = np.abs(_lagrange_residual(z, free)).max()
    h = 1e-7
    for _ in range(iterations):
        f0 = _lagrange_residual(z, free)
        jac = np.empty((f0.size, z.size))
        for k in range(z.size):
            dz = np.zeros(z.size)
            dz[k] = h
            jac[:, k] = (_lagrange_residual(z + dz, free) - _lagrange_residual(z - dz, free)) / (2.0 * h)
        step, *_ = np.linalg.lstsq(jac, -f0, rcond=1e-12)
        z = z + step
        res = np.abs(_lagrange_residual(z, free)).max()
        if res < best_res:
            best, best_res = z.copy(), res
        if np.abs(step).max() < 1e-15:
            break
    out = np.zeros(9)
    out[free] = best[: free.size]
    return _retract(out)


@dataclass
class LocalMinimum:
    value: float
    point: AppendixPoint
    family: str
    kkt_residual: float
    grad_norm: float
    iterations: int

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "point": self.point.to_dict(),
            "family": self.family,
            "kkt_residual": self.kkt_residual,
            "grad_norm": self.grad_norm,
            "iterations": self.iterations,
        }


@dataclass
class CertificateReport:
    global_min_estimate: float
    argmin: AppendixPoint
    equality_family: str
    n_starts: int
    n_samples: int
    seed: int
    kkt_residual_at_argmin: float
    tol: float
    slice: str
    sample_min: float
    local_minima: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.global_min_estimate >= -self.tol

    def to_dict(self) -> dict:
        return {
            "global_min_estimate": self.global_min_estimate,
            "argmin": self.argmin.to_dict(),
            "equality_family": self.equality_family,
            "n_starts": self.n_starts,
            "n_samples": self.n_samples,
            "seed": self.seed,
            "kkt_residual_at_argmin": self.kkt_residual_at_argmin,
            "tol": self.tol,
            "slice": self.slice,
            "sample_min": self.sample_min,
            "passed": self.passed,
            "local_minima": [m.to_dict() for m in self.local_minima],
        }


@dataclass(frozen=True)
class CertifyConfig:
    n_samples: int = 100_000
    n_starts: int = 200
    seed: int = 42
    tol: float = 1e-8
    slice: str = "full"
    zero_tol: float = 1e-8
    family_tol: float = 1e-6
    descent_gtol: float = 1e-6
    max_iter: int = 5000

    def validate(self) -> None:
        if self.n_samples < 1 or self.n_starts < 1:
            raise InvalidArgumentError("need at least one sample and one start")
        if self.tol < 0:
            raise InvalidArgumentError("tol must be non-negative")
        _slice_mask(self.slice)


def sample_constraint_set(n: int, seed: int, slice_name: str = "full") -> np.ndarray:
    """``n`` chamber-reduced points from Gaussian raws projected onto the constraint set."""
    rng = np.random.default_rng(seed)
    raw = rng.standard_normal((n, 9)) * _slice_mask(slice_name)
    return project_constraints_batch(raw)


def _order_key(value, point):
    return (round(float(value), 15),) + tuple(np.round(point, 12))


def multistart_minimize(config: Optional[CertifyConfig] = None, **overrides) -> CertificateReport:
    """Sample, keep the best ``n_starts`` points, and descend from each."""
    if config is None:
        config = CertifyConfig(**overrides)
    elif overrides:
        config = CertifyConfig(**{**asdict(config), **overrides})
    config.validate()
    pts = sample_constraint_set(config.n_samples, config.seed, config.slice)
    vals = eval_I_vec(pts)
    order = np.lexsort(tuple(pts.T[::-1]) + (vals,))
    starts = pts[order[: config.n_starts]]
    res = descend(starts, config.slice, gtol=config.descent_gtol, max_iter=config.max_iter)
    mask = _slice_mask(config.slice)

    minima = []
    for v0, it in zip(res.points, res.iterations):
        v = newton_polish(v0, config.slice)
        g_old = np.linalg.norm(projected_gradient(v0, mask))
        g_new = np.linalg.norm(projected_gradient(v, mask))
        # keep the polish only if it stays at the same minimum
        if not (g_new <= g_old and eval_I(v) <= eval_I(v0) + 1e-12):
            v = v0
        v = canonicalize(v)
        val = eval_I(v)
        gn = float(np.linalg.norm(projected_gradient(v, mask)))
        point = AppendixPoint.from_vector(v)
        family = classify_equality(v, config.family_tol) if val <= config.zero_tol else FAMILY_POSITIVE
        minima.append(
            LocalMinimum(
                value=float(val),
                point=point,
                family=family,
                kkt_residual=recover_multipliers(v).residual,
                grad_norm=float(gn),
                iterations=int(it),
            )
        )
    minima.sort(key=lambda m: _order_key(m.value, m.point.vector()))
    best = minima[0]
    return CertificateReport(
        global_min_estimate=best.value,
        argmin=best.point,
        equality_family=best.family,
        n_starts=int(starts.shape[0]),
        n_samples=config.n_samples,
        seed=config.seed,
        kkt_residual_at_argmin=best.kkt_residual,
        tol=config.tol,
        slice=config.slice,
        sample_min=float(vals.min()),
        local_minima=minima,
    )


class BranchRoot(NamedTuple):
    a: float
    s: float
    b3: float
    b: float
    I_value: float
    residual_linear: float
    residual_circle: float


def step4_root() -> BranchRoot:
    """Positive root of ``36a + 9s = sqrt6``, ``6(s^2 + a^2) = 1`` and the value of ``I`` there.

    Eliminating ``s`` gives ``1377 a^2 - 72 sqrt6 a - 15/2 = 0``.
    """
    qa, qb, qc = 1377.0, -72.0 * SQRT6, -7.5
    disc = math.sqrt(qb * qb - 4.0 * qa * qc)
    a = (-qb + disc) / (2.0 * qa)
    for _ in range(2):
        # Newton polish on the original pair keeps both residuals at rounding level
        s = (SQRT6 - 36.0 * a) / 9.0
        f = 6.0 * (s * s + a * a) - 1.0
        df = 12.0 * (s * (-4.0) + a)
        a -= f / df
    s = (SQRT6 - 36.0 * a) / 9.0
    b3 = a - s
    b = math.sqrt(b3 * b3 - 3.0 * a * b3)
    i_value = 72.0 * ((s * s + 2.0 * a * a) / SQRT6 - (4.0 * a**3 - s**3))
    return BranchRoot(
        a=a,
        s=s,
        b3=b3,
        b=b,
        I_value=i_value,
        residual_linear=abs(36.0 * a + 9.0 * s - SQRT6),
        residual_circle=abs(6.0 * (s * s + a * a) - 1.0),
    )


def step4_point(root: Optional[BranchRoot] = None) -> AppendixPoint:
    """The critical point ``B = (b, b, b3)``, ``X = Y = (-a, -a, 2a)`` behind the root."""
    r = root or step4_root()
    xs = np.array([-r.a, -r.a, 2.0 * r.a])
    return AppendixPoint(np.array([r.b, r.b, r.b3]), xs.copy(), xs.copy())


def permutation_orbit(v) -> Sequence[np.ndarray]:
    """All images of ``v`` under simultaneous permutations of the index triples."""
    v = np.asarray(v, dtype=float)
    out = []
    for perm in itertools.permutations(range(3)):
        p = list(perm)
        out.append(np.concatenate([v[0:3][p], v[3:6][p], v[6:9][p]]))
    return out
