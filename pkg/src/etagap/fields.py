"""Coefficient fields and the scalar constants the gap bounds consume.

The operator under study is L u = div(T(grad u)) - <grad eta, T(grad u)>,
acting on a weighted L^2 space with measure e^(-eta) dV_g.  This module
holds the tensor field T, the drift function eta, their derivatives, and
the extraction of every constant entering the bound formulas:

    epsilon, delta   pointwise eigenvalue bounds of T
    t0               sup |tr(nabla T)|
    c0               sup { 1/2 div(T(T(grad eta) - tr(nabla T))) - 1/4 |T(grad eta)|^2 }
    eta1, eta_r      radial Hessian / radial derivative bounds of eta

Tensor entries are given in a metric-orthonormal frame; for the conformal
half-space frame e_i = x_n d_i this coincides with the coordinate (1,1)
matrix, which keeps the half-space formulas below frame-free.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DerivativeUnavailable,
    NotPositiveDefinite,
    OutOfDomain,
)
from .geometry import (
    GridDomain,
    MetricModel,
    OriginPoint,
    radial_unit_vector,
    validate_origin,
)

# ---------------------------------------------------------------------------
# scalar fields (drift functions and closed-form test functions)
# ---------------------------------------------------------------------------


class ScalarField:
    """Closed-form scalar function with gradient and Hessian evaluators.

    Evaluators are vectorized: value (m,), grad (m, n), hess (m, n, n) for
    an (m, n) array of points.
    """

    dim: int

    def value(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def hess(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class ConstantScalar(ScalarField):
    def __init__(self, dim: int, c: float = 0.0):
        self.dim = dim
        self.c = float(c)

    def value(self, pts):
        return np.full(pts.shape[0], self.c)

    def grad(self, pts):
        return np.zeros((pts.shape[0], self.dim))

    def hess(self, pts):
        return np.zeros((pts.shape[0], self.dim, self.dim))


class AffineScalar(ScalarField):
    """c0 + <b, x>."""

    def __init__(self, coeffs, c0: float = 0.0):
        self.b = np.asarray(coeffs, dtype=float)
        self.dim = self.b.size
        self.c0 = float(c0)

    def value(self, pts):
        return self.c0 + pts @ self.b

    def grad(self, pts):
        return np.broadcast_to(self.b, (pts.shape[0], self.dim)).copy()

    def hess(self, pts):
        return np.zeros((pts.shape[0], self.dim, self.dim))


class QuadraticScalar(ScalarField):
    """c0 + <b, x> + 1/2 x^T Q x with symmetric Q."""

    def __init__(self, quad, coeffs=None, c0: float = 0.0):
        self.Q = np.asarray(quad, dtype=float)
        self.dim = self.Q.shape[0]
        self.b = np.zeros(self.dim) if coeffs is None else np.asarray(coeffs, dtype=float)
        self.c0 = float(c0)

    def value(self, pts):
        return self.c0 + pts @ self.b + 0.5 * np.einsum("qi,ij,qj->q", pts, self.Q, pts)

    def grad(self, pts):
        return self.b[None, :] + pts @ self.Q

    def hess(self, pts):
        return np.broadcast_to(self.Q, (pts.shape[0], self.dim, self.dim)).copy()


class GaussianScalar(ScalarField):
    """a * exp(-|x - x0|^2 / (2 s^2))."""

    def __init__(self, dim: int, amplitude: float, center, width: float):
        self.dim = dim
        self.a = float(amplitude)
        self.x0 = np.asarray(center, dtype=float)
        self.s2 = float(width) ** 2

    def value(self, pts):
        d = pts - self.x0[None, :]
        return self.a * np.exp(-0.5 * np.sum(d * d, axis=1) / self.s2)

    def grad(self, pts):
        d = pts - self.x0[None, :]
        return -self.value(pts)[:, None] * d / self.s2

    def hess(self, pts):
        d = pts - self.x0[None, :]
        v = self.value(pts)
        eye = np.eye(self.dim)
        outer = np.einsum("qi,qj->qij", d, d) / self.s2**2
        return v[:, None, None] * (outer - eye[None, :, :] / self.s2)


class LogAxisScalar(ScalarField):
    """ln(x_axis); the canonical unit-gradient function of the half-space."""

    def __init__(self, dim: int, axis: int | None = None):
        self.dim = dim
        self.axis = dim - 1 if axis is None else int(axis)

    def value(self, pts):
        x = pts[:, self.axis]
        if np.any(x <= 0.0):
            raise OutOfDomain("log coordinate requires a positive coordinate")
        return np.log(x)

    def grad(self, pts):
        g = np.zeros((pts.shape[0], self.dim))
        g[:, self.axis] = 1.0 / pts[:, self.axis]
        return g

    def hess(self, pts):
        h = np.zeros((pts.shape[0], self.dim, self.dim))
        h[:, self.axis, self.axis] = -1.0 / pts[:, self.axis] ** 2
        return h


class FiniteDifferenceScalar(ScalarField):
    """Central-difference derivatives for a bare value callable."""

    def __init__(self, dim: int, func, h_fd: float = 1e-5):
        self.dim = dim
        self.func = func
        self.h = float(h_fd)

    def value(self, pts):
        return np.asarray(self.func(pts), dtype=float)

    def grad(self, pts):
        m, n = pts.shape
        g = np.empty((m, n))
        for d in range(n):
            e = np.zeros(n)
            e[d] = self.h
            g[:, d] = (self.func(pts + e) - self.func(pts - e)) / (2.0 * self.h)
        return g

    def hess(self, pts):
        m, n = pts.shape
        out = np.empty((m, n, n))
        f0 = np.asarray(self.func(pts), dtype=float)
        for a in range(n):
            ea = np.zeros(n)
            ea[a] = self.h
            out[:, a, a] = (self.func(pts + ea) - 2.0 * f0 + self.func(pts - ea)) / self.h**2
            for b in range(a + 1, n):
                eb = np.zeros(n)
                eb[b] = self.h
                mixed = (
                    self.func(pts + ea + eb)
                    - self.func(pts + ea - eb)
                    - self.func(pts - ea + eb)
                    + self.func(pts - ea - eb)
                ) / (4.0 * self.h**2)
                out[:, a, b] = mixed
                out[:, b, a] = mixed
        return out


# drift field: a scalar field used as the weight exponent
DriftField = ScalarField


def drift_preset(kind: str, dim: int, **params) -> ScalarField:
    """Named drift families: constant, affine, quadratic, gaussian."""
    if kind == "constant" or kind == "zero":
        return ConstantScalar(dim, params.get("c", 0.0))
    if kind == "affine":
        return AffineScalar(params["coeffs"], params.get("c0", 0.0))
    if kind == "quadratic":
        quad = params.get("quad")
        if quad is None:
            quad = np.eye(dim) * params.get("scale", 1.0)
        return QuadraticScalar(quad, params.get("coeffs"), params.get("c0", 0.0))
    if kind == "gaussian":
        return GaussianScalar(dim, params["amplitude"], params["center"], params["width"])
    raise ValueError(f"unknown drift preset {kind!r}")


# ---------------------------------------------------------------------------
# tensor fields
# ---------------------------------------------------------------------------


class _Coef:
    """Univariate diagonal-entry profile c0 + c1 * phi(x_axis)."""

    def __init__(self, kind: str, c0: float, c1: float = 0.0, axis: int = 0):
        self.kind = kind
        self.c0 = float(c0)
        self.c1 = float(c1)
        self.axis = int(axis)

    def _phi(self, x, order: int):
        k = self.kind
        if k == "const":
            return np.zeros_like(x)
        if k == "linear":
            return (x, np.ones_like(x), np.zeros_like(x))[order]
        if k == "sin":
            return (np.sin(x), np.cos(x), -np.sin(x))[order]
        if k == "cos":
            return (np.cos(x), -np.sin(x), -np.cos(x))[order]
        if k == "sin2":
            return (np.sin(x) ** 2, np.sin(2.0 * x), 2.0 * np.cos(2.0 * x))[order]
        raise ValueError(f"unknown coefficient profile {k!r}")

    def value(self, pts):
        x = pts[:, self.axis]
        return self.c0 + self.c1 * self._phi(x, 0)

    def d1(self, pts):
        x = pts[:, self.axis]
        return self.c1 * self._phi(x, 1)

    def d2(self, pts):
        x = pts[:, self.axis]
        return self.c1 * self._phi(x, 2)


class TensorField:
    """Symmetric positive-definite coefficient tensor, orthonormal-frame entries.

    matrix(pts) -> (m, n, n); d_matrix -> (m, n, n, n) with [q, k, i, j] the
    partial d_k T_ij; d2_matrix -> (m, n, n, n, n) with [q, k, l, i, j] the
    second partial.  Presets carry analytic derivatives.
    """

    dim: int
    analytic: bool = True

    def matrix(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def d_matrix(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def d2_matrix(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class ConstantTensor(TensorField):
    def __init__(self, mat):
        self.mat = np.asarray(mat, dtype=float)
        if not np.array_equal(self.mat, self.mat.T):
            raise NotPositiveDefinite("constant tensor must be symmetric")
        self.dim = self.mat.shape[0]

    def matrix(self, pts):
        return np.broadcast_to(self.mat, (pts.shape[0], self.dim, self.dim)).copy()

    def d_matrix(self, pts):
        return np.zeros((pts.shape[0], self.dim, self.dim, self.dim))

    def d2_matrix(self, pts):
        return np.zeros((pts.shape[0],) + (self.dim,) * 4)


def identity_tensor(dim: int, scale: float = 1.0) -> ConstantTensor:
    return ConstantTensor(np.eye(dim) * float(scale))


class DiagonalTensor(TensorField):
    """Diagonal tensor whose entries are univariate coordinate profiles."""

    def __init__(self, coefs: list[_Coef]):
        self.coefs = list(coefs)
        self.dim = len(coefs)

    def matrix(self, pts):
        m = pts.shape[0]
        out = np.zeros((m, self.dim, self.dim))
        for i, c in enumerate(self.coefs):
            out[:, i, i] = c.value(pts)
        return out

    def d_matrix(self, pts):
        m = pts.shape[0]
        out = np.zeros((m, self.dim, self.dim, self.dim))
        for i, c in enumerate(self.coefs):
            out[:, c.axis, i, i] = c.d1(pts)
        return out

    def d2_matrix(self, pts):
        m = pts.shape[0]
        out = np.zeros((m,) + (self.dim,) * 4)
        for i, c in enumerate(self.coefs):
            out[:, c.axis, c.axis, i, i] = c.d2(pts)
        return out


class FiniteDifferenceTensor(TensorField):
    """Central-difference derivatives for a bare matrix callable."""

    analytic = False

    def __init__(self, dim: int, func, h_fd: float = 1e-5):
        self.dim = dim
        self.func = func
        self.h = float(h_fd)

    def matrix(self, pts):
        return np.asarray(self.func(pts), dtype=float)

    def d_matrix(self, pts):
        m, n = pts.shape
        out = np.empty((m, n, n, n))
        for k in range(n):
            e = np.zeros(n)
            e[k] = self.h
            out[:, k] = (self.matrix(pts + e) - self.matrix(pts - e)) / (2.0 * self.h)
        return out

    def d2_matrix(self, pts):
        m, n = pts.shape
        out = np.empty((m, n, n, n, n))
        t0 = self.matrix(pts)
        for a in range(n):
            ea = np.zeros(n)
            ea[a] = self.h
            out[:, a, a] = (self.matrix(pts + ea) - 2.0 * t0 + self.matrix(pts - ea)) / self.h**2
            for b in range(a + 1, n):
                eb = np.zeros(n)
                eb[b] = self.h
                mixed = (
                    self.matrix(pts + ea + eb)
                    - self.matrix(pts + ea - eb)
                    - self.matrix(pts - ea + eb)
                    + self.matrix(pts - ea - eb)
                ) / (4.0 * self.h**2)
                out[:, a, b] = mixed
                out[:, b, a] = mixed
        return out


def tensor_preset(kind: str, dim: int, **params) -> TensorField:
    """Named tensor families used by scenario configs."""
    if kind == "identity":
        return identity_tensor(dim, params.get("scale", 1.0))
    if kind == "constant":
        return ConstantTensor(params["matrix"])
    if kind == "constant_diag":
        return ConstantTensor(np.diag(np.asarray(params["entries"], dtype=float)))
    if kind == "diag_profile":
        coefs = []
        for spec in params["entries"]:
            coefs.append(
                _Coef(
                    spec.get("profile", "const"),
                    spec.get("c0", 0.0),
                    spec.get("c1", 0.0),
                    spec.get("axis", 0),
                )
            )
        if len(coefs) != dim:
            raise ValueError("diag_profile needs one entry per axis")
        return DiagonalTensor(coefs)
    raise ValueError(f"unknown tensor preset {kind!r}")


# ---------------------------------------------------------------------------
# constant extraction
# ---------------------------------------------------------------------------


def tensor_eigen_range(field: TensorField, pts: np.ndarray) -> tuple[float, float]:
    mats = field.matrix(pts)
    sym_defect = np.max(np.abs(mats - np.swapaxes(mats, 1, 2)))
    if sym_defect != 0.0:
        raise NotPositiveDefinite("tensor not symmetric at a sample point")
    eigs = np.linalg.eigvalsh(mats)
    lo = float(np.min(eigs[:, 0]))
    hi = float(np.max(eigs[:, -1]))
    if lo <= 0.0:
        raise NotPositiveDefinite(f"smallest tensor eigenvalue {lo} <= 0")
    return lo, hi


def tensor_bounds(field: TensorField, domain: GridDomain) -> tuple[float, float]:
    """(epsilon, delta): extreme tensor eigenvalues over quadrature points."""
    return tensor_eigen_range(field, domain.quad_points_flat())


def _christoffel(pts: np.ndarray, n: int) -> np.ndarray:
    """Half-space symbols Gamma^k_ij = -(dki djn + dkj din - dij dkn)/x_n."""
    eye = np.eye(n)
    base = -(
        np.einsum("ki,j->kij", eye, eye[-1])
        + np.einsum("kj,i->kij", eye, eye[-1])
        - np.einsum("ij,k->kij", eye, eye[-1])
    )
    return base[None, :, :, :] / pts[:, -1][:, None, None, None]


def trace_nabla_T(field: TensorField, metric: MetricModel, pts) -> np.ndarray:
    """tr(nabla T) = sum_j (nabla_{e_j} T)(e_j), orthonormal-frame components."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    try:
        dT = field.d_matrix(pts)
    except NotImplementedError as exc:
        raise DerivativeUnavailable("tensor derivatives unavailable") from exc
    flat = np.einsum("qjij->qi", dT)
    if not metric.is_hyperbolic:
        return flat
    theta = field.matrix(pts)
    gamma = _christoffel(pts, metric.dim)
    corr1 = np.einsum("qajm,qmj->qa", gamma, theta)
    corr2 = np.einsum("qim,qm->qi", theta, np.einsum("qmjj->qm", gamma))
    return pts[:, -1][:, None] * (flat + corr1 - corr2)


def compute_T0(field: TensorField, metric: MetricModel, domain: GridDomain) -> float:
    """sup over quadrature points of |tr(nabla T)| in the metric norm."""
    vec = trace_nabla_T(field, metric, domain.quad_points_flat())
    return float(np.max(np.linalg.norm(vec, axis=1)))


def _metric_divergence(metric, pts, vec_orth_func, h_fd):
    """div of a vector field given by orthonormal components (half-space)."""
    n = metric.dim
    div = np.zeros(pts.shape[0])
    for i in range(n):
        e = np.zeros(n)
        e[i] = h_fd
        vp = vec_orth_func(pts + e)
        vm = vec_orth_func(pts - e)
        # coordinate components are x_n * orthonormal components
        div += ((pts[:, -1] + e[-1]) * vp[:, i] - (pts[:, -1] - e[-1]) * vm[:, i]) / (2.0 * h_fd)
    v0 = vec_orth_func(pts)
    div -= n * v0[:, -1]
    return div


def compute_C0(
    field: TensorField,
    drift: ScalarField,
    metric: MetricModel,
    domain: GridDomain,
    h_fd: float | None = None,
) -> float:
    """sup { 1/2 div(T(T(grad eta) - tr(nabla T))) - 1/4 |T(grad eta)|^2 }.

    Euclidean presets use fully analytic derivatives; the half-space model
    takes the outer divergence by central differences of the analytically
    evaluated inner field.
    """
    pts = domain.quad_points_flat()
    n = metric.dim
    if h_fd is None:
        diag = float(np.linalg.norm([hi - lo for lo, hi in domain.bounds]))
        h_fd = 1e-5 * diag

    if not metric.is_hyperbolic:
        theta = field.matrix(pts)
        try:
            dT = field.d_matrix(pts)
            d2T = field.d2_matrix(pts)
            ge = drift.grad(pts)
            he = drift.hess(pts)
        except NotImplementedError as exc:
            raise DerivativeUnavailable("field derivatives unavailable") from exc
        tge = np.einsum("qij,qj->qi", theta, ge)
        trace = np.einsum("qjij->qi", dT)
        v = tge - trace
        # d_i V_j = sum_m (d_i T_jm dm eta + T_jm d2_im eta) - sum_m d2_im T_jm
        dV = (
            np.einsum("qijm,qm->qij", dT, ge)
            + np.einsum("qjm,qim->qij", theta, he)
            - np.einsum("qimjm->qij", d2T)
        )
        div_w = np.einsum("qiij,qj->q", dT, v) + np.einsum("qij,qij->q", theta, dV)
        val = 0.5 * div_w - 0.25 * np.sum(tge * tge, axis=1)
        return float(np.max(val))

    def w_orth(p):
        th = field.matrix(p)
        g_orth = p[:, -1][:, None] * drift.grad(p)
        v = np.einsum("qij,qj->qi", th, g_orth) - trace_nabla_T(field, metric, p)
        return np.einsum("qij,qj->qi", th, v)

    h_fd = min(h_fd, 0.25 * float(np.min(pts[:, -1])))  # stay inside x_n > 0
    div_w = _metric_divergence(metric, pts, w_orth, h_fd)
    theta = field.matrix(pts)
    tge = np.einsum("qij,qj->qi", theta, pts[:, -1][:, None] * drift.grad(pts))
    val = 0.5 * div_w - 0.25 * np.sum(tge * tge, axis=1)
    return float(np.max(val))


def compute_eta_radial_constants(
    drift: ScalarField,
    metric: MetricModel,
    domain: GridDomain,
    origin: OriginPoint,
) -> tuple[float, float]:
    """(eta1, eta_r): radial Hessian and radial derivative bounds of eta.

    eta1 = max |Hess eta (d_r, d_r)|, eta_r = max |<grad eta, d_r>| over
    quadrature points, with d_r the metric-unit radial direction from the
    origin.
    """
    validate_origin(domain, origin)
    pts = domain.quad_points_flat()
    v = radial_unit_vector(metric, origin.array(), pts)
    ge = drift.grad(pts)
    he = drift.hess(pts)
    if metric.is_hyperbolic:
        gamma = _christoffel(pts, metric.dim)
        he = he - np.einsum("qkij,qk->qij", gamma, ge)
    eta1 = float(np.max(np.abs(np.einsum("qij,qi,qj->q", he, v, v))))
    eta_r = float(np.max(np.abs(np.sum(ge * v, axis=1))))
    return eta1, eta_r


def apply_operator_L(
    field: TensorField,
    drift: ScalarField,
    metric: MetricModel,
    f: ScalarField,
    pts,
) -> np.ndarray:
    """Pointwise L f = div(T(grad f)) - <grad eta, T(grad f)> in the metric."""
    pts = np.atleast_2d(np.asarray(pts, dtype=float))
    theta = field.matrix(pts)
    dT = field.d_matrix(pts)
    gf = f.grad(pts)
    hf = f.hess(pts)
    ge = drift.grad(pts)
    flat_div = np.einsum("qiij,qj->q", dT, gf) + np.einsum("qij,qij->q", theta, hf)
    if not metric.is_hyperbolic:
        return flat_div - np.einsum("qi,qij,qj->q", ge, theta, gf)
    xn = pts[:, -1]
    tgf_n = np.einsum("qj,qj->q", theta[:, -1, :], gf)
    div_g = xn**2 * flat_div - (metric.dim - 2) * xn * tgf_n
    drift_term = xn**2 * np.einsum("qi,qij,qj->q", ge, theta, gf)
    return div_g - drift_term


@dataclass(frozen=True)
class OperatorTestFunction:
    """A closed-form f bundled with analytic L f and grad(L f)."""

    f: ScalarField
    lf: object
    grad_lf: object


def coordinate_test_function(
    field: TensorField, drift: ScalarField, metric: MetricModel, axis: int
) -> OperatorTestFunction:
    """f = x_axis in Euclidean space; |grad f| = 1."""
    if metric.is_hyperbolic:
        raise ValueError("coordinate test functions are Euclidean-only")
    n = metric.dim
    f = AffineScalar(np.eye(n)[axis])

    def lf(pts):
        dT = field.d_matrix(pts)
        theta = field.matrix(pts)
        ge = drift.grad(pts)
        return np.einsum("qjj->q", dT[:, :, :, axis]) - np.einsum(
            "qm,qm->q", theta[:, axis, :], ge
        )

    def grad_lf(pts):
        d2T = field.d2_matrix(pts)
        dT = field.d_matrix(pts)
        theta = field.matrix(pts)
        ge = drift.grad(pts)
        he = drift.hess(pts)
        term1 = np.einsum("qkjj->qk", d2T[:, :, :, :, axis])
        term2 = np.einsum("qkm,qm->qk", dT[:, :, axis, :], ge)
        term3 = np.einsum("qm,qkm->qk", theta[:, axis, :], he)
        return term1 - term2 - term3

    return OperatorTestFunction(f, lf, grad_lf)


def log_axis_test_function(
    field: TensorField, drift: ScalarField, metric: MetricModel
) -> OperatorTestFunction:
    """f = ln x_n in the half-space model; |grad f|_g = 1."""
    if not metric.is_hyperbolic:
        raise ValueError("log test function lives on the half-space model")
    n = metric.dim
    f = LogAxisScalar(n)

    def lf(pts):
        theta = field.matrix(pts)
        dT = field.d_matrix(pts)
        ge = drift.grad(pts)
        xn = pts[:, -1]
        a = np.einsum("qii->q", dT[:, :, :, -1])
        b = np.einsum("qi,qi->q", ge, theta[:, :, -1])
        return xn * a - (n - 1) * theta[:, -1, -1] - xn * b

    def grad_lf(pts):
        theta = field.matrix(pts)
        dT = field.d_matrix(pts)
        d2T = field.d2_matrix(pts)
        ge = drift.grad(pts)
        he = drift.hess(pts)
        xn = pts[:, -1]
        a = np.einsum("qii->q", dT[:, :, :, -1])
        b = np.einsum("qi,qi->q", ge, theta[:, :, -1])
        out = np.zeros_like(pts)
        out[:, -1] = a - b
        out += xn[:, None] * np.einsum("qkii->qk", d2T[:, :, :, :, -1])
        out -= (n - 1) * dT[:, :, -1, -1]
        out -= xn[:, None] * (
            np.einsum("qki,qi->qk", he, theta[:, :, -1])
            + np.einsum("qi,qki->qk", ge, dT[:, :, :, -1])
        )
        return out

    return OperatorTestFunction(f, lf, grad_lf)


def fd_consistency_defect(drift: ScalarField, pts: np.ndarray, h: float = 1e-4) -> float:
    """Worst defect between analytic and central-difference drift derivatives."""
    fd = FiniteDifferenceScalar(drift.dim, drift.value, h)
    dg = np.max(np.abs(drift.grad(pts) - fd.grad(pts)))
    dh = np.max(np.abs(drift.hess(pts) - fd.hess(pts)))
    return float(max(dg, dh))


def validate_radially_constant(values_func, domain: GridDomain, tol: float = 1e-12) -> None:
    """Reject half-space fields that vary along x_n (beyond tol).

    values_func maps an (m, n) point array to an (m, ...) value array.
    """
    (lo, hi) = domain.bounds[-1]
    pts = domain.quad_points_flat()[:: max(1, domain.quad_points_flat().shape[0] // 64)]
    shifted = pts.copy()
    shifted[:, -1] = lo + (hi - lo) * 0.37
    base = pts.copy()
    base[:, -1] = lo + (hi - lo) * 0.81
    defect = np.max(np.abs(np.asarray(values_func(shifted)) - np.asarray(values_func(base))))
    if defect > tol:
        raise OutOfDomain(
            f"field varies along x_n by {defect:.3e}; radially-constant hypothesis violated"
        )


@dataclass(frozen=True)
class OperatorConstants:
    """Every scalar the bound formulas consume.

    epsilon/delta bound the tensor's Rayleigh quotient; t0 and c0 are the
    derivative suprema; h0 is the mean-curvature bound (config input, 0 in
    Euclidean space); eta1/eta_r are radial drift bounds; kappa1/kappa2 pin
    the curvature range; d is the distance to the reference origin.
    """

    n: int
    epsilon: float
    delta: float
    t0: float = 0.0
    c0: float = 0.0
    h0: float = 0.0
    eta1: float = 0.0
    eta_r: float = 0.0
    kappa1: float = 0.0
    kappa2: float = 0.0
    d: float = float("inf")
    provenance: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if not (0.0 < self.epsilon <= self.delta):
            raise ValueError("need 0 < epsilon <= delta")
        for name in ("t0", "h0", "eta1", "eta_r"):
            if getattr(self, name) < 0.0:
                raise ValueError(f"{name} must be nonnegative")
        if not (0.0 <= self.kappa2 <= self.kappa1):
            raise ValueError("need 0 <= kappa2 <= kappa1")
        if not self.d > 0.0:
            raise ValueError("origin distance must be positive")

    @property
    def sigma(self) -> float:
        return 2.0 * self.delta - self.epsilon

    @property
    def exponent(self) -> float:
        return self.delta / (self.n * self.epsilon)
