"""Coefficient fields, derivative machinery, and constant extraction."""

import numpy as np
import pytest

from etagap.errors import NotPositiveDefinite, OutOfDomain
from etagap.fields import (
    AffineScalar,
    ConstantScalar,
    ConstantTensor,
    FiniteDifferenceScalar,
    FiniteDifferenceTensor,
    GaussianScalar,
    LogAxisScalar,
    QuadraticScalar,
    apply_operator_L,
    compute_C0,
    compute_T0,
    compute_eta_radial_constants,
    coordinate_test_function,
    fd_consistency_defect,
    identity_tensor,
    log_axis_test_function,
    tensor_bounds,
    tensor_preset,
    trace_nabla_T,
    validate_radially_constant,
)
from etagap.geometry import (
    OriginPoint,
    euclidean,
    hyperbolic_half_plane,
    make_box_domain,
)

EUC2 = euclidean(2)
HYP2 = hyperbolic_half_plane(2)


@pytest.fixture(scope="module")
def square_domain():
    return make_box_domain([(0, np.pi), (0, np.pi)], [40, 40], EUC2)


def diag_affine_tensor():
    # diag(2 + x1, 3)
    return tensor_preset(
        "diag_profile",
        2,
        entries=[
            {"profile": "linear", "c0": 2.0, "c1": 1.0, "axis": 0},
            {"profile": "const", "c0": 3.0},
        ],
    )


class TestTensorBounds:
    def test_identity(self, square_domain):
        assert tensor_bounds(identity_tensor(2), square_domain) == (1.0, 1.0)

    def test_constant_diag_and_sigma(self, square_domain):
        eps, dlt = tensor_bounds(ConstantTensor(np.diag([2.0, 3.0])), square_domain)
        assert (eps, dlt) == (2.0, 3.0)
        assert 2 * dlt - eps == 4.0

    def test_variable_entry_extrema(self, square_domain):
        # oracle: extrema of the diagonal entries over the same sample grid
        field = tensor_preset(
            "diag_profile",
            2,
            entries=[
                {"profile": "sin2", "c0": 2.0, "c1": 1.0, "axis": 0},
                {"profile": "const", "c0": 3.0},
            ],
        )
        pts = square_domain.quad_points_flat()
        entry = 2.0 + np.sin(pts[:, 0]) ** 2
        eps, dlt = tensor_bounds(field, square_domain)
        assert eps == pytest.approx(float(np.min(entry)), abs=1e-14)
        assert dlt == pytest.approx(max(float(np.max(entry)), 3.0), abs=1e-14)
        assert eps == pytest.approx(2.0, abs=1e-2)
        assert dlt == 3.0

    def test_not_positive_definite(self, square_domain):
        with pytest.raises(NotPositiveDefinite):
            tensor_bounds(ConstantTensor(np.diag([1.0, -0.5])), square_domain)

    def test_rayleigh_quotient_bracketing(self, square_domain):
        rng = np.random.default_rng(17)
        field = diag_affine_tensor()
        eps, dlt = tensor_bounds(field, square_domain)
        pts = square_domain.quad_points_flat()
        idx = rng.integers(0, pts.shape[0], size=1000)
        theta = field.matrix(pts[idx])
        v = rng.standard_normal((1000, 2))
        v /= np.linalg.norm(v, axis=1)[:, None]
        quot = np.einsum("qij,qi,qj->q", theta, v, v)
        assert np.all(quot >= eps - 1e-12)
        assert np.all(quot <= dlt + 1e-12)

    def test_t_property_chain(self, square_domain):
        # eps <T(Y), Y> <= |T(Y)|^2 <= delta <T(Y), Y> for random Y
        rng = np.random.default_rng(23)
        field = diag_affine_tensor()
        eps, dlt = tensor_bounds(field, square_domain)
        pts = square_domain.quad_points_flat()
        idx = rng.integers(0, pts.shape[0], size=500)
        theta = field.matrix(pts[idx])
        y = rng.standard_normal((500, 2))
        ty = np.einsum("qij,qj->qi", theta, y)
        tyy = np.einsum("qi,qi->q", ty, y)
        ty2 = np.einsum("qi,qi->q", ty, ty)
        assert np.all(eps * tyy <= ty2 + 1e-10)
        assert np.all(ty2 <= dlt * tyy + 1e-10)


class TestTraceNablaT:
    def test_constant_euclidean_zero(self):
        pts = np.array([[0.2, 0.4], [1.0, 2.0]])
        out = trace_nabla_T(ConstantTensor(np.diag([2.0, 3.0])), EUC2, pts)
        assert np.all(out == 0.0)

    def test_diag_affine(self):
        out = trace_nabla_T(diag_affine_tensor(), EUC2, np.array([[0.5, 1.5]]))
        assert out[0] == pytest.approx([1.0, 0.0], abs=1e-14)

    def test_hyperbolic_identity_parallel(self):
        pts = np.array([[0.3, 0.7], [0.1, 2.4]])
        out = trace_nabla_T(identity_tensor(2), HYP2, pts)
        assert np.max(np.abs(out)) < 1e-14

    def test_against_fd_christoffel_oracle(self):
        # independent oracle: Christoffels from finite differences of the
        # metric g_ij = delta_ij / x_n^2, assembled into the same trace
        def metric_matrix(p):
            return np.eye(2) / p[-1] ** 2

        def fd_christoffel(p, h=1e-6):
            dg = np.zeros((2, 2, 2))
            for k in range(2):
                e = np.zeros(2)
                e[k] = h
                dg[k] = (metric_matrix(p + e) - metric_matrix(p - e)) / (2 * h)
            ginv = np.linalg.inv(metric_matrix(p))
            gamma = np.zeros((2, 2, 2))
            for k in range(2):
                for i in range(2):
                    for j in range(2):
                        gamma[k, i, j] = 0.5 * sum(
                            ginv[k, m] * (dg[i][m, j] + dg[j][i, m] - dg[m][i, j])
                            for m in range(2)
                        )
            return gamma

        field = tensor_preset(
            "diag_profile",
            2,
            entries=[
                {"profile": "sin", "c0": 3.0, "c1": 1.0, "axis": 0},
                {"profile": "sin", "c0": 3.0, "c1": 1.0, "axis": 0},
            ],
        )
        p = np.array([0.4, 1.3])
        gamma = fd_christoffel(p)
        theta = field.matrix(p[None])[0]
        dT = field.d_matrix(p[None])[0]
        expected = np.zeros(2)
        for i in range(2):
            acc = 0.0
            for j in range(2):
                acc += dT[j, i, j]
                for m in range(2):
                    acc += gamma[i, j, m] * theta[m, j] - gamma[m, j, j] * theta[i, m]
            expected[i] = p[-1] * acc
        got = trace_nabla_T(field, HYP2, p[None])[0]
        assert got == pytest.approx(expected, abs=1e-8)


class TestComputeT0:
    def test_constant_exact_zero(self, square_domain):
        assert compute_T0(ConstantTensor(np.diag([2.0, 3.0])), EUC2, square_domain) == 0.0

    def test_diag_affine_is_one(self, square_domain):
        assert compute_T0(diag_affine_tensor(), EUC2, square_domain) == pytest.approx(1.0, abs=1e-14)

    def test_sin_profile_sup_cos(self, square_domain):
        field = tensor_preset(
            "diag_profile",
            2,
            entries=[
                {"profile": "sin", "c0": 2.0, "c1": 1.0, "axis": 0},
                {"profile": "const", "c0": 3.0},
            ],
        )
        # oracle: sup |cos x1| over the same sample grid
        pts = square_domain.quad_points_flat()
        expected = float(np.max(np.abs(np.cos(pts[:, 0]))))
        assert compute_T0(field, EUC2, square_domain) == pytest.approx(expected, abs=1e-14)
        assert compute_T0(field, EUC2, square_domain) == pytest.approx(1.0, abs=1e-3)


class TestComputeC0:
    def test_constant_everything_exact_zero(self, square_domain):
        val = compute_C0(ConstantTensor(np.diag([2.0, 3.0])), ConstantScalar(2, 5.0), EUC2, square_domain)
        assert val == 0.0

    def test_affine_drift_quarter(self, square_domain):
        val = compute_C0(identity_tensor(2), AffineScalar([1.0, 0.0]), EUC2, square_domain)
        assert val == pytest.approx(-0.25, abs=1e-14)

    def test_quadratic_drift_sup(self, square_domain):
        # pointwise oracle: 1/2 div(grad eta) - 1/4 |grad eta|^2 = n/2 - |x|^2/4
        eta = QuadraticScalar(np.eye(2))
        pts = square_domain.quad_points_flat()
        oracle = float(np.max(1.0 - 0.25 * np.sum(pts * pts, axis=1)))
        val = compute_C0(identity_tensor(2), eta, EUC2, square_domain)
        assert val == pytest.approx(oracle, abs=1e-12)
        assert 0.99 < val < 1.0

    def test_hyperbolic_identity_zero_drift(self):
        dom = make_box_domain([(0, 1), (1, 2)], [12, 12], HYP2)
        val = compute_C0(identity_tensor(2), ConstantScalar(2), HYP2, dom)
        assert val == 0.0

    def test_hyperbolic_radial_drift_against_closed_form(self):
        # T = id, eta = eta(x1): C0 = 1/2 Delta_g eta - 1/4 |grad eta|_g^2
        #                           = x2^2 (eta''/2 - eta'^2/4) for n = 2
        dom = make_box_domain([(0, 1), (1, 2)], [16, 16], HYP2)
        eta = QuadraticScalar(np.diag([1.0, 0.0]))
        pts = dom.quad_points_flat()
        oracle = float(np.max(pts[:, 1] ** 2 * (0.5 - 0.25 * pts[:, 0] ** 2)))
        val = compute_C0(identity_tensor(2), eta, HYP2, dom)
        assert val == pytest.approx(oracle, rel=1e-6)


class TestEtaRadialConstants:
    def test_constant_drift(self):
        dom = make_box_domain([(0, 1), (0, 1)], [20, 20], EUC2)
        out = compute_eta_radial_constants(ConstantScalar(2, 3.0), EUC2, dom, OriginPoint((-1.0, 0.0)))
        assert out == (0.0, 0.0)

    def test_affine_drift_radial_slope(self):
        dom = make_box_domain([(0, 1), (0, 1)], [60, 60], EUC2)
        o = OriginPoint((-1.0, 0.0))
        eta1, eta_r = compute_eta_radial_constants(AffineScalar([1.0, 0.0]), EUC2, dom, o)
        # oracle: max of (x1 + 1)/|x - o| over the sample grid
        pts = dom.quad_points_flat()
        diff = pts - np.array([-1.0, 0.0])
        oracle = float(np.max(np.abs(diff[:, 0]) / np.linalg.norm(diff, axis=1)))
        assert eta1 == 0.0
        assert eta_r == pytest.approx(oracle, abs=1e-14)
        assert eta_r == pytest.approx(1.0, abs=2e-2)

    def test_quadratic_drift_unit_hessian(self):
        dom = make_box_domain([(0, 1), (0, 1)], [30, 30], EUC2)
        o = OriginPoint((-0.5, -0.5))
        eta1, _ = compute_eta_radial_constants(QuadraticScalar(np.eye(2)), EUC2, dom, o)
        assert eta1 == pytest.approx(1.0, abs=1e-12)

    def test_hyperbolic_log_hessian_identity(self):
        # Hess(ln x2) = -(g - d ln x2 (x) d ln x2), so along any unit v:
        # Hess(ln x2)(v, v) = -(1 - <grad ln x2, v>_g^2)
        from etagap.geometry import radial_unit_vector

        dom = make_box_domain([(0, 1), (1, 2)], [24, 24], HYP2)
        o = OriginPoint((0.3, 4.0))
        eta = LogAxisScalar(2)
        eta1, eta_r = compute_eta_radial_constants(eta, HYP2, dom, o)
        pts = dom.quad_points_flat()
        v = radial_unit_vector(HYP2, o.array(), pts)
        slope = np.sum(eta.grad(pts) * v, axis=1)
        oracle_eta1 = float(np.max(np.abs(1.0 - slope**2)))
        oracle_eta_r = float(np.max(np.abs(slope)))
        assert eta1 == pytest.approx(oracle_eta1, abs=1e-12)
        assert eta_r == pytest.approx(oracle_eta_r, abs=1e-14)


class TestApplyOperator:
    def test_harmonic_coordinate(self):
        pts = np.array([[0.2, 0.9], [1.5, 2.0]])
        out = apply_operator_L(identity_tensor(2), ConstantScalar(2), EUC2, AffineScalar([1.0, 0.0]), pts)
        assert np.all(out == 0.0)

    def test_coordinate_squared(self):
        f = QuadraticScalar(np.diag([2.0, 0.0]))  # x1^2
        out = apply_operator_L(identity_tensor(2), ConstantScalar(2), EUC2, f, np.array([[0.3, 0.4]]))
        assert out[0] == pytest.approx(2.0)

    def test_half_plane_log(self):
        out = apply_operator_L(
            identity_tensor(2), ConstantScalar(2), HYP2, LogAxisScalar(2), np.array([[0.7, 1.3]])
        )
        assert out[0] == pytest.approx(-1.0, abs=1e-14)

    def test_half_plane_log_scaled_tensor(self):
        # T = psi * id gives L(ln x_n) = -(n-1) psi
        out = apply_operator_L(
            identity_tensor(2, 2.5), ConstantScalar(2), HYP2, LogAxisScalar(2), np.array([[0.7, 1.3]])
        )
        assert out[0] == pytest.approx(-2.5, abs=1e-14)

    def test_drift_term_euclidean(self):
        # L x1 = -d1 eta for T = id: eta = x1^2/2 -> -x1
        eta = QuadraticScalar(np.diag([1.0, 0.0]))
        out = apply_operator_L(identity_tensor(2), eta, EUC2, AffineScalar([1.0, 0.0]), np.array([[0.4, 0.1]]))
        assert out[0] == pytest.approx(-0.4)


class TestTestFunctions:
    def test_coordinate_lf_matches_apply(self, square_domain):
        field = diag_affine_tensor()
        eta = GaussianScalar(2, 0.7, [1.0, 1.5], 0.8)
        tf = coordinate_test_function(field, eta, EUC2, 0)
        pts = square_domain.quad_points_flat()[::37]
        direct = apply_operator_L(field, eta, EUC2, tf.f, pts)
        assert tf.lf(pts) == pytest.approx(direct, abs=1e-12)

    def test_coordinate_grad_lf_matches_fd(self, square_domain):
        field = diag_affine_tensor()
        eta = GaussianScalar(2, 0.7, [1.0, 1.5], 0.8)
        tf = coordinate_test_function(field, eta, EUC2, 1)
        pts = square_domain.quad_points_flat()[::41]
        h = 1e-6
        fd = np.empty((pts.shape[0], 2))
        for d in range(2):
            e = np.zeros(2)
            e[d] = h
            fd[:, d] = (tf.lf(pts + e) - tf.lf(pts - e)) / (2 * h)
        assert tf.grad_lf(pts) == pytest.approx(fd, abs=1e-7)

    def test_log_grad_lf_matches_fd(self):
        dom = make_box_domain([(0, 1), (1, 2)], [10, 10], HYP2)
        field = tensor_preset(
            "diag_profile",
            2,
            entries=[
                {"profile": "sin", "c0": 3.0, "c1": 0.5, "axis": 0},
                {"profile": "sin", "c0": 3.0, "c1": 0.5, "axis": 0},
            ],
        )
        eta = AffineScalar([0.3, 0.0])
        tf = log_axis_test_function(field, eta, HYP2)
        pts = dom.quad_points_flat()[::17]
        direct = apply_operator_L(field, eta, HYP2, tf.f, pts)
        assert tf.lf(pts) == pytest.approx(direct, abs=1e-12)
        h = 1e-6
        fd = np.empty((pts.shape[0], 2))
        for d in range(2):
            e = np.zeros(2)
            e[d] = h
            fd[:, d] = (tf.lf(pts + e) - tf.lf(pts - e)) / (2 * h)
        assert tf.grad_lf(pts) == pytest.approx(fd, abs=1e-7)


class TestDerivativeConsistency:
    def test_analytic_vs_fd_scalar(self):
        rng = np.random.default_rng(2)
        pts = rng.uniform(0.3, 2.0, size=(30, 2))
        for f in (
            AffineScalar([0.5, -1.2], 0.3),
            QuadraticScalar([[1.0, 0.2], [0.2, 0.7]], [0.1, 0.4]),
            GaussianScalar(2, 1.3, [0.9, 1.1], 0.7),
        ):
            assert fd_consistency_defect(f, pts, h=1e-4) < 1e-4

    def test_fd_scalar_second_order(self):
        # halving h shrinks the gradient defect by ~4 (O(h^2) differences)
        f = GaussianScalar(2, 1.0, [0.5, 0.5], 0.6)
        pts = np.array([[0.2, 0.8], [1.1, 0.4]])
        d1 = np.max(np.abs(FiniteDifferenceScalar(2, f.value, 1e-3).grad(pts) - f.grad(pts)))
        d2 = np.max(np.abs(FiniteDifferenceScalar(2, f.value, 5e-4).grad(pts) - f.grad(pts)))
        assert d1 / d2 == pytest.approx(4.0, rel=0.2)

    def test_fd_tensor_matches_analytic(self):
        field = diag_affine_tensor()
        fd = FiniteDifferenceTensor(2, field.matrix, h_fd=1e-5)
        pts = np.array([[0.4, 0.9], [2.0, 1.0]])
        assert fd.d_matrix(pts) == pytest.approx(field.d_matrix(pts), abs=1e-9)
        assert fd.d2_matrix(pts) == pytest.approx(field.d2_matrix(pts), abs=1e-5)


class TestOperatorConstants:
    def test_invariants_enforced(self):
        from etagap.fields import OperatorConstants

        with pytest.raises(ValueError):
            OperatorConstants(n=2, epsilon=0.0, delta=1.0)
        with pytest.raises(ValueError):
            OperatorConstants(n=2, epsilon=2.0, delta=1.0)
        with pytest.raises(ValueError):
            OperatorConstants(n=2, epsilon=1.0, delta=1.0, t0=-0.1)
        with pytest.raises(ValueError):
            OperatorConstants(n=2, epsilon=1.0, delta=1.0, kappa1=0.5, kappa2=1.0)
        with pytest.raises(ValueError):
            OperatorConstants(n=2, epsilon=1.0, delta=1.0, d=0.0)

    def test_sigma_and_exponent(self):
        from etagap.fields import OperatorConstants

        c = OperatorConstants(n=2, epsilon=2.0, delta=3.0)
        assert c.sigma == 4.0
        assert c.exponent == 0.75


class TestRadiallyConstantValidation:
    def test_accepts_vertical_invariant_field(self):
        dom = make_box_domain([(0, 1), (1, 2)], [8, 8], HYP2)
        validate_radially_constant(AffineScalar([1.0, 0.0]).value, dom)

    def test_rejects_vertical_variation(self):
        dom = make_box_domain([(0, 1), (1, 2)], [8, 8], HYP2)
        with pytest.raises(OutOfDomain):
            validate_radially_constant(AffineScalar([0.0, 1.0]).value, dom)
