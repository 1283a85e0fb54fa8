"""Explicit gap-bound constants and inequality verifiers.

Everything here evaluates closed-form constants or checks inequalities
against a spectrum (computed or analytic):

  * the sequence inequality for nondecreasing positive sequences
    (``lemma31_check``) with a seeded random-instance generator;
  * the three gap-constant families, tagged thm11 (Euclidean), thm12
    (hyperbolic half-space) and thm13 (pinched Cartan-Hadamard), each with
    its corollary specializations;
  * the eigenvalue growth bound (``yang_check``);
  * the consecutive-gap verification ``gap_check`` producing a GapReport;
  * the two-sided test-function inequalities (``cor32_check``) and the
    real-test-function inequality over a full discrete spectrum
    (``lemma32_check``).

Checks never hide numerical error: a gap row that exceeds its bound by
less than three times the estimated discretization error is flagged
``inconclusive`` rather than ``fail``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import OperatorPair, interpolate_at_quadrature, measure_weights
from .errors import (
    HypothesisViolated,
    InsufficientSpectrum,
    InvalidInstance,
    NonpositiveRadicand,
    NonpositiveUpsilon,
    UnitGradientViolation,
)
from .fields import OperatorConstants, OperatorTestFunction, ScalarField, apply_operator_L
from .spectral import MULTIPLET_REL_TOL, SpectrumResult

PASS_REL_TOL = 1e-12
SCHEMA_VERSION = 1


# ---------------------------------------------------------------------------
# sequence inequality
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Lemma31Instance:
    """Finite nondecreasing positive sequence mu with weights r.

    m1 is the multiplicity of mu[0]; the check requires r_{m1} != 0 and at
    least two distinct values so the two leading distinct entries exist.
    """

    mu: tuple
    r: tuple

    def __post_init__(self):
        mu = np.asarray(self.mu, dtype=float)
        r = np.asarray(self.r, dtype=float)
        if mu.size != r.size or mu.size < 2:
            raise InvalidInstance("mu and r need equal length >= 2")
        if mu[0] <= 0.0 or np.any(np.diff(mu) < 0.0):
            raise InvalidInstance("mu must be positive and nondecreasing")
        m1 = int(np.sum(mu == mu[0]))
        if m1 >= mu.size:
            raise InvalidInstance("all mu equal; no second distinct value")
        if r[m1 - 1] == 0.0:
            raise InvalidInstance("r at the last leading-multiplet slot must be nonzero")

    @property
    def m1(self) -> int:
        mu = np.asarray(self.mu, dtype=float)
        return int(np.sum(mu == mu[0]))


@dataclass(frozen=True)
class Lemma31Result:
    s: float
    a: float
    b: float
    bound: float
    hypothesis_ok: bool
    conclusion_ok: bool


def lemma31_check(inst: Lemma31Instance) -> Lemma31Result:
    """Weighted-mean bound: S <= (A + mu_m1 mu_{m1+1} B)/(mu_m1 + mu_{m1+1})."""
    mu = np.asarray(inst.mu, dtype=float)
    r = np.asarray(inst.r, dtype=float)
    r2 = r * r
    s = math.fsum(mu * r2)
    a = math.fsum(mu * mu * r2)
    b = math.fsum(r2)
    m1 = inst.m1
    mu1, mu2 = mu[m1 - 1], mu[m1]
    bound = float((a + mu1 * mu2 * b) / (mu1 + mu2))
    # sqrt(a)*sqrt(b) rather than sqrt(a*b): the product under/overflows first
    hypothesis_ok = bool(s < math.sqrt(a) * math.sqrt(b))
    conclusion_ok = bool(s <= bound + 1e-12)
    return Lemma31Result(s, a, b, bound, hypothesis_ok, conclusion_ok)


def random_lemma31_instance(rng: np.random.Generator) -> Lemma31Instance:
    """Seeded random instance with moderate scales and real multiplicities."""
    length = int(rng.integers(2, 51))
    mu1 = float(rng.uniform(0.1, 5.0))
    steps = rng.uniform(0.0, 0.2, size=length - 1)
    steps[rng.random(length - 1) < 0.3] = 0.0
    mu = mu1 + np.concatenate([[0.0], np.cumsum(steps)])
    if np.all(mu == mu[0]):
        mu[-1] = mu[0] + 0.1
    r = rng.uniform(-1.0, 1.0, size=length)
    m1 = int(np.sum(mu == mu[0]))
    while r[m1 - 1] == 0.0:
        r[m1 - 1] = float(rng.uniform(-1.0, 1.0))
    return Lemma31Instance(tuple(mu), tuple(r))


# ---------------------------------------------------------------------------
# gap-bound constants
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapConstant:
    """A bound constant with its exponent and corollary specializations."""

    tag: str
    value: float
    exponent: float
    corollaries: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)


def a_nT(n: int, epsilon: float, delta: float) -> float:
    """max(0, 2(n-1) delta^2 - (n-1)^2 epsilon^2)."""
    if n < 2 or not 0.0 < epsilon <= delta:
        raise ValueError("need n >= 2 and 0 < epsilon <= delta")
    return max(0.0, 2.0 * (n - 1) * delta**2 - (n - 1) ** 2 * epsilon**2)


def _safe_sqrt_product(*factors) -> float:
    prod = 1.0
    for f in factors:
        prod *= f
    return math.nan if prod <= 0.0 or any(f <= 0.0 for f in factors) else math.sqrt(prod)


def theorem11_constant(lambda1: float, consts: OperatorConstants) -> GapConstant:
    """Euclidean gap constant 4(l1 + (4c0+t0^2)/(4d)) sqrt(d/(sn)(1+4d/(ne)))."""
    n, eps, dlt = consts.n, consts.epsilon, consts.delta
    sig, t0, c0 = consts.sigma, consts.t0, consts.c0
    shifted = lambda1 + (4.0 * c0 + t0**2) / (4.0 * dlt)
    if shifted <= 0.0:
        raise NonpositiveRadicand(f"lambda1 + (4c0 + t0^2)/(4 delta) = {shifted} <= 0")
    root = math.sqrt(dlt / (sig * n) * (1.0 + 4.0 * dlt / (n * eps)))
    flat_root = math.sqrt((1.0 / n) * (1.0 + 4.0 / n))
    cor = {
        "drifted_cheng_yau": 4.0 * (lambda1 + c0 / dlt) * root,
        "cheng_yau": 4.0 * lambda1 * root,
        "drifted_laplacian": 4.0 * (lambda1 + c0) * flat_root,
        "laplacian": 4.0 * lambda1 * flat_root,
    }
    return GapConstant(
        "thm11",
        4.0 * shifted * root,
        consts.exponent,
        cor,
        {"lambda1": lambda1, "shifted": shifted, "root": root},
    )


def theorem12_constant(lambda1: float, consts: OperatorConstants) -> GapConstant:
    """Half-space gap constant with the (n-1)^2/4 ground-level subtraction."""
    n, eps, dlt = consts.n, consts.epsilon, consts.delta
    sig, t0, c0, h0 = consts.sigma, consts.t0, consts.c0, consts.h0
    fac = 1.0 + 4.0 * dlt / (n * eps)
    rad1 = dlt * lambda1 - (eps**2 / 4.0) * (n - 1) ** 2
    rad2 = lambda1 + (n**2 * h0**2 + 4.0 * c0 + t0**2) / (4.0 * dlt)
    if rad1 <= 0.0:
        raise NonpositiveRadicand(
            f"delta*lambda1 - (eps^2/4)(n-1)^2 = {rad1} <= 0: "
            "lambda1 is below the half-space ground-state threshold at this resolution"
        )
    if rad2 <= 0.0:
        raise NonpositiveRadicand(f"shifted lambda1 factor {rad2} <= 0")
    value = 4.0 / math.sqrt(sig) * math.sqrt(fac * rad1 * rad2)
    rad1_flat = lambda1 - (n - 1) ** 2 / 4.0
    fac_flat = 1.0 + 4.0 / n
    cor = {
        "drifted_cheng_yau": 4.0
        / math.sqrt(sig)
        * _safe_sqrt_product(fac, rad1, lambda1 + (n**2 * h0**2 + 4.0 * c0) / (4.0 * dlt)),
        "cheng_yau": 4.0
        / math.sqrt(sig)
        * _safe_sqrt_product(fac, rad1, lambda1 + n**2 * h0**2 / (4.0 * dlt)),
        "drifted_laplacian": 4.0
        * _safe_sqrt_product(fac_flat, rad1_flat, lambda1 + (n**2 * h0**2 + 4.0 * c0) / 4.0),
        "laplacian": 4.0
        * _safe_sqrt_product(fac_flat, rad1_flat, lambda1 + n**2 * h0**2 / 4.0),
    }
    return GapConstant(
        "thm12",
        value,
        consts.exponent,
        cor,
        {"lambda1": lambda1, "rad1": rad1, "rad2": rad2, "factor": fac},
    )


def theorem13_constant(lambda1: float, consts: OperatorConstants) -> GapConstant:
    """Pinched-curvature gap constant with radial drift and distance terms."""
    n, eps, dlt = consts.n, consts.epsilon, consts.delta
    sig, c0, h0 = consts.sigma, consts.c0, consts.h0
    k1, k2, d = consts.kappa1, consts.kappa2, consts.d
    eta1, eta_r = consts.eta1, consts.eta_r
    a = a_nT(n, eps, dlt)
    curv = (2.0 * (n - 1) * dlt**2 - (2 * n - 3) * eps**2) * k1**2
    curv -= (n**2 - 2 * n + 2) * eps**2 * k2**2
    inner = (
        dlt * lambda1
        + (curv + 2.0 * dlt**2 * eta1) / 4.0
        + dlt**2 * eta_r * (n - 1) * (k1 + 1.0 / d) / 2.0
        + a / (4.0 * d**2)
    )
    last = lambda1 + (n**2 * h0**2 + 4.0 * c0) / (4.0 * dlt)
    fac = 1.0 + 4.0 * dlt / (n * eps)
    if inner <= 0.0:
        raise NonpositiveRadicand(f"curvature radicand {inner} <= 0")
    if last <= 0.0:
        raise NonpositiveRadicand(f"shifted lambda1 factor {last} <= 0")
    value = 4.0 / math.sqrt(sig) * math.sqrt(inner) * math.sqrt(fac) * math.sqrt(last)

    a_flat = max(0.0, (n - 1) * (3.0 - n))
    fac_flat = 1.0 + 4.0 / n
    curv_flat = k1**2 - (n**2 - 2 * n + 2) * k2**2
    inner_b = dlt * lambda1 + curv / 4.0 + a / (4.0 * d**2)
    inner_c = (
        lambda1
        + (curv_flat + 2.0 * eta1) / 4.0
        + eta_r * (n - 1) * (k1 + 1.0 / d) / 2.0
        + a_flat / (4.0 * d**2)
    )
    inner_d = lambda1 + curv_flat / 4.0 + a_flat / (4.0 * d**2)
    cor = {
        "cheng_yau": 4.0
        / math.sqrt(sig)
        * _safe_sqrt_product(inner_b, fac, lambda1 + n**2 * h0**2 / (4.0 * dlt)),
        "drifted_laplacian": 4.0
        * _safe_sqrt_product(inner_c, fac_flat, lambda1 + (n**2 * h0**2 + 4.0 * c0) / 4.0),
        "laplacian": 4.0
        * _safe_sqrt_product(inner_d, fac_flat, lambda1 + n**2 * h0**2 / 4.0),
    }
    return GapConstant(
        "thm13",
        value,
        consts.exponent,
        cor,
        {
            "lambda1": lambda1,
            "inner": inner,
            "last": last,
            "factor": fac,
            "a_nT": a,
            "d": d,
            "d_is_grid_approximation": True,
        },
    )


# ---------------------------------------------------------------------------
# growth bound
# ---------------------------------------------------------------------------


def _eigs(spectrum) -> np.ndarray:
    if isinstance(spectrum, SpectrumResult):
        return np.asarray(spectrum.eigenvalues, dtype=float)
    return np.asarray(spectrum, dtype=float)


@dataclass(frozen=True)
class YangRow:
    k: int
    upsilon_next: float
    rhs: float
    ok: bool


@dataclass(frozen=True)
class YangReport:
    shift: float
    upsilon1: float
    rows: tuple

    @property
    def ok(self) -> bool:
        return all(row.ok for row in self.rows)


def yang_check(spectrum, consts: OperatorConstants) -> YangReport:
    """Shifted growth bound: ups_{k+1} <= (1 + 4d/(ne)) k^(2d/(ne)) ups_1."""
    lam = _eigs(spectrum)
    if lam.size < 2:
        raise InsufficientSpectrum("growth check needs at least two eigenvalues")
    n, eps, dlt = consts.n, consts.epsilon, consts.delta
    shift = (n**2 * consts.h0**2 + 4.0 * consts.c0 + consts.t0**2) / (4.0 * dlt)
    ups = lam + shift
    if ups[0] <= 0.0:
        raise NonpositiveUpsilon(f"upsilon_1 = {ups[0]} <= 0")
    fac = 1.0 + 4.0 * dlt / (n * eps)
    expo = 2.0 * dlt / (n * eps)
    rows = []
    for k in range(1, lam.size):
        rhs = fac * k**expo * ups[0]
        rows.append(YangRow(k, float(ups[k]), float(rhs), bool(ups[k] <= rhs * (1.0 + PASS_REL_TOL))))
    return YangReport(shift, float(ups[0]), tuple(rows))


# ---------------------------------------------------------------------------
# consecutive-gap verification
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GapRow:
    k: int
    lam_k: float
    lam_k1: float
    gap: float
    bound: float
    margin: float
    status: str  # pass | fail | inconclusive | info
    error_estimate: float


@dataclass
class GapReport:
    tag: str
    constant: float
    exponent: float
    rows: list
    constants_used: dict
    corollaries: dict = field(default_factory=dict)
    notes: dict = field(default_factory=dict)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "inconclusive": 0, "info": 0}
        for row in self.rows:
            out[row.status] += 1
        return out

    @property
    def ok(self) -> bool:
        return self.counts()["fail"] == 0

    def to_csv(self, path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(
                ["k", "lambda_k", "lambda_k1", "gap", "bound", "margin", "status", "error_estimate"]
            )
            for r in self.rows:
                writer.writerow(
                    [
                        r.k,
                        repr(r.lam_k),
                        repr(r.lam_k1),
                        repr(r.gap),
                        repr(r.bound),
                        repr(r.margin),
                        r.status,
                        repr(r.error_estimate),
                    ]
                )

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tag": self.tag,
            "constant": self.constant,
            "exponent": self.exponent,
            "constants_used": self.constants_used,
            "corollaries": self.corollaries,
            "notes": self.notes,
            "counts": self.counts(),
            "rows": [
                {
                    "k": r.k,
                    "lambda_k": r.lam_k,
                    "lambda_k1": r.lam_k1,
                    "gap": r.gap,
                    "bound": r.bound,
                    "margin": r.margin,
                    "status": r.status,
                    "error_estimate": r.error_estimate,
                }
                for r in self.rows
            ],
        }

    def to_json(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


def _multiplet_labels(lam: np.ndarray, rel_tol: float) -> np.ndarray:
    labels = np.zeros(lam.size, dtype=int)
    for j in range(1, lam.size):
        scale = max(abs(lam[j]), abs(lam[j - 1]), 1e-300)
        labels[j] = labels[j - 1] + (0 if abs(lam[j] - lam[j - 1]) <= rel_tol * scale else 1)
    return labels


def gap_check(
    spectrum,
    constant: float,
    exponent: float,
    k_range: tuple | None = None,
    tag: str = "gap",
    h: float | None = None,
    residuals=None,
    constants_used: dict | None = None,
    corollaries: dict | None = None,
    multiplet_rel_tol: float = MULTIPLET_REL_TOL,
) -> GapReport:
    """Check lambda_{k+1} - lambda_k <= C k^exponent for k in k_range.

    Gaps inside a numerical multiplet count as zero.  When a violation is
    within 3x the estimated numerical error (FEM rate lambda^2 h^2 plus
    eigensolver residuals) the row is flagged inconclusive, not failed.
    The k = 1 row is informational only.
    """
    lam = _eigs(spectrum)
    if residuals is None and isinstance(spectrum, SpectrumResult):
        residuals = spectrum.residuals
    if constant <= 0.0:
        raise ValueError("bound constant must be positive")
    kmax_avail = lam.size - 1
    if k_range is None:
        k_range = (2, kmax_avail)
    klo, khi = int(k_range[0]), int(k_range[1])
    if khi + 1 > lam.size:
        raise InsufficientSpectrum(f"need lambda_{khi + 1}, have {lam.size} eigenvalues")
    if klo < 2:
        raise ValueError("gap verification starts at k = 2; k = 1 is reported as info")

    labels = _multiplet_labels(lam, multiplet_rel_tol)
    rows = []
    for k in range(1, khi + 1):
        gap = 0.0 if labels[k] == labels[k - 1] else float(lam[k] - lam[k - 1])
        bound = constant * k**exponent
        err = 0.0
        if h is not None:
            err += (lam[k] ** 2 + lam[k - 1] ** 2) * h**2
        if residuals is not None:
            err += float(residuals[k]) + float(residuals[k - 1])
        if k < klo:
            status = "info"
        elif gap <= bound * (1.0 + PASS_REL_TOL):
            status = "pass"
        elif gap - bound <= 3.0 * err:
            status = "inconclusive"
        else:
            status = "fail"
        rows.append(
            GapRow(k, float(lam[k - 1]), float(lam[k]), gap, bound, bound - gap, status, float(err))
        )
    return GapReport(
        tag,
        constant,
        exponent,
        rows,
        constants_used or {},
        corollaries or {},
        notes={"k_range": [klo, khi], "pass_rel_tol": PASS_REL_TOL, "h": h},
    )


# ---------------------------------------------------------------------------
# test-function inequalities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Cor32Row:
    k: int
    lhs_314: float
    rhs_314: float
    lhs_315: float
    rhs_315: float
    ok_314: bool
    ok_315: bool
    implication_ok: bool
    status: str  # checked | skipped
    reason: str = ""


def _quad_context(pair: OperatorPair):
    pts, dm, grad_factor = measure_weights(pair)
    flat = pts.reshape(-1, pair.domain.dim)
    theta = pair.field.matrix(flat).reshape(pts.shape[0], pts.shape[1], pair.domain.dim, pair.domain.dim)
    return pts, flat, dm, grad_factor, theta


def cor32_check(
    spectrum: SpectrumResult,
    pair: OperatorPair,
    test_fn: OperatorTestFunction,
    consts: OperatorConstants,
    j: int = 1,
    k_values=None,
    multiplet_rel_tol: float = MULTIPLET_REL_TOL,
) -> list:
    """Gap-squared and gap bounds from a unit-gradient test function.

    For every admissible k (strict gap between lambda_{k+1} and
    lambda_{k+2}), evaluates

      (l_{k+2}-l_{k+1})^2 <= 16/s (I1 - I2/4 - I3/2) l_{k+2}         (square)
      l_{k+2}-l_{k+1} <= 4/sqrt(s) (d l_j - I2/4 - I3/2)^0.5 l_{k+2}^0.5

    with I1 = int <T grad u_j, grad f>^2 dm, I2 = int (Lf)^2 u_j^2 dm,
    I3 = int <grad(Lf), T grad f> u_j^2 dm, and asserts the row-wise
    implication I1 <= delta * lambda_j that links the two.
    """
    lam = spectrum.eigenvalues
    pts, flat, dm, grad_factor, theta = _quad_context(pair)
    n = pair.domain.dim

    gf = test_fn.f.grad(flat)
    norms = np.linalg.norm(gf, axis=1)
    if pair.domain.metric.is_hyperbolic:
        norms = norms * flat[:, -1]
    defect = float(np.max(np.abs(norms - 1.0)))
    if defect > 1e-10:
        raise UnitGradientViolation(f"|grad f|_g deviates from 1 by {defect:.3e}")

    uj, guj = interpolate_at_quadrature(pair, spectrum.eigenvectors[:, j - 1])
    gf_c = gf.reshape(pts.shape[0], pts.shape[1], n)
    lf = np.asarray(test_fn.lf(flat), dtype=float).reshape(pts.shape[:2])
    glf = np.asarray(test_fn.grad_lf(flat), dtype=float).reshape(pts.shape[0], pts.shape[1], n)

    t_guj = np.einsum("cqab,cqb->cqa", theta, guj)
    pair_ujf = grad_factor * np.einsum("cqa,cqa->cq", t_guj, gf_c)
    i1 = float(np.sum(pair_ujf**2 * dm))
    i2 = float(np.sum(lf**2 * uj**2 * dm))
    t_gf = np.einsum("cqab,cqb->cqa", theta, gf_c)
    i3 = float(np.sum(grad_factor * np.einsum("cqa,cqa->cq", glf, t_gf) * uj**2 * dm))

    sig, dlt = consts.sigma, consts.delta
    lam_j = float(lam[j - 1])
    implication_base = i1 <= dlt * lam_j * (1.0 + 1e-10)

    labels = _multiplet_labels(lam, multiplet_rel_tol)
    if k_values is None:
        k_values = range(1, lam.size - 1)
    rows = []
    for k in k_values:
        if k + 2 > lam.size:
            raise InsufficientSpectrum(f"need lambda_{k + 2}, have {lam.size}")
        l_k1, l_k2 = float(lam[k]), float(lam[k + 1])
        if labels[k] == labels[k + 1]:
            rows.append(
                Cor32Row(k, 0, 0, 0, 0, False, False, implication_base, "skipped", "degenerate gap")
            )
            continue
        if not lam_j < l_k1:
            rows.append(
                Cor32Row(k, 0, 0, 0, 0, False, False, implication_base, "skipped", "lambda_j >= lambda_{k+1}")
            )
            continue
        bracket_314 = i1 - 0.25 * i2 - 0.5 * i3
        bracket_315 = dlt * lam_j - 0.25 * i2 - 0.5 * i3
        lhs_314 = (l_k2 - l_k1) ** 2
        rhs_314 = 16.0 / sig * bracket_314 * l_k2
        lhs_315 = l_k2 - l_k1
        rhs_315 = (
            4.0 / math.sqrt(sig) * math.sqrt(bracket_315) * math.sqrt(l_k2)
            if bracket_315 > 0.0
            else math.nan
        )
        ok_314 = lhs_314 <= rhs_314 * (1.0 + PASS_REL_TOL)
        ok_315 = (not math.isnan(rhs_315)) and lhs_315 <= rhs_315 * (1.0 + PASS_REL_TOL)
        implication_ok = implication_base and (not ok_314 or ok_315)
        rows.append(
            Cor32Row(k, lhs_314, rhs_314, lhs_315, rhs_315, bool(ok_314), bool(ok_315), bool(implication_ok), "checked")
        )
    return rows


@dataclass(frozen=True)
class Lemma32Result:
    j: int
    k: int
    lhs: float
    rhs: float
    margin: float
    cross_term: float
    projection_residual: float

    @property
    def ok(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + PASS_REL_TOL)


def lemma32_check(
    spectrum: SpectrumResult,
    pair: OperatorPair,
    g: ScalarField,
    j: int,
    k: int,
    multiplet_rel_tol: float = MULTIPLET_REL_TOL,
) -> Lemma32Result:
    """Real-test-function inequality over a full discrete spectrum.

    Requires the full eigenbasis of the pair (small grids), a nonzero
    cross term int g u_j u_{k+1} dm, and g u_j outside the span of the
    first k+1 eigenvectors (B-projection residual > 1e-8).
    """
    lam = spectrum.eigenvalues
    if spectrum.k < pair.ndof:
        raise InsufficientSpectrum("needs the full discrete spectrum of the pair")
    if k + 2 > lam.size:
        raise InsufficientSpectrum(f"need lambda_{k + 2}, have {lam.size}")
    labels = _multiplet_labels(lam, multiplet_rel_tol)
    lam_j, l_k1, l_k2 = float(lam[j - 1]), float(lam[k]), float(lam[k + 1])
    if not lam_j < l_k1 or labels[j - 1] == labels[k]:
        raise HypothesisViolated(f"need lambda_j < lambda_k+1 strictly (j={j}, k={k})")
    if labels[k] == labels[k + 1]:
        raise HypothesisViolated("need lambda_{k+1} < lambda_{k+2} strictly")

    pts, flat, dm, grad_factor, theta = _quad_context(pair)
    n = pair.domain.dim
    uj, guj = interpolate_at_quadrature(pair, spectrum.eigenvectors[:, j - 1])
    uk1, _ = interpolate_at_quadrature(pair, spectrum.eigenvectors[:, k])
    gv = g.value(flat).reshape(pts.shape[:2])
    gg = g.grad(flat).reshape(pts.shape[0], pts.shape[1], n)
    lg = apply_operator_L(pair.field, pair.drift, pair.domain.metric, g, flat).reshape(pts.shape[:2])

    cross = float(np.sum(gv * uj * uk1 * dm))
    if abs(cross) <= 1e-10:
        raise HypothesisViolated(f"cross term int g u_j u_k+1 dm = {cross:.2e} vanishes")

    # span check on the nodal product vector, in the B inner product
    from .assembly import project_function

    w = project_function(pair.domain, g) * spectrum.eigenvectors[:, j - 1]
    bw = pair.B @ w
    coeffs = spectrum.eigenvectors[:, : k + 1].T @ bw
    resid_vec = w - spectrum.eigenvectors[:, : k + 1] @ coeffs
    resid = float(np.sqrt(max(resid_vec @ (pair.B @ resid_vec), 0.0)))
    if resid <= 1e-8:
        raise HypothesisViolated(f"g u_j lies in the span of u_1..u_{k + 1} (residual {resid:.2e})")

    t_gg = np.einsum("cqab,cqb->cqa", theta, gg)
    igg = float(np.sum(grad_factor * np.einsum("cqa,cqa->cq", gg, t_gg) * uj**2 * dm))
    t_guj = np.einsum("cqab,cqb->cqa", theta, guj)
    cross_grad = grad_factor * np.einsum("cqa,cqa->cq", t_guj, gg)
    ib = float(np.sum((2.0 * cross_grad + uj * lg) ** 2 * dm))
    igu = float(np.sum((gv * uj) ** 2 * dm))

    lhs = ((l_k1 - lam_j) + (l_k2 - lam_j)) * igg
    rhs = ib + (l_k2 - lam_j) * (l_k1 - lam_j) * igu
    return Lemma32Result(j, k, lhs, rhs, rhs - lhs, cross, resid)
