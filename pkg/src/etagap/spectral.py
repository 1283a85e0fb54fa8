"""Lowest eigenpairs of the pencil A u = lambda B u and their validation.

The sparse path is ARPACK shift-invert around zero with a seeded start
vector; a dense LAPACK path doubles as the oracle for small problems and
is always selectable.  Eigenvectors are B-orthonormal, eigenvalues
ascending with multiplicities repeated.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
import scipy.sparse.linalg as spla

from .assembly import OperatorPair
from .errors import ConvergenceFailure, DimensionMismatch

DEFAULT_SOLVE_TOL = 1e-9
DEFAULT_ORTHO_TOL = 1e-8
MULTIPLET_REL_TOL = 1e-6


@dataclass
class SpectrumResult:
    """Ascending eigenvalues with B-orthonormal vectors and diagnostics."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    residuals: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def k(self) -> int:
        return int(self.eigenvalues.size)

    def multiplicity_groups(self, rel_tol: float = MULTIPLET_REL_TOL) -> np.ndarray:
        """Group label per eigenvalue; equal labels form one multiplet."""
        lam = self.eigenvalues
        labels = np.zeros(lam.size, dtype=int)
        for j in range(1, lam.size):
            scale = max(abs(lam[j]), abs(lam[j - 1]), 1e-300)
            same = abs(lam[j] - lam[j - 1]) <= rel_tol * scale
            labels[j] = labels[j - 1] if same else labels[j - 1] + 1
        return labels


def _residuals(pair: OperatorPair, lam: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    res = np.empty(lam.size)
    for j in range(lam.size):
        u = vecs[:, j]
        r = pair.A @ u - lam[j] * (pair.B @ u)
        bnorm = np.sqrt(abs(u @ (pair.B @ u)))
        res[j] = np.linalg.norm(r) / bnorm
    return res


def solve_lowest(
    pair: OperatorPair,
    k: int,
    solve_tol: float = DEFAULT_SOLVE_TOL,
    method: str = "auto",
    seed: int = 0,
) -> SpectrumResult:
    """Lowest-k eigenpairs of (A, B), ascending, B-orthonormal."""
    ndof = pair.ndof
    if not 1 <= k <= ndof:
        raise DimensionMismatch(f"k={k} outside 1..{ndof}")
    use_dense = method == "dense" or (method == "auto" and (ndof <= 128 or k >= ndof - 1))
    if method not in ("auto", "dense", "shift_invert"):
        raise ValueError(f"unknown method {method!r}")

    if use_dense:
        if ndof > 2000:
            raise DimensionMismatch(
                f"dense fallback limited to 2000 DOFs (have {ndof}); lower k or refine less"
            )
        lam, vecs = sla.eigh(pair.A.toarray(), pair.B.toarray())
        lam, vecs = lam[:k], vecs[:, :k]
        how = "dense"
    else:
        rng = np.random.default_rng(seed)
        v0 = rng.standard_normal(ndof)
        try:
            lam, vecs = spla.eigsh(
                pair.A,
                k=k,
                M=pair.B,
                sigma=0.0,
                which="LM",
                v0=v0,
                tol=0,
                ncv=min(ndof - 1, max(4 * k + 20, 40)),
            )
        except spla.ArpackNoConvergence as exc:
            raise ConvergenceFailure(f"eigensolver stalled: {exc}") from exc
        order = np.argsort(lam)
        lam, vecs = lam[order], vecs[:, order]
        how = "shift_invert"

    # enforce unit B-norm (sign/normalization drift protection)
    for j in range(k):
        u = vecs[:, j]
        nb = np.sqrt(u @ (pair.B @ u))
        vecs[:, j] = u / nb
        if vecs[np.argmax(np.abs(vecs[:, j])), j] < 0:
            vecs[:, j] = -vecs[:, j]

    res = _residuals(pair, lam, vecs)
    if np.any(res > solve_tol):
        raise ConvergenceFailure(
            f"residuals up to {np.max(res):.3e} exceed tol {solve_tol:.1e}",
            residuals=res,
        )
    meta = {"method": how, "solve_tol": solve_tol, "seed": seed, "k": k}
    return SpectrumResult(lam, vecs, res, meta)


@dataclass
class ValidationReport:
    checks: dict

    @property
    def ok(self) -> bool:
        return all(v[0] for v in self.checks.values())


def validate_spectrum(
    result: SpectrumResult,
    pair: OperatorPair,
    ortho_tol: float = DEFAULT_ORTHO_TOL,
) -> ValidationReport:
    """Identity checks: Rayleigh quotient, B-orthonormality, order, positivity."""
    lam, vecs = result.eigenvalues, result.eigenvectors
    solve_tol = result.meta.get("solve_tol", DEFAULT_SOLVE_TOL)

    rayleigh = np.array([vecs[:, j] @ (pair.A @ vecs[:, j]) for j in range(lam.size)])
    ray_defect = float(np.max(np.abs(rayleigh - lam) / np.maximum(lam, 1e-300)))
    ray_ok = bool(np.all(np.abs(rayleigh - lam) <= 10.0 * solve_tol * lam))

    gram = vecs.T @ (pair.B @ vecs)
    ortho_defect = float(np.max(np.abs(gram - np.eye(lam.size))))
    ortho_ok = ortho_defect <= ortho_tol

    ascending = bool(np.all(np.diff(lam) >= -1e-12 * np.abs(lam[:-1])))
    positive = bool(lam[0] > 0.0)
    res_ok = bool(np.all(result.residuals <= solve_tol))

    return ValidationReport(
        {
            "rayleigh_identity": (ray_ok, ray_defect),
            "b_orthonormal": (ortho_ok, ortho_defect),
            "ascending": (ascending, float(np.min(np.diff(lam))) if lam.size > 1 else 0.0),
            "lambda1_positive": (positive, float(lam[0])),
            "residuals": (res_ok, float(np.max(result.residuals))),
        }
    )


def parseval_defect(result: SpectrumResult, pair: OperatorPair, f) -> float:
    """||f||_B^2 minus the captured energy sum of squared B-coefficients."""
    f = np.asarray(f, dtype=float)
    if f.shape[0] != pair.ndof:
        raise DimensionMismatch(f"expected {pair.ndof} entries, got {f.shape[0]}")
    bf = pair.B @ f
    total = float(f @ bf)
    coeffs = result.eigenvectors.T @ bf
    return total - float(np.sum(coeffs**2))


def export_spectrum_csv(result: SpectrumResult, path) -> None:
    groups = result.multiplicity_groups()
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["j", "lambda", "residual", "multiplicity_group"])
        for j in range(result.k):
            writer.writerow(
                [j + 1, repr(float(result.eigenvalues[j])), repr(float(result.residuals[j])), int(groups[j])]
            )
