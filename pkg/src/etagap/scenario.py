"""Declarative experiment configs and the end-to-end verification pipeline.

A scenario binds a metric, a masked box domain, coefficient presets,
solver settings, and the list of checks to run.  Configs are JSON with
every real number written as a decimal string (locale-proof); resolutions
and counts are plain integers.  Builtin scenarios ship with the package,
one per bound family, so the acceptance story is "run all builtins".
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

from . import assembly, bounds, fields, geometry, spectral
from .errors import (
    ConfigError,
    EtagapError,
    HypothesisViolated,
    InsufficientSpectrum,
)

THEOREM_TAGS = ("thm11", "thm12", "thm13")
CHECK_NAMES = ("gap", "yang", "cor32", "lemma32", "parseval")


def _num(value) -> float:
    """Decimal-string (or numeric) scalar from a config field."""
    if isinstance(value, bool):
        raise ConfigError(f"expected a number, got {value!r}")
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            if value == "inf":
                return float("inf")
            return float(value)
        except ValueError as exc:
            raise ConfigError(f"bad decimal string {value!r}") from exc
    raise ConfigError(f"expected a number, got {value!r}")


def _nums(seq) -> list:
    return [_num(v) for v in seq]


@dataclass
class SolverSettings:
    k: int | str = 8
    solve_tol: float = spectral.DEFAULT_SOLVE_TOL
    ortho_tol: float = spectral.DEFAULT_ORTHO_TOL
    method: str = "auto"
    seed: int = 0


@dataclass
class ScenarioConfig:
    """Validated scenario description; see the README for the grammar."""

    name: str
    metric_tag: str
    dim: int
    box: list
    resolution: list
    mask: dict
    tensor: dict
    drift: dict
    solver: SolverSettings
    theorems: list
    k_range: list | None
    c_scale: float
    h0: float | None
    kappa1: float | None
    kappa2: float | None
    origin: list | None
    verify: list
    oracle: dict | None
    oracle_rtol: float | None
    output_dir: str | None

    @staticmethod
    def from_dict(raw: dict) -> "ScenarioConfig":
        try:
            name = raw["name"]
            metric_tag = raw["metric"]
            domain = raw["domain"]
            box = [(_num(lo), _num(hi)) for lo, hi in domain["bounds"]]
            resolution = [int(r) for r in domain["resolution"]]
            mask = domain.get("mask", {"kind": "all"})
            tensor = raw["tensor"]
            drift = raw.get("drift", {"kind": "zero"})
            solver_raw = raw.get("solver", {})
            bounds_raw = raw.get("bounds", {})
            consts_raw = raw.get("constants", {})
        except KeyError as exc:
            raise ConfigError(f"missing config key: {exc}") from exc
        if metric_tag not in ("euclidean", "hyperbolic"):
            raise ConfigError(f"metric must be euclidean|hyperbolic, got {metric_tag!r}")
        dim = len(box)
        if len(resolution) != dim:
            raise ConfigError("resolution length must match bounds")
        k_raw = solver_raw.get("k", 8)
        solver = SolverSettings(
            k="full" if k_raw == "full" else int(k_raw),
            solve_tol=_num(solver_raw.get("solve_tol", "1e-9")),
            ortho_tol=_num(solver_raw.get("ortho_tol", "1e-8")),
            method=solver_raw.get("method", "auto"),
            seed=int(solver_raw.get("seed", 0)),
        )
        theorems = list(bounds_raw.get("theorems", []))
        for tag in theorems:
            if tag not in THEOREM_TAGS:
                raise ConfigError(f"unknown bound family {tag!r}")
        k_range = bounds_raw.get("k_range")
        if k_range is not None:
            k_range = [int(k_range[0]), int(k_range[1])]
        c_scale = _num(bounds_raw.get("c_scale", "1"))
        verify = list(raw.get("verify", []))
        for chk in verify:
            if chk not in CHECK_NAMES:
                raise ConfigError(f"unknown verification {chk!r}")
        oracle = raw.get("oracle")
        oracle_rtol = _num(oracle["rtol"]) if oracle and "rtol" in oracle else None
        cfg = ScenarioConfig(
            name=name,
            metric_tag=metric_tag,
            dim=dim,
            box=box,
            resolution=resolution,
            mask=mask,
            tensor=tensor,
            drift=drift,
            solver=solver,
            theorems=theorems,
            k_range=k_range,
            c_scale=c_scale,
            h0=_num(consts_raw["H0"]) if "H0" in consts_raw else None,
            kappa1=_num(consts_raw["kappa1"]) if "kappa1" in consts_raw else None,
            kappa2=_num(consts_raw["kappa2"]) if "kappa2" in consts_raw else None,
            origin=_nums(consts_raw["origin"]) if "origin" in consts_raw else None,
            verify=verify,
            oracle=oracle,
            oracle_rtol=oracle_rtol,
            output_dir=raw.get("output_dir"),
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        euclid = self.metric_tag == "euclidean"
        if euclid:
            if self.h0 not in (None, 0.0):
                raise ConfigError("Euclidean scenarios force H0 = 0")
            for tag in ("thm12", "thm13"):
                if tag in self.theorems:
                    raise ConfigError(f"{tag} requires the hyperbolic metric")
            if self.theorems == ["thm11"] and (
                self.kappa1 is not None or self.kappa2 is not None or self.origin is not None
            ):
                raise ConfigError("thm11 scenarios take no curvature/origin inputs")
        else:
            if "thm11" in self.theorems:
                raise ConfigError("thm11 requires the Euclidean metric")
            needs_h0 = any(t in self.theorems for t in ("thm12", "thm13"))
            if needs_h0 and self.h0 is None:
                raise ConfigError("hyperbolic bound families need the H0 config input")
            if "thm13" in self.theorems:
                if self.origin is None:
                    raise ConfigError("thm13 needs an origin outside the closed domain")
                if self.kappa1 is None or self.kappa2 is None:
                    raise ConfigError("thm13 needs kappa1 and kappa2")
                if self.tensor.get("kind") != "identity":
                    raise ConfigError(
                        "thm13 requires a radially parallel tensor; only identity presets qualify"
                    )


def apply_overrides(cfg: ScenarioConfig, overrides: dict | None) -> ScenarioConfig:
    """Mutate a copy of the config with the CLI-allowed overrides."""
    if not overrides:
        return cfg
    import copy

    cfg = copy.deepcopy(cfg)
    allowed = {"resolution", "k", "solve_tol", "ortho_tol", "seed", "method", "output_dir"}
    for key, val in overrides.items():
        if val is None:
            continue
        if key not in allowed:
            raise ConfigError(f"override {key!r} not permitted")
        if key == "resolution":
            res = [int(v) for v in (val if isinstance(val, (list, tuple)) else [val] * cfg.dim)]
            if len(res) == 1 and cfg.dim > 1:
                res = res * cfg.dim
            if len(res) != cfg.dim:
                raise ConfigError("resolution override length mismatch")
            cfg.resolution = res
        elif key == "k":
            cfg.solver.k = "full" if val == "full" else int(val)
        elif key == "solve_tol":
            cfg.solver.solve_tol = _num(val)
        elif key == "ortho_tol":
            cfg.solver.ortho_tol = _num(val)
        elif key == "seed":
            cfg.solver.seed = int(val)
        elif key == "method":
            cfg.solver.method = str(val)
        elif key == "output_dir":
            cfg.output_dir = str(val)
    return cfg


# ---------------------------------------------------------------------------
# construction from config
# ---------------------------------------------------------------------------


def _build_metric(cfg: ScenarioConfig) -> geometry.MetricModel:
    if cfg.metric_tag == "euclidean":
        return geometry.euclidean(cfg.dim)
    return geometry.hyperbolic_half_plane(cfg.dim)


def _mask_rule(mask: dict):
    kind = mask.get("kind", "all")
    if kind == "all":
        return None
    if kind == "ball":
        center = np.asarray(_nums(mask["center"]))
        radius = _num(mask["radius"])

        def rule(centers):
            return np.linalg.norm(centers - center[None, :], axis=1) <= radius

        return rule
    if kind == "box":
        lo = np.asarray(_nums(mask["lo"]))
        hi = np.asarray(_nums(mask["hi"]))

        def rule(centers):
            return np.all((centers >= lo[None, :]) & (centers <= hi[None, :]), axis=1)

        return rule
    raise ConfigError(f"unknown mask kind {kind!r}")


def _build_tensor(cfg: ScenarioConfig) -> fields.TensorField:
    spec = dict(cfg.tensor)
    kind = spec.pop("kind", None)
    if kind is None:
        raise ConfigError("tensor preset needs a 'kind'")
    if kind == "identity":
        scale = _num(spec.get("scale", "1"))
        return fields.identity_tensor(cfg.dim, scale)
    if kind == "constant_diag":
        return fields.tensor_preset(kind, cfg.dim, entries=_nums(spec["entries"]))
    if kind == "constant":
        mat = [[_num(v) for v in row] for row in spec["matrix"]]
        return fields.tensor_preset(kind, cfg.dim, matrix=mat)
    if kind == "diag_profile":
        entries = []
        for ent in spec["entries"]:
            entries.append(
                {
                    "profile": ent.get("profile", "const"),
                    "c0": _num(ent.get("c0", "0")),
                    "c1": _num(ent.get("c1", "0")),
                    "axis": int(ent.get("axis", 0)),
                }
            )
        return fields.tensor_preset(kind, cfg.dim, entries=entries)
    raise ConfigError(f"unknown tensor preset {kind!r}")


def _build_drift(cfg: ScenarioConfig) -> fields.ScalarField:
    spec = dict(cfg.drift)
    kind = spec.pop("kind", "zero")
    if kind in ("zero", "constant"):
        return fields.drift_preset("constant", cfg.dim, c=_num(spec.get("c", "0")))
    if kind == "affine":
        return fields.drift_preset(
            "affine", cfg.dim, coeffs=_nums(spec["coeffs"]), c0=_num(spec.get("c0", "0"))
        )
    if kind == "quadratic":
        quad = spec.get("quad")
        quad = [[_num(v) for v in row] for row in quad] if quad is not None else None
        return fields.drift_preset(
            "quadratic",
            cfg.dim,
            quad=quad,
            coeffs=_nums(spec["coeffs"]) if "coeffs" in spec else None,
            c0=_num(spec.get("c0", "0")),
            scale=_num(spec.get("scale", "1")),
        )
    if kind == "gaussian":
        return fields.drift_preset(
            "gaussian",
            cfg.dim,
            amplitude=_num(spec["amplitude"]),
            center=_nums(spec["center"]),
            width=_num(spec["width"]),
        )
    raise ConfigError(f"unknown drift preset {kind!r}")


# ---------------------------------------------------------------------------
# oracle spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OracleSpectrum:
    """Closed-form eigenvalue generators for separable references."""

    kind: str
    lengths: tuple = ()
    coeffs: tuple = ()
    drift_slope: float = 0.0

    @staticmethod
    def from_dict(raw: dict) -> "OracleSpectrum":
        kind = raw["kind"]
        if kind not in ("interval", "box", "anisotropic", "drifted_interval"):
            raise ConfigError(f"unknown oracle kind {kind!r}")
        lengths = tuple(_nums(raw.get("lengths", [])))
        coeffs = tuple(_nums(raw.get("coeffs", [])))
        slope = _num(raw.get("drift_slope", "0"))
        return OracleSpectrum(kind, lengths, coeffs, slope)


def oracle_eigenvalues(oracle: OracleSpectrum, k: int) -> np.ndarray:
    """First k closed-form eigenvalues, ascending with multiplicity."""
    if k < 1:
        raise ValueError("k must be >= 1")
    pi = np.pi
    if oracle.kind == "interval":
        length = oracle.lengths[0] if oracle.lengths else pi
        coeff = oracle.coeffs[0] if oracle.coeffs else 1.0
        modes = np.arange(1, k + 1)
        return coeff * (modes * pi / length) ** 2
    if oracle.kind == "drifted_interval":
        length = oracle.lengths[0] if oracle.lengths else pi
        modes = np.arange(1, k + 1)
        return (modes * pi / length) ** 2 + oracle.drift_slope**2 / 4.0
    if oracle.kind in ("box", "anisotropic"):
        lengths = oracle.lengths if oracle.lengths else (pi, pi)
        dim = len(lengths)
        coeffs = oracle.coeffs if oracle.coeffs else (1.0,) * dim
        per_axis = int(np.ceil(np.sqrt(k) )) + k  # generous mode cap
        grids = np.meshgrid(*[np.arange(1, per_axis + 1)] * dim, indexing="ij")
        lam = np.zeros(grids[0].shape)
        for c, g, length in zip(coeffs, grids, lengths):
            lam = lam + c * (g * pi / length) ** 2
        return np.sort(lam.ravel())[:k]
    raise ConfigError(f"unknown oracle kind {oracle.kind!r}")


# ---------------------------------------------------------------------------
# pipeline
# ---------------------------------------------------------------------------


@dataclass
class ScenarioReport:
    """Everything a scenario run produced, plus aggregated counts."""

    name: str
    config: ScenarioConfig
    spectrum: spectral.SpectrumResult
    validation: spectral.ValidationReport
    constants: fields.OperatorConstants | None
    gap_reports: dict = field(default_factory=dict)
    yang_report: bounds.YangReport | None = None
    cor32_rows: dict = field(default_factory=dict)
    lemma32_rows: list = field(default_factory=list)
    parseval: float | None = None
    oracle_error: float | None = None
    errors: list = field(default_factory=list)
    elapsed: float = 0.0
    written: list = field(default_factory=list)

    def counts(self) -> dict:
        out = {"pass": 0, "fail": 0, "inconclusive": 0, "info": 0, "skipped": 0, "errors": len(self.errors)}
        for name, (ok, _margin) in self.validation.checks.items():
            out["pass" if ok else "fail"] += 1
        for rep in self.gap_reports.values():
            for status, cnt in rep.counts().items():
                out[status] += cnt
        if self.yang_report is not None:
            for row in self.yang_report.rows:
                out["pass" if row.ok else "fail"] += 1
        for rows in self.cor32_rows.values():
            for row in rows:
                if row.status == "skipped":
                    out["skipped"] += 1
                else:
                    ok = row.ok_314 and row.ok_315 and row.implication_ok
                    out["pass" if ok else "fail"] += 1
        for row in self.lemma32_rows:
            if isinstance(row, str):
                out["skipped"] += 1
            else:
                out["pass" if row.ok else "fail"] += 1
        if self.parseval is not None:
            out["pass" if self.parseval >= -1e-10 else "fail"] += 1
        if self.oracle_error is not None and self.config.oracle_rtol is not None:
            out["pass" if self.oracle_error <= self.config.oracle_rtol else "fail"] += 1
        return out

    def exit_code(self) -> int:
        c = self.counts()
        if c["fail"] > 0 or c["errors"] > 0:
            return 1
        if c["inconclusive"] > 0:
            return 2
        return 0

    def summary_dict(self) -> dict:
        return {
            "schema_version": bounds.SCHEMA_VERSION,
            "name": self.name,
            "counts": self.counts(),
            "exit_code": self.exit_code(),
            "validation": {k: [bool(v[0]), float(v[1])] for k, v in self.validation.checks.items()},
            "eigenvalues": [float(v) for v in self.spectrum.eigenvalues],
            "oracle_error": self.oracle_error,
            "parseval_defect": self.parseval,
            "errors": self.errors,
            "gap_reports": {tag: rep.to_json_dict() for tag, rep in self.gap_reports.items()},
            "elapsed_seconds": self.elapsed,
        }


def build_problem(cfg: ScenarioConfig):
    """Metric, domain, tensor and drift objects for a validated config."""
    metric = _build_metric(cfg)
    domain = geometry.make_box_domain(cfg.box, cfg.resolution, metric, _mask_rule(cfg.mask))
    tensor = _build_tensor(cfg)
    drift = _build_drift(cfg)
    if metric.is_hyperbolic and ("thm12" in cfg.theorems or "thm13" in cfg.theorems):
        fields.validate_radially_constant(drift.value, domain)
        fields.validate_radially_constant(
            lambda p: fields_matrix_flat(tensor, p), domain
        )
        # T must send the vertical direction to a multiple of itself
        pts = domain.quad_points_flat()[:16]
        theta = tensor.matrix(pts)
        off = np.abs(theta[:, :-1, -1])
        if np.max(off) > 1e-12:
            raise ConfigError("hyperbolic bound families need T(d_n) parallel to d_n")
    return metric, domain, tensor, drift


def fields_matrix_flat(tensor: fields.TensorField, pts: np.ndarray) -> np.ndarray:
    return tensor.matrix(pts).reshape(pts.shape[0], -1)


def collect_constants(cfg, metric, domain, tensor, drift) -> fields.OperatorConstants:
    eps, dlt = fields.tensor_bounds(tensor, domain)
    t0 = fields.compute_T0(tensor, metric, domain)
    c0 = fields.compute_C0(tensor, drift, metric, domain)
    prov = {"epsilon": "computed", "delta": "computed", "t0": "computed", "c0": "computed"}
    kwargs = {"n": metric.dim, "epsilon": eps, "delta": dlt, "t0": t0, "c0": c0}
    if metric.is_hyperbolic:
        kwargs["h0"] = cfg.h0 if cfg.h0 is not None else 0.0
        prov["h0"] = "config"
        if cfg.kappa1 is not None:
            kwargs["kappa1"] = cfg.kappa1
            kwargs["kappa2"] = cfg.kappa2 if cfg.kappa2 is not None else cfg.kappa1
            prov["kappa1"] = prov["kappa2"] = "config"
        if cfg.origin is not None:
            origin = geometry.OriginPoint(tuple(cfg.origin))
            kwargs["d"] = geometry.domain_origin_distance(domain, origin)
            prov["d"] = "computed (grid approximation from above)"
            eta1, eta_r = fields.compute_eta_radial_constants(drift, metric, domain, origin)
            kwargs["eta1"], kwargs["eta_r"] = eta1, eta_r
            prov["eta1"] = prov["eta_r"] = "computed"
    else:
        kwargs["h0"] = 0.0
        prov["h0"] = "forced 0 (Euclidean)"
    return fields.OperatorConstants(provenance=prov, **kwargs)


def run_scenario(
    cfg: ScenarioConfig,
    output_dir: str | None = None,
    write: bool = True,
) -> ScenarioReport:
    """Assemble, solve, validate, run the selected checks, write reports."""
    t_start = time.perf_counter()
    metric, domain, tensor, drift = build_problem(cfg)
    pair = assembly.assemble(domain, tensor, drift)
    k = pair.ndof if cfg.solver.k == "full" else int(cfg.solver.k)
    spectrum = spectral.solve_lowest(
        pair, k, solve_tol=cfg.solver.solve_tol, method=cfg.solver.method, seed=cfg.solver.seed
    )
    validation = spectral.validate_spectrum(spectrum, pair, ortho_tol=cfg.solver.ortho_tol)

    report = ScenarioReport(cfg.name, cfg, spectrum, validation, None)
    consts = None
    if cfg.theorems or "yang" in cfg.verify or "cor32" in cfg.verify:
        consts = collect_constants(cfg, metric, domain, tensor, drift)
        report.constants = consts

    lam1 = float(spectrum.eigenvalues[0])
    h_eff = max(domain.h)
    if "gap" in cfg.verify:
        for tag in cfg.theorems:
            try:
                if tag == "thm11":
                    gc = bounds.theorem11_constant(lam1, consts)
                elif tag == "thm12":
                    gc = bounds.theorem12_constant(lam1, consts)
                else:
                    gc = bounds.theorem13_constant(lam1, consts)
                k_range = cfg.k_range or (2, spectrum.k - 1)
                rep = bounds.gap_check(
                    spectrum,
                    gc.value * cfg.c_scale,
                    gc.exponent,
                    k_range=k_range,
                    tag=tag,
                    h=h_eff,
                    constants_used=_consts_dict(consts, lam1),
                    corollaries=gc.corollaries,
                )
                if cfg.c_scale != 1.0:
                    rep.notes["c_scale"] = cfg.c_scale
                report.gap_reports[tag] = rep
            except (EtagapError, ValueError) as exc:
                report.errors.append(f"{tag}: {type(exc).__name__}: {exc}")

    if "yang" in cfg.verify:
        try:
            report.yang_report = bounds.yang_check(spectrum, consts)
        except EtagapError as exc:
            report.errors.append(f"yang: {type(exc).__name__}: {exc}")

    if "cor32" in cfg.verify:
        try:
            tfs = {}
            if metric.is_hyperbolic:
                tfs["ln_xn"] = fields.log_axis_test_function(tensor, drift, metric)
            else:
                for axis in range(metric.dim):
                    tfs[f"x{axis + 1}"] = fields.coordinate_test_function(
                        tensor, drift, metric, axis
                    )
            for label, tf in tfs.items():
                report.cor32_rows[label] = bounds.cor32_check(spectrum, pair, tf, consts, j=1)
        except (EtagapError, ValueError) as exc:
            report.errors.append(f"cor32: {type(exc).__name__}: {exc}")

    if "lemma32" in cfg.verify:
        if spectrum.k < pair.ndof:
            report.errors.append("lemma32: needs solver k = 'full' (small grids)")
        else:
            g = fields.AffineScalar(np.eye(metric.dim)[0])
            for k_row in range(1, min(9, spectrum.k - 2)):
                try:
                    report.lemma32_rows.append(
                        bounds.lemma32_check(spectrum, pair, g, j=1, k=k_row)
                    )
                except HypothesisViolated as exc:
                    report.lemma32_rows.append(f"k={k_row}: skipped: {exc}")
                except InsufficientSpectrum:
                    break

    if "parseval" in cfg.verify:
        f_vec = assembly.project_function(domain, fields.AffineScalar(np.eye(metric.dim)[0]))
        report.parseval = spectral.parseval_defect(spectrum, pair, f_vec)

    if cfg.oracle is not None:
        oracle = OracleSpectrum.from_dict(cfg.oracle)
        ref = oracle_eigenvalues(oracle, spectrum.k)
        report.oracle_error = float(
            np.max(np.abs(spectrum.eigenvalues - ref) / np.abs(ref))
        )

    report.elapsed = time.perf_counter() - t_start
    if write:
        out = Path(output_dir or cfg.output_dir or f"etagap_out/{cfg.name}")
        out.mkdir(parents=True, exist_ok=True)
        spath = out / "spectrum.csv"
        spectral.export_spectrum_csv(spectrum, spath)
        report.written.append(str(spath))
        for tag, rep in report.gap_reports.items():
            cpath, jpath = out / f"gap_{tag}.csv", out / f"gap_{tag}.json"
            rep.to_csv(cpath)
            rep.to_json(jpath)
            report.written += [str(cpath), str(jpath)]
        sumpath = out / "summary.json"
        with open(sumpath, "w", encoding="utf-8") as fh:
            json.dump(report.summary_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
        report.written.append(str(sumpath))
    return report


def _consts_dict(consts: fields.OperatorConstants, lam1: float) -> dict:
    return {
        "n": consts.n,
        "epsilon": consts.epsilon,
        "delta": consts.delta,
        "sigma": consts.sigma,
        "t0": consts.t0,
        "c0": consts.c0,
        "h0": consts.h0,
        "eta1": consts.eta1,
        "eta_r": consts.eta_r,
        "kappa1": consts.kappa1,
        "kappa2": consts.kappa2,
        "d": consts.d if consts.d != float("inf") else "inf",
        "lambda1": lam1,
        "provenance": consts.provenance,
    }


# ---------------------------------------------------------------------------
# builtin scenarios and config IO
# ---------------------------------------------------------------------------


def load_config(path_or_name) -> ScenarioConfig:
    """Load a config from a JSON file path or a builtin scenario name."""
    p = Path(path_or_name)
    if p.is_file():
        with open(p, encoding="utf-8") as fh:
            return ScenarioConfig.from_dict(json.load(fh))
    if str(path_or_name) in list_builtin_scenarios():
        return builtin_config(str(path_or_name))
    raise ConfigError(f"no config file or builtin scenario named {path_or_name!r}")


def list_builtin_scenarios() -> list:
    base = resources.files("etagap").joinpath("scenarios")
    return sorted(p.name[: -len(".json")] for p in base.iterdir() if p.name.endswith(".json"))


def builtin_config(name: str) -> ScenarioConfig:
    ref = resources.files("etagap").joinpath(f"scenarios/{name}.json")
    with ref.open(encoding="utf-8") as fh:
        return ScenarioConfig.from_dict(json.load(fh))
