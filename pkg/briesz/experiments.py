"""
Experiment runners for briesz: convergence studies, inequality checks and
bound tables, each producing a :class:`~briesz.report.Report`.
"""

import logging
import math
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Union

import dask
import numpy as np
import pandas as pd

from .exceptions import BrieszError, ConfigurationError
from .field import GridFunction, convolve_direct, lp_norm, read_grid_function, sample
from .gls import (
    BoundParams,
    empirical_lr_ratio,
    gaussian_equality_pair,
    gls_norm,
    gls_norm_from_table,
    nu_of,
    psi_eval,
    q_of,
    qn_lower_search,
    w_coeff,
    young_bound,
)
from .kernel import (
    bochner_riesz_direct,
    kernel_envelope,
    kernel_lq_norm,
    kernel_radial,
    key_estimate,
    omega_bound_term,
    omega_ladder,
)
from .models import ExperimentConfig, Grid, KernelSpec, TestFunctionSpec, load_config_from_file
from .report import Report, write_report
from .spectral import (
    Symbol,
    bochner_riesz_spectral,
    check_nyquist,
    convolve_spectral,
    gaussian_limit_operator,
)

logger = logging.getLogger(__name__)

NORM_EXPONENTS = (1.0, 1.5, 2.0, 3.0, 4.0, 8.0, math.inf)


def default_gls_family() -> List[TestFunctionSpec]:
    """Five test functions used by the Grand Lebesgue transfer experiment."""
    return [
        TestFunctionSpec(kind="gaussian"),
        TestFunctionSpec(kind="gaussian", c1=1.0, c2=2.0),
        TestFunctionSpec(kind="smooth_bump", radius=2.0),
        TestFunctionSpec(kind="smooth_bump", radius=3.0),
        TestFunctionSpec(kind="cosine_packet", frequency=2.0, width=1.0),
    ]


def _label(spec: TestFunctionSpec) -> str:
    if spec.kind == "gaussian":
        return f"gaussian(c2={spec.c2:g})"
    if spec.kind == "smooth_bump":
        return f"smooth_bump(radius={spec.radius:g})"
    if spec.kind == "cosine_packet":
        return f"cosine_packet(frequency={spec.frequency:g},width={spec.width:g})"
    return f"box_indicator(side={spec.side:g})"


class ExperimentRunner:
    """Runs one :class:`ExperimentConfig` and returns its report."""

    def __init__(self, config: Optional[ExperimentConfig] = None, **kwargs: Any):
        """
        Initialize the runner.

        Args:
            config: Experiment configuration
            **kwargs: Fields of an ExperimentConfig when no config is given
        """
        self.config = config if config is not None else ExperimentConfig(**kwargs)
        self.grid: Grid = self.config.grid.to_grid()
        self.rng = np.random.default_rng(self.config.seed)

    @classmethod
    def from_config_file(cls, config_path: Union[str, Path]) -> "ExperimentRunner":
        """
        Create an ExperimentRunner from a configuration file.

        Args:
            config_path: Path to configuration file (YAML or JSON)
        """
        return cls(config=load_config_from_file(config_path))

    @property
    def handlers(self) -> Dict[str, Callable[[], Report]]:
        return {
            "kernel": self.run_kernel_table,
            "apply": self.run_apply,
            "norms": self.run_norms,
            "young": self.run_young,
            "converge": self.run_converge,
            "uconverge": self.run_uniform_converge,
            "gls": self.run_gls,
            "gauss-limit": self.run_gaussian_limit,
            "bounds": self.run_bounds,
            "lowerbound": self.run_lowerbound,
        }

    def run(self) -> Report:
        """Run the configured experiment."""
        logger.info(f"Running {self.config.kind} experiment on grid {self.grid.shape}")
        return self.handlers[self.config.kind]()

    def _report(self, table: pd.DataFrame, summary: Dict[str, Any], output: Optional[GridFunction] = None) -> Report:
        return Report(self.config.kind, table, summary, self.config.to_dict(), output)

    def _input_function(self) -> GridFunction:
        if self.config.input_path:
            f = read_grid_function(self.config.input_path)
            self.grid = f.grid
            return f
        return sample(self.config.function, self.grid)

    def _apply(self, f: GridFunction, alpha: float, R: float) -> GridFunction:
        op = self.config.operator
        if op.method == "direct":
            return bochner_riesz_direct(f, KernelSpec(alpha=alpha, dim=f.grid.dim, R=R))
        return bochner_riesz_spectral(f, alpha, R, pad_factor=op.pad_factor)

    def _radii(self) -> List[float]:
        radii = list(self.config.operator.R)
        if any(b <= a for a, b in zip(radii, radii[1:])):
            raise ConfigurationError(f"R list must be strictly increasing, got {radii}")
        check_nyquist(Symbol.bochner_riesz(self.config.operator.alpha, radii[-1]), self.grid)
        return radii

    def run_converge(self) -> Report:
        """
        Lp convergence of B_R^alpha f to f along the R list.

        Rows: R, error, ratio, omega_term, omega_truncated. The summary
        records whether the errors are nonincreasing over the last half of
        the list and the largest ratio ||B_R f||_p / ||f||_p against 3.
        """
        return self._converge(self.config.norms.p, with_omega=True)

    def run_uniform_converge(self) -> Report:
        """Uniform convergence: ``run_converge`` with the sup norm."""
        return self._converge(math.inf, with_omega=False)

    def _converge(self, p: float, with_omega: bool) -> Report:
        f = self._input_function()
        radii = self._radii()
        alpha = self.config.operator.alpha
        f_norm = lp_norm(f, p)
        ladder = omega_ladder(f, p, seed=self.config.seed) if with_omega else None
        rows = []
        for R in radii:
            out = self._apply(f, alpha, R)
            row = {
                "R": R,
                "error": lp_norm(out - f, p),
                "ratio": lp_norm(out, p) / f_norm,
            }
            if with_omega:
                bound = omega_bound_term(f, KernelSpec(alpha=alpha, dim=f.grid.dim, R=R), p, ladder=ladder)
                row["omega_term"] = bound.value
                row["omega_truncated"] = bound.truncated
            rows.append(row)
            logger.info(f"R={R}: error {row['error']:.6g}, ratio {row['ratio']:.6g}")
        table = pd.DataFrame(rows)
        errors = table["error"].to_numpy()
        tail = errors[len(errors) // 2 :]
        summary = {
            "p": p,
            "f_norm": f_norm,
            "final_error": float(errors[-1]),
            "relative_final_error": float(errors[-1] / f_norm),
            "errors_nonincreasing_tail": bool(np.all(np.diff(tail) <= 1e-12 * f_norm)),
            "max_ratio": float(table["ratio"].max()),
            "ratio_within_3": bool(table["ratio"].max() <= 3.0),
        }
        return self._report(table, summary)

    def run_young(self) -> Report:
        """
        Randomized sharp Young inequality trials plus Gaussian equality cases.

        Rows: trial, case, p, q, r, lhs, rhs, slack, holds. Random trials
        draw 1/p and 1/q uniformly in [0.34, 1] with sum above 1 and pair
        nonnegative Gaussian mixtures.
        """
        cfg = self.config.young
        grid = self.grid
        n = grid.dim
        convolve = convolve_direct if n == 1 else convolve_spectral
        rows = []

        def add(trial: int, case: str, p: float, q: float, r: float, f: GridFunction, g: GridFunction) -> None:
            lhs = lp_norm(convolve(f, g), r)
            rhs = young_bound(p, q, r, n) * lp_norm(f, p) * lp_norm(g, q)
            slack = (rhs - lhs) / rhs
            rows.append(
                {"trial": trial, "case": case, "p": p, "q": q, "r": r, "lhs": lhs, "rhs": rhs, "slack": slack,
                 "holds": bool(lhs <= rhs * (1.0 + 1e-6))}
            )

        for trial in range(cfg.trials):
            while True:
                inv_p, inv_q = self.rng.uniform(0.34, 1.0, size=2)
                if inv_p + inv_q > 1.0 + 1e-3:
                    break
            p, q = 1.0 / inv_p, 1.0 / inv_q
            r = 1.0 / (inv_p + inv_q - 1.0)
            add(trial, "random", p, q, r, self._mixture(), self._mixture())

        f, g = self._mixture(), self._mixture()
        add(cfg.trials, "fubini", 1.0, 1.0, 1.0, f, g)

        for k, (p, q, r) in enumerate(cfg.gaussian_triples):
            rates = gaussian_equality_pair(p, q, n)
            f = sample(TestFunctionSpec(kind="gaussian", c1=1.0, c2=rates["a"]), grid)
            g = sample(TestFunctionSpec(kind="gaussian", c1=1.0, c2=rates["b"]), grid)
            add(cfg.trials + 1 + k, "gaussian", p, q, r, f, g)

        table = pd.DataFrame(rows)
        random = table[table["case"] == "random"]
        gaussian = table[table["case"] == "gaussian"]
        summary = {
            "trials": int(len(random)),
            "all_hold": bool(table["holds"].all()),
            "min_slack": float(random["slack"].min()),
            "max_slack": float(random["slack"].max()),
            "max_equality_gap": float(gaussian["slack"].abs().max()) if len(gaussian) else 0.0,
        }
        return self._report(table, summary)

    def _mixture(self) -> GridFunction:
        cfg = self.config.young
        n = self.grid.dim
        total = None
        for _ in range(cfg.components):
            center = self.rng.uniform(-cfg.center_range, cfg.center_range, size=n)
            variance = self.rng.uniform(*cfg.variance_range)
            weight = self.rng.uniform(0.5, 1.5)
            spec = TestFunctionSpec(kind="gaussian", c1=weight, c2=1.0 / (2.0 * variance), center=list(center))
            part = sample(spec, self.grid)
            total = part if total is None else total + part
        return total

    def run_gls(self) -> Report:
        """
        Grand Lebesgue transfer ratios ||B f||_{G nu} / ||f||_{G psi}.

        Rows: function, r, nu, bf_norm, f_gpsi, bf_gnu, ratio, reason. The
        G nu norm is sampled on the configured r list; r values at or below
        d are reported with a reason and left out of the sup.
        """
        norms = self.config.norms
        alpha = self.config.operator.alpha
        R = self.config.operator.R[0]
        n = self.grid.dim
        psi = norms.psi
        specs = self.config.functions or default_gls_family()
        check_nyquist(Symbol.bochner_riesz(alpha, R), self.grid)

        nus: Dict[float, float] = {}
        reasons: Dict[float, str] = {}
        for r in norms.r:
            try:
                nus[r] = nu_of(psi, alpha, n, R, r, p_max=norms.p_max)
            except BrieszError as e:
                reasons[r] = str(e)
                logger.warning(f"r={r} rejected: {e}")

        rows = []
        ratios = []
        for spec in specs:
            f = sample(spec, self.grid)
            out = bochner_riesz_spectral(f, alpha, R, pad_factor=self.config.operator.pad_factor)
            f_gpsi = gls_norm(f, psi, norms.p_samples, norms.p_max).value
            accepted = [r for r in norms.r if r in nus]
            bf_norms = {r: lp_norm(out, r) for r in accepted}
            if accepted:
                table = gls_norm_from_table(
                    np.array(accepted),
                    np.array([bf_norms[r] for r in accepted]),
                    lambda rs: np.array([nus[x] for x in rs]),
                )
                bf_gnu = table.value
            else:
                bf_gnu = math.nan
            ratio = bf_gnu / f_gpsi
            ratios.append(ratio)
            for r in norms.r:
                rows.append(
                    {
                        "function": _label(spec),
                        "r": r,
                        "nu": nus.get(r, math.nan),
                        "bf_norm": bf_norms.get(r, math.nan),
                        "f_gpsi": f_gpsi,
                        "bf_gnu": bf_gnu,
                        "ratio": ratio,
                        "reason": reasons.get(r, ""),
                    }
                )
        finite = [x for x in ratios if math.isfinite(x)]
        summary = {
            "max_ratio": max(finite) if finite else math.nan,
            "finite": bool(finite) and len(finite) == len(ratios),
            "rejected_r": sorted(reasons),
        }
        return self._report(pd.DataFrame(rows), summary)

    def run_gaussian_limit(self) -> Report:
        """
        Distance of B_R^(R^2/2) f0 to f0*f0 along the R list.

        Rows: R, error, relative_error, symbol_unit, symbol_gap, where
        symbol_unit is (1 - 1/R^2)^(R^2/2) and symbol_gap its distance to e^(-1/2).
        """
        radii = self._radii()
        n = self.grid.dim
        f0 = sample(TestFunctionSpec(kind="gaussian"), self.grid)
        ref = sample(TestFunctionSpec(kind="gaussian", c1=(4.0 * math.pi) ** (-n / 2.0), c2=0.25), self.grid)
        ref_norm = lp_norm(ref, math.inf)
        rows = []
        for R in radii:
            err = lp_norm(gaussian_limit_operator(f0, R) - ref, math.inf)
            unit = float(Symbol.gaussian_limit(R)(np.array(1.0))) if R > 1 else 0.0
            rows.append(
                {
                    "R": R,
                    "error": err,
                    "relative_error": err / ref_norm,
                    "symbol_unit": unit,
                    "symbol_gap": abs(unit - math.exp(-0.5)),
                }
            )
        table = pd.DataFrame(rows)
        errors = table["error"].to_numpy()
        summary = {
            "strictly_decreasing": bool(np.all(np.diff(errors) < 0)),
            "final_relative_error": float(errors[-1] / ref_norm),
        }
        return self._report(table, summary)

    def run_kernel_table(self) -> Report:
        """
        Kernel values and Lq norms.

        Rows: row ('eval' or 'lq_norm'), R, r, q, value, error, panel_part,
        tail_part, reason. Exponents at or below q0 become rejected rows.
        """
        alpha = self.config.operator.alpha
        n = self.grid.dim
        cfg = self.config.kernel_table
        rows = []
        for R in self.config.operator.R:
            spec = KernelSpec(alpha=alpha, dim=n, R=R)
            radii = np.linspace(0.0, cfg.r_max, cfg.r_points)
            for r, value in zip(radii, kernel_radial(spec, radii)):
                rows.append({"row": "eval", "R": R, "r": float(r), "q": math.nan, "value": float(value), "reason": ""})
            for q in cfg.q:
                try:
                    result = kernel_lq_norm(spec, q)
                except BrieszError as e:
                    rows.append({"row": "lq_norm", "R": R, "r": math.nan, "q": q, "value": math.nan, "reason": str(e)})
                    continue
                rows.append(
                    {
                        "row": "lq_norm",
                        "R": R,
                        "r": math.nan,
                        "q": q,
                        "value": result.value,
                        "error": result.error,
                        "panel_part": result.panel_part,
                        "tail_part": result.tail_part,
                        "reason": "",
                    }
                )
        columns = ["row", "R", "r", "q", "value", "error", "panel_part", "tail_part", "reason"]
        table = pd.DataFrame(rows).reindex(columns=columns)
        table["reason"] = table["reason"].fillna("")
        unit = KernelSpec(alpha=alpha, dim=n, R=1.0)
        summary = {
            "alpha": alpha,
            "dim": n,
            "q0": unit.q0,
            "lambda": unit.lambda_,
            "origin_value": float(kernel_radial(unit, 0.0)),
            "envelope": kernel_envelope(unit),
        }
        return self._report(table, summary)

    def run_bounds(self) -> Report:
        """
        Table of W coefficients and kernel norms over (p, r) pairs.

        Rows: p, r, q, q0, r0, p0, s, d, W, kernel_bound, nu, nu_reason,
        lr_ratio, key_lhs, key_rhs, reason. Inadmissible pairs are kept with the
        violated constraints as reason. lr_ratio is the max of
        ||B f||_r / (W ||f||_p) over the function family; key_lhs and key_rhs are
        ||B f||_r and ||K^R||_q ||f||_p for the family member closest to equality.
        """
        alpha = self.config.operator.alpha
        R = self.config.operator.R[0]
        pad_factor = self.config.operator.pad_factor
        n = self.grid.dim
        psi = self.config.norms.psi
        spec = KernelSpec(alpha=alpha, dim=n, R=R)
        family = [sample(s, self.grid) for s in (self.config.functions or default_gls_family())]
        rows = []
        for p in self.config.bounds.p:
            for r in self.config.bounds.r:
                params = BoundParams(p=p, r=r, alpha=alpha, n=n, b=psi.support_sup)
                row = {
                    "p": p,
                    "r": r,
                    "q": params.q,
                    "q0": params.q0,
                    "r0": params.r0,
                    "p0": params.p0,
                    "s": params.s,
                    "d": params.d,
                    "W": math.nan,
                    "kernel_bound": math.nan,
                    "nu": math.nan,
                    "nu_reason": "",
                    "lr_ratio": math.nan,
                    "key_lhs": math.nan,
                    "key_rhs": math.nan,
                    "reason": "; ".join(params.violations()),
                }
                if params.admissible:
                    row["W"] = w_coeff(alpha, n, R, p, r)
                    row["kernel_bound"] = kernel_lq_norm(spec, params.q).value
                    row["lr_ratio"] = empirical_lr_ratio(family, alpha, R, p, r, pad_factor=pad_factor)
                    estimates = [
                        key_estimate(f, spec, p, r, pad_factor=pad_factor, kernel_norm=row["kernel_bound"])
                        for f in family
                    ]
                    tightest = max(estimates, key=lambda e: e.lhs / e.rhs)
                    row["key_lhs"] = tightest.lhs
                    row["key_rhs"] = tightest.rhs
                    try:
                        row["nu"] = nu_of(psi, alpha, n, R, r, p_max=self.config.norms.p_max)
                    except BrieszError as e:
                        logger.debug(f"nu({r}) undefined: {e}")
                        row["nu_reason"] = str(e)
                else:
                    row["nu_reason"] = "inadmissible (p, r)"
                rows.append(row)
        table = pd.DataFrame(rows)
        admissible = table[table["reason"] == ""]
        summary = {
            "admissible": int(len(admissible)),
            "rejected": int(len(table) - len(admissible)),
            "max_lr_ratio": float(admissible["lr_ratio"].max()) if len(admissible) else math.nan,
            "key_estimate_holds": bool((admissible["key_lhs"] <= admissible["key_rhs"] * (1.0 + 1e-6)).all()),
        }
        return self._report(table, summary)

    def run_lowerbound(self) -> Report:
        """Search of sup W over (alpha, R) against the Gaussian reference theta."""
        n = self.grid.dim
        p = self.config.norms.p
        r = self.config.norms.r[0]
        search = self.config.search
        result = qn_lower_search(n, p, r, search.alpha_grid(), search.R_grid())
        row = {
            "n": n,
            "p": p,
            "r": r,
            "q": q_of(p, r),
            "max_w": result.max_w,
            "alpha": result.alpha,
            "R": result.R,
            "theta_reference": result.theta_reference,
            "exceeds_theta": result.exceeds_theta,
            "on_r_boundary": result.on_r_boundary,
            "admissible": result.admissible,
            "total": result.total,
        }
        summary = {k: row[k] for k in ("max_w", "theta_reference", "exceeds_theta", "on_r_boundary")}
        return self._report(pd.DataFrame([row]), summary)

    def run_norms(self) -> Report:
        """
        Lebesgue norms of the input function and its G psi norm.

        Rows: p, lp_norm, psi, ratio.
        """
        f = self._input_function()
        psi = self.config.norms.psi
        rows = []
        for p in NORM_EXPONENTS:
            value = lp_norm(f, p)
            weight = psi_eval(psi, p)
            rows.append({"p": p, "lp_norm": value, "psi": weight, "ratio": value / weight})
        report = gls_norm(f, psi, self.config.norms.p_samples, self.config.norms.p_max)
        summary = {
            "gls_norm": report.value,
            "gls_argmax": report.argmax,
            "stabilized": report.stabilized,
            "integral_re": f.integral().real,
        }
        return self._report(pd.DataFrame(rows), summary)

    def run_apply(self) -> Report:
        """Apply B_R^alpha (first R of the list) to the input function."""
        f = self._input_function()
        alpha = self.config.operator.alpha
        R = self.config.operator.R[0]
        out = self._apply(f, alpha, R)
        table = pd.DataFrame(
            [
                {
                    "R": R,
                    "method": self.config.operator.method,
                    "input_l2": lp_norm(f, 2.0),
                    "output_l2": lp_norm(out, 2.0),
                }
            ]
        )
        return self._report(table, {"integral_in": f.integral().real, "integral_out": out.integral().real}, output=out)


def run_experiment(config: ExperimentConfig) -> Report:
    """Run one experiment configuration."""
    return ExperimentRunner(config).run()


def _kind(kind: str, config: Optional[ExperimentConfig], overrides: Dict[str, Any]) -> Report:
    if config is None:
        config = ExperimentConfig.for_kind(kind, **overrides)
    elif config.kind != kind:
        config = config.model_copy(update={"kind": kind})
    return run_experiment(config)


def run_converge(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    """Lp convergence study (default configuration when none is given)."""
    return _kind("converge", config, overrides)


def run_uniform_converge(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("uconverge", config, overrides)


def run_young(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("young", config, overrides)


def run_gls(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("gls", config, overrides)


def run_gaussian_limit(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("gauss-limit", config, overrides)


def run_kernel_table(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("kernel", config, overrides)


def run_bounds(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("bounds", config, overrides)


def run_lowerbound(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("lowerbound", config, overrides)


def run_norms(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("norms", config, overrides)


def run_apply(config: Optional[ExperimentConfig] = None, **overrides: Any) -> Report:
    return _kind("apply", config, overrides)


def run_batch(configs: Sequence[ExperimentConfig], write: bool = True) -> List[Report]:
    """
    Run independent experiments in parallel on dask's threaded scheduler.

    Reports come back in input order; those with an output path are written
    atomically.
    """
    tasks = [dask.delayed(run_experiment)(config) for config in configs]
    reports = list(dask.compute(*tasks, scheduler="threads"))
    if write:
        for config, report in zip(configs, reports):
            if config.output.path:
                write_report(report, config.output.path, config.output.format)
    logger.info(f"Batch of {len(reports)} experiments finished")
    return reports
