"""
Command-line front end: read a JSON run spec, dispatch to the owning module
and write the report as JSON (or CSV for tabular results).

Exit status: 0 all assertions pass, 1 some assertion fails, 2 bad input,
3 numerical singularity.
"""

import argparse
import csv
import io
import json
import logging
import sys
import time
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from . import homog, lie, maslov, poisson, projtori, topo7
from .config import LOG_LEVEL, default_tolerances, override, tolerances
from .errors import InputError, NumericalSingularityError, SpecError, SymplecticError
from .schemas import (
    ClassifyParams,
    EnumerateParams,
    EschenburgParams,
    FlowParams,
    ImageParams,
    IndependenceParams,
    InvolutionParams,
    MaslovParams,
    PolynomialSpec,
    RunReport,
    RunSpec,
    TableParams,
    TorusParams,
    TrigPolynomialSpec,
    WKSParams,
)

logger = logging.getLogger(__name__)

Outcome = Tuple[Dict[str, Any], Dict[str, bool]]


def _metrics(specs: List[TrigPolynomialSpec]) -> projtori.ModelMetricPair:
    polys = tuple(projtori.TrigPolynomial(s.constant, tuple(s.cos), tuple(s.sin)) for s in specs)
    return projtori.ModelMetricPair(projtori.SeparatedEigenFunctions(polys))


def _polynomial(spec: PolynomialSpec) -> projtori.FirstIntegralPolynomial:
    if spec.coefficients is not None:
        return projtori.FirstIntegralPolynomial.from_coefficients(spec.coefficients)
    return projtori.FirstIntegralPolynomial(1.0 if spec.leading is None else spec.leading, tuple(spec.roots))


def run_maslov(params: MaslovParams, rng: np.random.Generator) -> Outcome:
    if params.loop == "canonical":
        loop = maslov.canonical_loop(params.n, params.samples, params.turns)
        expected = params.turns
    else:
        loop = maslov.random_unitary_loop(params.n, params.windings, params.samples, rng)
        expected = 2 * sum(params.windings)
    if params.reverse:
        loop = maslov.reverse_loop(loop)
        expected = -expected
    index = maslov.maslov_index(loop)
    results = {"index": index, "expected": expected, "samples": len(loop)}
    assertions = {"index_matches": index == expected}
    if params.loop == "canonical":
        results["signed_crossings"] = maslov.signed_crossings(loop)
        assertions["crossings_match_index"] = results["signed_crossings"] == index
    return results, assertions


def run_involution(params: InvolutionParams, rng: np.random.Generator) -> Outcome:
    metrics = _metrics(params.eigenfunctions)
    taus = params.taus or [0.0] + [0.5 * (a + b) for a, b in metrics.eig.gaps()] + projtori.default_probes(metrics)
    states = projtori.random_states(metrics, params.states, rng)
    inv = projtori.involution_check(metrics, taus, states, analytic=params.analytic)
    results = {"taus": taus, "max_abs": inv.max_abs, "matrix": inv.matrix}
    return results, {"in_involution": inv.max_abs < tolerances().involution_atol}


def run_independence(params: IndependenceParams, rng: np.random.Generator) -> Outcome:
    if params.system == "wks":
        system = homog.WKSIntegrableSystem(topo7.WKSPair(params.k, params.l))
        base = homog.SphereCotangentPoint.base()
        results = {"rank": system.independence_rank(base), "reduced_rank": system.reduced_rank(base)}
        return results, {"rank_is_8": results["rank"] == 8, "reduced_rank_is_7": results["reduced_rank"] == 7}
    casimirs = [lie.CasimirSpec("trace-square"), lie.CasimirSpec("trace-cube")]
    family = lie.mf_shift_family(casimirs, lie.default_shift(3), params.lambdas)
    x = lie.LieAlgebra([(3, "su")]).random(rng)
    results = {
        "ddim": lie.differential_dimension(family, x),
        "drank": lie.differential_rank(family, x, seed=tolerances().seed),
        "shift_regular": family.regular,
    }
    return results, {"ddim_is_5": results["ddim"] == 5, "drank_is_3": results["drank"] == 3}


def run_flow(params: FlowParams, rng: np.random.Generator) -> Outcome:
    tol = tolerances()
    if params.system == "sphere":
        n = params.dimension
        C = poisson.sphere_constraints(n)
        x = rng.standard_normal(n)
        x /= np.linalg.norm(x)
        y = rng.standard_normal(n)
        y -= (x @ y) * x
        trajectory = poisson.hamiltonian_flow(poisson.quadratic_kinetic(n), np.concatenate([x, y]), params.T, params.steps, C)
        results = {
            "energy_drift": trajectory.max_energy_drift,
            "constraint_residual": trajectory.max_constraint_residual,
        }
        return results, {
            "energy_conserved": results["energy_drift"] < tol.energy_drift_max,
            "stays_on_shell": results["constraint_residual"] < tol.constraint_residual_max,
        }
    metrics = _metrics(params.eigenfunctions)
    taus = params.taus or [0.5 * (a + b) for a, b in metrics.eig.gaps()] + projtori.default_probes(metrics)
    p0 = projtori.random_states(metrics, 1, rng)[0]
    drift = projtori.conservation_check(metrics, p0, taus, params.T, params.steps, params.flow_tau)
    return {"drift": drift}, {"integrals_conserved": max(drift.values()) < tol.energy_drift_max}


def run_proj_tori(params: TorusParams, rng: np.random.Generator) -> Outcome:
    metrics = _metrics(params.eigenfunctions)
    q = _polynomial(params.polynomial)
    results = projtori.torus_report(metrics, q, rng, params.samples, params.states)
    assertions = {"torus_report": results["success"]}
    if params.orbit_T > 0 and "base_point" in results:
        signs = projtori.orbit_crossing_signs(metrics, q, np.array(results["base_point"]), params.orbit_T, params.orbit_steps)
        results["orbit_crossings"] = signs
        assertions["crossings_nonnegative"] = all(s >= 0 for s in signs)
    return results, assertions


def run_image(params: ImageParams, rng: np.random.Generator) -> Outcome:
    metrics = _metrics(params.eigenfunctions)
    results = projtori.image_report(metrics, [_polynomial(p) for p in params.polynomials])
    return results, {"classified": results["success"]}


def run_wks(params: WKSParams, rng: np.random.Generator) -> Outcome:
    results = homog.wks_integrable_system(topo7.WKSPair(params.k, params.l), rng, params.samples)
    return results, {"wks_report": results["success"]}


def run_eschenburg(params: EschenburgParams, rng: np.random.Generator) -> Outcome:
    U = homog.EschenburgU(params.k, params.l, params.p, params.q)
    results = homog.eschenburg_integral_report(U, rng, params.points)
    return results, {"eschenburg_report": results["success"]}


def run_enumerate(params: EnumerateParams, rng: np.random.Generator) -> Outcome:
    found = list(topo7.enumerate_admissible(params.bounds, params.workers))
    results: Dict[str, Any] = {
        "count": len(found),
        "table": [dict(zip("klpq", q.as_tuple())) for q in found],
    }
    assertions = {}
    if params.cross_check:
        results["naive_count"] = topo7.count_admissible_naive(params.bounds)
        assertions["counts_agree"] = results["naive_count"] == len(found)
    logger.info("enumerated %d admissible quartets", len(found))
    return results, assertions


def run_classify(params: ClassifyParams, rng: np.random.Generator) -> Outcome:
    results = topo7.classify_wks(topo7.WKSPair(params.k, params.l))
    assertions: Dict[str, bool] = {}
    if params.enumerate_structures:
        structures = topo7.enumerate_smooth_structures_14()
        brute = topo7.brute_force_smooth_structures_14()
        results["table"] = [{"t": t, "k": p.k, "l": p.l} for t, p in enumerate(structures)]
        assertions["structures_28"] = len(structures) == 28
        assertions["brute_force_agrees"] = structures == brute
    return results, assertions


def run_table(params: TableParams, rng: np.random.Generator) -> Outcome:
    rows = topo7.load_reference_table(params.path)
    results = topo7.verify_reference_table(rows)
    results["table"] = [
        {**dict(zip("klpq", r.quartet.as_tuple())), "s1": r.s1, "admissible": topo7.admissible(r.quartet)}
        for r in rows
    ]
    return results, {"table_verified": results["success"]}


HANDLERS: Dict[str, Callable[[Any, np.random.Generator], Outcome]] = {
    "maslov-index": run_maslov,
    "involution": run_involution,
    "independence": run_independence,
    "flow": run_flow,
    "proj-tori": run_proj_tori,
    "image-of-j": run_image,
    "wks-verify": run_wks,
    "eschenburg-verify": run_eschenburg,
    "esch-enumerate": run_enumerate,
    "wks-classify": run_classify,
    "table-verify": run_table,
}


def jsonable(value: Any) -> Any:
    """numpy scalars and arrays to plain JSON values; complex numbers as [re, im]"""
    if isinstance(value, dict):
        return {str(k): jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return jsonable(value.tolist())
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    return value


def execute(spec: RunSpec) -> RunReport:
    tol = default_tolerances().merged({**spec.tolerances, "seed": spec.seed})
    params = spec.typed_parameters()
    start = time.perf_counter()
    with override(tol):
        results, assertions = HANDLERS[spec.command](params, np.random.default_rng(spec.seed))
    elapsed = time.perf_counter() - start
    passed = all(assertions.values())
    logger.info("%s finished in %.2fs: %s", spec.command, elapsed, "pass" if passed else "FAIL")
    return RunReport(
        command=spec.command,
        inputs=params.model_dump(mode="json"),
        seed=spec.seed,
        tolerances=spec.tolerances,
        results=jsonable(results),
        assertions={k: bool(v) for k, v in assertions.items()},
        passed=passed,
        wall_time=elapsed,
    )


def load_spec(source: str = "-") -> RunSpec:
    """Parse a run spec from a file path, or from standard input for '-'"""
    try:
        if source == "-":
            text = sys.stdin.read()
        else:
            with open(source, "r", encoding="utf-8") as f:
                text = f.read()
    except OSError as e:
        raise SpecError(f"cannot read spec {source}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SpecError(f"malformed spec: {e.msg}", e.lineno, e.colno) from e
    try:
        return RunSpec.model_validate(data)
    except ValidationError as e:
        raise SpecError(f"invalid spec: {e}") from e


def render(report: RunReport, fmt: str = "json") -> str:
    if fmt == "json":
        return json.dumps(report.model_dump(mode="json"), ensure_ascii=False, indent=2)
    rows = report.results.get("table")
    if not rows:
        rows = [{"key": k, "value": json.dumps(v)} for k, v in report.results.items()]
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=list(rows[0].keys()))
    writer.writeheader()
    writer.writerows(rows)
    return buffer.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Numerical verification of symplectic and integrable-systems claims")
    parser.add_argument("--spec", default="-", help="run spec (JSON) path, '-' for standard input")
    parser.add_argument("--seed", type=int, default=None, help="override the spec seed")
    parser.add_argument("--out", default=None, help="write the report here instead of standard output")
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, LOG_LEVEL.upper(), logging.WARNING),
        stream=sys.stderr,
        format="%(asctime)s %(name)s %(levelname)s %(message)s",
    )
    try:
        spec = load_spec(args.spec)
        if args.seed is not None:
            spec = spec.model_copy(update={"seed": args.seed})
        report = execute(spec)
    except InputError as e:
        logger.error("%s", e)
        return e.exit_code
    except NumericalSingularityError as e:
        logger.error("numerical singularity (%s): %s", type(e).__name__, e)
        return e.exit_code
    except SymplecticError as e:
        logger.error("%s", e)
        return e.exit_code

    text = render(report, args.format)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text + ("\n" if not text.endswith("\n") else ""))
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
