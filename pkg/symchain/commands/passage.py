# symchain/commands/passage.py
import logging

import click

from symchain.commands import common
from symchain.exceptions import CheckFailed, NoSymmetry
from symchain.models.run import RunSpec
from symchain.services.passage import (
    avoiding_probabilities_renewal,
    avoiding_probabilities_symmetric,
    build_passage_problem,
    fpt_density_symmetric,
    fpt_density_volterra,
    renewal_residual,
    volterra_consistency,
)
from symchain.services.symmetry import detect_symmetry
from symchain.services.transient import transition_matrices
from symchain.utils.io import ArtifactWriter, compare_report, traces_frame

logger = logging.getLogger("symchain.cli.passage")


def _relabel(trace, label):
    return trace.model_copy(update={"label": label})


def execute(spec: RunSpec) -> dict:
    """
    First-passage density into the central state and avoiding probabilities,
    each by renewal and (when the chain is symmetric) by the current-difference
    and reflection formulas, with the discrepancy between the two.
    """
    Q = common.load_chain(spec)
    try:
        cert = detect_symmetry(Q, tol=common.symmetry_tol(spec))
    except NoSymmetry as exc:
        logger.info("Chain has no central symmetry (%s); renewal methods only", type(exc).__name__)
        cert = None
    prob = build_passage_problem(Q, cert)
    k = spec.k if spec.k is not None else prob.s + 1
    n = spec.n if spec.n is not None else k
    P = transition_matrices(Q, spec.grid, common.uniformization_tol(spec))
    tol = spec.compare_tol

    g_volterra = _relabel(fpt_density_volterra(prob, P, k), "g_volterra")
    pav_renewal = _relabel(avoiding_probabilities_renewal(prob, P, g_volterra, k).trace(n), "pav_renewal")
    report = {
        "start": k,
        "target": n,
        "center": prob.s,
        "tolerance": tol,
        "volterra_consistency": volterra_consistency(prob, P, g_volterra, k),
        "renewal_residual": renewal_residual(prob, P, g_volterra, k),
    }
    fpt_traces, avoiding_traces = [g_volterra], [pav_renewal]
    if cert is not None:
        g_symmetric = _relabel(fpt_density_symmetric(prob, P, k), "g_symmetric")
        pav_symmetric = _relabel(avoiding_probabilities_symmetric(prob, P, k, n), "pav_symmetric")
        report["fpt"] = compare_report(g_volterra, g_symmetric, tol).model_dump(by_alias=True)
        report["avoiding"] = compare_report(pav_renewal, pav_symmetric, tol).model_dump(by_alias=True)
        fpt_traces.append(g_symmetric)
        avoiding_traces.append(pav_symmetric)

    writer = ArtifactWriter(spec.output_dir)
    writer.csv("fpt.csv", traces_frame(*fpt_traces))
    writer.csv("avoiding.csv", traces_frame(*avoiding_traces))
    writer.json("report.json", report)
    writer.manifest(spec)
    for check in ("fpt", "avoiding"):
        if check in report and not report[check]["pass"]:
            raise CheckFailed(check, report[check]["max_abs_diff"], tol)
    return {"command": "passage", "symmetric": cert is not None, **report}


@click.command("passage")
@common.input_option
@common.model_options
@common.state_options
@common.grid_options
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """First-passage densities through the central state and avoiding probabilities."""
    common.dispatch(ctx, execute, "passage", options)
