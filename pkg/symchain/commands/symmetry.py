# symchain/commands/symmetry.py
import logging

import click

from symchain.commands import common
from symchain.exceptions import CheckFailed, NoSymmetry
from symchain.models.run import RunSpec
from symchain.services.symmetry import detect_symmetry, verify_generator_symmetry, verify_probability_symmetry
from symchain.services.transient import transition_matrices
from symchain.utils.io import ArtifactWriter

logger = logging.getLogger("symchain.cli.symmetry")


def execute(spec: RunSpec) -> dict:
    """
    Certificate JSON when the chain is centrally symmetric, a violation report
    otherwise. A missing symmetry is a finding and exits 0; a certificate that
    then fails its own checks exits 3.
    """
    Q = common.load_chain(spec)
    writer = ArtifactWriter(spec.output_dir)
    tol = common.symmetry_tol(spec)
    try:
        cert = detect_symmetry(Q, tol=tol)
    except NoSymmetry as exc:
        logger.info("No central symmetry: %s", exc.detail)
        writer.json("violation.json", exc.to_dict())
        writer.manifest(spec)
        return {"command": "symmetry", "symmetric": False, "violation": type(exc).__name__}

    generator_report = verify_generator_symmetry(Q, cert, tol=tol)
    P = transition_matrices(Q, spec.grid, common.uniformization_tol(spec))
    probability_tol = max(tol, 10 * common.uniformization_tol(spec))
    probability_report = verify_probability_symmetry(P, cert, tol=probability_tol)
    writer.json("certificate.json", cert.to_json_dict())
    writer.json(
        "report.json",
        {"generator": generator_report.model_dump(), "probability": probability_report.model_dump()},
    )
    writer.manifest(spec)
    if not generator_report.passed:
        raise CheckFailed("generator symmetry", generator_report.max_residual, tol)
    if not probability_report.passed:
        raise CheckFailed("probability symmetry", probability_report.max_residual, probability_tol)
    return {"command": "symmetry", "symmetric": True, "certificate": cert.to_json_dict()}


@click.command("symmetry")
@common.input_option
@common.model_options
@common.grid_options
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Detect a central symmetry and check it on the generator and on P(t)."""
    common.dispatch(ctx, execute, "symmetry", options)
