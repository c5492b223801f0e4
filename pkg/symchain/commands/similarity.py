# symchain/commands/similarity.py
import json
import logging
from pathlib import Path

import click

from symchain.commands import common
from symchain.exceptions import InvalidConfig, NoSymmetry
from symchain.models.run import RunSpec
from symchain.models.similarity import HARMONIC_FORM
from symchain.services.similarity import (
    apply_similarity,
    check_harmonic,
    example2_family,
    realize_example2,
    verify_theorem5,
)
from symchain.services.symmetry import detect_symmetry
from symchain.utils.io import ArtifactWriter

logger = logging.getLogger("symchain.cli.similarity")

EXAMPLE_WINDOW = (-10, 10)


def _from_input(spec: RunSpec):
    payload = json.loads(Path(spec.input).read_text())
    if "beta" not in payload:
        raise InvalidConfig("Similarity input needs a \"beta\" vector next to the chain definition.")
    Q = common.load_chain(spec)
    beta = payload["beta"]
    check_harmonic(Q, beta, tol=common.symmetry_tol(spec))
    return Q, apply_similarity(Q, beta), beta, ()


def _from_family(spec: RunSpec):
    lam = spec.lam if spec.lam is not None else 1.0
    mu = spec.mu if spec.mu is not None else lam
    eta = spec.eta if spec.eta is not None else 1.0
    family = example2_family(lam, mu, eta, form=spec.form or HARMONIC_FORM)
    realization = realize_example2(family, spec.window or EXAMPLE_WINDOW, boundary=spec.boundary or "absorbing")
    return realization.original, realization.transformed, realization.weights.beta, realization.reclosed


def execute(spec: RunSpec) -> dict:
    """
    Doob-type transform Q~ = B^-1 Q B by a positive harmonic beta, either read
    from --input next to the chain or taken from the birth-death family with
    --lambda/--mu/--eta. When the original chain is centrally symmetric the
    transformed certificate is checked on Q~.
    """
    original, transformed, beta, reclosed = _from_input(spec) if spec.input else _from_family(spec)
    writer = ArtifactWriter(spec.output_dir)
    writer.json("generator.json", transformed.to_dict())
    writer.json("beta.json", {"beta": list(beta)})
    summary = {"command": "similarity", "states": transformed.size, "reclosed": list(reclosed)}

    try:
        cert = detect_symmetry(original, tol=common.symmetry_tol(spec))
    except NoSymmetry as exc:
        logger.info("Original chain is not centrally symmetric (%s); no certificate to carry", type(exc).__name__)
        summary["certificate"] = None
    else:
        if reclosed:
            logger.warning("Rows %s were re-closed; the carried certificate is not checked", list(reclosed))
            summary["certificate"] = None
        else:
            cert_tilde = verify_theorem5(original, cert, beta, tol=common.symmetry_tol(spec))
            writer.json("certificate.json", cert_tilde.to_json_dict())
            summary["certificate"] = cert_tilde.to_json_dict()
    writer.manifest(spec)
    return summary


@click.command("similarity")
@common.input_option
@common.model_options
@click.option("--eta", type=float, default=None, help="Weight of the non-constant harmonic part.")
@click.option("--form", default=None, help="beta_n as an expression in n, lam, mu, eta.")
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Similarity transform by a harmonic vector and the certificate it carries."""
    common.dispatch(ctx, execute, "similarity", options)
