# symchain/commands/transient.py
import logging

import click
import pandas as pd

from symchain.commands import common
from symchain.exceptions import Reducible
from symchain.models.run import RunSpec
from symchain.services.transient import deviation_matrix, stationary, transition_matrices
from symchain.utils.io import ArtifactWriter

logger = logging.getLogger("symchain.cli.transient")


def execute(spec: RunSpec) -> dict:
    Q = common.load_chain(spec)
    space = Q.space
    k = spec.k if spec.k is not None else space.first_label
    P = transition_matrices(Q, spec.grid, common.uniformization_tol(spec))

    writer = ArtifactWriter(spec.output_dir)
    frame = pd.DataFrame({"t": spec.grid.points})
    row = P.row(k)
    for idx, label in enumerate(space.labels):
        frame[f"p_{k},{label}"] = row[:, idx]
    writer.csv("transition.csv", frame)

    summary = {"command": "transient", "states": Q.size, "start": k}
    try:
        pi = stationary(Q)
    except Reducible as exc:
        logger.info("Skipping stationary law: %s", exc.detail)
    else:
        writer.json(
            "stationary.json",
            {"labels": list(space.labels), "pi": pi.probs, "deviation": deviation_matrix(Q, pi)},
        )
        summary["stationary"] = True
    writer.manifest(spec)
    return summary


@click.command("transient")
@common.input_option
@common.model_options
@common.state_options
@common.grid_options
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Transition probabilities from one start state, plus stationary law and deviation matrix."""
    common.dispatch(ctx, execute, "transient", options)
