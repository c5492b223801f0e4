# symchain/commands/bdjump.py
import logging

import click
import pandas as pd

from symchain.commands import common
from symchain.models.run import RunSpec
from symchain.services.bdjump import (
    avoiding_closed_form,
    fpt_density_closed_form,
    stationary_law,
    stationary_roots,
    transition_trace,
)
from symchain.utils.io import ArtifactWriter

logger = logging.getLogger("symchain.cli.bdjump")


def execute(spec: RunSpec) -> dict:
    """Closed forms of the birth-death process with jumps to 0 on the time grid."""
    model = common.model_from_spec(spec)
    k = spec.k if spec.k is not None else 3
    n = spec.n if spec.n is not None else 1
    grid = spec.grid
    writer = ArtifactWriter(spec.output_dir)

    frame = pd.DataFrame({"t": grid.points})
    frame["p"] = transition_trace(model, k, n, grid, common.quad_tol(spec))
    if model.is_symmetric and k != 0:
        frame["g"] = fpt_density_closed_form(model, k, grid.points, common.series_tol(spec))
        if n != 0 and (k > 0) == (n > 0):
            frame["pav"] = avoiding_closed_form(model, k, n, grid.points)
    writer.csv("bdjump.csv", frame)

    summary = {"command": "bdjump", "model": model.model_dump(by_alias=True), "k": k, "n": n}
    if model.alpha > 0:
        z1, z2 = stationary_roots(model)
        width = max(abs(k), abs(n), 10)
        writer.json(
            "stationary.json",
            {"z1": z1, "z2": z2, "pi": {str(m): stationary_law(model, m) for m in range(-width, width + 1)}},
        )
        summary["z"] = [z1, z2]
    writer.manifest(spec)
    return summary


@click.command("bdjump")
@common.input_option
@common.model_options
@common.state_options
@common.grid_options
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Transition probability, passage density, avoiding probability and stationary law in closed form."""
    common.dispatch(ctx, execute, "bdjump", options)
