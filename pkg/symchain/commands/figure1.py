# symchain/commands/figure1.py
import click

from symchain.commands import common
from symchain.models.run import RunSpec
from symchain.services.bdjump import figure1_traces
from symchain.utils.io import ArtifactWriter


def execute(spec: RunSpec) -> dict:
    lam = spec.lam if spec.lam is not None else 1.0
    k = spec.k if spec.k is not None else 3
    n = spec.n if spec.n is not None else 1
    fpt, avoiding = figure1_traces(lam, k, n, spec.grid, mu=spec.mu, series_tol=common.series_tol(spec))
    writer = ArtifactWriter(spec.output_dir)
    writer.csv("figure1_fpt.csv", fpt)
    writer.csv("figure1_avoiding.csv", avoiding)
    writer.manifest(spec)
    return {"command": "figure1", "rows": len(fpt), "columns": [list(fpt.columns), list(avoiding.columns)]}


@click.command("figure1")
@click.option("--lambda", "lam", type=float, default=None, help="Jump rate (default 1).")
@click.option("--mu", type=float, default=None, help="Must equal --lambda when given.")
@common.state_options
@common.grid_options
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Passage densities and avoiding probabilities for several jump rates (lambda = mu)."""
    common.dispatch(ctx, execute, "figure1", options)
