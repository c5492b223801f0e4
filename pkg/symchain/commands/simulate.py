# symchain/commands/simulate.py
import logging

import click
import numpy as np
import pandas as pd

from symchain.commands import common
from symchain.models.run import RunSpec
from symchain.models.simulation import SimulationConfig
from symchain.services.mc_oracle import (
    estimate_avoiding,
    estimate_fpt_histogram,
    estimate_transition,
    simulate_paths,
)
from symchain.services.transient import transition_matrices
from symchain.utils.io import ArtifactWriter

logger = logging.getLogger("symchain.cli.simulate")

MAX_ROWS = 101


def _default_start(space) -> int:
    center = space.center_index
    if center is None or center + 1 >= space.size:
        return space.label_of(0)
    return space.label_of(center + 1)


def execute(spec: RunSpec) -> dict:
    """Monte Carlo estimates of p_{k,n}(t), the passage density to the center and one avoiding probability."""
    Q = common.load_chain(spec)
    space = Q.space
    k = spec.k if spec.k is not None else _default_start(space)
    n = spec.n if spec.n is not None else k
    space.index_of(n)
    grid = spec.grid
    paths = simulate_paths(Q, SimulationConfig(n_paths=spec.paths, t_max=spec.t_max, seed=spec.seed, start=k))
    writer = ArtifactWriter(spec.output_dir)

    exact = transition_matrices(Q, grid, common.uniformization_tol(spec)).entry(k, n)
    stride = max(1, grid.steps // (MAX_ROWS - 1))
    rows = []
    for m in range(0, grid.steps + 1, stride):
        t = float(grid.points[m])
        est = estimate_transition(paths, n, t)
        rows.append({"t": t, "p_mc": est.estimate, "std_error": est.std_error, "p_exact": float(exact[m])})
    writer.csv("transition_mc.csv", pd.DataFrame(rows))
    summary = {"command": "simulate", "start": k, "target": n, "paths": spec.paths, "seed": spec.seed}

    if space.center_index is not None and space.label_of(space.center_index) != k:
        center = space.label_of(space.center_index)
        hist = estimate_fpt_histogram(paths, center, grid)
        writer.csv(
            "fpt_mc.csv",
            pd.DataFrame({"t": grid.points, "g_mc": hist.density.values, "std_error": hist.std_errors}),
        )
        summary["hit_fraction"] = hist.hit_fraction
        if n != center:
            avoid = estimate_avoiding(paths, center, n, spec.t_max)
            summary["avoiding"] = {"t": spec.t_max, "estimate": avoid.estimate, "std_error": avoid.std_error}
    else:
        logger.info("No central state distinct from the start; skipping passage estimates")
    summary["max_abs_error"] = float(
        np.max(np.abs([row["p_mc"] - row["p_exact"] for row in rows]))
    )
    writer.manifest(spec)
    return summary


@click.command("simulate")
@common.input_option
@common.model_options
@common.state_options
@common.grid_options
@click.option("--paths", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@common.tol_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Exact-event simulation of the chain as an independent check."""
    common.dispatch(ctx, execute, "simulate", options)
