# symchain/commands/validate.py
import logging

import click

from symchain.commands import common
from symchain.models.run import RunSpec
from symchain.utils.io import ArtifactWriter

logger = logging.getLogger("symchain.cli.validate")


def execute(spec: RunSpec) -> dict:
    Q = common.load_chain(spec)
    writer = ArtifactWriter(spec.output_dir)
    writer.json("generator.json", Q.to_dict())
    writer.manifest(spec)
    return {"command": "validate", "valid": True, "states": Q.size, "space": Q.space.model_dump(exclude_none=True)}


@click.command("validate")
@common.input_option
@common.model_options
@common.output_option
@common.json_errors_option
@click.pass_context
def command(ctx, **options):
    """Check a generator matrix or a truncated model and write it back out."""
    common.dispatch(ctx, execute, "validate", options)
