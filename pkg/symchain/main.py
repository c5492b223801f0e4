# symchain/main.py
import logging
from typing import Any, Dict

import click

from symchain import __version__
from symchain.commands import bdjump, common, figure1, passage, similarity, simulate, symmetry, transient, validate
from symchain.utils.logger import configure_logging

logger = logging.getLogger("symchain")

# --- Command registry: each module exposes execute(spec) and a click command ---
COMMANDS = (validate, symmetry, transient, passage, bdjump, similarity, simulate, figure1)
EXECUTORS: Dict[str, common.Executor] = {module.command.name: module.execute for module in COMMANDS}


@click.group()
@click.version_option(__version__, prog_name="symchain")
@click.option("--log-level", default=None, help="Overrides SYMCHAIN_LOG_LEVEL.")
@click.option("--json-errors", is_flag=True, default=False, help="Print errors as JSON on stderr.")
@click.pass_context
def cli(ctx, log_level, json_errors):
    """Central symmetry of continuous-time Markov chains."""
    configure_logging(log_level)
    ctx.ensure_object(dict)
    ctx.obj["json_errors"] = json_errors


for module in COMMANDS:
    cli.add_command(module.command)


def run(spec: Any, json_errors: bool = False) -> int:
    """Run one command from a RunSpec or a plain dict; returns the exit code."""
    command = spec.command if hasattr(spec, "command") else dict(spec).get("command")
    if command not in EXECUTORS:
        common.report_error(
            {"error": "InvalidConfig", "detail": f"Unknown command {command!r}.", "context": {}, "exit_code": 2},
            json_errors,
        )
        return 2
    return common.run_spec(EXECUTORS[command], spec, json_errors)


def main() -> None:
    cli(obj={})


if __name__ == "__main__":
    main()
