# symchain/commands/common.py
import json
import logging
from typing import Any, Callable, Dict, Optional, Tuple

import click
from pydantic import ValidationError

from symchain.exceptions import InvalidConfig, SymchainError
from symchain.models.bdjump import BDJumpModel
from symchain.models.chain import GeneratorMatrix
from symchain.models.run import RunSpec
from symchain.services.chain_core import DEFAULT_WINDOW, load_chain_definition, model_from_definition, truncate_bdjump

logger = logging.getLogger("symchain.cli")

Executor = Callable[[RunSpec], Dict[str, Any]]


# ---------------- OPTIONS ----------------

def _parse_window(ctx, param, value: Optional[str]) -> Optional[Tuple[int, int]]:
    if value is None:
        return None
    try:
        lo, hi = (int(part) for part in value.split(","))
    except ValueError:
        raise click.BadParameter("expected LO,HI, e.g. -40,40")
    return lo, hi


def input_option(f):
    return click.option("--input", "input", type=click.Path(exists=True, dir_okay=False), help="Chain or model definition (JSON).")(f)


def output_option(f):
    return click.option("--output-dir", type=click.Path(file_okay=False), default="symchain-out", show_default=True)(f)


def json_errors_option(f):
    return click.option("--json-errors", is_flag=True, default=False, help="Print errors as JSON on stderr.")(f)


def grid_options(f):
    f = click.option("--steps", type=int, default=500, show_default=True)(f)
    return click.option("--t-max", type=float, default=5.0, show_default=True)(f)


def tol_options(f):
    f = click.option("--series-tol", type=float, default=None)(f)
    f = click.option("--quad-tol", type=float, default=None)(f)
    return click.option("--tol", type=float, default=None)(f)


def model_options(f):
    f = click.option("--boundary", type=click.Choice(["reflecting", "absorbing"]), default=None, help="Window ends (default: reflecting; absorbing for similarity).")(f)
    f = click.option("--window", callback=_parse_window, default=None, help="Lattice window LO,HI.")(f)
    f = click.option("--alpha", type=float, default=None)(f)
    f = click.option("--mu", type=float, default=None)(f)
    return click.option("--lambda", "lam", type=float, default=None)(f)


def state_options(f):
    f = click.option("--n", type=int, default=None, help="Target state.")(f)
    return click.option("--k", type=int, default=None, help="Start state.")(f)


# ---------------- DISPATCH ----------------

def report_error(payload: Dict[str, Any], json_errors: bool) -> None:
    logger.error("%s: %s", payload["error"], payload["detail"])
    if json_errors:
        click.echo(json.dumps(payload, sort_keys=True, default=str), err=True)
    else:
        click.echo(f"error: {payload['error']}: {payload['detail']}", err=True)


def run_spec(executor: Executor, spec: Any, json_errors: bool = False) -> int:
    """Validate the run options, run the command and map failures to exit codes 2 and 3."""
    try:
        spec = spec if isinstance(spec, RunSpec) else RunSpec.model_validate(spec)
        summary = executor(spec)
    except SymchainError as exc:
        report_error(exc.to_dict(), json_errors)
        return exc.exit_code
    except ValidationError as exc:
        payload = {
            "error": "ValidationError",
            "detail": f"{exc.error_count()} invalid field(s)",
            "context": {"errors": exc.errors(include_url=False)},
            "exit_code": 2,
        }
        report_error(payload, json_errors)
        return 2
    click.echo(json.dumps(summary, sort_keys=True, default=str))
    return 0


def dispatch(ctx: click.Context, executor: Executor, command: str, options: Dict[str, Any]) -> None:
    json_errors = bool(options.pop("json_errors", False) or (ctx.obj or {}).get("json_errors"))
    fields = {key: value for key, value in options.items() if value is not None}
    ctx.exit(run_spec(executor, {"command": command, **fields}, json_errors))


# ---------------- SHARED LOADING ----------------

def uniformization_tol(spec: RunSpec) -> float:
    return spec.tolerances()["uniformization"]


def symmetry_tol(spec: RunSpec) -> float:
    return spec.tolerances()["symmetry"]


def quad_tol(spec: RunSpec) -> float:
    return spec.tolerances()["quadrature"]


def series_tol(spec: RunSpec) -> float:
    return spec.tolerances()["series"]


def model_from_spec(spec: RunSpec) -> BDJumpModel:
    """Model from --input (when it holds a model) with --lambda/--mu/--alpha overriding it."""
    base = model_from_definition(spec.input) if spec.input else None
    lam = spec.lam if spec.lam is not None else (base.lam if base else None)
    if lam is None:
        raise InvalidConfig("Command needs --lambda or a model definition in --input.")
    mu = spec.mu if spec.mu is not None else (base.mu if base and spec.lam is None else lam)
    alpha = spec.alpha if spec.alpha is not None else (base.alpha if base else 0.0)
    return BDJumpModel(lam=lam, mu=mu, alpha=alpha)


def load_chain(spec: RunSpec) -> GeneratorMatrix:
    """Chain from --input, or the truncated model given by --lambda/--mu/--alpha."""
    if spec.input and spec.lam is None and spec.mu is None and spec.alpha is None:
        return load_chain_definition(spec.input, window=spec.window, boundary=spec.boundary or "reflecting")
    model = model_from_spec(spec)
    return truncate_bdjump(model, spec.window or DEFAULT_WINDOW, boundary=spec.boundary or "reflecting")
