#!/usr/bin/env python3
"""
CLI interface for comb-mapping.

Exit codes: 0 success, 1 inequality violation, 2 input error, 3 numerical failure.
JSON and CSV go to stdout; logs and errors go to stderr.

Copyright (c) 2026 comb-mapping contributors
Licensed under the MIT License
"""

import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, NoReturn, Optional, Tuple

import click
import numpy as np

from comb_mapping.__version__ import __version__
from comb_mapping.config_manager import CombMapConfig, ConfigManager, configure_logging
from comb_mapping.core.capacity import (
    IntervalUnion,
    capacity,
    derivative_at_infinity,
    max_modulus,
    slit_diameter,
    total_length,
)
from comb_mapping.core.forward_solver import CombSolution, SolverOptions, solve_forward
from comb_mapping.core.quadrature import QuadratureSettings
from comb_mapping.core.quantities import compute_quantities
from comb_mapping.core.quasimomentum import Quasimomentum
from comb_mapping.domain import GapSystem, NormSpec, SlitConfig, validate
from comb_mapping.estimates.checks import ALL_CHECK_IDS, WEIGHT_RULES, CheckPlan, run_checks
from comb_mapping.estimates.ensemble import EnsembleSpec, run_ensemble
from comb_mapping.estimates.examples import counterexample_convergence, reproduce_example
from comb_mapping.estimates.report import (
    results_payload,
    results_table,
    rows_to_csv,
    summary_table,
    to_json,
)
from comb_mapping.exceptions import (
    CombMapError,
    ContinuationExhausted,
    MalformedInput,
    NewtonDivergence,
)

logger = logging.getLogger(__name__)

DEFAULT_EXAMPLE_SIZES = {"1": 3, "2": 4, "3": 50}


@dataclass
class InstanceFile:
    """A parsed instance document: slits plus optional norm and solver settings."""

    config: SlitConfig
    p: Optional[float] = None
    weights: Optional[Tuple[float, ...]] = None
    solver: Dict[str, Any] = field(default_factory=dict)


def read_json(path: str) -> Any:
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise MalformedInput(f"{path}: invalid JSON ({e})") from e
    except OSError as e:
        raise MalformedInput(f"{path}: {e}") from e


def parse_instance(data: Any) -> InstanceFile:
    """Turn an instance document into validated objects."""
    if not isinstance(data, dict) or "u" not in data or "h" not in data:
        raise MalformedInput('instance must be an object with "u" and "h" arrays')
    try:
        config = validate([float(x) for x in data["u"]], [float(x) for x in data["h"]])
        p = None if data.get("p") is None else float(data["p"])
        weights = data.get("weights")
        weights = None if weights is None else tuple(float(w) for w in weights)
    except (TypeError, ValueError) as e:
        raise MalformedInput(f"non-numeric entry in instance: {e}") from e
    if p is not None or weights is not None:
        spec = NormSpec(2.0 if p is None else p, weights)
        if weights is not None and len(weights) != config.size:
            raise MalformedInput(f"{len(weights)} weights for {config.size} slits")
        weights = spec.weights
    solver = data.get("solver") or {}
    if not isinstance(solver, dict):
        raise MalformedInput('"solver" must be an object')
    return InstanceFile(config, p, weights, dict(solver))


def parse_interval(text: str) -> Tuple[float, float]:
    try:
        a, b = (float(part) for part in text.split(","))
    except ValueError as e:
        raise MalformedInput(f"interval '{text}' is not of the form a,b") from e
    return a, b


def _settings(ctx) -> QuadratureSettings:
    config: CombMapConfig = ctx.obj["config"]
    return config.quadrature.to_settings()


def _options(ctx, overrides: Optional[Dict[str, Any]] = None) -> SolverOptions:
    config: CombMapConfig = ctx.obj["config"]
    return config.solver.to_options(overrides)


def _emit(text: str, out: Optional[str] = None) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
        logger.info(f"Wrote {out}")
    else:
        click.echo(text)


def _fail(error: CombMapError) -> NoReturn:
    click.echo(f"Error: {error}", err=True)
    if isinstance(error, NewtonDivergence) and error.trace:
        trace = ", ".join(f"{x:.3e}" for x in error.trace)
        click.echo(f"Newton residuals: {trace}", err=True)
    if isinstance(error, ContinuationExhausted):
        click.echo(f"Continuation stopped at t={error.last_t:.6g}", err=True)
        for t, residual in error.path:
            click.echo(f"  t={t:.6g} residual={residual:.3e}", err=True)
    sys.exit(error.exit_code)


@click.group()
@click.version_option(__version__)
@click.option("--config", type=click.Path(exists=True), help="Configuration file path")
@click.option("--verbose", "-v", count=True, help="Log more (-v info, -vv debug)")
@click.pass_context
def main(ctx, config, verbose):
    """comb-mapping - conformal comb maps, gap data and estimate verification."""
    ctx.ensure_object(dict)

    manager = ConfigManager(config)
    manager.apply_environment_overrides()
    settings = manager.get_config()
    if verbose:
        settings.logging.level = "DEBUG" if verbose > 1 else "INFO"
    configure_logging(settings.logging)
    for issue in manager.validate_config():
        logger.warning(f"Config issue: {issue}")

    ctx.obj["config_manager"] = manager
    ctx.obj["config"] = settings


@main.command()
@click.argument("path", type=click.Path())
@click.option("--out", type=click.Path(), help="Write output to this file instead of stdout")
@click.option("--csv", "as_csv", is_flag=True, help="Emit per-slit rows as CSV")
@click.option("--gaps-only", is_flag=True, help="Emit only the gap system")
@click.pass_context
def solve(ctx, path, out, as_csv, gaps_only):
    """Solve the forward problem for a JSON slit configuration."""
    try:
        instance = parse_instance(read_json(path))
        solution = solve_forward(instance.config, _options(ctx, instance.solver), _settings(ctx))
        if gaps_only:
            _emit(to_json(solution.gaps.to_dict()), out)
        elif as_csv:
            _emit(rows_to_csv(compute_quantities(solution).rows()).rstrip("\n"), out)
        else:
            payload = {
                "solution": solution.to_dict(),
                "quantities": compute_quantities(solution).to_dict(),
            }
            _emit(to_json(payload), out)
    except CombMapError as e:
        _fail(e)
    sys.exit(0)


@main.command()
@click.argument("path", required=False, type=click.Path())
@click.option("--ensemble", is_flag=True, help="Verify a seeded random ensemble")
@click.option("--small-slits", is_flag=True, help="Use the small-slit ensemble (local estimates)")
@click.option("--seed", type=int, help="Ensemble seed")
@click.option("--count", type=int, help="Number of ensemble instances")
@click.option(
    "--filter",
    "filters",
    multiple=True,
    type=click.Choice(ALL_CHECK_IDS),
    help="Only run these check ids (repeatable)",
)
@click.option("--p", "p_values", multiple=True, type=float, help="Norm exponent (repeatable)")
@click.option("--weights", type=click.Choice(WEIGHT_RULES), help="Weight rule for weighted norms")
@click.option("--json", "output_json", is_flag=True, help="Output results as JSON")
@click.pass_context
def verify(ctx, path, ensemble, small_slits, seed, count, filters, p_values, weights, output_json):
    """Run the inequality checks on one instance or on a seeded ensemble."""
    config: CombMapConfig = ctx.obj["config"]
    defaults = config.ensemble
    rules = (weights,) if weights else tuple(defaults.weight_rules)
    try:
        if ensemble or small_slits:
            seed = defaults.seed if seed is None else seed
            if small_slits:
                spec = EnsembleSpec.small_slits(seed, 50 if count is None else count)
            else:
                spec = EnsembleSpec(
                    seed=seed,
                    count=defaults.count if count is None else count,
                    weight_rules=rules,
                    p_values=tuple(p_values or defaults.p_values),
                    lindelof_pairs=defaults.lindelof_pairs,
                    filters=tuple(filters),
                )
            report = run_ensemble(spec, defaults.workers, _options(ctx), _settings(ctx))
            if output_json:
                click.echo(to_json(report.to_dict()))
            else:
                click.echo(results_table(report.results, header=f"seed: {spec.seed}"))
                click.echo("")
                click.echo(summary_table(report.summary()))
                for outcome in report.errors:
                    click.echo(f"Error in {outcome.context}: {outcome.error}", err=True)
            sys.exit(report.exit_code)

        if path is None:
            click.echo("Error: give an instance PATH or --ensemble", err=True)
            sys.exit(2)

        instance = parse_instance(read_json(path))
        chosen_p = p_values or ((instance.p,) if instance.p is not None else defaults.p_values)
        plan = CheckPlan(
            p_values=tuple(chosen_p),
            weight_rules=rules,
            filters=tuple(filters),
            weights=None if weights else instance.weights,
        )
        options = _options(ctx, instance.solver)
        solution = solve_forward(instance.config, options, _settings(ctx))
        results = run_checks(solution, plan, options)
    except CombMapError as e:
        _fail(e)

    failed = [r for r in results if not r.passed]
    if output_json:
        click.echo(to_json(results_payload(results, {"instance": instance.config.to_dict()})))
    else:
        click.echo(results_table(results, header=instance.config.fingerprint()))
        click.echo("")
        click.echo(f"{len(results)} checks, {len(failed)} violations")
    sys.exit(1 if failed else 0)


@main.command()
@click.option("--id", "example_id", required=True, type=click.Choice(["1", "2", "3"]))
@click.option("--size", type=int, help="Truncation size N (default 3, 4 and 50 for ids 1, 2, 3)")
@click.option("--height", default=1.0, show_default=True, type=float, help="Height H (example 3)")
@click.option("--convergence", is_flag=True, help="Also track example 3 over N = 12, 25, 50")
@click.option("--json", "output_json", is_flag=True, help="Output results as JSON")
@click.pass_context
def example(ctx, example_id, size, height, convergence, output_json):
    """Reproduce a worked example and print its chains with margins."""
    if size is None:
        size = DEFAULT_EXAMPLE_SIZES[example_id]
    try:
        report = reproduce_example(
            int(example_id), size, height, _options(ctx), _settings(ctx)
        )
        trend = None
        if convergence and example_id == "3":
            trend = counterexample_convergence(
                height=height, options=_options(ctx), settings=_settings(ctx)
            )
    except CombMapError as e:
        _fail(e)

    if output_json:
        payload = report.to_dict()
        if trend is not None:
            payload["convergence"] = trend.to_dict()
        click.echo(to_json(payload))
    else:
        click.echo(results_table(report.results, header=f"Example {example_id}, N={size}"))
        click.echo("")
        click.echo(summary_table({k: f"{v:.12g}" for k, v in report.values.items()}))
        if trend is not None:
            click.echo("")
            click.echo(f"{'N':>4}  {'central l':>18}  {'error':>12}")
            for n, length, error in zip(trend.sizes, trend.central_lengths, trend.errors):
                click.echo(f"{n:>4}  {length:>18.12g}  {error:>12.3e}")
            click.echo(f"limit 2 asin tanh H = {trend.limit:.12g}; monotone: {trend.monotone}")
    sys.exit(0 if report.passed else 1)


def _union_from_file(path: str) -> Tuple[IntervalUnion, Optional[SlitConfig]]:
    data = read_json(path)
    if not isinstance(data, dict):
        raise MalformedInput(f"{path}: expected a JSON object")
    solution = data.get("solution", data)
    gaps = solution.get("gaps", solution)
    if "z_minus" not in gaps or "z_plus" not in gaps:
        raise MalformedInput(f"{path}: no gap system found")
    union = IntervalUnion.from_pairs(zip(gaps["z_minus"], gaps["z_plus"]))
    config_data = solution.get("config")
    config = parse_instance(config_data).config if config_data else None
    return union, config


@main.command(name="capacity")
@click.option("--intervals", multiple=True, help="Interval a,b (repeatable)")
@click.option("--from-solution", type=click.Path(), help="Solution JSON written by 'solve'")
@click.option("--json", "output_json", is_flag=True, help="Output results as JSON")
def capacity_command(intervals, from_solution, output_json):
    """Analytic capacity and Ahlfors function of a union of real intervals."""
    try:
        config = None
        if from_solution:
            union, config = _union_from_file(from_solution)
        elif intervals:
            union = IntervalUnion(tuple(parse_interval(text) for text in intervals))
        else:
            click.echo("Error: give --intervals or --from-solution", err=True)
            sys.exit(2)
    except CombMapError as e:
        _fail(e)

    values: Dict[str, Any] = {
        "length": total_length(union),
        "capacity": capacity(union),
        "derivative_at_infinity": derivative_at_infinity(union),
        "max_modulus": max_modulus(union),
    }
    passed = True
    if config is not None:
        diameter = slit_diameter(config)
        values["diameter"] = diameter
        passed = values["capacity"] <= diameter + 1e-9 * max(1.0, diameter)
        values["diameter_bound"] = passed

    if output_json:
        click.echo(to_json(values))
    else:
        shown = {k: f"{v:.12g}" if isinstance(v, float) else v for k, v in values.items()}
        click.echo(summary_table(shown))
    sys.exit(0 if passed else 1)


@main.command()
@click.argument("path", type=click.Path())
@click.option("--csv", "as_csv", is_flag=True, help="Emit per-slit rows as CSV")
@click.pass_context
def gaps(ctx, path, as_csv):
    """Recover slit positions, heights and quantities from a gap system."""
    try:
        data = read_json(path)
        if not isinstance(data, dict) or "z_minus" not in data or "z_plus" not in data:
            raise MalformedInput('gap file must have "z_minus" and "z_plus" arrays')
        settings = _settings(ctx)
        try:
            system = GapSystem(tuple(data["z_minus"]), tuple(data["z_plus"]))
        except (TypeError, ValueError) as e:
            raise MalformedInput(f"non-numeric gap endpoint: {e}") from e
        q = Quasimomentum(system, settings)
        u, h = q.heights_and_positions()
        config = validate(u.tolist(), h.tolist())
        residual = float(np.max(np.abs(q.closure_residuals()), initial=0.0))
        solution = CombSolution(config, q.gaps, residual, 0, (), settings)
        quantities = compute_quantities(solution)
    except CombMapError as e:
        _fail(e)

    if as_csv:
        click.echo(rows_to_csv(quantities.rows()).rstrip("\n"))
    else:
        payload = {"u": list(config.u), "h": list(config.h), "gaps": q.gaps.to_dict()}
        payload["quantities"] = quantities.to_dict()
        click.echo(to_json(payload))
    sys.exit(0)


if __name__ == "__main__":
    main()
