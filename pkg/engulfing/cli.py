"""
Command-line interface for the engulfing toolkit.

Usage:
    engulf --builtin quad check --mode soft --K 1.001
    engulf --fn "x^4" estimate-k --grid 400
    engulf --builtin strip2d section --x0 0,0 --t 1
    engulf --out exp.svg plot --kind ratio-curve
    engulf example-2-1 --k 2 --x 1 --x 0.1 --x 0.01

Exit codes: 0 pass or completed, 1 engulfing violation found, 2 usage error.
"""
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional

import click

from . import __version__, init_toolkit
from .helpers.error_handlers import InvalidParameterError, cli_error_handler
from .models.function_spec import FunctionSpec
from .repositories.catalog_repository import CATALOG_ORDER, CatalogRepository
from .repositories.report_repository import ReportRepository
from .services.bregman_core import pairwise_constant, symmetry_ratio
from .services.convex_oracle import catalog_function, parsed_function
from .services.engulfing_check import check_equivalence, check_full, check_soft, diagnose_regularity, estimate_k_char
from .services.experiments_report import (DEFAULT_EXAMPLE_XS, DEFAULT_HEIGHTS, run_catalog_report,
                                          run_equivalence_report, run_example_2_1, run_exp_family,
                                          run_section_report)
from .services.plotting import PLOT_KINDS, emit_plot

logger = logging.getLogger(__name__)

EXIT_VIOLATION = 1


class VectorType(click.ParamType):
    """A real vector given as JSON ('[1, 2]') or comma separated ('1,2')."""

    name = 'vector'

    def convert(self, value, param, ctx):
        if isinstance(value, (list, tuple)):
            return [float(v) for v in value]
        text = str(value).strip()
        try:
            parsed = json.loads(text) if text.startswith('[') else [float(v) for v in text.split(',') if v.strip()]
            if isinstance(parsed, (int, float)):
                parsed = [parsed]
            return [float(v) for v in parsed]
        except (ValueError, TypeError):
            self.fail(f"{value!r} is not a real vector", param, ctx)


VECTOR = VectorType()


def _parse_params(pairs) -> Dict[str, Any]:
    params = {}
    for pair in pairs:
        name, sep, raw = pair.partition('=')
        if not sep or not name:
            raise click.BadParameter(f"expected name=value, got {pair!r}", param_hint='--param')
        try:
            params[name.strip()] = json.loads(raw)
        except ValueError:
            params[name.strip()] = raw
    return params


@dataclass
class CliContext:
    """Global options shared by every subcommand."""
    cfg: type
    expression: Optional[str] = None
    builtin: Optional[str] = None
    dimension: Optional[int] = None
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    out: Optional[Path] = None
    fmt: str = 'json'
    _function: Optional[FunctionSpec] = None

    def function(self) -> FunctionSpec:
        """The function selected by --fn or --builtin (exactly one of them)."""
        if self._function is not None:
            return self._function
        if bool(self.expression) == bool(self.builtin):
            raise click.UsageError("exactly one of --fn and --builtin is required")
        if self.builtin:
            self._function = catalog_function(self.builtin, **self.params)
        else:
            self._function = parsed_function(self.expression, self.dimension or 1, self.sampler())
        return self._function

    def sampler(self, **overrides):
        return self.cfg.sampler_config(seed=self.seed, **overrides)

    def refine(self, **overrides):
        return self.cfg.refine_config(**overrides)

    def emit(self, text: str) -> None:
        """Payload to --out or stdout."""
        if self.out is None:
            click.echo(text, nl=False)
        else:
            ReportRepository().write_text(self.out, text)
            click.echo(f"Wrote {self.out}", err=True)

    def emit_svg(self, svg: str) -> None:
        """SVG document to --out or stdout."""
        if self.out is None:
            click.echo(svg, nl=False)
        else:
            ReportRepository().save_svg(svg, self.out)
            click.echo(f"Wrote {self.out}", err=True)

    def emit_model(self, model) -> None:
        self.emit(json.dumps(model.model_dump(mode='json'), indent=2, sort_keys=True) + "\n")

    def emit_report(self, report) -> None:
        self.emit(ReportRepository().render(report, self.fmt))


def _load_job(path: str) -> Dict[str, Any]:
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            job = json.load(handle)
    except (OSError, ValueError) as e:
        raise click.BadParameter(f"cannot read job file: {e}", param_hint='--job')
    if not isinstance(job, dict):
        raise click.BadParameter("job file must hold a JSON object", param_hint='--job')
    unknown = sorted(set(job) - {'fn', 'builtin', 'dimension', 'params', 'seed'})
    if unknown:
        raise click.BadParameter(f"unknown job fields {unknown}", param_hint='--job')
    return job


@click.group()
@click.version_option(version=__version__, prog_name='engulf')
@click.option('--fn', 'expression', default=None, help='Function expression, e.g. "x^4" or "abs(x1) + x2^2"')
@click.option('--builtin', type=click.Choice(list(CATALOG_ORDER)), default=None, help='Catalog function tag')
@click.option('--param', 'param_pairs', multiple=True, help='Catalog parameter name=value (JSON value)')
@click.option('--dimension', type=click.IntRange(min=1), default=None, help='Dimension of an --fn expression')
@click.option('--job', type=click.Path(exists=True, dir_okay=False), default=None,
              help='JSON job file with fields fn, builtin, dimension, params, seed')
@click.option('--seed', type=click.IntRange(min=0), default=None, help='Master seed')
@click.option('--out', type=click.Path(dir_okay=False, path_type=Path), default=None, help='Output file')
@click.option('--format', 'fmt', type=click.Choice(['json', 'csv']), default='json', help='Report format')
@click.option('--log-level', type=click.Choice(['DEBUG', 'INFO', 'WARNING', 'ERROR'], case_sensitive=False),
              default=None, help='Log level (stderr)')
@click.option('--config', 'config_name', type=click.Choice(['development', 'production', 'testing']),
              default=None, help='Configuration profile (ENGULF_ENV when omitted)')
@click.pass_context
def cli(ctx, expression, builtin, param_pairs, dimension, job, seed, out, fmt, log_level, config_name):
    """
    Engulfing property laboratory for convex functions.

    Global options select the function and the output; the subcommand
    selects the computation.
    """
    cfg = init_toolkit(config_name, log_level)
    spec = _load_job(job) if job else {}
    params = dict(spec.get('params') or {})
    params.update(_parse_params(param_pairs))
    ctx.obj = CliContext(
        cfg=cfg,
        expression=expression or spec.get('fn'),
        builtin=builtin or spec.get('builtin'),
        dimension=dimension or spec.get('dimension'),
        params=params,
        seed=seed if seed is not None else spec.get('seed'),
        out=out,
        fmt=fmt,
    )


@cli.command()
@click.option('--x0', type=VECTOR, required=True, help='Base point')
@click.option('--p', 'slope', type=VECTOR, default=None, help='Subgradient at x0 (default: the gradient)')
@click.option('--t', 'height', type=float, required=True, help='Section height t > 0')
@click.option('--directions', type=click.IntRange(min=1), default=None, help='Boundary directions (n >= 2)')
@click.pass_obj
@cli_error_handler
def section(obj: CliContext, x0, slope, height, directions):
    """Boundary of the section S(x0, p, t)."""
    f = obj.function()
    obj.emit_report(run_section_report(f, x0, slope, height, obj.sampler(directions=directions)))


@cli.command()
@click.option('--x', 'x', type=VECTOR, required=True)
@click.option('--y', 'y', type=VECTOR, required=True)
@click.pass_obj
@cli_error_handler
def ratio(obj: CliContext, x, y):
    """Symmetry ratio D(x; y) / D(y; x) and the minimal constant at the pair."""
    f = obj.function()
    r = symmetry_ratio(f, x, y)
    payload = {'function': f.label, 'x': x, 'y': y, 'ratio': r, 'minimal_K': pairwise_constant(f, x, y)}
    obj.emit(json.dumps(payload, indent=2, sort_keys=True, allow_nan=True) + "\n")


@cli.command('estimate-k')
@click.option('--box', type=float, default=None, help='Sampling box half-width')
@click.option('--grid', type=click.IntRange(min=8), default=None, help='Points per estimation level')
@click.option('--refine-rounds', type=click.IntRange(min=1), default=None, help='Pattern-search rounds')
@click.pass_obj
@cli_error_handler
def estimate_k(obj: CliContext, box, grid, refine_rounds):
    """Estimate the characterization constant."""
    estimate = estimate_k_char(obj.function(), obj.sampler(box=box), obj.refine(grid=grid, rounds=refine_rounds))
    obj.emit_model(estimate)


@cli.command()
@click.option('--mode', type=click.Choice(['soft', 'full', 'equiv']), default='soft')
@click.option('--K', 'K', type=float, default=None, help='Engulfing constant (soft and full modes)')
@click.option('--box', type=float, default=None)
@click.option('--tmin', type=float, default=None)
@click.option('--tmax', type=float, default=None)
@click.option('--samples', type=click.IntRange(min=1), default=None)
@click.option('--with-estimate', is_flag=True, default=False,
              help='Also estimate the constant and report its divergence flag (soft and full modes)')
@click.pass_context
@cli_error_handler
def check(ctx, mode, K, box, tmin, tmax, samples, with_estimate):
    """Sampled soft or full engulfing check, or the equivalence run."""
    obj: CliContext = ctx.obj
    f = obj.function()
    sampler = obj.sampler(box=box, t_min=tmin, t_max=tmax, samples=samples)
    if mode == 'equiv':
        outcome = check_equivalence(f, sampler, obj.refine())
        obj.emit_model(outcome)
        failed = (not outcome.estimate.finite
                  or any(v is not None and not v.passed for v in (outcome.soft, outcome.full)))
    else:
        if K is None:
            raise InvalidParameterError(f"--K is required in {mode} mode", field='K')
        verdict = (check_soft if mode == 'soft' else check_full)(f, K, sampler)
        if with_estimate:
            estimate = estimate_k_char(f, sampler, obj.refine())
            verdict = verdict.model_copy(update={'diverging': estimate.diverging})
        obj.emit_model(verdict)
        failed = not verdict.passed
    if failed:
        ctx.exit(EXIT_VIOLATION)


@cli.command()
@click.option('--trial-K', 'trial_K', type=float, default=None, help='Constant used to confirm kinks')
@click.pass_obj
@cli_error_handler
def diagnose(obj: CliContext, trial_K):
    """Locate kinks and flat segments."""
    obj.emit_model(diagnose_regularity(obj.function(), obj.sampler(), trial_K or obj.cfg.TRIAL_K))


@cli.command()
@click.option('--experiment', type=click.Choice(['catalog', 'equivalence']), default='catalog')
@click.option('--samples', type=click.IntRange(min=1), default=None)
@click.option('--tag', 'tags', multiple=True, type=click.Choice(list(CATALOG_ORDER)),
              help='Restrict the catalog report to these functions')
@click.pass_obj
@cli_error_handler
def report(obj: CliContext, experiment, samples, tags):
    """Catalog report or the equivalence report of one function."""
    sampler = obj.sampler(samples=samples)
    if experiment == 'catalog':
        result = run_catalog_report(sampler, obj.refine(), tags or None)
    else:
        result = run_equivalence_report(obj.function(), sampler, obj.refine())
    obj.emit_report(result)


@cli.command()
@click.option('--kind', type=click.Choice(list(PLOT_KINDS)), required=True)
@click.option('--input', 'source', type=click.Path(exists=True, dir_okay=False), default=None,
              help='JSON report to plot (default: run the matching experiment)')
@click.option('--x0', type=VECTOR, default=None, help='Section base point (section-boundary)')
@click.option('--t', 'height', type=float, default=1.0, help='Section height (section-boundary)')
@click.pass_obj
@cli_error_handler
def plot(obj: CliContext, kind, source, x0, height):
    """Deterministic SVG of a report table."""
    if source:
        data = ReportRepository().load(source)
    elif kind == 'ratio-curve':
        data = run_exp_family(obj.cfg.EXP_FAMILY_HEIGHTS)
    else:
        f = obj.function()
        data = run_section_report(f, x0 if x0 is not None else [0.0] * f.dimension, None, height, obj.sampler())
    obj.emit_svg(emit_plot(data, kind))


@cli.command('example-2-1')
@click.option('--k', 'k', type=float, default=2.0, show_default=True)
@click.option('--x', 'xs', type=float, multiple=True, help='Points x > 0 (repeatable)')
@click.pass_obj
@cli_error_handler
def example_2_1(obj: CliContext, k, xs):
    """Gap chain at the pairs (x, -x^k) for x² / x⁴ glued at 0."""
    obj.emit_report(run_example_2_1(k, xs or DEFAULT_EXAMPLE_XS))


@cli.command('exp-family')
@click.option('--h', 'hs', type=float, multiple=True, help='Pair offsets h > 0 (repeatable)')
@click.pass_obj
@cli_error_handler
def exp_family(obj: CliContext, hs):
    """Symmetry ratios of e^x and e^(x^2) at the pairs (0, h)."""
    obj.emit_report(run_exp_family(hs or DEFAULT_HEIGHTS))


@cli.command('catalog')
@click.pass_obj
def catalog(obj: CliContext):
    """List the built-in functions."""
    repo = CatalogRepository()
    for tag in repo.list_tags():
        click.echo(f"{tag:10s} {repo.describe(tag)}")


def main() -> None:
    cli(prog_name='engulf')


if __name__ == '__main__':
    main()
