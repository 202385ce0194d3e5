"""Command line interface for the verification suites.

Exit codes: 0 all cases passed, 1 at least one case failed, 2 config error.
Set TUBEVERIFY_WORKERS to parallelize across cases (reports are bit-stable
across worker counts).
"""

from __future__ import annotations

import json
import sys

import click

from .. import cone as cone_mod
from .. import tube as tube_mod
from ..errors import ConfigError
from . import suites as suites_mod
from .report import export_report


@click.group()
def main():
    """Desk-scale verification of weighted Bergman-space claims on tube domains."""


@main.command("list")
def list_cmd():
    """Show the suite catalog with default grids."""
    for entry in suites_mod.list_suites():
        click.echo(f"{entry['name']}")
        click.echo(f"  verifies: {entry['verifies']}")
        keys = ", ".join(sorted(entry["defaults"]))
        click.echo(f"  config keys: {keys}")


@main.command("verify")
@click.argument("suite")
@click.option("--config", "config_path", type=click.Path(exists=True),
              help="JSON config; unknown keys are errors.")
@click.option("--seed", type=int, default=None, help="Master seed override.")
@click.option("--out", "out_path", type=click.Path(), default=None,
              help="Write the report to this path.")
@click.option("--format", "fmt", type=click.Choice(["json", "csv"]),
              default="json", show_default=True)
def verify_cmd(suite, config_path, seed, out_path, fmt):
    """Run SUITE and print one line per case."""
    overrides = {}
    if config_path:
        try:
            with open(config_path) as fh:
                overrides = json.load(fh)
        except json.JSONDecodeError as exc:
            click.echo(f"config error: {config_path}:{exc.lineno}:{exc.colno} "
                       f"{exc.msg}", err=True)
            sys.exit(2)
        if not isinstance(overrides, dict):
            click.echo("config error: top-level JSON object required", err=True)
            sys.exit(2)
    if seed is not None:
        overrides["seed"] = seed
    try:
        report = suites_mod.run_suite(suite, overrides)
    except ConfigError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    for case in report.cases:
        status = "PASS" if case.passed else "FAIL"
        click.echo(f"[{status}] {case.case_id}: {case.detail}")
    click.echo(f"{report.suite}: {report.passed}/{report.total} cases passed")
    if out_path:
        export_report(report, fmt, out_path)
        click.echo(f"report written to {out_path}")
    sys.exit(0 if report.all_passed() else 1)


@main.command("calibrate")
@click.option("--cone", "cone_name", required=True,
              help="Cone kind: half_line, lorentz3, spd2, ...")
@click.option("--nu", type=float, required=True, help="Kernel index.")
@click.option("--rel-tol", type=float, default=1e-4, show_default=True)
def calibrate_cmd(cone_name, nu, rel_tol):
    """Calibrate the kernel constant and emit the record as JSON."""
    try:
        cone = cone_mod.from_name(cone_name)
    except ValueError as exc:
        click.echo(f"config error: {exc}", err=True)
        sys.exit(2)
    const = tube_mod.calibrate_constant(cone, nu, rel_tol=rel_tol)
    click.echo(json.dumps({
        "cone": cone.describe(), "nu": const.nu, "value": const.value,
        "calibration_error": const.calibration_error}, sort_keys=True))


if __name__ == "__main__":
    main()
