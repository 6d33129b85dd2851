import sys
from pathlib import Path
from typing import Optional

from radicli import Arg, ExistingFilePath
from wasabi import Printer

from wnncheck.constants import EXIT_CONFIG
from wnncheck.errors import ConfigError
from wnncheck.loaders import override_config, parse_metric, read_config
from wnncheck.scenario import run_scenario
from wnncheck.types import ScenarioConfig

from ._util import cli, print_summary, split_names


def execute(config: ScenarioConfig, out: Optional[Path], verbose: bool) -> None:
    msg = Printer()
    try:
        bundle = run_scenario(config, verbose=verbose)
    except ConfigError as e:
        msg.fail("Invalid configuration", str(e), exits=EXIT_CONFIG)
        return
    print_summary(bundle, msg)
    if out is not None:
        bundle.to_disk(out, csv_rows=config.run.csv)
        msg.info(f"Wrote report to {out}")
    sys.exit(bundle.exit_code)


@cli.command(
    "run",
    config_path=Arg(help="Path to a scenario config (.yml or .json)"),
    out=Arg("--out", help="Directory for report.json and samples.csv"),
    seed=Arg("--seed", help="Override the sampling seed"),
    tol_check=Arg("--tol-check", help="Override the check tolerance"),
    with_oracles=Arg("--with-oracles", help="Add the finite-difference oracles"),
    verbose=Arg("--verbose", "-v", help="Print progress per check"),
)
def run(
    config_path: ExistingFilePath,
    out: Optional[Path] = None,
    seed: Optional[int] = None,
    tol_check: Optional[float] = None,
    with_oracles: bool = False,
    verbose: bool = False,
) -> None:
    """Run the checks of a scenario config and write a JSON report"""
    msg = Printer()
    try:
        config = read_config(config_path)
        config = override_config(
            config,
            seed=seed,
            tol_check=tol_check,
            with_oracles=with_oracles or None,
        )
    except ConfigError as e:
        msg.fail("Invalid configuration", str(e), exits=EXIT_CONFIG)
        return
    execute(config, out, verbose)


@cli.command(
    "check",
    scenario_id=Arg(help="Catalog scenario id, see `wnncheck catalog`"),
    checks=Arg("--checks", help="Comma-separated checks to run, default all"),
    metric=Arg("--metric", help="identity, diag:a,b,... or a JSON file with P"),
    out=Arg("--out", help="Directory for report.json and samples.csv"),
    seed=Arg("--seed", help="Override the sampling seed"),
    tol_check=Arg("--tol-check", help="Override the check tolerance"),
    with_oracles=Arg("--with-oracles", help="Add the finite-difference oracles"),
    verbose=Arg("--verbose", "-v", help="Print progress per check"),
)
def check(
    scenario_id: str,
    checks: Optional[str] = None,
    metric: str = "identity",
    out: Optional[Path] = None,
    seed: Optional[int] = None,
    tol_check: Optional[float] = None,
    with_oracles: bool = False,
    verbose: bool = False,
) -> None:
    """Run checks on a catalog scenario"""
    msg = Printer()
    try:
        config = override_config(
            ScenarioConfig(name=scenario_id, scenario=scenario_id),
            seed=seed,
            tol_check=tol_check,
            checks=split_names(checks),
            with_oracles=with_oracles or None,
            P=parse_metric(metric),
        )
    except ConfigError as e:
        msg.fail("Invalid configuration", str(e), exits=EXIT_CONFIG)
        return
    execute(config, out, verbose)
