"""
Command-line entry point.

Commands:
    run        Run (scheduler, seed) cells; write ledgers, snapshots and summary.csv
    compare    Run every scheduler on shared seeds; also write comparison.csv
    whatif     Re-rank a snapshot's jobs under a hypothetical payment
    validate   Check a config document against its invariants
    reference  Write the reference experiment config

Exit status 2 means bad input (unreadable config, invariant violations,
unknown job id, bad snapshot).
"""

import logging
from pathlib import Path
from typing import Annotated, List, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.markup import escape
from rich.table import Table

from fedjobs.config import configure_logging, get_settings
from fedjobs.models.domain import DataRegime, SchedulerKind, SimConfig
from fedjobs.models.error import ConfigurationError, FedJobsError
from fedjobs.models.ledger import ExperimentManifest, RunSummary
from fedjobs.services.experiment import run_experiment
from fedjobs.services.metrics import compare_summaries, sf_improvement
from fedjobs.services.population import reference_config, validate_config
from fedjobs.services.simulator import payment_whatif
from fedjobs.utils.file_utils import load_config, load_snapshot, save_config

logger = logging.getLogger(__name__)

app = typer.Typer(
    name="fedjobs",
    help="Multi-job federated learning scheduling simulator.",
    no_args_is_help=True,
    add_completion=False,
)
console = Console()
err_console = Console(stderr=True)

USAGE_EXIT = 2


# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------

def _fail(error: FedJobsError) -> typer.Exit:
    report = error.to_report()
    err_console.print(f"[red]error[/red] ({report.error_code.value}): {escape(report.message)}")
    for line in report.details:
        err_console.print(f"  - {escape(line)}")
    logger.debug(f"{report.error_code.value} context: {report.context}")
    return typer.Exit(code=USAGE_EXIT)


def _parse_seeds(value: Optional[str]) -> Optional[List[int]]:
    """Comma-separated seeds; ``a-b`` expands to the inclusive range."""
    if value is None:
        return None
    seeds: List[int] = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            if "-" in part:
                low, high = (int(x) for x in part.split("-", 1))
                seeds.extend(range(low, high + 1))
            else:
                seeds.append(int(part))
        except ValueError:
            raise typer.BadParameter(f"not a seed or seed range: {part!r}") from None
    return seeds


def _parse_schedulers(value: Optional[str]) -> Optional[List[SchedulerKind]]:
    if value is None:
        return None
    kinds = []
    for part in value.split(","):
        part = part.strip()
        if not part:
            continue
        try:
            kinds.append(SchedulerKind(part))
        except ValueError:
            choices = ", ".join(kind.value for kind in SchedulerKind)
            raise typer.BadParameter(f"unknown scheduler {part!r} (choose from {choices})") from None
    return kinds


def _load_valid_config(config_path: Path) -> SimConfig:
    config = load_config(config_path)
    problems = validate_config(config)
    if problems:
        raise ConfigurationError(f"Config {config_path} violates its invariants", details=problems)
    return config


def _build_manifest(
    config_path: Path,
    config: SimConfig,
    out: Optional[Path],
    seeds: Optional[str],
    schedulers: Optional[str],
    workers: Optional[int],
    default_schedulers: List[SchedulerKind],
) -> ExperimentManifest:
    settings = get_settings()
    try:
        return ExperimentManifest(
            config_path=config_path,
            output_dir=out or settings.output_dir,
            seeds=_parse_seeds(seeds) or [config.seed],
            schedulers=_parse_schedulers(schedulers) or default_schedulers,
            workers=workers or settings.workers,
        )
    except ValidationError as e:
        raise ConfigurationError(
            "Invalid experiment manifest",
            details=[error["msg"] for error in e.errors()],
        ) from e


def _execute(manifest: ExperimentManifest, config: SimConfig, comparison: bool) -> List[RunSummary]:
    return run_experiment(
        config,
        manifest.output_dir,
        manifest.schedulers,
        manifest.seeds,
        workers=manifest.workers,
        comparison=comparison,
    )


ConfigOption = Annotated[Path, typer.Option("--config", "-c", help="SimConfig document (YAML or JSON)")]
OutOption = Annotated[Optional[Path], typer.Option("--out", "-o", help="Output directory")]
SeedsOption = Annotated[Optional[str], typer.Option("--seeds", help="Seeds, e.g. 0,1,2 or 0-9")]
SchedulersOption = Annotated[
    Optional[str], typer.Option("--schedulers", help="Comma-separated scheduler names")
]
WorkersOption = Annotated[Optional[int], typer.Option("--workers", min=1, help="Process-pool size")]


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------

@app.callback()
def main(
    log_level: Annotated[Optional[str], typer.Option("--log-level", help="Logging level")] = None,
) -> None:
    """Multi-job federated learning scheduling simulator."""
    configure_logging(log_level)


@app.command()
def run(
    config: ConfigOption,
    out: OutOption = None,
    seeds: SeedsOption = None,
    schedulers: SchedulersOption = None,
    workers: WorkersOption = None,
) -> None:
    """Run every (scheduler, seed) cell and write ledgers plus summary.csv."""
    try:
        sim_config = _load_valid_config(config)
        manifest = _build_manifest(
            config, sim_config, out, seeds, schedulers, workers, [sim_config.scheduler]
        )
        summaries = _execute(manifest, sim_config, comparison=False)
    except FedJobsError as e:
        raise _fail(e) from e

    console.print(f"Wrote {len(summaries)} run(s) to {manifest.output_dir}")


@app.command()
def compare(
    config: ConfigOption,
    out: OutOption = None,
    seeds: SeedsOption = None,
    schedulers: SchedulersOption = None,
    workers: WorkersOption = None,
) -> None:
    """Run schedulers on shared seeds and write comparison.csv."""
    try:
        sim_config = _load_valid_config(config)
        manifest = _build_manifest(
            config, sim_config, out, seeds, schedulers, workers, list(SchedulerKind)
        )
        summaries = _execute(manifest, sim_config, comparison=True)
    except FedJobsError as e:
        raise _fail(e) from e

    table = compare_summaries(summaries)
    view = Table(title=f"Scheduler comparison ({len(manifest.seeds)} seed(s))")
    for column in ("scheduler", "mean_sf", "mean_convergence_round", "mean_final_accuracy"):
        view.add_column(column)

    fairfedjs = table[table["scheduler"] == SchedulerKind.FAIRFEDJS.value]
    reference_sf = float(fairfedjs["mean_sf"].iloc[0]) if not fairfedjs.empty else None
    if reference_sf is not None:
        view.add_column("FairFedJS SF reduction")

    for row in table.itertuples(index=False):
        cells = [
            row.scheduler,
            f"{row.mean_sf:.4f}",
            "-" if row.converged_runs == 0 else f"{row.mean_convergence_round:.1f}",
            f"{row.mean_final_accuracy:.4f}",
        ]
        if reference_sf is not None:
            cells.append(f"{sf_improvement(reference_sf, row.mean_sf):.1%}")
        view.add_row(*cells)
    console.print(view)


@app.command()
def whatif(
    snapshot: Annotated[Path, typer.Argument(help="snapshot_<scheduler>_<seed>.json")],
    job_id: Annotated[int, typer.Argument(help="Job to re-price")],
    payment: Annotated[float, typer.Argument(help="Hypothetical payment")],
) -> None:
    """Show how one job's JSI and rank change under a hypothetical payment."""
    try:
        state = load_snapshot(snapshot)
        report = payment_whatif(state, job_id, payment)
    except FedJobsError as e:
        raise _fail(e) from e

    table = Table(title=f"What-if: job {job_id} pays {payment:g} (round {state.round})")
    table.add_column("job")
    table.add_column("payment")
    table.add_column("JSI now")
    table.add_column("rank now")
    table.add_column("JSI what-if")
    table.add_column("rank what-if")

    for job_id_ in report.order_current:
        job = state.job_state(job_id_)
        shown_payment = payment if job_id_ == job_id else job.payment
        table.add_row(
            str(job_id_),
            f"{shown_payment:g}",
            f"{report.jsi_current[job_id_]:.4f}",
            str(report.order_current.index(job_id_) + 1),
            f"{report.jsi_hypothetical[job_id_]:.4f}",
            str(report.order_hypothetical.index(job_id_) + 1),
        )
    console.print(table)
    console.print(
        f"Job {job_id}: JSI {report.jsi_current[job_id]:g} -> {report.jsi_hypothetical[job_id]:g} "
        f"(change {report.jsi_change:g}), rank {report.rank_current} -> {report.rank_hypothetical}"
    )


@app.command()
def validate(config: ConfigOption) -> None:
    """Report every invariant violation of a config document."""
    try:
        _load_valid_config(config)
    except FedJobsError as e:
        raise _fail(e) from e
    console.print(f"{config}: OK")


@app.command()
def reference(
    out: Annotated[Path, typer.Option("--out", "-o", help="Where to write the config")],
    seed: Annotated[int, typer.Option("--seed", min=0, help="Seed for opening bids")] = 0,
    rounds: Annotated[int, typer.Option("--rounds", min=1)] = 150,
    regime: Annotated[DataRegime, typer.Option("--regime")] = DataRegime.IID,
) -> None:
    """Write the reference experiment config (six jobs, 50 clients, two data types)."""
    path = save_config(reference_config(seed=seed, rounds=rounds, regime=regime), out)
    console.print(f"Wrote reference config to {path}")


if __name__ == "__main__":
    app()
