"""
Experiment Batches

Expands one config into (scheduler, seed) cells, runs them in-process or on
a process pool, and writes every artifact in (scheduler, seed) order so that
re-running a manifest reproduces the output directory byte for byte.

Artifacts per output directory:
    ledger_<scheduler>_<seed>.jsonl    one RoundLedger per line
    snapshot_<scheduler>_<seed>.json   final SimulationState (what-if input)
    summary.csv                        one row per cell
    comparison.csv                     one row per scheduler (compare only)
"""

import concurrent.futures
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple

from fedjobs.models.domain import SchedulerKind, SimConfig, SimulationState
from fedjobs.models.ledger import RoundLedger, RunSummary
from fedjobs.services.metrics import compare_summaries, summarize, summary_frame
from fedjobs.services.simulator import simulate
from fedjobs.utils.file_utils import save_snapshot, write_csv, write_ledgers

logger = logging.getLogger(__name__)

SUMMARY_FILE = "summary.csv"
COMPARISON_FILE = "comparison.csv"


@dataclass(frozen=True)
class CellTask:
    config: SimConfig
    scheduler: SchedulerKind
    seed: int


@dataclass(frozen=True)
class CellResult:
    scheduler: SchedulerKind
    seed: int
    ledgers: List[RoundLedger]
    final_state: SimulationState
    summary: RunSummary


def ledger_path(out_dir: Path, scheduler: SchedulerKind, seed: int) -> Path:
    return out_dir / f"ledger_{scheduler.value}_{seed}.jsonl"


def snapshot_path(out_dir: Path, scheduler: SchedulerKind, seed: int) -> Path:
    return out_dir / f"snapshot_{scheduler.value}_{seed}.json"


# ============================================================================
# Execution
# ============================================================================

def run_cell(config: SimConfig, scheduler: SchedulerKind, seed: int) -> CellResult:
    """Run one (scheduler, seed) cell of ``config``."""
    cell_config = config.with_run(scheduler, seed)
    logger.info(f"Running {scheduler.value} seed={seed} for {cell_config.rounds} rounds")
    ledgers, final_state = simulate(cell_config)
    summary = summarize(
        ledgers,
        epsilon=cell_config.convergence_epsilon,
        window=cell_config.convergence_window,
        scheduler=scheduler,
        seed=seed,
    )
    logger.info(f"Finished {scheduler.value} seed={seed}: sf={summary.sf:.4f}")
    return CellResult(
        scheduler=scheduler,
        seed=seed,
        ledgers=ledgers,
        final_state=final_state,
        summary=summary,
    )


def _run_task(task: CellTask) -> CellResult:
    return run_cell(task.config, task.scheduler, task.seed)


def run_batch(
    config: SimConfig,
    schedulers: Sequence[SchedulerKind],
    seeds: Sequence[int],
    workers: int = 1,
) -> List[CellResult]:
    """
    Run every (scheduler, seed) cell.

    Cells share nothing, so with ``workers > 1`` they run on a process pool.
    Results always come back in (scheduler, seed) order.
    """
    tasks = [CellTask(config=config, scheduler=s, seed=seed) for s in schedulers for seed in seeds]

    if workers <= 1 or len(tasks) <= 1:
        return [_run_task(task) for task in tasks]

    logger.info(f"Running {len(tasks)} cell(s) with {workers} worker(s)")
    results: Dict[Tuple[SchedulerKind, int], CellResult] = {}
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as ex:
        futures = {ex.submit(_run_task, task): task for task in tasks}
        for fut in concurrent.futures.as_completed(futures):
            task = futures[fut]
            results[(task.scheduler, task.seed)] = fut.result()
    return [results[(task.scheduler, task.seed)] for task in tasks]


# ============================================================================
# Output
# ============================================================================

def write_cell_outputs(out_dir: Path, cell: CellResult) -> Tuple[Path, Path]:
    """Ledger JSONL and final-state snapshot of one cell."""
    ledger_file = write_ledgers(cell.ledgers, ledger_path(out_dir, cell.scheduler, cell.seed))
    snapshot_file = save_snapshot(cell.final_state, snapshot_path(out_dir, cell.scheduler, cell.seed))
    return ledger_file, snapshot_file


def write_summary(out_dir: Path, summaries: Sequence[RunSummary]) -> Path:
    return write_csv(summary_frame(summaries), out_dir / SUMMARY_FILE)


def write_comparison(out_dir: Path, summaries: Sequence[RunSummary]) -> Path:
    return write_csv(compare_summaries(summaries), out_dir / COMPARISON_FILE)


def run_experiment(
    config: SimConfig,
    out_dir: Path,
    schedulers: Sequence[SchedulerKind],
    seeds: Sequence[int],
    workers: int = 1,
    comparison: bool = False,
) -> List[RunSummary]:
    """
    Run a batch and write all of its artifacts.

    Args:
        config: Base config; scheduler and seed are overridden per cell
        out_dir: Output directory, created if missing
        schedulers: Schedulers to run
        seeds: Seeds shared by every scheduler
        workers: Process-pool size
        comparison: Also write comparison.csv

    Returns:
        Per-cell summaries in (scheduler, seed) order
    """
    out_dir.mkdir(parents=True, exist_ok=True)
    cells = run_batch(config, schedulers, seeds, workers)

    for cell in cells:
        write_cell_outputs(out_dir, cell)
    summaries = [cell.summary for cell in cells]
    write_summary(out_dir, summaries)
    if comparison:
        write_comparison(out_dir, summaries)

    logger.info(f"Wrote {len(cells)} cell(s) to {out_dir}")
    return summaries
