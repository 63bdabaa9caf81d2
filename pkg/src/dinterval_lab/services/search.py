# src/dinterval_lab/services/search.py

import hashlib
import logging
import random
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Dict, Iterator, List, Optional, Tuple

from pydantic import BaseModel, Field
from rich.console import Console
from rich.table import Table

from ..bounds.report import InvariantCache, target_ratio, verify_bounds
from ..core.errors import DIntervalError, SearchBudgetExceededError
from ..core.models import (
    Instance,
    Provenance,
    RandomFamilySpec,
    SearchConfig,
    SearchTarget,
    WeightSystem,
    Witness,
)
from ..core.rational import Rational, format_rational
from ..generators.random_family import gen_random
from ..generators.walecki import gen_walecki
from .witness_store import CONJECTURES_DIR, WitnessStore, make_witness

logger = logging.getLogger(__name__)


def iteration_seed(seed: int, iteration: int) -> int:
    """64-bit seed of one iteration, independent of evaluation order."""
    digest = hashlib.sha256(f"{seed}:{iteration}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


def random_spec(config: SearchConfig, iteration: int) -> RandomFamilySpec:
    """Draws the instance parameters of one iteration from the configured ranges."""
    seed = iteration_seed(config.seed, iteration)
    rng = random.Random(seed)
    d = rng.randint(config.d_min, config.d_max)
    separated = config.separated if config.separated is not None else rng.choice([False, True])
    line_length = rng.randint(config.line_length_min, config.line_length_max)
    return RandomFamilySpec(
        d=d,
        separated=separated,
        line_length=line_length,
        edge_count=rng.randint(config.edges_min, config.edges_max),
        component_length_min=min(config.component_length_min, line_length),
        component_length_max=min(config.component_length_max, line_length),
        weight_min=config.weight_min,
        weight_max=config.weight_max,
        seed=seed,
    )


class Candidate(BaseModel):
    """One instance to evaluate: a seeded random draw or a Hamiltonian-path family."""
    source: str
    iteration: Optional[int] = None
    seed: Optional[int] = None
    walecki_d: Optional[int] = None


class Evaluation(BaseModel):
    """Outcome of evaluating one candidate against the search target."""
    candidate: Candidate
    instance: Optional[Instance] = None
    ratio: Optional[Rational] = None
    invariants: Dict[str, Rational] = Field(default_factory=dict)
    theorem_failures: List[str] = Field(default_factory=list)
    conjecture_hits: List[str] = Field(default_factory=list)
    error: Optional[str] = None
    budget_exceeded: bool = False

    def sort_key(self) -> Tuple:
        """Higher ratio first, then smaller instance, then serialization."""
        instance = self.instance
        return (
            -self.ratio,
            instance.n_edges,
            instance.ground_size,
            instance.canonical_json(),
        )


class SearchSummary(BaseModel):
    target: SearchTarget
    evaluated: int = 0
    budget_errors: int = 0
    generator_errors: int = 0
    theorem_failures: int = 0
    conjecture_witnesses: int = 0
    best_ratio: Optional[Rational] = None
    retained: List[str] = Field(default_factory=list)
    stopped_by_time: bool = False


def evaluate_candidate(config: SearchConfig, candidate: Candidate) -> Evaluation:
    """
    Builds the candidate instance, computes the target ratio exactly and, when configured,
    the full bound report. Runs in worker processes, so it must stay a module-level function.
    """
    try:
        if candidate.walecki_d is not None:
            family = gen_walecki(candidate.walecki_d)
            weights = WeightSystem.unit(family.n_edges)
        else:
            family, weights = gen_random(random_spec(config, candidate.iteration))
    except DIntervalError as e:
        return Evaluation(candidate=candidate, error=f"generator: {e}")

    instance = Instance.of(family, None if weights.is_unit() else weights)
    cache = InvariantCache(family, weights)
    try:
        ratio = target_ratio(config.target, cache)
    except SearchBudgetExceededError as e:
        return Evaluation(candidate=candidate, instance=instance, error=str(e), budget_exceeded=True)
    except DIntervalError as e:
        return Evaluation(candidate=candidate, instance=instance, error=str(e))

    evaluation = Evaluation(
        candidate=candidate,
        instance=instance,
        ratio=ratio,
        invariants=cache.exact_values(),
    )
    if config.check_theorems:
        report = verify_bounds(family, weights)
        evaluation.theorem_failures = [row.name for row in report.theorem_failures()]
        evaluation.conjecture_hits = [row.name for row in report.conjecture_hits()]
        evaluation.invariants = {**report.invariants, **evaluation.invariants}
    return evaluation


class ConjectureSearch:
    """
    Generate-and-test search for large conjecture ratios.

    Every iteration draws an instance from its own derived seed, so the retained witnesses
    depend only on the configuration, never on worker scheduling. The top-k evaluations are
    sorted once at the end and then persisted.
    """

    def __init__(self, console: Console, store: WitnessStore):
        self.console = console
        self.store = store

    def _candidates(self, config: SearchConfig) -> List[Candidate]:
        candidates: List[Candidate] = []
        if config.include_walecki:
            for d in range(max(2, config.d_min), config.d_max + 1):
                if config.separated is not False:
                    candidates.append(Candidate(source="walecki", walecki_d=d))
        for iteration in range(config.iterations):
            candidates.append(Candidate(
                source="random",
                iteration=iteration,
                seed=iteration_seed(config.seed, iteration),
            ))
        return candidates

    def _evaluations(self, config: SearchConfig, candidates: List[Candidate]) -> Iterator[Evaluation]:
        if config.workers == 1:
            for candidate in candidates:
                yield evaluate_candidate(config, candidate)
            return
        with ProcessPoolExecutor(max_workers=config.workers) as executor:
            futures = [executor.submit(evaluate_candidate, config, candidate) for candidate in candidates]
            try:
                for future in futures:
                    yield future.result()
            finally:
                for future in futures:
                    future.cancel()

    def run(self, config: SearchConfig) -> SearchSummary:
        """Runs the search, persists the top-k witnesses and conjecture hits, returns a summary."""
        summary = SearchSummary(target=config.target)
        candidates = self._candidates(config)
        started = time.monotonic()
        scored: List[Evaluation] = []
        hits: List[Evaluation] = []

        self.console.log(
            f"Searching [cyan]{config.target.value}[/cyan] over {len(candidates)} instances "
            f"(seed {config.seed}, {config.workers} worker(s))"
        )
        evaluations = self._evaluations(config, candidates)
        try:
            for evaluation in evaluations:
                if config.time_budget_seconds and time.monotonic() - started > config.time_budget_seconds:
                    summary.stopped_by_time = True
                    self.console.log("[yellow]Time budget reached; results are not reproducible.[/yellow]")
                    break
                summary.evaluated += 1
                if evaluation.error is not None:
                    if evaluation.budget_exceeded:
                        summary.budget_errors += 1
                    else:
                        summary.generator_errors += 1
                    logger.info("candidate %s skipped: %s", evaluation.candidate, evaluation.error)
                    continue
                if evaluation.theorem_failures:
                    summary.theorem_failures += 1
                    self.console.log(
                        f"[bold red]Theorem rows failed on {evaluation.candidate.source} "
                        f"#{evaluation.candidate.iteration}: {', '.join(evaluation.theorem_failures)}[/bold red]"
                    )
                if evaluation.conjecture_hits:
                    hits.append(evaluation)
                scored.append(evaluation)
                if summary.best_ratio is None or evaluation.ratio > summary.best_ratio:
                    summary.best_ratio = evaluation.ratio
                    self.console.log(
                        f"New maximum [bold]{format_rational(evaluation.ratio)}[/bold] "
                        f"({evaluation.instance.n_edges} edges, d = {evaluation.instance.d})"
                    )
        finally:
            evaluations.close()

        top = sorted(scored, key=lambda e: e.sort_key())[:config.top_k]
        for evaluation in top:
            path = self.store.save(self._witness(config, evaluation))
            summary.retained.append(path.relative_to(self.store.root).as_posix())
        for evaluation in sorted(hits, key=lambda e: e.sort_key()):
            self.store.save(self._witness(config, evaluation), CONJECTURES_DIR)
            summary.conjecture_witnesses += 1
        return summary

    def _witness(self, config: SearchConfig, evaluation: Evaluation) -> Witness:
        candidate = evaluation.candidate
        return make_witness(
            instance=evaluation.instance,
            invariants=evaluation.invariants,
            provenance=Provenance(source=candidate.source, seed=candidate.seed, iteration=candidate.iteration),
            target=config.target,
            ratios={config.target.value: evaluation.ratio},
        )

    def print_summary(self, summary: SearchSummary) -> None:
        table = Table(title=f"Search summary: {summary.target.value}")
        table.add_column("Metric", style="cyan")
        table.add_column("Value", justify="right")
        table.add_row("Instances evaluated", str(summary.evaluated))
        table.add_row("Best ratio", format_rational(summary.best_ratio) if summary.best_ratio is not None else "-")
        table.add_row("Budget errors (skipped)", str(summary.budget_errors))
        table.add_row("Generator errors (skipped)", str(summary.generator_errors))
        table.add_row("Theorem-row failures", str(summary.theorem_failures))
        table.add_row("Retained witnesses", str(len(summary.retained)))
        table.add_row("Conjecture witnesses", str(summary.conjecture_witnesses))
        if summary.stopped_by_time:
            table.add_row("Stopped by time budget", "yes")
        self.console.print(table)
