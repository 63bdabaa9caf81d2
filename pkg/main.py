# main.py

import json
import logging
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Iterator, Optional

import typer
from pydantic import ValidationError
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from src.dinterval_lab.bounds.report import total_size_matching, verify_bounds
from src.dinterval_lab.config import settings
from src.dinterval_lab.core.errors import (
    BoundViolationError,
    InvalidFamilyError,
    PreconditionError,
    SearchBudgetExceededError,
    GeneratorRejectionError,
    GeneratorSizeError,
)
from src.dinterval_lab.core.geometry import ensure_valid
from src.dinterval_lab.core.models import BoundKind, Instance, Provenance, RandomFamilySpec, SearchConfig
from src.dinterval_lab.core.rational import format_rational
from src.dinterval_lab.generators.random_family import gen_random
from src.dinterval_lab.generators.threshold import gen_length_threshold
from src.dinterval_lab.generators.walecki import gen_walecki
from src.dinterval_lab.services.search import ConjectureSearch
from src.dinterval_lab.services.witness_store import WitnessStore
from src.dinterval_lab.solvers.exact import chi_e, nu_w, tau_w
from src.dinterval_lab.solvers.fractional import chi_star_e, is_balanced, tau_star_w

EXIT_THEOREM_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_BUDGET_EXCEEDED = 3

# Human-readable output goes to stdout, logs and diagnostics to stderr.
console = Console()
err_console = Console(stderr=True)
app = typer.Typer(help="Exact matching, cover and coloring invariants of d-interval hypergraphs.")
gen_app = typer.Typer(help="Generate instance JSON for extremal and random families.")
app.add_typer(gen_app, name="gen")


@app.callback()
def main(verbose: bool = typer.Option(False, "--verbose", "-V", help="Log solver progress at DEBUG level.")):
    logging.basicConfig(
        level=logging.DEBUG if verbose else settings.LOG_LEVEL,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=err_console, rich_tracebacks=True)],
        force=True,
    )


# ==============================================================================
# HELPERS
# ==============================================================================

@contextmanager
def cli_errors() -> Iterator[None]:
    """Maps library errors to the documented exit statuses."""
    try:
        yield
    except FileNotFoundError as e:
        err_console.print(f"[bold red]Input error:[/bold red] file not found: {e.filename}")
        raise typer.Exit(code=EXIT_INPUT_ERROR)
    except ValidationError as e:
        for error in e.errors():
            field = ".".join(str(part) for part in error["loc"]) or "<root>"
            err_console.print(f"[bold red]Input error:[/bold red] field '{field}': {error['msg']}")
        raise typer.Exit(code=EXIT_INPUT_ERROR)
    except json.JSONDecodeError as e:
        err_console.print(f"[bold red]Input error:[/bold red] invalid JSON: {e}")
        raise typer.Exit(code=EXIT_INPUT_ERROR)
    except (InvalidFamilyError, PreconditionError, GeneratorSizeError, GeneratorRejectionError) as e:
        err_console.print(f"[bold red]Input error:[/bold red] {e}")
        raise typer.Exit(code=EXIT_INPUT_ERROR)
    except SearchBudgetExceededError as e:
        err_console.print(f"[bold red]Budget exceeded:[/bold red] {e}")
        raise typer.Exit(code=EXIT_BUDGET_EXCEEDED)
    except BoundViolationError as e:
        err_console.print(f"[bold red]Proven bound violated (implementation bug):[/bold red] {e}")
        raise typer.Exit(code=EXIT_THEOREM_FAILURE)


def load_instance(path: Path) -> Instance:
    """Reads and validates an instance file."""
    with open(path, 'r', encoding='utf-8') as f:
        instance = Instance.model_validate_json(f.read())
    ensure_valid(instance.family, instance.weight_system())
    return instance


def show(value: Fraction | int) -> str:
    value = Fraction(value)
    return str(value.numerator) if value.denominator == 1 else format_rational(value)


def emit_instance(instance: Instance, output: Optional[Path]) -> None:
    text = instance.model_dump_json(indent=2, exclude_none=True)
    if output is None:
        typer.echo(text)
        return
    output.parent.mkdir(parents=True, exist_ok=True)
    with open(output, 'w', encoding='utf-8') as f:
        f.write(text)
    err_console.log(f"[green]✓ Instance written to [cyan]{output}[/cyan][/green]")


# ==============================================================================
# SOLVE & VERIFY
# ==============================================================================

@app.command()
def solve(
    instance_file: Path = typer.Argument(..., help="Instance JSON file."),
    nu: bool = typer.Option(False, "--nu", "-n", help="Matching number (and nu_w for weighted instances)."),
    tau: bool = typer.Option(False, "--tau", "-t", help="Cover number (and tau_w)."),
    tau_star: bool = typer.Option(False, "--tau-star", "-s", help="Fractional cover number tau*_w with both certificates."),
    chi: bool = typer.Option(False, "--chi", "-c", help="Edge chromatic number."),
    chi_star: bool = typer.Option(False, "--chi-star", "-C", help="Fractional edge chromatic number."),
    balanced: bool = typer.Option(False, "--balanced", "-b", help="Perfect fractional matching test."),
    total_size: bool = typer.Option(False, "--total-size", "-l", help="Maximum total size of a matching."),
    as_json: bool = typer.Option(False, "--json", help="Print machine-readable JSON."),
):
    """
    Computes the requested invariants exactly, with witnesses. Without flags, computes all of them.
    """
    everything = not any((nu, tau, tau_star, chi, chi_star, balanced, total_size))
    results: Dict[str, Dict[str, Any]] = {}
    with cli_errors():
        instance = load_instance(instance_file)
        family, weights = instance.family, instance.weight_system()
        unit = family.unit_weights()
        weighted = not weights.is_unit()

        if nu or everything:
            value, matching = nu_w(family, unit)
            results["nu"] = {"value": value, "witness": list(matching.edge_indices)}
            if weighted:
                value, matching = nu_w(family, weights)
                results["nu_w"] = {"value": value, "witness": list(matching.edge_indices)}
        if tau or everything:
            value, cover = tau_w(family, unit)
            results["tau"] = {"value": value, "witness": cover.model_dump(mode="json")["values"]}
            if weighted:
                value, cover = tau_w(family, weights)
                results["tau_w"] = {"value": value, "witness": cover.model_dump(mode="json")["values"]}
        if tau_star or everything:
            name = "tau_star_w" if weighted else "tau_star"
            value, cover, matching = tau_star_w(family, weights)
            results[name] = {
                "value": format_rational(value),
                "cover": cover.model_dump(mode="json")["values"],
                "matching": {str(e): format_rational(f) for e, f in sorted(matching.values.items())},
            }
        if chi or everything:
            value, coloring = chi_e(family)
            results["chi_e"] = {"value": value, "witness": [list(c) for c in coloring.classes()]}
        if chi_star or everything:
            value, coloring = chi_star_e(family)
            results["chi_star_e"] = {
                "value": format_rational(value),
                "witness": [
                    {"matching": list(coloring.matchings[i]), "weight": format_rational(f)}
                    for i, f in sorted(coloring.coloring.items())
                ],
            }
        if balanced or everything:
            certificate = is_balanced(family)
            results["balanced"] = {
                "value": certificate.balanced,
                "ground_size": certificate.ground_size,
                "certificate": certificate.model_dump(mode="json", exclude_none=True,
                                                      include={"matching", "farkas"}),
            }
        if total_size or everything:
            result = total_size_matching(family)
            results["nu_length"] = {"value": result.value, "witness": list(result.matching.edge_indices)}

    if as_json:
        typer.echo(json.dumps(results, indent=2))
        return

    table = Table(title=f"Invariants of {instance_file.name}")
    table.add_column("Invariant", style="cyan")
    table.add_column("Value", justify="right", style="bold")
    table.add_column("Witness")
    for name, result in results.items():
        value = result["value"]
        shown = str(value) if isinstance(value, bool) else show(Fraction(value))
        witness = {k: v for k, v in result.items() if k != "value"}
        table.add_row(name, shown, json.dumps(witness.get("witness", witness)))
    console.print(table)


@app.command()
def verify(
    instance_file: Path = typer.Argument(..., help="Instance JSON file."),
    as_json: bool = typer.Option(False, "--json", help="Print the report as JSON."),
    record: bool = typer.Option(False, "--record", "-r", help="Store the instance if a conjecture row is tight or violated."),
    store_dir: Path = typer.Option(settings.WITNESS_STORE_DIR, "--store", help="Witness store directory."),
):
    """
    Evaluates every theorem, guarantee and conjecture row. Exits 1 if a theorem row fails.
    """
    with cli_errors():
        instance = load_instance(instance_file)
        weights = instance.weight_system()
        report = verify_bounds(instance.family, weights)

    if record and report.conjecture_hits():
        store = WitnessStore(err_console, store_dir)
        store.save_conjecture_hit(report, instance, Provenance(source="verify"))

    if as_json:
        typer.echo(report.model_dump_json(indent=2))
    else:
        table = Table(title=f"Bound report {report.instance_id} (d = {report.d}, separated = {report.separated})")
        table.add_column("Row", style="cyan")
        table.add_column("Kind")
        table.add_column("Statement")
        table.add_column("LHS", justify="right")
        table.add_column("RHS", justify="right")
        table.add_column("Holds", justify="center")
        table.add_column("Slack", justify="right")
        for row in report.rows:
            if row.holds is None:
                holds = f"[yellow]{row.error}[/yellow]"
            elif row.holds:
                holds = "[yellow]tight[/yellow]" if row.kind == BoundKind.CONJECTURE and row.slack == 0 else "[green]✓[/green]"
            else:
                holds = "[bold red]✗[/bold red]"
            table.add_row(
                row.name,
                row.kind.value,
                row.statement,
                show(row.lhs) if row.lhs is not None else "-",
                show(row.rhs) if row.rhs is not None else "-",
                holds,
                show(row.slack) if row.slack is not None else "-",
            )
        console.print(table)
        for row in report.flagged_guarantees():
            err_console.print(f"[yellow]Flag:[/yellow] {row.name} exceeded its guarantee ({show(row.lhs)} > {show(row.rhs)})")

    if report.theorem_failures():
        raise typer.Exit(code=EXIT_THEOREM_FAILURE)
    if report.budget_errors():
        raise typer.Exit(code=EXIT_BUDGET_EXCEEDED)


# ==============================================================================
# GENERATORS
# ==============================================================================

@gen_app.command("walecki")
def gen_walecki_command(
    d: int = typer.Option(..., "--d", "-d", help="Number of lines (d >= 2)."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write to this file instead of stdout."),
):
    """Intersecting separated family with nu = 1 and tau = tau* = d."""
    with cli_errors():
        emit_instance(Instance.of(gen_walecki(d)), output)


@gen_app.command("threshold")
def gen_threshold_command(
    d: int = typer.Option(..., "--d", "-d", help="Number of lines."),
    n: int = typer.Option(..., "--n", "-n", help="Edges have more than g/n points."),
    granularity: int = typer.Option(..., "--granularity", "-g", help="Points per line; a multiple of n."),
    all_edges: bool = typer.Option(False, "--all", help="Keep non-minimal edges too."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write to this file instead of stdout."),
):
    """Discrete length-threshold family."""
    with cli_errors():
        emit_instance(Instance.of(gen_length_threshold(d, n, granularity, minimal=not all_edges)), output)


@gen_app.command("random")
def gen_random_command(
    spec_file: Path = typer.Option(..., "--spec", "-s", help="RandomFamilySpec JSON file."),
    seed: Optional[int] = typer.Option(None, "--seed", help="Override the seed of the spec."),
    output: Optional[Path] = typer.Option(None, "--output", "-o", help="Write to this file instead of stdout."),
):
    """Seeded random family; the same spec and seed always give the same instance."""
    with cli_errors():
        with open(spec_file, 'r', encoding='utf-8') as f:
            spec = RandomFamilySpec.model_validate_json(f.read())
        if seed is not None:
            spec = RandomFamilySpec.model_validate({**spec.model_dump(), "seed": seed})
        family, weights = gen_random(spec)
        emit_instance(Instance.of(family, None if weights.is_unit() else weights), output)


# ==============================================================================
# SEARCH & REPLAY
# ==============================================================================

@app.command()
def search(
    config_file: Path = typer.Option(..., "--config", "-c", help="SearchConfig JSON file."),
    store_dir: Path = typer.Option(settings.WITNESS_STORE_DIR, "--store", help="Witness store directory."),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Override the number of worker processes."),
    as_json: bool = typer.Option(False, "--json", help="Print the summary as JSON."),
):
    """
    Generate-and-test search for large conjecture ratios; retained witnesses go to the store.
    """
    with cli_errors():
        with open(config_file, 'r', encoding='utf-8') as f:
            config = SearchConfig.model_validate_json(f.read())
        if workers is not None:
            config = SearchConfig.model_validate({**config.model_dump(), "workers": workers})

    store = WitnessStore(err_console, store_dir)
    searcher = ConjectureSearch(err_console, store)
    summary = searcher.run(config)
    if as_json:
        typer.echo(summary.model_dump_json(indent=2))
    else:
        searcher.print_summary(summary)
    if summary.theorem_failures:
        raise typer.Exit(code=EXIT_THEOREM_FAILURE)


@app.command()
def replay(
    store_dir: Path = typer.Option(settings.WITNESS_STORE_DIR, "--store", help="Witness store directory."),
    as_json: bool = typer.Option(False, "--json", help="Print the mismatches of every witness as JSON."),
):
    """Recomputes every stored witness and re-checks its certificates; exits 1 on any mismatch."""
    store = WitnessStore(err_console, store_dir)
    results = store.replay_all()
    failed = {path: problems for path, problems in results.items() if problems}
    if as_json:
        payload = {path.relative_to(store.root).as_posix(): problems for path, problems in results.items()}
        typer.echo(json.dumps(payload, indent=2))
    else:
        for path, problems in failed.items():
            for problem in problems:
                console.print(f"[red]{path.name}[/red]: {problem}")
        console.print(f"Replayed {len(results)} witness(es), {len(failed)} mismatch(es).")
    if failed:
        raise typer.Exit(code=EXIT_THEOREM_FAILURE)


if __name__ == "__main__":
    app()
