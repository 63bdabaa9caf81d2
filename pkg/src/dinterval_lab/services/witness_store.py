# src/dinterval_lab/services/witness_store.py

import hashlib
import json
import logging
import re
from datetime import datetime, timezone
from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from rich.console import Console

from ..bounds.report import InvariantCache, instance_id, target_ratio
from ..config import verify_directories
from ..core.errors import DIntervalError, SearchBudgetExceededError
from ..core.geometry import ensure_valid
from ..core.models import (
    BoundReport,
    Instance,
    Provenance,
    SearchTarget,
    WITNESS_SCHEMA_VERSION,
    Witness,
    WitnessCertificates,
)
from ..core.rational import format_rational
from ..solvers.fractional import (
    fractional_coloring_violations,
    fractional_cover_violations,
    fractional_matching_violations,
)

CONJECTURES_DIR = "conjectures"
MANIFEST_NAME = "manifest.json"

logger = logging.getLogger(__name__)


def target_slug(target: Optional[SearchTarget]) -> str:
    """Directory name of a target: 'tau_star/nu' -> 'tau_star_nu'."""
    if target is None:
        return "untargeted"
    return re.sub(r"[^a-z0-9]+", "_", target.value.lower()).strip("_")


def witness_digest(witness: Witness) -> str:
    """Content address of a witness: everything except the timestamp."""
    payload = witness.model_dump(mode="json", exclude={"timestamp"})
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def lp_certificates(cache: InvariantCache) -> WitnessCertificates:
    """
    The fractional cover, fractional matching and fractional edge coloring of an instance.
    A certificate whose computation exceeds its budget is left out.
    """
    fields = {}
    try:
        _, fields["fractional_cover"], fields["fractional_matching"] = cache.get("tau_star_w_solution")
    except SearchBudgetExceededError as e:
        logger.warning("witness stored without fractional cover and matching: %s", e)
    try:
        fields["fractional_coloring"] = cache.get("chi_star_e_solution")[1]
    except SearchBudgetExceededError as e:
        logger.warning("witness stored without fractional edge coloring: %s", e)
    return WitnessCertificates(**fields)


def certificate_mismatches(certificates: WitnessCertificates, cache: InvariantCache) -> List[str]:
    """Re-checks stored certificates: feasibility on the instance and totals against the recomputed optima."""
    family, weights = cache.family, cache.weights
    mismatches: List[str] = []
    totals: List[Tuple[str, Fraction, str]] = []
    if certificates.fractional_cover is not None:
        cover = certificates.fractional_cover
        mismatches += [f"fractional cover: {p}" for p in fractional_cover_violations(family, weights, cover)]
        totals.append(("fractional cover", cover.total, "tau_star_w"))
    if certificates.fractional_matching is not None:
        matching = certificates.fractional_matching
        mismatches += [f"fractional matching: {p}" for p in fractional_matching_violations(family, matching)]
        totals.append(("fractional matching", matching.total(weights), "tau_star_w"))
    if certificates.fractional_coloring is not None:
        coloring = certificates.fractional_coloring
        mismatches += [f"fractional coloring: {p}" for p in fractional_coloring_violations(family, coloring)]
        totals.append(("fractional coloring", coloring.value, "chi_star_e"))

    for name, total, invariant in totals:
        try:
            optimum = Fraction(cache.get(invariant))
        except DIntervalError as e:
            mismatches.append(f"{name}: recomputation of {invariant} failed ({e})")
            continue
        if total != optimum:
            mismatches.append(
                f"{name}: total {format_rational(total)}, recomputed {invariant} {format_rational(optimum)}"
            )
    return mismatches


def make_witness(
    instance: Instance,
    invariants: Dict[str, Fraction],
    provenance: Provenance,
    target: Optional[SearchTarget] = None,
    ratios: Optional[Dict[str, Fraction]] = None,
) -> Witness:
    """Bundles an instance with its invariants, ratios and freshly computed LP certificates."""
    return Witness(
        schema_version=WITNESS_SCHEMA_VERSION,
        target=target,
        instance=instance,
        invariants=dict(sorted(invariants.items())),
        ratios=dict(sorted((ratios or {}).items())),
        certificates=lp_certificates(InvariantCache(instance.family, instance.weight_system())),
        timestamp=datetime.now(timezone.utc),
        provenance=provenance,
    )


class WitnessStore:
    """
    A flat directory of witness JSON files with a manifest.

    Layout:
        <root>/manifest.json
        <root>/<target slug>/<sha256>.json     retained search witnesses
        <root>/conjectures/<sha256>.json       instances with a tight or violated conjecture row

    File names are content addresses, so saving the same witness twice is a no-op.
    """

    def __init__(self, console: Console, root: Optional[Path] = None):
        self.console = console
        self.root = verify_directories(root)

    @property
    def manifest_path(self) -> Path:
        return self.root / MANIFEST_NAME

    def _read_manifest(self) -> Dict[str, dict]:
        if not self.manifest_path.exists():
            return {}
        with open(self.manifest_path, 'r', encoding='utf-8') as f:
            return json.load(f)

    def _write_manifest(self, manifest: Dict[str, dict]) -> None:
        with open(self.manifest_path, 'w', encoding='utf-8') as f:
            json.dump(dict(sorted(manifest.items())), f, indent=2, sort_keys=True)

    def save(self, witness: Witness, directory: Optional[str] = None) -> Path:
        """Persists a witness under `directory` (default: its target's slug) and records it in the manifest."""
        folder = self.root / (directory or target_slug(witness.target))
        folder.mkdir(parents=True, exist_ok=True)
        path = folder / f"{witness_digest(witness)}.json"
        relative = path.relative_to(self.root).as_posix()
        if path.exists():
            self.console.log(f"Witness already stored: [cyan]{relative}[/cyan]")
            return path

        with open(path, 'w', encoding='utf-8') as f:
            f.write(witness.model_dump_json(indent=2))
        manifest = self._read_manifest()
        manifest[relative] = {
            "instance_id": instance_id(witness.instance.family, witness.instance.weight_system()),
            "target": witness.target.value if witness.target else None,
            "ratios": {name: format_rational(value) for name, value in witness.ratios.items()},
            "source": witness.provenance.source,
        }
        self._write_manifest(manifest)
        self.console.log(f"[green]✓ Witness saved to [cyan]{relative}[/cyan][/green]")
        return path

    def save_conjecture_hit(self, report: BoundReport, instance: Instance, provenance: Provenance) -> Path:
        """Stores an instance whose report has conjecture rows with slack <= 0."""
        ratios = {
            row.name: row.lhs / row.rhs
            for row in report.conjecture_hits()
            if row.lhs is not None and row.rhs
        }
        witness = make_witness(instance, report.invariants, provenance, ratios=ratios)
        return self.save(witness, CONJECTURES_DIR)

    def load(self, path: Path) -> Witness:
        with open(path, 'r', encoding='utf-8') as f:
            return Witness.model_validate_json(f.read())

    def witnesses(self) -> List[Tuple[Path, Witness]]:
        """Every witness listed in the manifest, in manifest order."""
        return [(self.root / relative, self.load(self.root / relative)) for relative in self._read_manifest()]

    def replay(self, witness: Witness, budget: Optional[int] = None) -> List[str]:
        """
        Recomputes every stored invariant and ratio exactly and re-checks the LP certificates.
        Returns the list of mismatches (empty when the witness replays bit-exactly).
        """
        instance = witness.instance
        family, weights = instance.family, instance.weight_system()
        try:
            ensure_valid(family, weights)
        except DIntervalError as e:
            return [f"stored instance is invalid: {e}"]

        cache = InvariantCache(family, weights, budget)
        mismatches: List[str] = []
        for name, stored in witness.invariants.items():
            try:
                value = Fraction(cache.get(name))
            except KeyError:
                mismatches.append(f"unknown invariant '{name}'")
                continue
            except DIntervalError as e:
                mismatches.append(f"{name}: recomputation failed ({e})")
                continue
            if value != stored:
                mismatches.append(f"{name}: stored {format_rational(stored)}, recomputed {format_rational(value)}")

        targets = {t.value: t for t in SearchTarget}
        for name, stored in witness.ratios.items():
            if name not in targets:
                continue  # conjecture-row ratios are derived from the invariants above
            try:
                value = target_ratio(targets[name], cache)
            except DIntervalError as e:
                mismatches.append(f"ratio {name}: recomputation failed ({e})")
                continue
            if value != stored:
                mismatches.append(f"ratio {name}: stored {format_rational(stored)}, recomputed {format_rational(value)}")

        mismatches += certificate_mismatches(witness.certificates, cache)
        return mismatches

    def replay_all(self, budget: Optional[int] = None) -> Dict[Path, List[str]]:
        """Replays every witness in the store; maps each path to its mismatches."""
        results: Dict[Path, List[str]] = {}
        for path, witness in self.witnesses():
            results[path] = self.replay(witness, budget)
            if results[path]:
                self.console.log(f"[red]✗ {path.name}: {len(results[path])} mismatch(es)[/red]")
            else:
                self.console.log(f"[green]✓ {path.name} replays exactly[/green]")
        return results
