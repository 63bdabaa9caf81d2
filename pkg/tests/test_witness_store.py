# tests/test_witness_store.py

import json
from fractions import Fraction

import pytest

from src.dinterval_lab.bounds.report import instance_id, verify_bounds
from src.dinterval_lab.core.models import (
    FractionalCover,
    FractionalMatching,
    Instance,
    Point,
    Provenance,
    SearchTarget,
    WeightSystem,
    WitnessCertificates,
)
from src.dinterval_lab.services.witness_store import (
    CONJECTURES_DIR,
    MANIFEST_NAME,
    WitnessStore,
    make_witness,
    target_slug,
    witness_digest,
)
from tests.families import TRIANGLE, WALECKI2


def walecki_witness():
    report = verify_bounds(WALECKI2)
    return make_witness(
        Instance.of(WALECKI2),
        report.invariants,
        Provenance(source="walecki"),
        target=SearchTarget.TAU_STAR_OVER_NU,
        ratios={"tau_star/nu": Fraction(2)},
    )


@pytest.fixture
def store(quiet_console, tmp_path):
    return WitnessStore(quiet_console, tmp_path / "store")


class TestTargetSlug:
    @pytest.mark.parametrize("target, slug", [
        (SearchTarget.TAU_STAR_OVER_NU, "tau_star_nu"),
        (SearchTarget.TAU_W_OVER_NU_W, "tau_w_nu_w"),
        (SearchTarget.CHI_E_OVER_D_DELTA, "chi_e_d_delta"),
        (None, "untargeted"),
    ])
    def test_slug(self, target, slug):
        assert target_slug(target) == slug


class TestWitnessDigest:
    def test_ignores_the_timestamp(self):
        first, second = walecki_witness(), walecki_witness()
        assert witness_digest(first) == witness_digest(second)

    def test_depends_on_the_content(self):
        witness = walecki_witness()
        other = witness.model_copy(update={"provenance": Provenance(source="random", seed=1, iteration=0)})
        assert witness_digest(witness) != witness_digest(other)


class TestWitnessStore:
    def test_creates_the_root(self, store):
        assert store.root.is_dir()

    def test_save_and_load(self, store):
        witness = walecki_witness()
        path = store.save(witness)
        assert path.parent.name == "tau_star_nu"
        assert path.name == f"{witness_digest(witness)}.json"
        loaded = store.load(path)
        assert witness_digest(loaded) == witness_digest(witness)
        assert loaded.invariants["tau_star"] == 2

    def test_rationals_are_stored_as_strings(self, store):
        path = store.save(walecki_witness())
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["ratios"] == {"tau_star/nu": "2/1"}

    def test_save_is_idempotent(self, store):
        first = store.save(walecki_witness())
        second = store.save(walecki_witness())
        assert first == second
        manifest = json.loads((store.root / MANIFEST_NAME).read_text(encoding="utf-8"))
        assert list(manifest) == [first.relative_to(store.root).as_posix()]

    def test_manifest_entry(self, store):
        path = store.save(walecki_witness())
        manifest = json.loads((store.root / MANIFEST_NAME).read_text(encoding="utf-8"))
        entry = manifest[path.relative_to(store.root).as_posix()]
        assert entry == {
            "instance_id": instance_id(WALECKI2),
            "target": "tau_star/nu",
            "ratios": {"tau_star/nu": "2/1"},
            "source": "walecki",
        }

    def test_conjecture_hit(self, store):
        report = verify_bounds(WALECKI2)
        path = store.save_conjecture_hit(report, Instance.of(WALECKI2), Provenance(source="verify"))
        assert path.parent.name == CONJECTURES_DIR
        witness = store.load(path)
        assert witness.target is None
        assert witness.ratios["edge_coloring_d_degree"] == 1
        assert store.replay(witness) == []


class TestReplay:
    def test_exact_replay(self, store):
        store.save(walecki_witness())
        results = store.replay_all()
        assert list(results.values()) == [[]]

    def test_weighted_replay(self, store):
        weights = WeightSystem(weights=(2, 3, 4))
        report = verify_bounds(TRIANGLE, weights)
        witness = make_witness(Instance.of(TRIANGLE, weights), report.invariants, Provenance(source="file"))
        assert store.replay(witness) == []

    def test_tampered_invariant(self, store):
        witness = walecki_witness()
        tampered = witness.model_copy(update={"invariants": {**witness.invariants, "nu": Fraction(2)}})
        assert store.replay(tampered) == ["nu: stored 2/1, recomputed 1/1"]

    def test_tampered_ratio(self, store):
        witness = walecki_witness()
        tampered = witness.model_copy(update={"ratios": {"tau_star/nu": Fraction(5, 2)}})
        assert store.replay(tampered) == ["ratio tau_star/nu: stored 5/2, recomputed 2/1"]

    def test_unknown_invariant(self, store):
        witness = walecki_witness()
        tampered = witness.model_copy(update={"invariants": {"girth": Fraction(3)}})
        assert store.replay(tampered) == ["unknown invariant 'girth'"]

    def test_budget_failure_is_a_mismatch(self, store):
        mismatches = store.replay(walecki_witness(), budget=1)
        assert any("recomputation failed" in m for m in mismatches)

    def test_tampered_file_on_disk(self, store):
        path = store.save(walecki_witness())
        payload = json.loads(path.read_text(encoding="utf-8"))
        payload["invariants"]["chi_e"] = "3/1"
        path.write_text(json.dumps(payload), encoding="utf-8")
        assert store.replay_all()[path] == ["chi_e: stored 3/1, recomputed 4/1"]


class TestCertificates:
    def test_stored_with_the_witness(self, store):
        witness = walecki_witness()
        certificates = witness.certificates
        assert certificates.fractional_cover.total == 2
        assert certificates.fractional_matching.total() == 2
        assert certificates.fractional_coloring.value == 4

        loaded = store.load(store.save(witness))
        assert loaded.certificates == certificates

    def test_rationals_in_certificates(self, store):
        path = store.save(walecki_witness())
        certificates = json.loads(path.read_text(encoding="utf-8"))["certificates"]
        assert all("/" in entry["value"] for entry in certificates["fractional_cover"]["values"])
        assert all("/" in value for value in certificates["fractional_matching"]["values"].values())
        assert certificates["fractional_coloring"]["value"] == "4/1"

    def test_weighted_certificates(self, store):
        weights = WeightSystem(weights=(2, 3, 4))
        witness = make_witness(Instance.of(TRIANGLE, weights), {}, Provenance(source="file"))
        assert witness.certificates.fractional_matching.total(weights) == witness.certificates.fractional_cover.total
        assert store.replay(store.load(store.save(witness, "weighted"))) == []

    def test_infeasible_cover(self, store):
        witness = walecki_witness()
        cover = FractionalCover(values={Point(line=0, pos=1): Fraction(2)})
        tampered = witness.model_copy(update={
            "certificates": witness.certificates.model_copy(update={"fractional_cover": cover}),
        })
        mismatches = store.replay(tampered)
        assert mismatches
        assert all(m.startswith("fractional cover: edge") for m in mismatches)

    def test_oversaturated_matching(self, store):
        witness = walecki_witness()
        matching = FractionalMatching(values={0: Fraction(1), 1: Fraction(1)})
        tampered = witness.model_copy(update={
            "certificates": witness.certificates.model_copy(update={"fractional_matching": matching}),
        })
        mismatches = store.replay(tampered)
        assert any(m.startswith("fractional matching: point") for m in mismatches)

    def test_wrong_coloring_value(self, store):
        witness = walecki_witness()
        coloring = witness.certificates.fractional_coloring.model_copy(update={"value": Fraction(3)})
        tampered = witness.model_copy(update={
            "certificates": witness.certificates.model_copy(update={"fractional_coloring": coloring}),
        })
        assert store.replay(tampered) == [
            "fractional coloring: weights add up to 4/1, not 3/1",
            "fractional coloring: total 3/1, recomputed chi_star_e 4/1",
        ]

    def test_witness_without_certificates(self, store):
        witness = walecki_witness().model_copy(update={"certificates": WitnessCertificates()})
        assert store.replay(witness) == []
