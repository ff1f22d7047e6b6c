"""Fixture-scale derived checks: generator properties, defense effects on
the real fixture, and independent recomputation of the impact metrics."""

import numpy as np
import pytest

from advlab import net as N
from advlab.attacks import AttackConfig, run_attack
from advlab.defenses import (
    DefenseConfig,
    DimReductionConfig,
    defend_embedding,
    defend_input,
    embed,
    evaluate_defense,
    fit_autoencoder,
)
from advlab.fixture import generate_toy_fixture, make_dataset
from advlab.metrics import SsimParams, build_impact_report
from advlab.xai import compute_frequency_table

from oracles import oracle_ssim


@pytest.fixture(scope="module")
def attack_leg(toy_bundle):
    runs = run_attack(toy_bundle.network, toy_bundle.test, AttackConfig("fgsm", 0.1),
                      32, seed=7)
    indices = [i for i, _ in runs]
    report = build_impact_report(
        toy_bundle.network, [t for _, t in runs], toy_bundle.test.labels[indices],
        SsimParams(), indices,
    )
    return runs, indices, report


class TestGenerator:
    def test_class_balance_exact(self):
        rng = np.random.default_rng(3)
        data = make_dataset(rng, 200)
        assert int((data.labels == 0).sum()) == 100

    def test_same_seed_same_bundle(self, toy_bundle):
        again = generate_toy_fixture(42)
        assert np.array_equal(again.test.inputs, toy_bundle.test.inputs)
        for a, b in zip(again.network.layers, toy_bundle.network.layers):
            if hasattr(a, "weights"):
                assert np.array_equal(a.weights, b.weights)

    def test_pixels_in_unit_range(self, toy_bundle):
        for batch in (toy_bundle.train, toy_bundle.test):
            assert batch.inputs.min() >= 0.0 and batch.inputs.max() <= 1.0


class TestImpactReportAgainstIndependentScript:
    def test_six_metrics_recomputed(self, toy_bundle, attack_leg):
        runs, indices, report = attack_leg
        net = toy_bundle.network
        labels = toy_bundle.test.labels[indices]

        originals = np.stack([t.original for _, t in runs])
        adversarials = np.stack([t.adversarial for _, t in runs])
        pred_orig = N.forward(net, originals).argmax(axis=1)
        pred_adv = N.forward(net, adversarials).argmax(axis=1)
        sims = np.array([oracle_ssim(o, a) for o, a in zip(originals, adversarials)])

        assert report.original_accuracy == pytest.approx(
            float((pred_orig == labels).mean()), abs=1e-12)
        assert report.adversarial_accuracy == pytest.approx(
            float((pred_adv == labels).mean()), abs=1e-12)
        assert report.similarity_avg == pytest.approx(float(sims.mean()), abs=1e-6)
        assert report.similarity_max == pytest.approx(float(sims.max()), abs=1e-6)
        assert report.similarity_min == pytest.approx(float(sims.min()), abs=1e-6)
        rate = float((pred_adv != pred_orig).mean())
        assert report.grade == pytest.approx(
            rate * min(max(float(sims.mean()), 0.0), 1.0), abs=1e-6)


class TestDiffImagesOnFixture:
    def test_fgsm_diff_is_binary_away_from_pixel_range_walls(self, attack_leg):
        # fgsm moves every pixel by exactly eps (or 0 where the gradient is
        # flat, or less where [0,1] clipping bites), so the rescaled diff is
        # 0 or 1 except at clipped pixels
        runs, _, _ = attack_leg
        eps = 0.1
        for _, traj in runs[:8]:
            x, adv = traj.original, traj.adversarial
            from advlab.metrics import diff_image

            d = diff_image(x, adv)
            assert d.min() >= 0.0 and d.max() <= 1.0
            interior = (x >= eps) & (x <= 1.0 - eps)
            vals = d[interior]
            near_binary = (np.abs(vals) <= 1e-5) | (np.abs(vals - 1.0) <= 1e-5)
            assert near_binary.all()


class TestFilterDefensesOnFixture:
    def test_input_filter_recovers_accuracy(self, toy_bundle, attack_leg):
        runs, indices, report = attack_leg
        ae = fit_autoencoder(toy_bundle.test.inputs, DimReductionConfig(), seed=7)
        adversarials = np.stack([t.adversarial for _, t in runs])
        labels = toy_bundle.test.labels[indices]
        defended = float(
            (defend_input(ae, toy_bundle.network, adversarials).argmax(1) == labels).mean()
        )
        assert defended >= report.adversarial_accuracy

    def test_embedding_filter_recovers_accuracy(self, toy_bundle, attack_leg):
        runs, indices, report = attack_leg
        embeddings = embed(toy_bundle.network, toy_bundle.test.inputs)
        ae = fit_autoencoder(embeddings, DimReductionConfig(), seed=7)
        adversarials = np.stack([t.adversarial for _, t in runs])
        labels = toy_bundle.test.labels[indices]
        defended = float(
            (defend_embedding(toy_bundle.network, ae, adversarials).argmax(1)
             == labels).mean()
        )
        assert defended >= report.adversarial_accuracy

    def test_defense_report_consistent_with_manual_leg(self, toy_bundle):
        cfg = DefenseConfig("dim_reduction_input", DimReductionConfig())
        rep = evaluate_defense(
            toy_bundle.network, toy_bundle.test, AttackConfig("fgsm", 0.1), cfg,
            32, seed=7,
        )
        ae = fit_autoencoder(toy_bundle.test.inputs, DimReductionConfig(), seed=7)
        adversarials = np.stack([s.adversarial for s in rep.baseline.samples])
        labels = np.array([s.true_label for s in rep.baseline.samples])
        manual = float(
            (defend_input(ae, toy_bundle.network, adversarials).argmax(1) == labels).mean()
        )
        assert rep.defended.adversarial_accuracy == pytest.approx(manual, abs=1e-12)


class TestFrequencyTableOnFixture:
    def test_matches_brute_force_counts(self, toy_bundle):
        net = toy_bundle.network
        data = toy_bundle.test
        table = compute_frequency_table(net, data, net.embedding_index, tau=0.0)
        for c in range(net.class_count):
            members = [i for i in range(len(data)) if data.labels[i] == c]
            counts = np.zeros(table.width)
            for i in members:
                acts = N.record_activations(net, data.inputs[i], net.embedding_index)
                counts += acts > 0.0
            assert np.allclose(table.frequencies[c], counts / len(members), atol=1e-12)
