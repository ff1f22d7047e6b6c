"""SSIM axioms, difference images, grade, and impact report assembly."""

import numpy as np
import pytest

from advlab.attacks import AttackTrajectory
from advlab.metrics import (
    SsimParams,
    build_impact_report,
    diff_image,
    grade,
    ssim,
)

from oracles import oracle_ssim


def image(seed, c=1, h=16, w=16):
    return np.random.default_rng(seed).uniform(0, 1, size=(c, h, w)).astype(np.float32)


class TestSsim:
    def test_identity(self):
        for seed in range(5):
            x = image(seed)
            assert abs(ssim(x, x) - 1.0) <= 1e-6

    def test_constant_images_closed_form(self):
        c1 = SsimParams().c1
        a = np.zeros((1, 16, 16), dtype=np.float32)
        b = np.ones((1, 16, 16), dtype=np.float32)
        assert abs(ssim(a, b) - c1 / (1 + c1)) <= 1e-6

    def test_matches_reference_oracle(self):
        x = image(7)
        rng = np.random.default_rng(8)
        y = np.clip(x + rng.uniform(-0.1, 0.1, size=x.shape), 0, 1).astype(np.float32)
        assert abs(ssim(x, y) - oracle_ssim(x, y)) <= 1e-6

    def test_symmetry_and_bound(self):
        for seed in range(8):
            a, b = image(seed), image(seed + 100)
            assert abs(ssim(a, b) - ssim(b, a)) <= 1e-6
            assert ssim(a, b) <= 1.0

    def test_small_image_global_window(self):
        a = image(1, h=4, w=4)
        b = image(2, h=4, w=4)
        assert abs(ssim(a, a) - 1.0) <= 1e-6
        assert -1.0 <= ssim(a, b) <= 1.0

    def test_multichannel_average(self):
        a, b = image(3, c=3), image(4, c=3)
        per_channel = [ssim(a[i], b[i]) for i in range(3)]
        assert ssim(a, b) == pytest.approx(np.mean(per_channel), abs=1e-9)

    def test_noise_monotonicity(self):
        sigmas = [0.02, 0.05, 0.1, 0.2]
        means = []
        for sigma in sigmas:
            vals = []
            for seed in range(20):
                x = image(seed)
                noise = np.random.default_rng(1000 + seed).normal(0, sigma, x.shape)
                vals.append(ssim(x, np.clip(x + noise, 0, 1).astype(np.float32)))
            means.append(np.mean(vals))
        assert all(b < a for a, b in zip(means, means[1:]))

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="shapes"):
            ssim(image(0), image(0, h=8))


class TestDiffImage:
    def test_identical_gives_zero(self):
        x = image(5)
        assert np.all(diff_image(x, x) == 0)

    def test_single_pixel_rescaled_to_one(self):
        a = np.zeros((1, 8, 8), dtype=np.float32)
        b = a.copy()
        b[0, 3, 4] = 0.05
        d = diff_image(a, b)
        assert d[0, 3, 4] == 1.0
        assert d.sum() == 1.0


class TestGrade:
    def test_no_flip_is_zero(self):
        assert grade(0.0, 0.99) == 0.0

    def test_perfect(self):
        assert grade(1.0, 1.0) == 1.0

    def test_product(self):
        assert grade(0.5, 0.9) == pytest.approx(0.45, abs=1e-12)

    def test_similarity_clamped(self):
        assert grade(1.0, 1.7) == 1.0
        assert grade(1.0, -0.2) == 0.0

    def test_rate_validated(self):
        with pytest.raises(ValueError):
            grade(1.2, 0.5)


def flip_predictor(originals, adversarials):
    """Classifies any stacked batch: 0 for states equal to an original,
    1 otherwise."""
    keys = {o.tobytes() for o in originals}

    def predict(xb):
        out = np.zeros((len(xb), 2), dtype=np.float32)
        for i, x in enumerate(xb):
            cls = 0 if x.tobytes() in keys else 1
            out[i, cls] = 1.0
        return out

    return predict


class TestImpactReport:
    def test_zero_epsilon_report(self):
        x = [image(i) for i in range(4)]
        trajs = [AttackTrajectory((xi, xi.copy()), (0, 0), (None, None)) for xi in x]
        rep = build_impact_report(flip_predictor(x, x), trajs, [0, 0, 1, 0])
        assert rep.adversarial_accuracy == rep.original_accuracy
        assert rep.similarity_avg == rep.similarity_max == rep.similarity_min == pytest.approx(1.0, abs=1e-6)
        assert rep.grade == 0.0

    def test_singleton_misclassified(self):
        x = image(9)
        rng = np.random.default_rng(10)
        adv = np.clip(x + rng.uniform(-0.02, 0.02, x.shape), 0, 1).astype(np.float32)
        s = ssim(x, adv)
        traj = AttackTrajectory((x, adv), (0, 1), (None, None))
        rep = build_impact_report(flip_predictor([x], [adv]), [traj], [0])
        assert rep.similarity_min == rep.similarity_max == rep.similarity_avg == pytest.approx(s, abs=1e-9)
        assert rep.grade == pytest.approx(s, abs=1e-9)
        assert rep.original_accuracy == 1.0 and rep.adversarial_accuracy == 0.0

    def test_similarity_ordering_invariant(self):
        originals = [image(i) for i in range(6)]
        trajs = []
        for i, x in enumerate(originals):
            rng = np.random.default_rng(50 + i)
            adv = np.clip(x + rng.normal(0, 0.01 + 0.02 * i, x.shape), 0, 1).astype(np.float32)
            trajs.append(AttackTrajectory((x, adv), (0, 1), (None, None)))
        rep = build_impact_report(
            flip_predictor(originals, None), trajs, [0] * 6
        )
        assert rep.similarity_min <= rep.similarity_avg <= rep.similarity_max
        per_sample = [s.similarity for s in rep.samples]
        assert rep.similarity_max == pytest.approx(max(per_sample))
        assert rep.similarity_min == pytest.approx(min(per_sample))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            build_impact_report(lambda xb: None, [], [])
