import numpy as np
import pytest

from transwass import (GRID_CLASSES, InputError, generate_grid_image,
                       generate_synthetic)


class TestPointClouds:
    def test_random_reproducible_simplex(self):
        a = generate_synthetic("random", 4, 2, seed=42)
        b = generate_synthetic("random", 4, 2, seed=42)
        assert np.array_equal(a.weights, b.weights)
        assert np.array_equal(a.positions, b.positions)
        assert a.weights.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(a.weights > 0)

    def test_seeds_differ(self):
        a = generate_synthetic("random", 10, 2, seed=1)
        b = generate_synthetic("random", 10, 2, seed=2)
        assert not np.array_equal(a.positions, b.positions)

    def test_single_atom(self):
        mu = generate_synthetic("smooth", 1, 3, seed=0)
        assert mu.size == 1
        assert mu.weights[0] == pytest.approx(1.0)

    def test_smooth_weights_have_lower_variation(self):
        # sorted-by-position total variation: smooth << random, on average
        def tv(mu):
            order = np.argsort(mu.positions[:, 0])
            return np.abs(np.diff(mu.weights[order])).sum()

        n = 300
        smooth = np.mean([tv(generate_synthetic("smooth", n, 1, s))
                          for s in range(20)])
        rough = np.mean([tv(generate_synthetic("random", n, 1, s))
                         for s in range(20)])
        assert smooth < rough

    def test_unknown_kind(self):
        with pytest.raises(InputError):
            generate_synthetic("spiky", 10, 2, 0)

    def test_rejects_bad_sizes(self):
        with pytest.raises(InputError):
            generate_synthetic("random", 0, 2, 0)
        with pytest.raises(InputError):
            generate_synthetic("random", 5, 0, 0)


class TestGridImages:
    @pytest.mark.parametrize("cls", GRID_CLASSES)
    def test_every_class_valid(self, cls):
        img = generate_grid_image(cls, 32, seed=0)
        assert img.shape == (32, 32)
        assert np.all(img >= 0)
        assert img.sum() > 0

    def test_reproducible(self):
        a = generate_grid_image("bumps3", 16, seed=9)
        b = generate_grid_image("bumps3", 16, seed=9)
        assert np.array_equal(a, b)

    def test_classes_distinct(self):
        a = generate_grid_image("bumps3", 16, seed=0)
        b = generate_grid_image("noise", 16, seed=0)
        assert not np.array_equal(a, b)

    def test_unknown_class(self):
        with pytest.raises(InputError):
            generate_grid_image("mystery", 16, 0)
