import unittest

import numpy as np

from metaxfer.nn.adam import TrainConfig, train
from metaxfer.nn.mlp import ShapeMismatch, forward, he_init
from metaxfer.nn.transfer import TransferConfig, freeze_mask_for, transplant


class TestFreezeMask(unittest.TestCase):
    def test_levels(self):
        self.assertEqual((False, False, False), freeze_mask_for(0))
        self.assertEqual((True, False, False), freeze_mask_for(1))
        self.assertEqual((True, True, False), freeze_mask_for(2))

    def test_invalid(self):
        for level in (3, -1, '1', None):
            self.assertRaises(ValueError, freeze_mask_for, level)
        self.assertRaises(ValueError, TransferConfig, he_init((2, 3, 3, 2), 0), 3)

    def test_label(self):
        self.assertEqual('1HL', TransferConfig(he_init((2, 3, 3, 2), 0), 1).label)


class TestTransplant(unittest.TestCase):
    def setUp(self):
        self.source = he_init((6, 8, 5, 4), 0)
        self.before = self.source.copy()

    def test_hidden_layers_copied(self):
        for level in (0, 1, 2):
            model = transplant(self.source, 3, TransferConfig(self.source, level, seed=1))
            self.assertEqual(freeze_mask_for(level), model.freeze_mask)
            for (Ws, bs), (Wt, bt) in zip(self.source.layers[:2], model.layers[:2]):
                np.testing.assert_array_equal(Ws, Wt)
                np.testing.assert_array_equal(bs, bt)
                self.assertIsNot(Ws, Wt)
            self.assertEqual((3, 5), model.layers[2][0].shape)
            self.assertFalse(model.layers[2][1].any())
        self.assertTrue(self.source.equals(self.before))

    def test_output_layer_seeded(self):
        cfg = TransferConfig(self.source, 0, seed=7)
        a = transplant(self.source, 3, cfg)
        b = transplant(self.source, 3, cfg)
        c = transplant(self.source, 3, TransferConfig(self.source, 0, seed=8))
        np.testing.assert_array_equal(a.layers[2][0], b.layers[2][0])
        self.assertFalse(np.array_equal(a.layers[2][0], c.layers[2][0]))

    def test_training_keeps_frozen_hidden_layers(self):
        model = transplant(self.source, 2, TransferConfig(self.source, 2, seed=3))
        rng = np.random.default_rng(4)
        X = rng.uniform(size=(30, 6))
        y = np.arange(30) % 2
        trained, _ = train(model, X, y, TrainConfig(epochs=20, batch_size=8))
        for (Ws, bs), (Wt, bt) in zip(self.source.layers[:2], trained.layers[:2]):
            np.testing.assert_array_equal(Ws, Wt)
            np.testing.assert_array_equal(bs, bt)
        self.assertFalse(np.array_equal(model.layers[2][0], trained.layers[2][0]))

    def test_same_hidden_representation(self):
        model = transplant(self.source, 2, TransferConfig(self.source, 1, seed=5))
        X = np.random.default_rng(6).uniform(size=(10, 6))
        _, source_cache = forward(self.source, X)
        _, target_cache = forward(model, X)
        np.testing.assert_array_equal(source_cache.A1, target_cache.A1)
        np.testing.assert_array_equal(source_cache.A2, target_cache.A2)

    def test_shape_checks(self):
        cfg = TransferConfig(self.source, 0)
        self.assertRaises(ShapeMismatch, transplant, self.source, 3, cfg, target_input_dim=7)
        self.assertRaises(ShapeMismatch, transplant, self.source, 3, cfg, hidden_sizes=(8, 6))
        self.assertRaises(ShapeMismatch, transplant, self.source, 1, cfg)
        model = transplant(self.source, 3, cfg, target_input_dim=6, hidden_sizes=(8, 5))
        self.assertEqual((6, 8, 5, 3), model.sizes)


if __name__ == '__main__':
    unittest.main()
