import unittest

import numpy as np

from metaxfer.meta.split import ClassTooSmall, holdout_count, stratified_split


class TestStratifiedSplit(unittest.TestCase):
    def test_balanced(self):
        y = np.array([0] * 10 + [1] * 10)
        split = stratified_split(y, 0.2, np.random.default_rng(0))
        self.assertEqual(16, len(split.train_rows))
        self.assertEqual(4, len(split.test_rows))
        self.assertEqual([2, 2], np.bincount(y[split.test_rows]).tolist())

    def test_holdout_count(self):
        self.assertEqual(1, holdout_count(3, 0.2))
        self.assertEqual(1, holdout_count(2, 0.2))
        self.assertEqual(1, holdout_count(2, 0.9))
        self.assertEqual(2, holdout_count(10, 0.2))
        # half rounds up
        self.assertEqual(4, holdout_count(7, 0.5))
        self.assertEqual(3, holdout_count(13, 0.2))

    def test_small_class_clamped(self):
        y = np.array([0, 0, 0] + [1] * 10)
        split = stratified_split(y, rng=np.random.default_rng(1))
        self.assertEqual(1, int((y[split.test_rows] == 0).sum()))

    def test_partition_and_proportions(self):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            sizes = rng.integers(2, 30, size=int(rng.integers(2, 5)))
            y = rng.permutation(np.repeat(np.arange(len(sizes)), sizes))
            split = stratified_split(y, 0.2, rng)

            rows = np.concatenate([split.train_rows, split.test_rows])
            self.assertEqual(len(y), len(rows))
            np.testing.assert_array_equal(np.arange(len(y)), np.sort(rows))
            for c, n_c in enumerate(sizes):
                share = (y[split.test_rows] == c).sum() / n_c
                self.assertLessEqual(abs(share - 0.2), 1.0 / n_c)
                self.assertGreaterEqual((y[split.train_rows] == c).sum(), 1)

    def test_deterministic(self):
        y = np.arange(50) % 3
        a = stratified_split(y, rng=np.random.default_rng(9))
        b = stratified_split(y, rng=np.random.default_rng(9))
        np.testing.assert_array_equal(a.test_rows, b.test_rows)
        np.testing.assert_array_equal(a.train_rows, b.train_rows)

    def test_errors(self):
        self.assertRaises(ClassTooSmall, stratified_split, [0, 0, 1], 0.2, 0)
        self.assertRaises(ValueError, stratified_split, [0, 0, 1, 1], 0.0, 0)
        self.assertRaises(ValueError, stratified_split, [0, 0, 1, 1], 1.0, 0)


if __name__ == '__main__':
    unittest.main()
