import math
from collections import namedtuple

import numpy as np

from metaxfer.meta.dataset import DatasetError


__all__ = ['SplitIndices', 'ClassTooSmall', 'stratified_split', 'holdout_count']

SplitIndices = namedtuple('SplitIndices', ['train_rows', 'test_rows'])


class ClassTooSmall(DatasetError):
    """Raised when a class has fewer than 2 members and cannot be on both sides of a split"""


def holdout_count(n_c, test_fraction):
    """round-half-up(test_fraction * n_c) clamped to [1, n_c - 1]"""
    return int(min(max(math.floor(test_fraction * n_c + 0.5), 1), n_c - 1))


def stratified_split(y, test_fraction=0.2, rng=None):
    """ Stratified hold-out split.

    Parameters
    ----------
    y : integer labels
    test_fraction : share of every class sent to the test side
    rng : numpy Generator (or seed) choosing the test members of each class

    Returns
    -------
    SplitIndices with sorted, disjoint train and test row indices covering every row once
    """
    if not 0.0 < test_fraction < 1.0:
        raise ValueError('test_fraction must be in (0, 1)')
    rng = np.random.default_rng(rng)
    y = np.asarray(y)

    test = []
    for c in np.unique(y):
        members = np.flatnonzero(y == c)
        if len(members) < 2:
            raise ClassTooSmall('class %s has %d member(s), need at least 2' % (c, len(members)))
        test.append(rng.permutation(members)[:holdout_count(len(members), test_fraction)])

    test_rows = np.sort(np.concatenate(test)) if test else np.array([], dtype=np.int64)
    mask = np.ones(len(y), dtype=bool)
    mask[test_rows] = False
    return SplitIndices(np.flatnonzero(mask), test_rows)
