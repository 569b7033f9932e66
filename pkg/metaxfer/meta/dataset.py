"""
Meta-datasets: one row per problem instance, labelled with the algorithm that performed best on it.
"""
import hashlib
import json
import os

import numpy as np
import pandas as pd

import metaxfer.util.log as log


__all__ = ['MetaDataset', 'DatasetError', 'DegenerateDataset', 'EmptyCollection', 'derive_labels', 'choose_k',
           'save_meta_dataset', 'load_meta_dataset', 'PAR_FACTOR', 'MIN_INSTANCES', 'MIN_CLASS_SIZE']

logger = log.get_logger(__name__)

PAR_FACTOR = 10.0
MIN_INSTANCES = 10
MIN_CLASS_SIZE = 2
LABEL_COLUMN = 'label'


class DatasetError(Exception):
    """Base class for meta-dataset errors"""


class DegenerateDataset(DatasetError):
    """Raised when too few instances or classes survive label derivation"""


class EmptyCollection(DatasetError):
    """Raised when an operation over several datasets receives none"""


class MetaDataset(object):
    """ Meta-features X of problem instances with the best algorithm as integer label y.

    Parameters
    ----------
    name : str
    X : (n, d) array, NaN marks MISSING before preprocessing
    y : (n,) integer labels in [0, C)
    feature_names : d names
    class_names : C algorithm ids
    instance_ids : n instance ids, optional
    """
    def __init__(self, name, X, y, feature_names, class_names, instance_ids=None):
        self.name = name
        self.X = np.asarray(X, dtype=np.float64)
        self.y = np.asarray(y, dtype=np.int64)
        self.feature_names = tuple(feature_names)
        self.class_names = tuple(class_names)
        self.instance_ids = tuple(instance_ids) if instance_ids is not None else \
            tuple('row_%d' % i for i in range(len(self.y)))

        if self.X.ndim != 2 or self.X.shape[0] != len(self.y):
            raise DatasetError('%s: X has shape %s for %d labels' % (name, self.X.shape, len(self.y)))
        if self.X.shape[1] != len(self.feature_names):
            raise DatasetError('%s: %d columns but %d feature names' % (name, self.X.shape[1],
                                                                        len(self.feature_names)))
        if len(self.instance_ids) != len(self.y):
            raise DatasetError('%s: %d instance ids for %d rows' % (name, len(self.instance_ids), len(self.y)))
        if len(self.class_names) < 2:
            raise DegenerateDataset('%s: need at least 2 classes' % name)
        if len(self.y) and (self.y.min() < 0 or self.y.max() >= len(self.class_names)):
            raise DatasetError('%s: labels outside [0, %d)' % (name, len(self.class_names)))
        if len(np.unique(self.y)) != len(self.class_names):
            raise DatasetError('%s: every class must occur at least once' % name)

    def __repr__(self):
        return '%s(%s, n=%d, d=%d, C=%d)' % (self.__class__.__name__, self.name, self.n_rows, self.n_features,
                                             self.n_classes)

    def __len__(self):
        return len(self.y)

    @property
    def n_rows(self):
        return self.X.shape[0]

    @property
    def n_features(self):
        return self.X.shape[1]

    @property
    def n_classes(self):
        return len(self.class_names)

    @property
    def is_complete(self):
        """True when X holds no MISSING entries"""
        return not np.isnan(self.X).any()

    @property
    def class_counts(self):
        return pd.Series(np.bincount(self.y, minlength=self.n_classes), index=list(self.class_names))

    def content_hash(self):
        h = hashlib.sha256()
        h.update(json.dumps([self.name, self.feature_names, self.class_names, self.instance_ids]).encode('utf-8'))
        h.update(np.ascontiguousarray(self.X).tobytes())
        h.update(np.ascontiguousarray(self.y).tobytes())
        return h.hexdigest()


def _scores(scenario):
    """Per (instance, algorithm) score to minimize; NaN where the run does not count."""
    perf, ok = scenario.performance_matrix()
    has_run = ~np.isnan(perf)
    if scenario.maximize:
        score = np.where(ok, -perf, np.nan)
    else:
        score = np.where(ok, perf, np.nan)
        if scenario.cutoff_time is not None:
            score = np.where(has_run & ~ok, PAR_FACTOR * scenario.cutoff_time, score)
    return score, ok


def derive_labels(scenario):
    """ Build the meta-dataset of a scenario. X may still contain MISSING (NaN).

    The label is the algorithm with the best performance among ok runs (argmin, or argmax when the scenario
    maximizes). When minimizing with a known cutoff, non-ok runs count as PAR10 (10 x cutoff), otherwise they
    are ignored. Instances without any ok run are dropped. Ties go to the lexicographically smallest
    algorithm id. Classes with fewer than 2 instances are dropped with their instances, then class ids are
    made dense again.
    """
    score, ok = _scores(scenario)
    name = scenario.scenario_id

    keep = ok.any(axis=1)
    dropped = int((~keep).sum())
    if dropped:
        logger.warning('%s: dropping %d instances without any ok run' % (name, dropped))

    # algorithms are sorted and nanargmin keeps the first minimum
    best = np.full(len(keep), -1, dtype=np.int64)
    best[keep] = np.nanargmin(score[keep], axis=1)

    counts = np.bincount(best[keep], minlength=len(scenario.algorithms))
    rare = [a for a, c in zip(scenario.algorithms, counts) if 0 < c < MIN_CLASS_SIZE]
    if rare:
        logger.warning('%s: dropping classes with fewer than %d instances: %s' % (name, MIN_CLASS_SIZE,
                                                                                ', '.join(rare)))
        keep &= np.isin(best, [j for j, c in enumerate(counts) if c >= MIN_CLASS_SIZE])

    used = sorted(set(best[keep].tolist()))
    if len(used) < 2 or keep.sum() < MIN_INSTANCES:
        raise DegenerateDataset('%s: %d instances and %d classes survive label derivation' % (
            name, int(keep.sum()), len(used)))

    remap = {old: new for new, old in enumerate(used)}
    y = np.array([remap[b] for b in best[keep]], dtype=np.int64)
    ds = MetaDataset(name, scenario.feature_values[keep], y, scenario.feature_names,
                     [scenario.algorithms[j] for j in used],
                     [iid for iid, k in zip(scenario.instances, keep) if k])
    logger.info('derived %r' % ds)
    return ds


def choose_k(datasets):
    """ :return: the feature count of the dataset with fewest features """
    datasets = list(datasets)
    if not datasets:
        raise EmptyCollection('choose_k needs at least one dataset')
    return min(ds.n_features for ds in datasets)


def _sidecar_path(path):
    return os.path.splitext(path)[0] + '.json'


def save_meta_dataset(ds, path, preprocessor=None):
    """ Write the dataset as CSV (features then an integer label column) plus a JSON sidecar. """
    frame = pd.DataFrame(ds.X, columns=list(ds.feature_names), index=pd.Index(ds.instance_ids, name='instance_id'))
    frame[LABEL_COLUMN] = ds.y
    frame.to_csv(path, encoding='utf-8')
    sidecar = {'name': ds.name,
               'feature_names': list(ds.feature_names),
               'class_names': list(ds.class_names),
               'preprocessor': preprocessor.to_dict() if preprocessor is not None else None}
    with open(_sidecar_path(path), 'w', encoding='utf-8') as f:
        json.dump(sidecar, f, sort_keys=True, indent=2)
    return path


def load_meta_dataset(path):
    """ :return: (MetaDataset, FittedPreprocessor or None) """
    from metaxfer.meta.preprocess import FittedPreprocessor

    with open(_sidecar_path(path), 'r', encoding='utf-8') as f:
        sidecar = json.load(f)
    frame = pd.read_csv(path, index_col='instance_id', dtype={'instance_id': str}, encoding='utf-8',
                        float_precision='round_trip')
    feature_names = sidecar['feature_names']
    ds = MetaDataset(sidecar['name'], frame[feature_names].to_numpy(dtype=np.float64),
                     frame[LABEL_COLUMN].to_numpy(dtype=np.int64), feature_names, sidecar['class_names'],
                     [str(i) for i in frame.index])
    pre = sidecar.get('preprocessor')
    return ds, (FittedPreprocessor.from_dict(pre) if pre is not None else None)
