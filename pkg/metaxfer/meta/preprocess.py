"""
Train-fitted preprocessing: median imputation, min-max scaling to [0, 1] and Select-K-Best on the one-way
ANOVA F statistic.
"""
import numpy as np

from metaxfer.meta.dataset import DatasetError
import metaxfer.util.log as log


__all__ = ['FittedPreprocessor', 'KTooLarge', 'DimensionMismatch', 'InsufficientGroups', 'anova_f',
           'fit_preprocessor', 'apply_preprocessor', 'F_SENTINEL']

logger = log.get_logger(__name__)

# score of a feature that separates the classes perfectly (zero within-group variance)
F_SENTINEL = float(np.finfo(np.float64).max)


class KTooLarge(DatasetError):
    """Raised when more features are requested than exist"""


class DimensionMismatch(DatasetError):
    """Raised when a matrix does not have the fitted number of columns"""


class InsufficientGroups(DatasetError):
    """Raised when the F statistic is requested for fewer than two classes"""


def anova_f(column, y):
    """ One-way ANOVA F statistic of a single feature against class labels.

    F = [sum_g n_g (mean_g - mean)^2 / (C - 1)] / [sum_g sum_i (x_gi - mean_g)^2 / (N - C)]

    Returns 0 when both sums of squares are zero and F_SENTINEL when only the within-group sum is zero.
    """
    column = np.asarray(column, dtype=np.float64)
    y = np.asarray(y)
    if column.shape != y.shape or column.ndim != 1:
        raise DimensionMismatch('column and labels must be 1-d of equal length')
    groups = np.unique(y)
    if len(groups) < 2:
        raise InsufficientGroups('need at least 2 classes, found %d' % len(groups))
    if column.min() == column.max():
        return 0.0

    n, c = len(column), len(groups)
    grand = column.mean()
    between = 0.0
    within = 0.0
    for g in groups:
        values = column[y == g]
        if values.min() == values.max():
            # exact: a constant group has no spread, whatever rounding its mean picks up
            mean_g = values[0]
        else:
            mean_g = values.mean()
            within += float(((values - mean_g) ** 2).sum())
        between += len(values) * (mean_g - grand) ** 2

    if within == 0.0:
        return F_SENTINEL if between > 0.0 else 0.0
    return float((between / (c - 1)) / (within / (n - c)))


class FittedPreprocessor(object):
    """ Parameters fitted on a training partition.

    Parameters
    ----------
    mins, maxs : per-feature min / max of the imputed training data
    medians : per-feature training medians used for MISSING
    selected_indices : ascending indices of the K kept features
    f_scores : ANOVA F score of every feature
    feature_names : optional names of all d features
    """
    def __init__(self, mins, maxs, medians, selected_indices, f_scores, feature_names=None):
        self.mins = np.asarray(mins, dtype=np.float64)
        self.maxs = np.asarray(maxs, dtype=np.float64)
        self.medians = np.asarray(medians, dtype=np.float64)
        self.selected_indices = np.asarray(selected_indices, dtype=np.int64)
        self.f_scores = np.asarray(f_scores, dtype=np.float64)
        self.feature_names = tuple(feature_names) if feature_names is not None else None

    def __repr__(self):
        return '%s(d=%d, k=%d)' % (self.__class__.__name__, self.n_features, self.k)

    @property
    def n_features(self):
        return len(self.mins)

    @property
    def k(self):
        return len(self.selected_indices)

    @property
    def selected_names(self):
        if self.feature_names is None:
            return None
        return [self.feature_names[i] for i in self.selected_indices]

    def normalize(self, X):
        """Impute and scale all d columns, clipping to [0, 1]."""
        X = np.array(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise DimensionMismatch('expected %d columns, got shape %s' % (self.n_features, X.shape))
        X = np.where(np.isnan(X), self.medians, X)
        span = self.maxs - self.mins
        scaled = np.divide(X - self.mins, span, out=np.zeros_like(X), where=span > 0)
        if logger.isEnabledFor(log.logging.DEBUG):
            outside = int(((scaled < 0) | (scaled > 1)).sum())
            outside and logger.debug('clipping %d values outside the training range' % outside)
        return np.clip(scaled, 0.0, 1.0)

    def transform(self, X):
        return self.normalize(X)[:, self.selected_indices]

    def to_dict(self):
        return {'mins': self.mins.tolist(), 'maxs': self.maxs.tolist(), 'medians': self.medians.tolist(),
                'selected_indices': self.selected_indices.tolist(), 'f_scores': self.f_scores.tolist(),
                'feature_names': list(self.feature_names) if self.feature_names is not None else None}

    @classmethod
    def from_dict(cls, data):
        return cls(data['mins'], data['maxs'], data['medians'], data['selected_indices'], data['f_scores'],
                   data.get('feature_names'))


def _medians(X):
    medians = np.zeros(X.shape[1])
    for j in range(X.shape[1]):
        col = X[:, j]
        col = col[~np.isnan(col)]
        if len(col):
            medians[j] = np.median(col)
    return medians


def fit_preprocessor(X_train, y_train, k, feature_names=None):
    """ Fit imputation, min-max scaling and Select-K-Best on training rows only.

    The K features with the highest F score are kept, ties go to the smaller index.
    """
    X_train = np.asarray(X_train, dtype=np.float64)
    y_train = np.asarray(y_train)
    if X_train.ndim != 2 or X_train.shape[0] == 0:
        raise DimensionMismatch('X_train must be a non-empty 2-d matrix')
    if X_train.shape[0] != len(y_train):
        raise DimensionMismatch('%d rows but %d labels' % (X_train.shape[0], len(y_train)))
    d = X_train.shape[1]
    if k < 1:
        raise ValueError('k must be >= 1')
    if k > d:
        raise KTooLarge('k=%d exceeds the %d available features' % (k, d))

    medians = _medians(X_train)
    imputed = np.where(np.isnan(X_train), medians, X_train)
    pre = FittedPreprocessor(imputed.min(axis=0), imputed.max(axis=0), medians, np.arange(d), np.zeros(d),
                             feature_names)
    normalized = pre.normalize(X_train)
    f_scores = np.array([anova_f(normalized[:, j], y_train) for j in range(d)])

    order = np.lexsort((np.arange(d), -f_scores))
    pre.selected_indices = np.sort(order[:k])
    pre.f_scores = f_scores
    logger.debug('selected %d of %d features' % (k, d))
    return pre


def apply_preprocessor(p, X):
    """ :return: X imputed, scaled to [0, 1] and restricted to the selected columns (n x K) """
    return p.transform(X)
