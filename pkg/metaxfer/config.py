"""
Defaults and environment handling. Explicit arguments win over environment variables, which win over defaults.
"""
import os

from metaxfer.nn.adam import TrainConfig


__all__ = ['CliConfig', 'DEFAULT_SCENARIOS', 'REQUIRED_FILES', 'ASLIB_URL_TEMPLATE', 'DEFAULT_HIDDEN_SIZES',
           'resolve_cache_dir', 'resolve_results_dir', 'resolve_url_template']

DEFAULT_SCENARIOS = ('CSP-2010', 'CSP-MZN', 'CSP-Minizinc-Obj', 'CSP-Minizinc-Time')
REQUIRED_FILES = ('description.txt', 'feature_values.arff', 'algorithm_runs.arff')
ASLIB_URL_TEMPLATE = 'https://raw.githubusercontent.com/coseal/aslib_data/master/{scenario}/{filename}'

DEFAULT_CACHE_DIR = os.path.join('~', '.cache', 'metaxfer')
DEFAULT_RESULTS_DIR = 'results'
DEFAULT_HIDDEN_SIZES = (64, 32)
DEFAULT_REPETITIONS = 30
DEFAULT_SEED = 0

CACHE_ENV = 'METAXFER_CACHE'
RESULTS_ENV = 'METAXFER_RESULTS'
URL_TEMPLATE_ENV = 'METAXFER_URL_TEMPLATE'


def resolve_cache_dir(cache_dir=None):
    return os.path.expanduser(cache_dir or os.environ.get(CACHE_ENV) or DEFAULT_CACHE_DIR)


def resolve_results_dir(results_dir=None):
    return os.path.expanduser(results_dir or os.environ.get(RESULTS_ENV) or DEFAULT_RESULTS_DIR)


def resolve_url_template(url_template=None):
    return url_template or os.environ.get(URL_TEMPLATE_ENV) or ASLIB_URL_TEMPLATE


class CliConfig(object):
    """ Settings shared by the command line entry points.

    Parameters
    ----------
    cache_dir : scenario cache root, defaults to $METAXFER_CACHE then ~/.cache/metaxfer
    results_dir : results root, defaults to $METAXFER_RESULTS then ./results
    seed : base seed of every experiment
    repetitions : runs per Table cell
    train_overrides : dict of TrainConfig field overrides (None values are ignored)
    scenarios : scenario names K is chosen over
    hidden_sizes : (h1, h2)
    url_template : download url with {scenario} and {filename} placeholders
    jobs : worker processes for repetitions
    fixed_split : reuse one split for every repetition
    """
    def __init__(self, cache_dir=None, results_dir=None, seed=DEFAULT_SEED, repetitions=DEFAULT_REPETITIONS,
                 train_overrides=None, scenarios=DEFAULT_SCENARIOS, hidden_sizes=DEFAULT_HIDDEN_SIZES,
                 url_template=None, jobs=1, fixed_split=False):
        self.cache_dir = resolve_cache_dir(cache_dir)
        self.results_dir = resolve_results_dir(results_dir)
        self.seed = int(seed)
        self.repetitions = int(repetitions)
        self.train_overrides = {k: v for k, v in (train_overrides or {}).items() if v is not None}
        self.scenarios = tuple(scenarios)
        self.hidden_sizes = tuple(int(h) for h in hidden_sizes)
        self.url_template = resolve_url_template(url_template)
        self.jobs = int(jobs)
        self.fixed_split = bool(fixed_split)

        if self.repetitions < 1:
            raise ValueError('repetitions must be >= 1')
        if self.jobs < 1:
            raise ValueError('jobs must be >= 1')
        if len(self.hidden_sizes) != 2 or min(self.hidden_sizes) < 1:
            raise ValueError('hidden sizes must be two positive integers')
        if not self.scenarios:
            raise ValueError('at least one scenario is required')
        # fail early on invalid overrides
        self.train_config()

    @classmethod
    def from_env(cls, **overrides):
        return cls(**{k: v for k, v in overrides.items() if v is not None})

    def train_config(self, seed=0):
        return TrainConfig(seed=seed, **self.train_overrides)

    def __repr__(self):
        return '%s(cache_dir=%s, results_dir=%s, seed=%s, repetitions=%s)' % (
            self.__class__.__name__, self.cache_dir, self.results_dir, self.seed, self.repetitions)
