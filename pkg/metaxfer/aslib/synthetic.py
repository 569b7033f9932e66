"""
Generator for small, linearly separable ASlib scenarios. Used as the bundled test fixture and by `metaxfer synth`.
"""
import os
import string

import numpy as np

from metaxfer.aslib.arff import ArffRelation, dump_arff
from metaxfer.aslib.scenario import DESCRIPTION_FILE, FEATURES_FILE, RUNS_FILE
import metaxfer.util.log as log


__all__ = ['write_synthetic_scenario', 'algorithm_name']

logger = log.get_logger(__name__)

RUNSTATUS_TYPE = ('ok', 'timeout', 'memout', 'not_applicable', 'crash', 'other')


def algorithm_name(idx):
    return 'algo_%s' % string.ascii_lowercase[idx]


def write_synthetic_scenario(directory, n_instances=200, n_features=8, n_algorithms=3, seed=0, cutoff=100.0,
                             missing_rate=0.02, timeout_rate=0.1, scenario_id=None):
    """ Write a scenario whose best algorithm is readable from the first n_algorithms features.

    Feature j < n_algorithms is high exactly for instances where algorithm j is best, the remaining features
    are noise (and the only ones with MISSING values). Each feature gets its own scale so normalization matters.
    A few losing runs time out and a handful of repetition 2 rows are appended, both must be ignored by the
    label derivation.

    :return: directory
    """
    if n_algorithms < 2 or n_algorithms > len(string.ascii_lowercase):
        raise ValueError('n_algorithms must be in [2, 26]')
    if n_features < n_algorithms:
        raise ValueError('need at least one informative feature per algorithm')

    rng = np.random.default_rng(seed)
    scenario_id = scenario_id or os.path.basename(os.path.normpath(directory))
    os.makedirs(directory, exist_ok=True)

    labels = rng.permutation(np.arange(n_instances) % n_algorithms)
    scales = 10.0 ** rng.uniform(-1, 2, size=n_features)
    X = rng.uniform(0.0, 0.2, size=(n_instances, n_features))
    X[np.arange(n_instances), labels] = rng.uniform(0.8, 1.0, size=n_instances)
    X = X * scales
    missing = rng.random((n_instances, n_features)) < missing_rate
    missing[:, :n_algorithms] = False

    instances = ['inst_%04d' % i for i in range(n_instances)]
    algorithms = [algorithm_name(j) for j in range(n_algorithms)]

    feature_rows = []
    for i, iid in enumerate(instances):
        feature_rows.append([iid, 1] + [None if missing[i, j] else float(X[i, j]) for j in range(n_features)])
    features = ArffRelation('FEATURE_VALUES_%s' % scenario_id,
                            [('instance_id', 'STRING'), ('repetition', 'NUMERIC')] +
                            [('f%02d' % j, 'NUMERIC') for j in range(n_features)],
                            feature_rows)

    run_rows = []
    for i, iid in enumerate(instances):
        for j, aid in enumerate(algorithms):
            if j == labels[i]:
                run_rows.append([iid, 1, aid, float(rng.uniform(1.0, 10.0)), 'ok'])
            elif rng.random() < timeout_rate:
                run_rows.append([iid, 1, aid, float(cutoff), 'timeout'])
            else:
                run_rows.append([iid, 1, aid, float(rng.uniform(20.0, 0.9 * cutoff)), 'ok'])
    # a later repetition where the loser looks best
    for i in range(min(5, n_instances)):
        loser = algorithms[(labels[i] + 1) % n_algorithms]
        run_rows.append([instances[i], 2, loser, 0.5, 'ok'])
    runs = ArffRelation('ALGORITHM_RUNS_%s' % scenario_id,
                        [('instance_id', 'STRING'), ('repetition', 'NUMERIC'), ('algorithm', 'STRING'),
                         ('runtime', 'NUMERIC'), ('runstatus', RUNSTATUS_TYPE)],
                        run_rows)

    with open(os.path.join(directory, FEATURES_FILE), 'w', encoding='utf-8') as f:
        dump_arff(features, f)
    with open(os.path.join(directory, RUNS_FILE), 'w', encoding='utf-8') as f:
        dump_arff(runs, f)
    with open(os.path.join(directory, DESCRIPTION_FILE), 'w', encoding='utf-8') as f:
        f.write('scenario_id: %s\n' % scenario_id)
        f.write('performance_measures:\n  - runtime\n')
        f.write('maximize:\n  - false\n')
        f.write('performance_type:\n  - runtime\n')
        f.write('algorithm_cutoff_time: %s\n' % repr(float(cutoff)))
        f.write('algorithm_cutoff_memory: ?\n')
        f.write('features_cutoff_time: ?\n')
        f.write('algorithms_deterministic: %s\n' % ', '.join(algorithms))

    logger.info('wrote synthetic scenario %s (%d instances, %d features, %d algorithms) to %s' % (
        scenario_id, n_instances, n_features, n_algorithms, directory))
    return directory
