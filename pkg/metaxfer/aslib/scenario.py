"""
In-memory ASlib scenario: instance features, algorithm runs and the scenario description.
"""
import hashlib
import json
import math
import os
import re
from collections import namedtuple, OrderedDict
from types import MappingProxyType

import numpy as np
import pandas as pd

from metaxfer.aslib.arff import MISSING, is_numeric_type, parse_arff_file
import metaxfer.util.log as log


__all__ = ['AslibScenario', 'RunRecord', 'ScenarioDescription', 'ScenarioError', 'MissingKey', 'UnparsableValue',
           'InconsistentScenario', 'UnsupportedFeature', 'RUNSTATUSES', 'parse_description', 'load_scenario',
           'DESCRIPTION_FILE', 'FEATURES_FILE', 'RUNS_FILE']

logger = log.get_logger(__name__)

DESCRIPTION_FILE = 'description.txt'
FEATURES_FILE = 'feature_values.arff'
RUNS_FILE = 'algorithm_runs.arff'

OK = 'ok'
RUNSTATUSES = (OK, 'timeout', 'memout', 'crash', 'other', 'unknown')
_RUNSTATUS_ALIASES = {'not_applicable': 'other'}

RunRecord = namedtuple('RunRecord', ['performance', 'runstatus'])

ScenarioDescription = namedtuple('ScenarioDescription',
                                 ['performance_measure', 'maximize', 'cutoff_time', 'scenario_id',
                                  'performance_type'])


class ScenarioError(Exception):
    """Base class for scenario loading errors"""


class MissingKey(ScenarioError):
    """Raised when a required description key is absent"""


class UnparsableValue(ScenarioError):
    """Raised when a description value cannot be interpreted"""


class InconsistentScenario(ScenarioError):
    """Raised when the feature and run tables cannot be joined into a valid scenario"""


class UnsupportedFeature(ScenarioError):
    """Raised for non-numeric feature attributes"""


def normalize_runstatus(status):
    if status is MISSING:
        return 'unknown'
    status = str(status).strip().lower()
    status = _RUNSTATUS_ALIASES.get(status, status)
    return status if status in RUNSTATUSES else 'unknown'


#
# description.txt
#
_RE_KEY = re.compile(r'^([A-Za-z_][\w\[\]\-.]*)\s*:\s*(.*?)\s*$')
_RE_ITEM = re.compile(r'^\s+-\s*(.*?)\s*$')
_RE_TOP_ITEM = re.compile(r'^-\s*(.*?)\s*$')
_ABSENT = ('', '?', 'null', 'none', '~')


def _as_list(raw):
    raw = raw.strip()
    if raw.startswith('[') and raw.endswith(']'):
        raw = raw[1:-1]
    return [v.strip().strip('\'"') for v in raw.split(',') if v.strip()]


def _as_bool(key, text):
    val = text.strip().strip('\'"').lower()
    if val in ('true', 'yes', '1'):
        return True
    if val in ('false', 'no', '0'):
        return False
    raise UnparsableValue('%s: cannot interpret %r as a boolean' % (key, text))


def _read_description_keys(lines):
    """Collect top-level keys. Values are lists: inline comma/bracket lists or '- item' continuation lines."""
    values = OrderedDict()
    current = None
    for raw in lines:
        line = raw.rstrip('\r\n')
        if not line.strip() or line.lstrip().startswith('#'):
            continue
        if not line[0].isspace():
            # block sequences may start at column 0 ("key:\n- item")
            item = _RE_TOP_ITEM.match(line)
            if item is not None and current is not None:
                values[current].extend(_as_list(item.group(1)))
                continue
            m = _RE_KEY.match(line)
            if m is None:
                logger.debug('ignoring description line %r' % line)
                current = None
                continue
            current = m.group(1)
            values[current] = _as_list(m.group(2))
        elif current is not None:
            m = _RE_ITEM.match(line)
            if m is not None:
                values[current].extend(_as_list(m.group(1)))
            # nested mappings (feature_steps, metainfo_algorithms) are not needed
    return values


def parse_description(stream):
    """Parse the restricted key: value subset of an ASlib description file.

    Returns
    -------
    ScenarioDescription(performance_measure, maximize, cutoff_time, scenario_id, performance_type)
    where only the first listed performance measure is used and cutoff_time / scenario_id may be None.
    """
    if isinstance(stream, str):
        stream = stream.splitlines()
    values = _read_description_keys(stream)

    for key in ('performance_measures', 'maximize'):
        if not values.get(key):
            raise MissingKey('description is missing required key %r' % key)

    measure = values['performance_measures'][0]
    maximize = _as_bool('maximize', values['maximize'][0])

    cutoff = None
    cutoff_raw = values.get('algorithm_cutoff_time') or []
    if cutoff_raw and cutoff_raw[0].lower() not in _ABSENT:
        try:
            cutoff = float(cutoff_raw[0])
        except ValueError:
            raise UnparsableValue('algorithm_cutoff_time: cannot interpret %r as seconds' % cutoff_raw[0])
        if not (math.isfinite(cutoff) and cutoff > 0):
            raise UnparsableValue('algorithm_cutoff_time must be positive, got %r' % cutoff_raw[0])

    scenario_id = None
    if values.get('scenario_id') and values['scenario_id'][0].lower() not in _ABSENT:
        scenario_id = values['scenario_id'][0]

    ptype = (values.get('performance_type') or ['runtime'])[0].lower()
    return ScenarioDescription(measure, maximize, cutoff, scenario_id, ptype)


def parse_description_file(path):
    with open(path, 'r', encoding='utf-8') as f:
        return parse_description(f)


#
# scenario
#
class AslibScenario(object):
    """ Parsed ASlib scenario. Immutable after construction.

    Parameters
    ----------
    scenario_id : str
    instances : instance ids, in feature table order
    feature_names : feature column names
    feature_values : array-like (len(instances), len(feature_names)), NaN marks MISSING
    algorithms : algorithm ids (stored sorted)
    runs : dict (instance_id, algorithm_id) -> RunRecord
    performance_measure : str
    maximize : bool
    cutoff_time : float or None
    performance_type : str, runtime or solution_quality
    """
    def __init__(self, scenario_id, instances, feature_names, feature_values, algorithms, runs,
                 performance_measure, maximize, cutoff_time=None, performance_type='runtime'):
        self.scenario_id = scenario_id
        self.instances = tuple(instances)
        self.feature_names = tuple(feature_names)
        values = np.array(feature_values, dtype=np.float64).reshape(len(self.instances), len(self.feature_names))
        values.setflags(write=False)
        self.feature_values = values
        self.algorithms = tuple(sorted(algorithms))
        self.runs = MappingProxyType(dict(runs))
        self.performance_measure = performance_measure
        self.maximize = bool(maximize)
        self.cutoff_time = cutoff_time
        self.performance_type = performance_type
        self._validate()

    def _validate(self):
        if len(set(self.instances)) != len(self.instances):
            raise InconsistentScenario('%s: duplicate instance ids' % self.scenario_id)
        if len(set(self.algorithms)) != len(self.algorithms):
            raise InconsistentScenario('%s: duplicate algorithm ids' % self.scenario_id)
        known_instances = set(self.instances)
        known_algorithms = set(self.algorithms)
        for (iid, aid), rec in self.runs.items():
            if iid not in known_instances:
                raise InconsistentScenario('%s: run references unknown instance %r' % (self.scenario_id, iid))
            if aid not in known_algorithms:
                raise InconsistentScenario('%s: run references unknown algorithm %r' % (self.scenario_id, aid))
            if not math.isfinite(rec.performance):
                raise InconsistentScenario('%s: non-finite performance for %r/%r' % (self.scenario_id, iid, aid))
            if rec.runstatus not in RUNSTATUSES:
                raise InconsistentScenario('%s: unknown runstatus %r' % (self.scenario_id, rec.runstatus))

    def __repr__(self):
        return '%s(%s, instances=%d, features=%d, algorithms=%d)' % (
            self.__class__.__name__, self.scenario_id, len(self.instances), len(self.feature_names),
            len(self.algorithms))

    @property
    def n_instances(self):
        return len(self.instances)

    @property
    def n_features(self):
        return len(self.feature_names)

    def as_frame(self):
        """ :return: DataFrame of feature values, instances as rows """
        return pd.DataFrame(self.feature_values, index=pd.Index(self.instances, name='instance_id'),
                            columns=list(self.feature_names))

    def performance_matrix(self):
        """ :return: (performance, ok) arrays of shape (instances, algorithms); NaN where no run exists """
        perf = np.full((len(self.instances), len(self.algorithms)), np.nan)
        ok = np.zeros(perf.shape, dtype=bool)
        aidx = {a: j for j, a in enumerate(self.algorithms)}
        for i, iid in enumerate(self.instances):
            for aid, j in aidx.items():
                rec = self.runs.get((iid, aid))
                if rec is not None:
                    perf[i, j] = rec.performance
                    ok[i, j] = rec.runstatus == OK
        return perf, ok

    def to_dict(self):
        runs = []
        for iid in self.instances:
            for aid in self.algorithms:
                rec = self.runs.get((iid, aid))
                if rec is not None:
                    runs.append([iid, aid, rec.performance, rec.runstatus])
        return {
            'scenario_id': self.scenario_id,
            'instances': list(self.instances),
            'feature_names': list(self.feature_names),
            'feature_values': [[None if np.isnan(v) else float(v) for v in row] for row in self.feature_values],
            'algorithms': list(self.algorithms),
            'runs': runs,
            'performance_measure': self.performance_measure,
            'maximize': self.maximize,
            'cutoff_time': self.cutoff_time,
            'performance_type': self.performance_type,
        }

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, separators=(',', ':'))

    def content_hash(self):
        return hashlib.sha256(self.to_json().encode('utf-8')).hexdigest()


def _column_index(attributes, name, required=True, path=''):
    for idx, (aname, _) in enumerate(attributes):
        if aname.lower() == name:
            return idx
    if required:
        raise InconsistentScenario('%s has no %r column' % (path, name))
    return None


def _is_first_repetition(row, rep_idx):
    if rep_idx is None:
        return True
    rep = row[rep_idx]
    return rep is MISSING or float(rep) == 1


def _read_features(path):
    rel = parse_arff_file(path)
    id_idx = _column_index(rel.attributes, 'instance_id', path=path)
    rep_idx = _column_index(rel.attributes, 'repetition', required=False)
    feature_cols = [i for i in range(len(rel.attributes)) if i not in (id_idx, rep_idx)]
    for i in feature_cols:
        name, type_ = rel.attributes[i]
        if not is_numeric_type(type_):
            raise UnsupportedFeature('%s: feature %r has non-numeric type %r' % (path, name, type_))

    features = OrderedDict()
    for row in rel.rows:
        if not _is_first_repetition(row, rep_idx):
            continue
        iid = row[id_idx]
        if iid is MISSING:
            raise InconsistentScenario('%s: feature row without instance id' % path)
        iid = str(iid)
        if iid in features:
            raise InconsistentScenario('%s: duplicate feature row for instance %r' % (path, iid))
        features[iid] = [np.nan if row[i] is MISSING else float(row[i]) for i in feature_cols]
    return [rel.attributes[i][0] for i in feature_cols], features


def _read_runs(path, description):
    rel = parse_arff_file(path)
    id_idx = _column_index(rel.attributes, 'instance_id', path=path)
    alg_idx = _column_index(rel.attributes, 'algorithm', path=path)
    rep_idx = _column_index(rel.attributes, 'repetition', required=False)
    perf_idx = _column_index(rel.attributes, description.performance_measure.lower(), path=path)
    status_idx = _column_index(rel.attributes, 'runstatus', required=False)

    placeholder = description.cutoff_time if description.cutoff_time is not None else 0.0
    runs = OrderedDict()
    downgraded = 0
    for row in rel.rows:
        if not _is_first_repetition(row, rep_idx):
            continue
        key = (str(row[id_idx]), str(row[alg_idx]))
        if key in runs:
            raise InconsistentScenario('%s: duplicate run for %r' % (path, key))
        status = OK if status_idx is None else normalize_runstatus(row[status_idx])
        perf = row[perf_idx]
        perf = float('nan') if perf is MISSING else float(perf)
        if not math.isfinite(perf) or (status == OK and description.performance_type == 'runtime' and perf < 0):
            if status == OK:
                status = 'unknown'
                downgraded += 1
            if not math.isfinite(perf):
                perf = placeholder
        runs[key] = RunRecord(perf, status)
    if downgraded:
        logger.warning('%s: %d ok runs without a usable %s were marked unknown' % (
            path, downgraded, description.performance_measure))
    return runs


def load_scenario(directory):
    """ Load an ASlib scenario directory (description.txt, feature_values.arff, algorithm_runs.arff).

    Only repetition 1 rows are kept. Instances missing from either table are dropped with a warning.
    """
    description = parse_description_file(os.path.join(directory, DESCRIPTION_FILE))
    feature_names, features = _read_features(os.path.join(directory, FEATURES_FILE))
    runs = _read_runs(os.path.join(directory, RUNS_FILE), description)
    scenario_id = description.scenario_id or os.path.basename(os.path.normpath(directory))

    run_instances = set(iid for iid, _ in runs)
    instances = [iid for iid in features if iid in run_instances]
    if not instances:
        raise InconsistentScenario('%s: no instance appears in both the feature and the run table' % scenario_id)
    no_runs = len(features) - len(instances)
    if no_runs:
        logger.warning('%s: dropping %d instances without algorithm runs' % (scenario_id, no_runs))
    no_features = run_instances.difference(features)
    if no_features:
        logger.warning('%s: dropping runs of %d instances without feature values' % (scenario_id,
                                                                                    len(no_features)))
        runs = OrderedDict((k, v) for k, v in runs.items() if k[0] in features)

    scenario = AslibScenario(scenario_id, instances, feature_names, [features[iid] for iid in instances],
                             set(aid for _, aid in runs), runs, description.performance_measure,
                             description.maximize, description.cutoff_time, description.performance_type)
    logger.info('loaded %r' % scenario)
    return scenario
