"""
Experiment harness: Normal training and every (source, freeze) transfer configuration of a target scenario,
repeated with derived seeds and aggregated to mean and population standard deviation.
"""
import hashlib
import json
import os
import tempfile
from collections import namedtuple, OrderedDict
from concurrent.futures import ProcessPoolExecutor

import numpy as np

import metaxfer
from metaxfer.config import DEFAULT_HIDDEN_SIZES, DEFAULT_REPETITIONS
from metaxfer.meta.dataset import MetaDataset, choose_k, save_meta_dataset
from metaxfer.meta.preprocess import fit_preprocessor
from metaxfer.meta.split import stratified_split
from metaxfer.nn.adam import TrainConfig, save_history, train
from metaxfer.nn.mlp import evaluate, he_init, load_model, save_model
from metaxfer.nn.transfer import FREEZE_LABELS, TransferConfig, freeze_mask_for, transplant
from metaxfer.util.storage import MemoryStorage
import metaxfer.util.log as log


__all__ = ['Mode', 'NORMAL', 'ExperimentSpec', 'ExperimentSummary', 'RunResult', 'TableResult',
           'ExperimentError', 'ExperimentRunner', 'ModelStorage', 'derive_seed', 'summarize', 'run_cell',
           'run_table', 'table_modes', 'cell_artifact_dir']

logger = log.get_logger(__name__)

TEST_FRACTION = 0.2

RunResult = namedtuple('RunResult', ['repetition', 'seed', 'accuracy', 'loss'])
TableResult = namedtuple('TableResult', ['summaries', 'failures'])


class ExperimentError(Exception):
    """Raised when a repetition of a cell fails"""


class Mode(namedtuple('Mode', ['source', 'freeze'])):
    """Normal training (source None) or transfer from source with 0, 1 or 2 frozen hidden layers."""
    __slots__ = ()

    @classmethod
    def transfer(cls, source, freeze):
        freeze_mask_for(freeze)
        return cls(source, int(freeze))

    @property
    def is_transfer(self):
        return self.source is not None

    @property
    def key(self):
        """stable name used for seeds and result files"""
        return '%s_%s' % (self.source, FREEZE_LABELS[self.freeze]) if self.is_transfer else 'normal'

    @property
    def label(self):
        return FREEZE_LABELS[self.freeze] if self.is_transfer else 'Normal'

    def to_dict(self):
        return {'source': self.source, 'freeze': self.freeze}

    @classmethod
    def from_dict(cls, data):
        return cls.transfer(data['source'], data['freeze']) if data.get('source') is not None else NORMAL


NORMAL = Mode(None, None)


def derive_seed(base_seed, *parts):
    """ :return: unsigned 64-bit seed from sha256 over base_seed and parts """
    text = '|'.join(str(p) for p in (base_seed,) + parts)
    return int.from_bytes(hashlib.sha256(text.encode('utf-8')).digest()[:8], 'big')


def summarize(values):
    """ :return: (mean, population standard deviation) """
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise ValueError('cannot summarize an empty list')
    return float(values.mean()), float(values.std(ddof=0))


class ExperimentSpec(object):
    """ One cell of the results table.

    Parameters
    ----------
    target : target scenario name
    mode : Mode, NORMAL or Mode.transfer(source, freeze)
    k : number of selected features shared by every scenario
    repetitions : runs of the cell, default 30
    base_seed : int
    train_config : TrainConfig (its seed is replaced per repetition)
    hidden_sizes : (h1, h2)
    fixed_split : reuse the split of repetition-independent seed for every repetition
    test_fraction : hold-out share
    """
    def __init__(self, target, mode=NORMAL, k=None, repetitions=DEFAULT_REPETITIONS, base_seed=0,
                 train_config=None, hidden_sizes=DEFAULT_HIDDEN_SIZES, fixed_split=False,
                 test_fraction=TEST_FRACTION):
        self.target = target
        self.mode = mode
        self.k = k
        self.repetitions = int(repetitions)
        self.base_seed = int(base_seed)
        self.train_config = train_config or TrainConfig()
        self.hidden_sizes = tuple(int(h) for h in hidden_sizes)
        self.fixed_split = bool(fixed_split)
        self.test_fraction = float(test_fraction)

        if self.repetitions < 1:
            raise ValueError('repetitions must be >= 1')
        if mode.is_transfer and mode.source == target:
            raise ValueError('transfer source must differ from the target (%s)' % target)
        if k is not None and k < 1:
            raise ValueError('k must be >= 1')

    def __repr__(self):
        return '%s(%s, %s, k=%s, reps=%d)' % (self.__class__.__name__, self.target, self.mode.key, self.k,
                                             self.repetitions)

    def with_k(self, k):
        spec = ExperimentSpec.from_dict(self.to_dict())
        spec.k = k
        return spec

    def source_spec(self):
        """Spec of the Normal cell of the source scenario, whose repetition-r model is transferred."""
        if not self.mode.is_transfer:
            raise ValueError('%r has no source' % self)
        data = self.to_dict()
        data.update(target=self.mode.source, mode=NORMAL.to_dict())
        return ExperimentSpec.from_dict(data)

    def repetition_seed(self, r):
        return derive_seed(self.base_seed, self.target, self.mode.key, r)

    def split_seed(self, r):
        if self.fixed_split:
            return derive_seed(self.base_seed, self.target, 'split')
        return derive_seed(self.repetition_seed(r), 'split')

    def to_dict(self):
        return {'target': self.target, 'mode': self.mode.to_dict(), 'k': self.k, 'repetitions': self.repetitions,
                'base_seed': self.base_seed, 'train_config': self.train_config.to_dict(),
                'hidden_sizes': list(self.hidden_sizes), 'fixed_split': self.fixed_split,
                'test_fraction': self.test_fraction}

    @classmethod
    def from_dict(cls, data):
        return cls(data['target'], Mode.from_dict(data['mode']), data.get('k'), data['repetitions'],
                   data['base_seed'], TrainConfig.from_dict(data['train_config']), data['hidden_sizes'],
                   data.get('fixed_split', False), data.get('test_fraction', TEST_FRACTION))

    def digest(self):
        return hashlib.sha256(json.dumps(self.to_dict(), sort_keys=True).encode('utf-8')).hexdigest()[:16]


class ExperimentSummary(object):
    """Per-run (accuracy, test loss) of one cell with aggregates and provenance."""

    def __init__(self, spec, runs, provenance=None):
        self.spec = spec
        self.runs = sorted(runs, key=lambda run: run.repetition)
        if len(self.runs) != spec.repetitions:
            raise ValueError('expected %d runs, got %d' % (spec.repetitions, len(self.runs)))
        self.mean_acc, self.std_acc = summarize([run.accuracy for run in self.runs])
        self.mean_loss, self.std_loss = summarize([run.loss for run in self.runs])
        self.provenance = provenance or {}

    def __repr__(self):
        return '%s(%s/%s: acc %.4f ± %.4f, loss %.4f ± %.4f)' % (
            self.__class__.__name__, self.spec.target, self.spec.mode.key, self.mean_acc, self.std_acc,
            self.mean_loss, self.std_loss)

    @property
    def key(self):
        return self.spec.target, self.spec.mode.key

    def to_dict(self):
        return {'target': self.spec.target,
                'mode': self.spec.mode.key,
                'runs': [run._asdict() for run in self.runs],
                'mean_acc': self.mean_acc, 'std_acc': self.std_acc,
                'mean_loss': self.mean_loss, 'std_loss': self.std_loss,
                'provenance': dict(self.provenance, spec=self.spec.to_dict())}

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + '\n'

    @classmethod
    def from_dict(cls, data):
        spec = ExperimentSpec.from_dict(data['provenance']['spec'])
        runs = [RunResult(**run) for run in data['runs']]
        provenance = {k: v for k, v in data['provenance'].items() if k != 'spec'}
        return cls(spec, runs, provenance)


#
# model and repetition artifacts
#
class ModelStorage(MemoryStorage):
    """ Trained models keyed by (scenario, repetition, spec digest). With a root directory every model is also
    written as a model JSON file, root/<scenario>/<repetition>_<digest>.json, and read back by later processes.
    """
    def __init__(self, root=None):
        MemoryStorage.__init__(self)
        self.root = root

    def path(self, key):
        scenario, r, digest = key
        return os.path.join(self.root, self.key_to_string(scenario), '%s_%s.json' % (r, digest))

    def get(self, key, default=(None, None)):
        found = MemoryStorage.get(self, key, None)
        if found is None and self.root is not None and os.path.isfile(self.path(key)):
            logger.debug('loading stored model %s' % self.path(key))
            MemoryStorage.set(self, key, load_model(self.path(key)), path=self.path(key))
            found = MemoryStorage.get(self, key, None)
        return default if found is None else found

    def set(self, key, value, **userdata):
        MemoryStorage.set(self, key, value, **userdata)
        if self.root is None:
            return
        path = self.path(key)
        os.makedirs(os.path.dirname(path), exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), prefix='.model')
        os.close(fd)
        try:
            save_model(value, tmp)
            os.replace(tmp, path)
        except BaseException:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise


def cell_artifact_dir(artifact_dir, spec):
    """ artifact_dir/<target>/<mode>/, next to the cell JSON """
    return os.path.join(artifact_dir, spec.target, spec.mode.key)


def _write_repetition_artifacts(artifact_dir, spec, r, dataset, prepared, history):
    """rep_<r>.csv with its sidecar (the dataset through the fitted preprocessor) and rep_<r>_history.csv"""
    directory = cell_artifact_dir(artifact_dir, spec)
    os.makedirs(directory, exist_ok=True)
    pre = prepared.preprocessor
    reduced = MetaDataset(dataset.name, pre.transform(dataset.X), dataset.y, pre.selected_names,
                          dataset.class_names, dataset.instance_ids)
    save_meta_dataset(reduced, os.path.join(directory, 'rep_%d.csv' % r), pre)
    save_history(history, os.path.join(directory, 'rep_%d_history.csv' % r))


#
# single repetition
#
Prepared = namedtuple('Prepared', ['preprocessor', 'X_train', 'y_train', 'X_test', 'y_test'])


def _prepare(dataset, spec, r):
    """split, then fit the preprocessor on the training rows"""
    split = stratified_split(dataset.y, spec.test_fraction, np.random.default_rng(spec.split_seed(r)))
    pre = fit_preprocessor(dataset.X[split.train_rows], dataset.y[split.train_rows], spec.k,
                           dataset.feature_names)
    return Prepared(pre, pre.transform(dataset.X[split.train_rows]), dataset.y[split.train_rows],
                    pre.transform(dataset.X[split.test_rows]), dataset.y[split.test_rows])


def train_normal(dataset, spec, r):
    """ :return: (trained model, per-epoch train loss, Prepared) of Normal repetition r """
    prepared = _prepare(dataset, spec, r)
    seed = spec.repetition_seed(r)
    model = he_init((spec.k,) + spec.hidden_sizes + (dataset.n_classes,),
                    np.random.default_rng(derive_seed(seed, 'init')))
    config = spec.train_config.replace(seed=derive_seed(seed, 'shuffle'))
    model, history = train(model, prepared.X_train, prepared.y_train, config)
    return model, history, prepared


def _model_key(spec, r):
    return spec.target, r, spec.digest()


def source_model(datasets, spec, r, storage=None):
    """ Model of repetition r of the Normal cell of spec's source scenario, memoized in storage. """
    source_spec = spec.source_spec()
    key = _model_key(source_spec, r)
    if storage is not None:
        model, _ = storage.get(key)
        if model is not None:
            return model
    model, _, _ = train_normal(datasets[source_spec.target], source_spec, r)
    if storage is not None:
        storage.set(key, model)
    return model


def run_repetition(datasets, spec, r, storage=None, artifact_dir=None):
    """ :return: RunResult of repetition r. Normal models are kept in storage for later transfers. """
    target = datasets[spec.target]
    seed = spec.repetition_seed(r)
    if not spec.mode.is_transfer:
        model, history, prepared = train_normal(target, spec, r)
        if storage is not None:
            storage.set(_model_key(spec, r), model)
    else:
        source = source_model(datasets, spec, r, storage)
        prepared = _prepare(target, spec, r)
        cfg = TransferConfig(source, spec.mode.freeze, derive_seed(seed, 'transfer'))
        model = transplant(source, target.n_classes, cfg, target_input_dim=spec.k, hidden_sizes=spec.hidden_sizes)
        model, history = train(model, prepared.X_train, prepared.y_train,
                               spec.train_config.replace(seed=derive_seed(seed, 'shuffle')))
    if artifact_dir is not None:
        _write_repetition_artifacts(artifact_dir, spec, r, target, prepared, history)
    accuracy, loss = evaluate(model, prepared.X_test, prepared.y_test)
    return RunResult(r, seed, accuracy, loss)


def _run_repetition_job(args):
    datasets, spec_dict, r, model_dir, artifact_dir = args
    storage = ModelStorage(model_dir) if model_dir is not None else None
    return run_repetition(datasets, ExperimentSpec.from_dict(spec_dict), r, storage, artifact_dir)


def _inputs_hash(datasets, spec):
    names = [spec.target] + ([spec.mode.source] if spec.mode.is_transfer else [])
    h = hashlib.sha256()
    for name in names:
        h.update(datasets[name].content_hash().encode('ascii'))
    return h.hexdigest()


def run_cell(spec, datasets, jobs=1, storage=None, artifact_dir=None):
    """ Run every repetition of a cell.

    Parameters
    ----------
    spec : ExperimentSpec with k set
    datasets : mapping name -> MetaDataset holding the target (and source)
    jobs : worker processes, 1 runs in process
    storage : Storage memoizing trained models across cells, a ModelStorage root is shared with workers
    artifact_dir : when given, per-repetition history and meta-dataset files go to artifact_dir/<target>/<mode>/

    Returns
    -------
    ExperimentSummary; a failing repetition raises ExperimentError
    """
    if spec.k is None:
        raise ValueError('%r: k must be set, see choose_k' % spec)
    for name in (spec.target, spec.mode.source):
        if name is not None and name not in datasets:
            raise ExperimentError('%r: scenario %s is not loaded' % (spec, name))

    logger.info('running %r' % spec)
    reps = range(spec.repetitions)
    try:
        if jobs > 1:
            needed = {n: datasets[n] for n in (spec.target, spec.mode.source) if n is not None}
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                model_dir = getattr(storage, 'root', None)
                jobs_args = [(needed, spec.to_dict(), r, model_dir, artifact_dir) for r in reps]
                runs = list(pool.map(_run_repetition_job, jobs_args))
        else:
            runs = [run_repetition(datasets, spec, r, storage, artifact_dir) for r in reps]
    except ExperimentError:
        raise
    except Exception as e:
        raise ExperimentError('%s/%s failed: %s' % (spec.target, spec.mode.key, e)) from e

    provenance = {'seeds': [run.seed for run in sorted(runs, key=lambda run: run.repetition)],
                  'inputs_sha256': _inputs_hash(datasets, spec),
                  'metadata': {'std': 'population', 'loss': 'test',
                               'split': 'fixed' if spec.fixed_split else 'fresh',
                               'version': metaxfer.__version__}}
    summary = ExperimentSummary(spec, runs, provenance)
    logger.info('%r' % summary)
    return summary


def table_modes(target, sources):
    """Normal followed by 3 freeze levels for every source other than the target."""
    modes = [NORMAL]
    for source in sources:
        if source != target:
            modes.extend(Mode.transfer(source, freeze) for freeze in sorted(FREEZE_LABELS))
    return modes


def run_table(targets, sources, repetitions, datasets, continue_on_error=False, jobs=1, callback=None,
              storage=None, artifact_dir=None, **spec_kwargs):
    """ Run the full grid: for each target Normal plus every (source, freeze) combination.

    Parameters
    ----------
    targets, sources : scenario names
    repetitions : runs per cell
    datasets : mapping name -> MetaDataset; K is chosen over all of them unless k is given
    continue_on_error : record failing cells in TableResult.failures instead of raising
    callback : called with each ExperimentSummary as soon as it is complete
    storage : Storage for trained models, an in-memory ModelStorage by default
    artifact_dir : forwarded to run_cell
    spec_kwargs : forwarded to ExperimentSpec (base_seed, train_config, hidden_sizes, fixed_split, k)

    Returns
    -------
    TableResult(summaries: OrderedDict (target, mode key) -> ExperimentSummary, failures: dict -> message)
    """
    k = spec_kwargs.pop('k', None) or choose_k(datasets.values())
    storage = storage if storage is not None else ModelStorage()
    summaries = OrderedDict()
    failures = OrderedDict()
    for target in targets:
        for mode in table_modes(target, sources):
            spec = ExperimentSpec(target, mode, k=k, repetitions=repetitions, **spec_kwargs)
            try:
                summary = run_cell(spec, datasets, jobs=jobs, storage=storage, artifact_dir=artifact_dir)
            except ExperimentError as e:
                if not continue_on_error:
                    raise
                logger.error(str(e))
                failures[(target, mode.key)] = str(e)
                continue
            summaries[summary.key] = summary
            callback is not None and callback(summary)
    return TableResult(summaries, failures)


class ExperimentRunner(object):
    def __init__(self, datasets, repetitions=DEFAULT_REPETITIONS, base_seed=0, train_config=None,
                 hidden_sizes=DEFAULT_HIDDEN_SIZES, fixed_split=False, k=None, jobs=1, model_dir=None,
                 artifact_dir=None):
        """ Holds the loaded meta-datasets and shared settings of a batch of experiments.

        :param datasets: mapping name -> MetaDataset, K defaults to choose_k over all of them
        :param model_dir: directory of stored models, reused by later runners; memory only when None
        :param artifact_dir: directory receiving per-repetition history and meta-dataset files
        """
        self.datasets = OrderedDict(datasets)
        self.k = k or choose_k(self.datasets.values())
        self.repetitions = repetitions
        self.base_seed = base_seed
        self.train_config = train_config or TrainConfig()
        self.hidden_sizes = tuple(hidden_sizes)
        self.fixed_split = fixed_split
        self.jobs = jobs
        self.storage = ModelStorage(model_dir)
        self.artifact_dir = artifact_dir
        self.logger = log.instance_logger('runner', self)

    def spec(self, target, mode=NORMAL, repetitions=None):
        return ExperimentSpec(target, mode, k=self.k, repetitions=repetitions or self.repetitions,
                              base_seed=self.base_seed, train_config=self.train_config,
                              hidden_sizes=self.hidden_sizes, fixed_split=self.fixed_split)

    def run_cell(self, target, mode=NORMAL, repetitions=None):
        return run_cell(self.spec(target, mode, repetitions), self.datasets, jobs=self.jobs, storage=self.storage,
                        artifact_dir=self.artifact_dir)

    def run_table(self, targets=None, sources=None, repetitions=None, continue_on_error=False, callback=None):
        targets = list(targets or self.datasets)
        sources = list(sources or self.datasets)
        self.logger.info('running table over %s with sources %s, k=%d' % (targets, sources, self.k))
        return run_table(targets, sources, repetitions or self.repetitions, self.datasets,
                         continue_on_error=continue_on_error, jobs=self.jobs, callback=callback,
                         storage=self.storage, artifact_dir=self.artifact_dir, k=self.k,
                         base_seed=self.base_seed, train_config=self.train_config,
                         hidden_sizes=self.hidden_sizes, fixed_split=self.fixed_split)
