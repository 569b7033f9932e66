"""
metaxfer command line: fetch, inspect, run one cell, reproduce the full grid, write synthetic scenarios.

Exit codes: 0 success, 1 a scenario / dataset / experiment failure, 2 bad arguments.
"""
import argparse
import os
import sys
from collections import OrderedDict

import metaxfer
from metaxfer.aslib.arff import ArffError
from metaxfer.aslib.datamgr import CacheMissError, IncompleteScenario, NetworkError, fetch_scenario
from metaxfer.aslib.scenario import ScenarioError, load_scenario
from metaxfer.aslib.synthetic import write_synthetic_scenario
from metaxfer.config import CliConfig, DEFAULT_REPETITIONS, DEFAULT_SCENARIOS, DEFAULT_SEED
from metaxfer.experiment import ExperimentError, ExperimentRunner, Mode, NORMAL
from metaxfer.meta.dataset import MIN_CLASS_SIZE, DatasetError, choose_k, derive_labels
from metaxfer.nn.mlp import ModelError
from metaxfer.nn.transfer import FREEZE_LEVELS
from metaxfer.report import reference_for, render_markdown, write_results, write_summary
import metaxfer.util.log as log


__all__ = ['main', 'build_parser']

logger = log.get_logger(__name__)

DOMAIN_ERRORS = (ArffError, ScenarioError, DatasetError, ModelError, ExperimentError, NetworkError,
                 IncompleteScenario, CacheMissError)


def _add_training_options(p, reps_default):
    p.add_argument('--reps', type=int, default=reps_default, help='repetitions per cell')
    p.add_argument('--seed', type=int, default=DEFAULT_SEED, help='base seed')
    p.add_argument('--epochs', type=int)
    p.add_argument('--lr', type=float, help='Adam learning rate')
    p.add_argument('--batch-size', type=int)
    p.add_argument('--hidden', type=int, nargs=2, metavar=('H1', 'H2'), help='hidden layer sizes')
    p.add_argument('--fixed-split', action='store_true', help='reuse one train/test split for every repetition')
    p.add_argument('--scenarios', nargs='+', help='scenarios K is chosen over (default: the four CSP scenarios)')


def build_parser():
    parser = argparse.ArgumentParser(prog='metaxfer', description='Meta-level transfer learning on ASlib scenarios')
    parser.add_argument('--version', action='version', version='%(prog)s ' + metaxfer.__version__)
    parser.add_argument('--cache-dir', help='scenario cache, default $METAXFER_CACHE or ~/.cache/metaxfer')
    parser.add_argument('--results-dir', help='results root, default $METAXFER_RESULTS or ./results')
    parser.add_argument('--url-template', help='download url with {scenario} and {filename}')
    parser.add_argument('--offline', action='store_true', help='never touch the network')
    parser.add_argument('--log-level', help='DEBUG, INFO, WARNING, ... default $METAXFER_LOG_LEVEL or INFO')
    parser.add_argument('--jobs', type=int, default=1, help='worker processes for repetitions')
    sub = parser.add_subparsers(dest='command', metavar='COMMAND')
    sub.required = True

    p = sub.add_parser('fetch', help='download scenarios into the cache')
    p.add_argument('names', nargs='*', help='scenario names (default: the four CSP scenarios)')
    p.set_defaults(func=cmd_fetch)

    p = sub.add_parser('inspect', help='print scenario and meta-dataset statistics')
    p.add_argument('name')
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser('run', help='run one cell (Normal, or transfer with --source and --freeze)')
    p.add_argument('target')
    p.add_argument('--source', help='source scenario of the transferred model')
    p.add_argument('--freeze', type=int, choices=FREEZE_LEVELS, help='frozen hidden layers')
    _add_training_options(p, DEFAULT_REPETITIONS)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser('reproduce', help='run the full grid and render it next to the published numbers')
    _add_training_options(p, DEFAULT_REPETITIONS)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser('synth', help='write a separable synthetic scenario into the cache')
    p.add_argument('name')
    p.add_argument('--instances', type=int, default=200)
    p.add_argument('--features', type=int, default=8)
    p.add_argument('--algorithms', type=int, default=3)
    p.add_argument('--seed', type=int, default=DEFAULT_SEED)
    p.set_defaults(func=cmd_synth)
    return parser


def _config(args):
    train_overrides = {'epochs': getattr(args, 'epochs', None),
                       'learning_rate': getattr(args, 'lr', None),
                       'batch_size': getattr(args, 'batch_size', None)}
    return CliConfig.from_env(cache_dir=args.cache_dir, results_dir=args.results_dir,
                              seed=getattr(args, 'seed', None), repetitions=getattr(args, 'reps', None),
                              train_overrides=train_overrides, scenarios=getattr(args, 'scenarios', None),
                              hidden_sizes=getattr(args, 'hidden', None), url_template=args.url_template,
                              jobs=args.jobs, fixed_split=getattr(args, 'fixed_split', None))


def _scenario_dir(name, cfg, offline):
    return fetch_scenario(name, cfg.cache_dir, cfg.url_template, offline=offline)


def load_datasets(names, cfg, offline=False):
    """ :return: OrderedDict name -> MetaDataset, fetched into the cache when needed """
    datasets = OrderedDict()
    for name in names:
        if name not in datasets:
            datasets[name] = derive_labels(load_scenario(_scenario_dir(name, cfg, offline)))
    return datasets


def _runner(cfg, datasets, k_names):
    return ExperimentRunner(datasets, repetitions=cfg.repetitions, base_seed=cfg.seed,
                            train_config=cfg.train_config(), hidden_sizes=cfg.hidden_sizes,
                            fixed_split=cfg.fixed_split, k=choose_k(datasets[n] for n in k_names), jobs=cfg.jobs,
                            model_dir=os.path.join(cfg.results_dir, 'models'), artifact_dir=cfg.results_dir)


def cmd_fetch(args, cfg):
    names = args.names or list(DEFAULT_SCENARIOS)
    failed = 0
    for name in names:
        try:
            path = _scenario_dir(name, cfg, args.offline)
        except DOMAIN_ERRORS as e:
            logger.error('fetch %s failed: %s' % (name, e))
            print('%s: FAILED (%s)' % (name, e), file=sys.stderr)
            failed += 1
            continue
        print('%s: %s' % (name, path))
    return 1 if failed else 0


def cmd_inspect(args, cfg):
    scenario = load_scenario(_scenario_dir(args.name, cfg, args.offline))
    print('scenario:    %s' % scenario.scenario_id)
    print('measure:     %s (%s)' % (scenario.performance_measure,
                                    'maximize' if scenario.maximize else 'minimize'))
    print('cutoff:      %s' % ('-' if scenario.cutoff_time is None else scenario.cutoff_time))
    print('instances:   %d' % scenario.n_instances)
    print('features:    %d' % scenario.n_features)
    print('algorithms:  %d' % len(scenario.algorithms))
    try:
        ds = derive_labels(scenario)
    except DatasetError as e:
        print('k-eligible:  no (%s)' % e)
        return 1
    print('meta rows:   %d' % ds.n_rows)
    print('classes:     %d' % ds.n_classes)
    for name, count in ds.class_counts.items():
        print('  %-30s %d' % (name, count))
    print('k-eligible:  yes (contributes d=%d, every class has >= %d instances)' % (ds.n_features, MIN_CLASS_SIZE))
    return 0


def cmd_run(args, cfg):
    mode = NORMAL if args.source is None else Mode.transfer(args.source, args.freeze)
    k_names = [n for n in cfg.scenarios] if args.target in cfg.scenarios else []
    k_names = list(OrderedDict.fromkeys(k_names + [n for n in (args.target, args.source) if n is not None]))
    datasets = load_datasets(k_names, cfg, args.offline)

    summary = _runner(cfg, datasets, k_names).run_cell(args.target, mode)
    path = write_summary(summary, cfg.results_dir)
    print('%s %s: acc %.4f ± %.4f, loss %.4f ± %.4f (%d reps)' % (
        summary.spec.target, summary.spec.mode.key, summary.mean_acc, summary.std_acc, summary.mean_loss,
        summary.std_loss, summary.spec.repetitions))
    ref = reference_for(summary.spec.target, summary.spec.mode.key)
    if ref is not None:
        print('published: acc %.2f ± %.2f, loss %.2f ± %.2f' % (ref[0] + ref[1]))
    print('wrote %s' % path)
    return 0


def cmd_reproduce(args, cfg):
    names = list(cfg.scenarios)
    datasets = OrderedDict()
    failed = []
    for name in names:
        try:
            datasets.update(load_datasets([name], cfg, args.offline))
        except DOMAIN_ERRORS as e:
            logger.error('cannot load %s: %s' % (name, e))
            failed.append(name)
    if len(datasets) < len(names):
        print('failed to load: %s' % ', '.join(failed), file=sys.stderr)
        return 1

    runner = _runner(cfg, datasets, names)
    table = runner.run_table(names, names, continue_on_error=True,
                             callback=lambda s: write_summary(s, cfg.results_dir))
    write_results(table.summaries, cfg.results_dir, with_reference=True)
    print(render_markdown(table.summaries, with_reference=True))
    for (target, mode_key), message in table.failures.items():
        print('FAILED %s %s: %s' % (target, mode_key, message), file=sys.stderr)
    return 1 if table.failures else 0


def cmd_synth(args, cfg):
    directory = os.path.join(cfg.cache_dir, args.name)
    write_synthetic_scenario(directory, n_instances=args.instances, n_features=args.features,
                             n_algorithms=args.algorithms, seed=args.seed, scenario_id=args.name)
    print('%s: %s' % (args.name, directory))
    return 0


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    log.default_setup(args.log_level)

    if args.command == 'run':
        if (args.source is None) != (args.freeze is None):
            parser.error('--source and --freeze must be given together')
        if args.source is not None and args.source == args.target:
            parser.error('--source must differ from the target')
    try:
        cfg = _config(args)
    except ValueError as e:
        parser.error(str(e))

    try:
        return args.func(args, cfg)
    except DOMAIN_ERRORS as e:
        logger.error('%s failed: %s' % (args.command, e))
        print('error: %s' % e, file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
