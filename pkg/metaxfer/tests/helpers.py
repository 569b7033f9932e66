"""Fixtures shared by the test modules."""
import os
from collections import OrderedDict

from metaxfer.aslib.scenario import load_scenario
from metaxfer.aslib.synthetic import write_synthetic_scenario
from metaxfer.meta.dataset import derive_labels
from metaxfer.nn.adam import TrainConfig

DATA_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'data')
GOLDEN_SCENARIO = os.path.join(DATA_DIR, 'tiny-csp')
MALFORMED_DIR = os.path.join(DATA_DIR, 'malformed')

FAST_CONFIG = TrainConfig(epochs=8, batch_size=16)


def synthetic_datasets(root, names=('toy-a', 'toy-b'), n_instances=60, n_features=6, n_algorithms=3):
    """ :return: OrderedDict name -> MetaDataset of synthetic scenarios written below root """
    datasets = OrderedDict()
    for seed, name in enumerate(names):
        directory = write_synthetic_scenario(os.path.join(root, name), n_instances=n_instances,
                                             n_features=n_features, n_algorithms=n_algorithms, seed=seed)
        datasets[name] = derive_labels(load_scenario(directory))
    return datasets
