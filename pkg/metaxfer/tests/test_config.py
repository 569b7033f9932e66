import os
import unittest
from unittest import mock

from metaxfer.config import (ASLIB_URL_TEMPLATE, CACHE_ENV, DEFAULT_SCENARIOS, RESULTS_ENV, URL_TEMPLATE_ENV,
                             CliConfig, resolve_cache_dir, resolve_results_dir, resolve_url_template)
from metaxfer.nn.adam import TrainConfig


class TestResolve(unittest.TestCase):
    def test_defaults(self):
        with mock.patch.dict(os.environ, clear=True):
            os.environ['HOME'] = '/home/someone'
            self.assertEqual('/home/someone/.cache/metaxfer', resolve_cache_dir())
            self.assertEqual('results', resolve_results_dir())
            self.assertEqual(ASLIB_URL_TEMPLATE, resolve_url_template())

    def test_environment_and_arguments(self):
        env = {CACHE_ENV: '/env/cache', RESULTS_ENV: '/env/results', URL_TEMPLATE_ENV: 'file:///x/{scenario}/{filename}'}
        with mock.patch.dict(os.environ, env):
            self.assertEqual('/env/cache', resolve_cache_dir())
            self.assertEqual('/arg/cache', resolve_cache_dir('/arg/cache'))
            self.assertEqual('/env/results', resolve_results_dir())
            self.assertEqual('file:///x/{scenario}/{filename}', resolve_url_template())
            cfg = CliConfig.from_env(cache_dir=None, results_dir='/arg/results')
            self.assertEqual('/env/cache', cfg.cache_dir)
            self.assertEqual('/arg/results', cfg.results_dir)


class TestCliConfig(unittest.TestCase):
    def test_defaults(self):
        cfg = CliConfig(cache_dir='/c', results_dir='/r')
        self.assertEqual(DEFAULT_SCENARIOS, cfg.scenarios)
        self.assertEqual((64, 32), cfg.hidden_sizes)
        self.assertEqual(30, cfg.repetitions)
        self.assertEqual(TrainConfig(), cfg.train_config())

    def test_train_overrides(self):
        cfg = CliConfig(cache_dir='/c', train_overrides={'epochs': 5, 'learning_rate': None, 'batch_size': 8})
        self.assertEqual(TrainConfig(epochs=5, batch_size=8, seed=3), cfg.train_config(seed=3))

    def test_invalid(self):
        self.assertRaises(ValueError, CliConfig, cache_dir='/c', repetitions=0)
        self.assertRaises(ValueError, CliConfig, cache_dir='/c', jobs=0)
        self.assertRaises(ValueError, CliConfig, cache_dir='/c', hidden_sizes=(64,))
        self.assertRaises(ValueError, CliConfig, cache_dir='/c', scenarios=())
        self.assertRaises(ValueError, CliConfig, cache_dir='/c', train_overrides={'epochs': 0})


if __name__ == '__main__':
    unittest.main()
