import os
import shutil
import tempfile
import unittest

import numpy as np

from metaxfer.aslib.scenario import (AslibScenario, InconsistentScenario, MissingKey, RunRecord, UnparsableValue,
                                     UnsupportedFeature, load_scenario, normalize_runstatus, parse_description)
from metaxfer.aslib.synthetic import write_synthetic_scenario
from metaxfer.tests.helpers import GOLDEN_SCENARIO


class TestParseDescription(unittest.TestCase):
    def test_minimal(self):
        desc = parse_description('performance_measures: runtime\nmaximize: false')
        self.assertEqual(('runtime', False, None, None), tuple(desc[:4]))
        self.assertEqual('runtime', desc.performance_type)

    def test_missing_performance_measures(self):
        self.assertRaises(MissingKey, parse_description, 'maximize: true')
        self.assertRaises(MissingKey, parse_description, 'performance_measures: runtime\n')

    def test_list_forms(self):
        desc = parse_description('scenario_id: X\nperformance_measures: [runtime, par10]\nmaximize: [true]\n'
                                 'algorithm_cutoff_time: 1200\n')
        self.assertEqual(('runtime', True, 1200.0, 'X'), tuple(desc[:4]))

        desc = parse_description('performance_measures:\n  - solution_quality\nmaximize:\n  - yes\n'
                                 'performance_type:\n  - solution_quality\n')
        self.assertEqual('solution_quality', desc.performance_measure)
        self.assertTrue(desc.maximize)
        self.assertEqual('solution_quality', desc.performance_type)

    def test_unindented_block_lists(self):
        text = ("algorithm_cutoff_memory: '?'\n"
                "algorithm_cutoff_time: 5000.0\n"
                "algorithms_deterministic:\n- chuffed\n- gecode\n"
                "feature_steps:\n  basic:\n    provides:\n    - nvars\n"
                "features_cutoff_time: '?'\n"
                "maximize:\n- false\n"
                "performance_measures:\n- runtime\n"
                "performance_type:\n- runtime\n"
                "scenario_id: CSP-2010\n")
        desc = parse_description(text)
        self.assertEqual(('runtime', False, 5000.0, 'CSP-2010'), tuple(desc[:4]))
        self.assertEqual('runtime', desc.performance_type)

        desc = parse_description("performance_measures:\n- quality\n- runtime\nmaximize:\n- true\n"
                                 "algorithm_cutoff_time: '?'\n")
        self.assertEqual(('quality', True, None, None), tuple(desc[:4]))

    def test_absent_cutoff(self):
        desc = parse_description('performance_measures: runtime\nmaximize: false\nalgorithm_cutoff_time: ?\n')
        self.assertIsNone(desc.cutoff_time)

    def test_unparsable_values(self):
        self.assertRaises(UnparsableValue, parse_description, 'performance_measures: runtime\nmaximize: perhaps')
        self.assertRaises(UnparsableValue, parse_description,
                          'performance_measures: runtime\nmaximize: false\nalgorithm_cutoff_time: soon\n')
        self.assertRaises(UnparsableValue, parse_description,
                          'performance_measures: runtime\nmaximize: false\nalgorithm_cutoff_time: -5\n')

    def test_golden_description(self):
        with open(os.path.join(GOLDEN_SCENARIO, 'description.txt'), encoding='utf-8') as f:
            desc = parse_description(f)
        self.assertEqual(('runtime', False, 100.0, 'tiny-csp'), tuple(desc[:4]))


class TestRunStatus(unittest.TestCase):
    def test_mapping(self):
        for status in ('ok', 'timeout', 'memout', 'crash', 'other'):
            self.assertEqual(status, normalize_runstatus(status))
        self.assertEqual('other', normalize_runstatus('not_applicable'))
        self.assertEqual('ok', normalize_runstatus(' OK '))
        self.assertEqual('unknown', normalize_runstatus('segfault'))
        self.assertEqual('unknown', normalize_runstatus(None))


class TestAslibScenario(unittest.TestCase):
    def _scenario(self, runs):
        return AslibScenario('s', ['i1', 'i2'], ['f'], [[1.0], [np.nan]], ['b', 'a'], runs, 'runtime', False, 10.0)

    def test_invariants(self):
        s = self._scenario({('i1', 'a'): RunRecord(1.0, 'ok')})
        self.assertEqual(('a', 'b'), s.algorithms)
        self.assertEqual((2, 1), s.feature_values.shape)
        self.assertRaises(InconsistentScenario, self._scenario, {('i3', 'a'): RunRecord(1.0, 'ok')})
        self.assertRaises(InconsistentScenario, self._scenario, {('i1', 'c'): RunRecord(1.0, 'ok')})
        self.assertRaises(InconsistentScenario, self._scenario, {('i1', 'a'): RunRecord(float('nan'), 'ok')})

    def test_immutable(self):
        s = self._scenario({('i1', 'a'): RunRecord(1.0, 'ok')})
        with self.assertRaises(ValueError):
            s.feature_values[0, 0] = 2.0
        with self.assertRaises(TypeError):
            s.runs[('i2', 'a')] = RunRecord(1.0, 'ok')

    def test_performance_matrix(self):
        s = self._scenario({('i1', 'a'): RunRecord(1.0, 'ok'), ('i1', 'b'): RunRecord(10.0, 'timeout')})
        perf, ok = s.performance_matrix()
        np.testing.assert_array_equal([[1.0, 10.0], [np.nan, np.nan]], perf)
        np.testing.assert_array_equal([[True, False], [False, False]], ok)


class TestLoadScenario(unittest.TestCase):
    def setUp(self):
        self._tmp = tempfile.TemporaryDirectory()
        self.tmp = self._tmp.name

    def tearDown(self):
        self._tmp.cleanup()

    def _copy_golden(self):
        directory = os.path.join(self.tmp, 'tiny-csp')
        shutil.copytree(GOLDEN_SCENARIO, directory)
        return directory

    def test_golden(self):
        with self.assertLogs('metaxfer.aslib.scenario', 'WARNING') as logs:
            s = load_scenario(GOLDEN_SCENARIO)
        self.assertTrue(any('dropping 1 instances' in line for line in logs.output))
        self.assertEqual('tiny-csp', s.scenario_id)
        self.assertEqual(12, s.n_instances)
        self.assertNotIn('inst/13.xml', s.instances)
        self.assertEqual(('nvars', 'ncons', 'density'), s.feature_names)
        self.assertEqual(('fc', 'mac'), s.algorithms)
        self.assertEqual(100.0, s.cutoff_time)
        self.assertFalse(s.maximize)
        self.assertTrue(np.isnan(s.feature_values[2, 2]))
        self.assertEqual(24, len(s.runs))
        # repetition 2 is ignored
        self.assertEqual(RunRecord(3.0, 'ok'), s.runs[('inst/01.xml', 'fc')])
        self.assertEqual(RunRecord(100.0, 'memout'), s.runs[('inst/06.xml', 'fc')])

        frame = s.as_frame()
        self.assertEqual(['nvars', 'ncons', 'density'], list(frame.columns))
        self.assertEqual(30.0, frame.loc['inst/04.xml', 'nvars'])
        self.assertEqual(12, len(frame))

    def test_deterministic(self):
        self.assertEqual(load_scenario(GOLDEN_SCENARIO).to_json(), load_scenario(GOLDEN_SCENARIO).to_json())
        self.assertEqual(load_scenario(GOLDEN_SCENARIO).content_hash(),
                         load_scenario(self._copy_golden()).content_hash())

    def test_nominal_feature_rejected(self):
        directory = self._copy_golden()
        with open(os.path.join(directory, 'feature_values.arff'), 'w', encoding='utf-8') as f:
            f.write('@relation f\n@attribute instance_id STRING\n@attribute kind {a,b}\n@data\nx,a\n')
        self.assertRaises(UnsupportedFeature, load_scenario, directory)

    def test_duplicate_run(self):
        directory = self._copy_golden()
        with open(os.path.join(directory, 'algorithm_runs.arff'), 'a', encoding='utf-8') as f:
            f.write("'inst/02.xml',1,mac,2.5,ok\n")
        self.assertRaises(InconsistentScenario, load_scenario, directory)

    def test_no_common_instances(self):
        directory = self._copy_golden()
        with open(os.path.join(directory, 'feature_values.arff'), 'w', encoding='utf-8') as f:
            f.write('@relation f\n@attribute instance_id STRING\n@attribute x NUMERIC\n@data\nnobody,1\n')
        self.assertRaises(InconsistentScenario, load_scenario, directory)

    def test_missing_performance_downgraded(self):
        directory = self._copy_golden()
        with open(os.path.join(directory, 'algorithm_runs.arff'), 'a', encoding='utf-8') as f:
            f.write("'inst/13.xml',1,mac,?,ok\n'inst/13.xml',1,fc,1.0,ok\n")
        s = load_scenario(directory)
        self.assertEqual(13, s.n_instances)
        self.assertEqual(RunRecord(100.0, 'unknown'), s.runs[('inst/13.xml', 'mac')])

    def test_synthetic(self):
        directory = write_synthetic_scenario(os.path.join(self.tmp, 'synth'), n_instances=30, n_features=5,
                                             n_algorithms=3, seed=3)
        s = load_scenario(directory)
        self.assertEqual('synth', s.scenario_id)
        self.assertEqual(30, s.n_instances)
        self.assertEqual(5, s.n_features)
        self.assertEqual(('algo_a', 'algo_b', 'algo_c'), s.algorithms)
        self.assertEqual(90, len(s.runs))
        self.assertFalse(np.isnan(s.feature_values[:, :3]).any())


if __name__ == '__main__':
    unittest.main()
