import os
import unittest

from metaxfer.aslib.arff import MISSING, ArffRelation, MalformedArff, dumps_arff, parse_arff, parse_arff_file
from metaxfer.tests.helpers import GOLDEN_SCENARIO, MALFORMED_DIR


class TestParseArff(unittest.TestCase):
    def test_minimal(self):
        rel = parse_arff('@relation r\n@attribute a NUMERIC\n@data\n1.5\n?')
        self.assertEqual('r', rel.name)
        self.assertEqual([('a', 'NUMERIC')], rel.attributes)
        self.assertEqual([[1.5], [MISSING]], rel.rows)

    def test_missing_token(self):
        rel = parse_arff('@relation r\n@attribute s STRING\n@attribute a NUMERIC\n@attribute b NUMERIC\n'
                         '@data\nx,?,3\n')
        self.assertEqual([['x', MISSING, 3.0]], rel.rows)

    def test_keywords_case_insensitive_and_comments(self):
        text = '% leading comment\n\n@RELATION r\n@Attribute a real\n% between\n@ATTRIBUTE n integer\n\n' \
               '@DaTa\n% inside data\n0.25, 4\n'
        rel = parse_arff(text)
        self.assertEqual([('a', 'REAL'), ('n', 'INTEGER')], rel.attributes)
        self.assertEqual([[0.25, 4]], rel.rows)
        self.assertIsInstance(rel.rows[0][1], int)

    def test_quoted_values(self):
        text = "@relation 'my rel'\n@attribute 'instance id' STRING\n@attribute s {'a b',c}\n@data\n" \
               "'x, y',c\n\"it\\'s\",'a b'\n"
        rel = parse_arff(text)
        self.assertEqual('my rel', rel.name)
        self.assertEqual([('instance id', 'STRING'), ('s', ('a b', 'c'))], rel.attributes)
        self.assertEqual([['x, y', 'c'], ["it's", 'a b']], rel.rows)

    def test_arity_mismatch_reports_line(self):
        with self.assertRaises(MalformedArff) as cm:
            parse_arff_file(os.path.join(MALFORMED_DIR, 'arity.arff'))
        self.assertEqual(7, cm.exception.line)
        self.assertIn('expected 3 values', cm.exception.reason)

    def test_unknown_type(self):
        with self.assertRaises(MalformedArff) as cm:
            parse_arff('@relation r\n@attribute d DATE\n@data\n')
        self.assertEqual(2, cm.exception.line)

    def test_nominal_outside_declared_set(self):
        with self.assertRaises(MalformedArff) as cm:
            parse_arff('@relation r\n@attribute s {ok,timeout}\n@data\nok\ncrashed\n')
        self.assertEqual(5, cm.exception.line)

    def test_numeric_parse_failure(self):
        self.assertRaises(MalformedArff, parse_arff, '@relation r\n@attribute a NUMERIC\n@data\nabc\n')
        self.assertRaises(MalformedArff, parse_arff, '@relation r\n@attribute a INTEGER\n@data\n1.5\n')

    def test_layout_errors(self):
        self.assertRaises(MalformedArff, parse_arff, '@relation r\n@attribute a NUMERIC\n')
        self.assertRaises(MalformedArff, parse_arff, '@relation r\n@data\n1\n')
        self.assertRaises(MalformedArff, parse_arff, '@relation r\n@relation s\n@attribute a NUMERIC\n@data\n')
        self.assertRaises(MalformedArff, parse_arff, '@relation r\nhello\n@data\n')

    def test_malformed_corpus(self):
        names = sorted(os.listdir(MALFORMED_DIR))
        self.assertGreaterEqual(len(names), 8)
        for name in names:
            with self.subTest(name=name):
                self.assertRaises(MalformedArff, parse_arff_file, os.path.join(MALFORMED_DIR, name))

    def test_golden_corpus(self):
        features = parse_arff_file(os.path.join(GOLDEN_SCENARIO, 'feature_values.arff'))
        runs = parse_arff_file(os.path.join(GOLDEN_SCENARIO, 'algorithm_runs.arff'))
        self.assertEqual(13, len(features.rows))
        self.assertEqual(25, len(runs.rows))
        self.assertEqual('inst/03.xml', features.rows[2][0])
        self.assertIs(MISSING, features.rows[2][4])
        self.assertEqual(('ok', 'timeout', 'memout', 'not_applicable', 'crash', 'other'), runs.attributes[-1][1])
        # every run refers to an instance of the feature table
        self.assertTrue({r[0] for r in runs.rows} <= {r[0] for r in features.rows})


class TestDumpArff(unittest.TestCase):
    def test_round_trip(self):
        rel = ArffRelation("odd name, with 'quotes'",
                           [('instance_id', 'STRING'), ('x', 'REAL'), ('n', 'INTEGER'),
                            ('status', ('ok', 'not ok', '?')), ('comment', 'STRING')],
                           [['a/b.cnf', 0.1, 3, 'ok', ''],
                            ['with space', 1e-300, -7, 'not ok', "it's, \\odd"],
                            ['?', MISSING, MISSING, '?', MISSING],
                            ['%x', 2.0 / 3.0, 0, MISSING, '{brace}']])
        self.assertEqual(rel, parse_arff(dumps_arff(rel)))

    def test_golden_round_trip(self):
        rel = parse_arff_file(os.path.join(GOLDEN_SCENARIO, 'algorithm_runs.arff'))
        self.assertEqual(rel, parse_arff(dumps_arff(rel)))

    def test_rejects_bad_rows(self):
        rel = ArffRelation('r', [('a', 'NUMERIC')], [[1.0, 2.0]])
        self.assertRaises(ValueError, dumps_arff, rel)
        rel = ArffRelation('r', [('a', 'NUMERIC')], [[float('inf')]])
        self.assertRaises(ValueError, dumps_arff, rel)


if __name__ == '__main__':
    unittest.main()
