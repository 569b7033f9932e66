import unittest

import numpy as np
import pandas as pd

from metaxfer.util.fmt import (DeltaFormatter, FloatFormatter, MeanStdFormatter, new_delta_formatter,
                               new_float_formatter, new_mean_std_formatter)


class TestFormatters(unittest.TestCase):
    def test_float(self):
        self.assertEqual('1.23', FloatFormatter(1.234))
        self.assertEqual('-', FloatFormatter(None))
        self.assertEqual('-', FloatFormatter(np.nan))
        self.assertEqual(['0.10', '2.00'], FloatFormatter([0.1, 2]))
        self.assertEqual('x0.500%', new_float_formatter(precision=3, prefix='x', suffix='%')(0.5))

    def test_delta(self):
        self.assertEqual('+0.05', DeltaFormatter(0.05))
        self.assertEqual('-0.30', DeltaFormatter(-0.3))
        self.assertEqual('+0.00', DeltaFormatter(-0.001))
        self.assertEqual('n/a', new_delta_formatter(nan='n/a')(np.nan))

    def test_overrides_do_not_leak(self):
        self.assertEqual('0.50', FloatFormatter(0.5))
        self.assertEqual('0.5000', FloatFormatter(0.5, precision=4))
        self.assertEqual('0.50', FloatFormatter(0.5))
        self.assertEqual(2, FloatFormatter.precision)

        self.assertEqual(['0.1', '-'], FloatFormatter([0.125, None], precision=1, nan='-'))
        self.assertEqual(['0.250'], FloatFormatter(pd.Series([0.25]), precision=3).tolist())
        self.assertEqual('0.75', FloatFormatter(0.75))
        self.assertEqual('+0.50', FloatFormatter(0.5, sign=True))
        self.assertEqual('0.50', FloatFormatter(0.5))
        self.assertEqual('-0.50', DeltaFormatter(-0.5, sign=False))
        self.assertEqual('+0.50', DeltaFormatter(0.5))
        # unknown keywords are ignored
        self.assertEqual('0.50', FloatFormatter(0.5, width=9))

    def test_series_and_frame(self):
        s = FloatFormatter(pd.Series([1.0, np.nan]))
        self.assertEqual(['1.00', '-'], s.tolist())
        frame = new_float_formatter(precision=1)(pd.DataFrame({'a': [0.25, 1.0]}))
        self.assertEqual(['0.2', '1.0'], frame['a'].tolist())

    def test_mean_std(self):
        self.assertEqual('0.50 ± 0.25', MeanStdFormatter(0.5, 0.25))
        self.assertEqual('**0.50 ± 0.25**', MeanStdFormatter(0.5, 0.25, bold=True))
        self.assertEqual('-', MeanStdFormatter(np.nan, np.nan))
        self.assertEqual('1.000 ± 0.000', new_mean_std_formatter(precision=3)(1.0, 0.0))


if __name__ == '__main__':
    unittest.main()
