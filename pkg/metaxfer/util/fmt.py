"""Format helpers for result tables"""
import copy

import numpy as np
import pandas as pd


class NumberFormat(object):
    def __init__(self, precision=2, sign=False, suffix=None, prefix=None, nan='-'):
        """
        Parameters
        ----------
        precision : int, defaults to 2
                    Number of decimals places to show
        sign : bool, default to False
                    If True then always show the sign, so deltas read as +0.01 / -0.03
        suffix : str, appended to the text
        prefix : str, prepended to the text
        nan : str, text used for NaN / None
        """
        self.precision = precision
        self.sign = sign
        self.suffix = suffix or ''
        self.prefix = prefix or ''
        self.nan = nan

    def __call__(self, value, **kwargs):
        # overrides apply to this call only, the shared formatters stay untouched
        overrides = {k: v for k, v in kwargs.items() if hasattr(self, k)}
        if overrides:
            fmt = copy.copy(self)
            fmt.__dict__.update(overrides)
            return fmt(value)

        if isinstance(value, pd.Series):
            return value.apply(self)
        elif isinstance(value, pd.DataFrame):
            return value.apply(lambda col: col.map(self))
        elif isinstance(value, (list, tuple)):
            return [self(v) for v in value]

        if value is None or np.isnan(value):
            return self.nan

        fmt = '{:' + (self.sign and '+' or '') + '.' + str(self.precision) + 'f}'
        txt = fmt.format(float(value))
        # -0.00 reads badly in a delta column
        if float(txt) == 0:
            txt = fmt.format(0.0)
        return '{prefix}{txt}{suffix}'.format(prefix=self.prefix, txt=txt, suffix=self.suffix)


class MeanStdFormat(object):
    """Render a (mean, std) pair as 'm ± s'."""

    def __init__(self, precision=2, bold=False, nan='-'):
        self.number = NumberFormat(precision=precision, nan=nan)
        self.bold = bold
        self.nan = nan

    def __call__(self, mean, std, bold=None):
        if mean is None or np.isnan(mean):
            return self.nan
        txt = '%s ± %s' % (self.number(mean), self.number(std))
        if self.bold if bold is None else bold:
            txt = '**%s**' % txt
        return txt


def new_float_formatter(precision=2, prefix=None, suffix=None, nan='-'):
    return NumberFormat(**locals())


def new_delta_formatter(precision=2, nan='-'):
    sign = True
    return NumberFormat(**locals())


def new_mean_std_formatter(precision=2, nan='-'):
    return MeanStdFormat(**locals())


# Common Formats
FloatFormatter = new_float_formatter()
DeltaFormatter = new_delta_formatter()
MeanStdFormatter = new_mean_std_formatter()
