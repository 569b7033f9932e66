"""
Result files and the rendered results table.

results/<target>/<mode>.json  per-cell runs, aggregates and provenance
results/table.csv             one row per cell, full precision
results/table.md              per-target Acc / Loss blocks, 'm ± s' to 2 decimals, best cell per row in bold
"""
import os
from collections import OrderedDict

import numpy as np
import pandas as pd

from metaxfer.util.fmt import DeltaFormatter, MeanStdFormatter
import metaxfer.util.log as log


__all__ = ['PUBLISHED_TABLE', 'table_frame', 'render_markdown', 'write_summary', 'write_results', 'reference_for']

logger = log.get_logger(__name__)

TABLE_CSV = 'table.csv'
TABLE_MD = 'table.md'


def _published(rows):
    """ {mode key: ((acc mean, acc std), (loss mean, loss std))} from (mode key, acc m, acc s, loss m, loss s) """
    return OrderedDict((key, ((am, asd), (lm, lsd))) for key, am, asd, lm, lsd in rows)


# Published mean ± std of 30 runs for the four CSP scenarios, used for side-by-side deltas only.
PUBLISHED_TABLE = {
    'CSP-2010': _published([
        ('normal', .87, .01, .64, .15),
        ('CSP-MZN_0HL', .88, .01, .56, .12),
        ('CSP-MZN_1HL', .87, .01, .84, .08),
        ('CSP-MZN_2HL', .87, .01, 1.01, .06),
        ('CSP-Minizinc-Obj_0HL', .87, .01, .65, .15),
        ('CSP-Minizinc-Obj_1HL', .86, .01, .90, .04),
        ('CSP-Minizinc-Obj_2HL', .87, .01, 1.01, .09),
        ('CSP-Minizinc-Time_0HL', .87, .01, .65, .17),
        ('CSP-Minizinc-Time_1HL', .86, .01, 1.00, .06),
        ('CSP-Minizinc-Time_2HL', .85, .01, 1.07, .09),
    ]),
    'CSP-MZN': _published([
        ('normal', .71, .01, 1.23, .19),
        ('CSP-2010_0HL', .71, .01, 1.27, .22),
        ('CSP-2010_1HL', .70, .01, 1.71, .07),
        ('CSP-2010_2HL', .71, .01, 1.95, .07),
        ('CSP-Minizinc-Obj_0HL', .71, .01, 1.25, .21),
        ('CSP-Minizinc-Obj_1HL', .71, .01, 1.71, .08),
        ('CSP-Minizinc-Obj_2HL', .72, .01, 1.98, .08),
        ('CSP-Minizinc-Time_0HL', .71, .01, 1.18, .18),
        ('CSP-Minizinc-Time_1HL', .72, .01, 1.63, .11),
        ('CSP-Minizinc-Time_2HL', .71, .01, 1.92, .06),
    ]),
    'CSP-Minizinc-Obj': _published([
        ('normal', .91, .02, .77, .06),
        ('CSP-2010_0HL', .87, .04, 1.01, .16),
        ('CSP-2010_1HL', .90, .00, 1.37, .11),
        ('CSP-2010_2HL', .90, .00, 1.55, .06),
        ('CSP-MZN_0HL', .66, .02, 3.26, .06),
        ('CSP-MZN_1HL', .70, .00, 3.30, .01),
        ('CSP-MZN_2HL', .70, .00, 3.27, .01),
        ('CSP-Minizinc-Time_0HL', .90, .00, .79, .11),
        ('CSP-Minizinc-Time_1HL', .90, .00, 1.01, .10),
        ('CSP-Minizinc-Time_2HL', .90, .00, 1.37, .15),
    ]),
    'CSP-Minizinc-Time': _published([
        ('normal', .65, .00, 4.11, .60),
        ('CSP-2010_0HL', .65, .01, 3.78, .92),
        ('CSP-2010_1HL', .65, .00, 5.24, .18),
        ('CSP-2010_2HL', .65, .00, 5.59, .04),
        ('CSP-MZN_0HL', .67, .03, 3.27, .30),
        ('CSP-MZN_1HL', .70, .00, 3.81, .10),
        ('CSP-MZN_2HL', .73, .02, 4.04, .03),
        ('CSP-Minizinc-Obj_0HL', .70, .00, 3.87, .74),
        ('CSP-Minizinc-Obj_1HL', .70, .00, 4.54, .07),
        ('CSP-Minizinc-Obj_2HL', .70, .00, 4.60, .02),
    ]),
}


def reference_for(target, mode_key):
    """ :return: ((acc mean, acc std), (loss mean, loss std)) or None when no published value exists """
    return PUBLISHED_TABLE.get(target, {}).get(mode_key)


def _as_list(summaries):
    return list(summaries.values()) if isinstance(summaries, dict) else list(summaries)


def table_frame(summaries):
    """ Long table with one row per cell, in the order given """
    rows = []
    for s in _as_list(summaries):
        mode = s.spec.mode
        rows.append(OrderedDict([('target', s.spec.target), ('mode', mode.key), ('source', mode.source),
                                 ('freeze', mode.label), ('repetitions', s.spec.repetitions),
                                 ('mean_acc', s.mean_acc), ('std_acc', s.std_acc),
                                 ('mean_loss', s.mean_loss), ('std_loss', s.std_loss)]))
    columns = ['target', 'mode', 'source', 'freeze', 'repetitions', 'mean_acc', 'std_acc', 'mean_loss', 'std_loss']
    return pd.DataFrame(rows, columns=columns)


def _column_label(summary):
    mode = summary.spec.mode
    return '%s %s' % (mode.source, mode.label) if mode.is_transfer else mode.label


def _best(values, largest):
    values = np.asarray(values, dtype=np.float64)
    return int(np.argmax(values)) if largest else int(np.argmin(values))


def _render_block(target, cells, with_reference):
    header = [target] + [_column_label(s) for s in cells]
    acc = [(s.mean_acc, s.std_acc) for s in cells]
    loss = [(s.mean_loss, s.std_loss) for s in cells]
    best_acc = _best([m for m, _ in acc], largest=True)
    best_loss = _best([m for m, _ in loss], largest=False)

    lines = ['| ' + ' | '.join(header) + ' |', '|' + '---|' * len(header)]
    lines.append('| Acc | ' + ' | '.join(MeanStdFormatter(m, s, bold=i == best_acc)
                                         for i, (m, s) in enumerate(acc)) + ' |')
    lines.append('| Loss | ' + ' | '.join(MeanStdFormatter(m, s, bold=i == best_loss)
                                          for i, (m, s) in enumerate(loss)) + ' |')
    if with_reference:
        refs = [reference_for(target, s.spec.mode.key) for s in cells]
        nan = (np.nan, np.nan)
        ref_acc = [r[0] if r else nan for r in refs]
        ref_loss = [r[1] if r else nan for r in refs]
        lines.append('| Acc (published) | ' + ' | '.join(MeanStdFormatter(m, s) for m, s in ref_acc) + ' |')
        lines.append('| Loss (published) | ' + ' | '.join(MeanStdFormatter(m, s) for m, s in ref_loss) + ' |')
        lines.append('| Acc Δ | ' + ' | '.join(DeltaFormatter(m - r[0]) for (m, _), r in zip(acc, ref_acc)) + ' |')
        lines.append('| Loss Δ | ' + ' | '.join(DeltaFormatter(m - r[0]) for (m, _), r in zip(loss, ref_loss))
                     + ' |')
    return lines


def render_markdown(summaries, with_reference=False):
    """ One block per target in first-seen order, columns in the order of the summaries.

    :param with_reference: append the published rows and the deltas (ours - published)
    """
    by_target = OrderedDict()
    for s in _as_list(summaries):
        by_target.setdefault(s.spec.target, []).append(s)

    out = []
    for target, cells in by_target.items():
        out.append('### %s' % target)
        out.append('')
        out.extend(_render_block(target, cells, with_reference))
        out.append('')
    return '\n'.join(out)


def write_summary(summary, results_dir):
    """ results_dir/<target>/<mode>.json """
    directory = os.path.join(results_dir, summary.spec.target)
    os.makedirs(directory, exist_ok=True)
    path = os.path.join(directory, '%s.json' % summary.spec.mode.key)
    with open(path, 'w', encoding='utf-8') as f:
        f.write(summary.to_json())
    logger.debug('wrote %s' % path)
    return path


def write_results(summaries, results_dir, with_reference=False):
    """ Write every cell JSON plus table.csv and table.md. :return: list of written paths """
    os.makedirs(results_dir, exist_ok=True)
    paths = [write_summary(s, results_dir) for s in _as_list(summaries)]

    csv_path = os.path.join(results_dir, TABLE_CSV)
    table_frame(summaries).to_csv(csv_path, index=False, encoding='utf-8')
    md_path = os.path.join(results_dir, TABLE_MD)
    with open(md_path, 'w', encoding='utf-8') as f:
        f.write(render_markdown(summaries, with_reference=with_reference))
    logger.info('wrote %d cells, %s and %s' % (len(paths), csv_path, md_path))
    return paths + [csv_path, md_path]
