"""
The command line tool.

Subcommands::

    qforecast synth     write a synthetic series as CSV
    qforecast train-ae  pre-train and cache the autoencoder of one fold
    qforecast run       cross-validate one model
    qforecast grid      cross-validate every (N_q, variant) cell of a scenario
    qforecast report    summarize a report and draw its figures

Settings come from ``--config`` (a JSON file) and are overridden by flags named after
the configuration fields.  Errors of the package end the process with the exit code
of their class: 2 usage, 3 configuration, 4 files and ingestion, 5 internal.

:author:  qforecast developers
:version: October 17, 2026
"""
import argparse
import concurrent.futures
import datetime
import logging
import os.path
import sys

from . import __version__, data, filetools, plotting
from .autoencoder import AutoencoderCache, save_autoencoder
from .config import ExperimentConfig, load_config
from .errors import QForecastError, FileToolError, ConfigurationError, InternalError
from .evaluation import (MetricsReport, ConvergenceHistory, box_stats, consistency_check,
                         gap_kfold_split, run_cross_validation, METRICS)
from .models import ModelLabel

logger = logging.getLogger(__name__)

REPORT_SCHEMA = 'qforecast-report'
REPORT_VERSION = 1

# The report time written under --fixed-timestamp
FIXED_TIMESTAMP = '1970-01-01T00:00:00Z'

LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'


pass
# #mark -
# #mark Helpers

def load_series(config):
    """
    Returns the series named by ``config``: its CSV file, or the synthetic generator.

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :return: The series
    :rtype:  :class:`~qforecast.data.TimeSeries`
    """
    if config.csv:
        return data.load_csv(config.csv, config.fill, config.sort)
    return data.generate_synthetic(config.synthetic)


def _timestamp(config):
    """
    Returns the report creation time. [INTERNAL]
    """
    if config.fixed_timestamp:
        return FIXED_TIMESTAMP
    now = datetime.datetime.now(datetime.timezone.utc).replace(microsecond=0)
    return now.isoformat().replace('+00:00', 'Z')


def _cache(config):
    """
    Returns the autoencoder cache of the output directory. [INTERNAL]
    """
    return AutoencoderCache(os.path.join(config.output_dir, 'cache'))


def _run_cell(config_data, token):
    """
    Cross-validates one grid cell from scratch (in a worker process). [INTERNAL]
    """
    config = ExperimentConfig.from_dict(config_data)
    series = load_series(config)
    plan = gap_kfold_split(len(series), config.k, config.gap_size, config.val_fraction)
    return token, run_cross_validation(ModelLabel.parse(token), series, plan, config, _cache(config))


def _model_entry(label, result, config):
    """
    Returns the report entry of one cross-validated model. [INTERNAL]
    """
    metrics = result.report.to_dict()
    del metrics['config']
    return {'label': label.token, 'scenario': label.scenario, 'variant': label.variant, 'n_q': label.n_q,
            'metrics': metrics, 'history': result.history.to_dict(),
            'convergence_epoch': result.history.convergence_epoch(),
            'runtime_seconds': 0.0 if config.fixed_timestamp else round(result.runtime, 3)}


def _write_model_files(label, result, folder):
    """
    Writes the history and prediction CSV files of one model. [INTERNAL]

    :return: the names of the files written
    """
    history = result.history
    k = history.losses.shape[0]
    header = ['epoch', 'mean', 'std', 'val_mean', 'val_std'] + ['fold%d' % fold for fold in range(k)]
    rows = [header]
    mean, std = history.mean(), history.std()
    val_mean, val_std = history.mean(True), history.std(True)
    for epoch in range(history.epochs):
        row = [epoch + 1, float(mean[epoch]), float(std[epoch])]
        row += ['', ''] if val_mean is None else [float(val_mean[epoch]), float(val_std[epoch])]
        row += [float(history.losses[fold, epoch]) for fold in range(k)]
        rows.append(row)
    names = [filetools.write_csv(rows, os.path.join(folder, 'history_%s.csv' % label.token))]

    rows = [['fold', 'index', 'target', 'prediction', 'raw_target', 'raw_prediction']]
    rows.extend(list(item) for item in result.predictions)
    names.append(filetools.write_csv(rows, os.path.join(folder, 'predictions_%s.csv' % label.token)))
    return names


def _write_summary_files(reports, table, folder):
    """
    Writes the box-plot and consistency CSV files of several models. [INTERNAL]

    :return: the names of the files written
    """
    rows = [['label', 'metric', 'median', 'q1', 'q3', 'whisker_low', 'whisker_high', 'outliers']]
    for report in reports:
        for metric in METRICS:
            values = [value for value in report.values(metric) if value is not None]
            if values:
                stats = box_stats(values)
                rows.append([report.label, metric, stats['median'], stats['q1'], stats['q3'],
                             stats['whisker_low'], stats['whisker_high'], len(stats['outliers'])])
    names = [filetools.write_csv(rows, os.path.join(folder, 'boxplot_stats.csv'))]

    rows = [['label', 'metric', 'fold', 'normalized', 'std', 'spearman']]
    for report in reports:
        for metric, entry in table.get(report.label, {}).items():
            rho = '' if entry['spearman'] is None else entry['spearman']
            for fold, value in enumerate(entry['normalized']):
                rows.append([report.label, metric, fold, value, entry['std'], rho])
    names.append(filetools.write_csv(rows, os.path.join(folder, 'consistency.csv')))
    return names


def _draw(reports, histories, table, folder):
    """
    Draws the figures of a report, returning the files written. [INTERNAL]
    """
    names = []
    for report, history in zip(reports, histories):
        names.append(plotting.plot_loss_curves(history, report.label,
                                               os.path.join(folder, 'loss_%s.svg' % report.label)))
    if reports:
        names.append(plotting.plot_boxplot(reports, os.path.join(folder, 'boxplot.svg')))
        names.append(plotting.plot_consistency(table, os.path.join(folder, 'consistency.svg')))
    return [name for name in names if name]


def write_report(config, command, series, plan, results, complete=True):
    """
    Writes every artifact of a set of cross-validated models, then ``report.json``.

    The models are listed by scenario, qubit count and variant whatever order they
    finished in.  The report records the SHA-256 of every CSV file written.

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :param command: The subcommand that produced the results
    :type command:  ``str``

    :param series: The series the models were evaluated on
    :type series:  :class:`~qforecast.data.TimeSeries`

    :param plan: The shared fold plan
    :type plan:  :class:`~qforecast.evaluation.FoldPlan`

    :param results: The results keyed by model label
    :type results:  ``dict``

    :param complete: False while a grid is still running
    :type complete:  ``bool``

    :return: The report document
    :rtype:  ``dict``
    """
    folder = config.output_dir
    labels = sorted(results, key=lambda label: label.sort_key())
    reports = [results[label].report for label in labels]
    table = {report.label: consistency_check(report) for report in reports if len(report) >= 2}

    written = []
    for label in labels:
        written.extend(_write_model_files(label, results[label], folder))
    written.extend(_write_summary_files(reports, table, folder))
    if config.plots:
        _draw(reports, [results[label].history for label in labels], table, folder)

    document = {
        'schema': REPORT_SCHEMA,
        'version': REPORT_VERSION,
        'qforecast': __version__,
        'created': _timestamp(config),
        'command': command,
        'complete': complete,
        'config': config.to_dict(),
        'data': {'source': config.csv or 'synthetic', 'n': len(series),
                 'origin': series.origin.isoformat(), 'hash': data.series_hash(series.values)},
        'fold_plan': plan.to_dict(),
        'models': [_model_entry(label, results[label], config) for label in labels],
        'consistency': table,
        'convergence': {label.token: results[label].history.convergence_epoch() for label in labels},
        'artifacts': {os.path.basename(name): filetools.file_checksum(name) for name in written},
    }
    filetools.write_json(document, os.path.join(folder, 'report.json'))
    return document


def read_report(filename):
    """
    Reads a report written by :func:`write_report`.

    :param filename: The report file
    :type filename:  ``str``

    :return: The report document
    :rtype:  ``dict``
    """
    document = filetools.read_json(filename)
    if type(document) != dict or document.get('schema') != REPORT_SCHEMA:
        raise FileToolError('%s is not a %s file' % (repr(filename), REPORT_SCHEMA))
    if document.get('version') != REPORT_VERSION:
        raise FileToolError('report version %s is not supported' % repr(document.get('version')))
    if type(document.get('models')) != list:
        raise FileToolError('report %s has no model list' % repr(filename))
    return document


pass
# #mark -
# #mark Commands

def cmd_synth(config, out=None):
    """
    Writes the synthetic series of ``config`` in the ingestion CSV schema.

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :param out: The file to write (default ``series.csv`` in the output directory)
    :type out:  ``str`` or ``None``

    :return: The name of the file written
    :rtype:  ``str``
    """
    series = data.generate_synthetic(config.synthetic)
    filename = data.write_csv(series, out or os.path.join(config.output_dir, 'series.csv'))
    logger.info('wrote %d values to %s', len(series), filename)
    return filename


def cmd_train_ae(config, fold=0, out=None):
    """
    Trains (or reuses) the autoencoder of one fold for ``config.n_q`` features.

    The encoder sees the normalized training windows of the fold, as in a run.

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :param fold: The fold whose training split is used
    :type fold:  ``int``

    :param out: The checkpoint to write (default ``ae_Q<n>_fold<f>.json``)
    :type out:  ``str`` or ``None``

    :return: The autoencoder and the name of its checkpoint
    :rtype:  ``tuple``
    """
    series = load_series(config)
    plan = gap_kfold_split(len(series), config.k, config.gap_size, config.val_fraction)
    if not 0 <= fold < len(plan.folds):
        raise ConfigurationError('%s is not a fold of a %d-fold plan' % (repr(fold), len(plan.folds)))
    split = plan.folds[fold]
    scaled = data.fit_normalizer(series.values[split.train]).apply(series.values)
    windows = data.windows_from_indices(scaled, split.train, config.window)
    seed = config.seed + fold
    weights = _cache(config).train_or_load(windows, config.n_q, config.ae_epochs, config.batch_size, seed,
                                           config.learning_rate, config.clip_norm)
    filename = out or os.path.join(config.output_dir, 'ae_Q%d_fold%d.json' % (config.n_q, fold))
    filename = save_autoencoder(weights, filename, {'fold': fold, 'seed': seed})
    logger.info('autoencoder Q%d fold=%d final_loss=%.6g written to %s', config.n_q, fold,
                weights.final_loss, filename)
    return weights, filename


def cmd_run(config):
    """
    Cross-validates the single model (scenario, variant, N_q) of ``config``.

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :return: The report document
    :rtype:  ``dict``
    """
    label = ModelLabel(config.scenario, config.variant, config.n_q)
    series = load_series(config)
    plan = gap_kfold_split(len(series), config.k, config.gap_size, config.val_fraction)
    result = run_cross_validation(label, series, plan, config, _cache(config))
    return write_report(config, 'run', series, plan, {label: result})


def cmd_grid(config):
    """
    Cross-validates every (N_q, variant) cell of ``config.scenario``.

    All cells share one fold plan and one seed, so each classic and hybrid pair is
    trained on the same folds with the same encoders.  The report is rewritten after
    each completed cell.  With ``workers`` > 1 the cells run in separate processes.

    :param config: The experiment settings
    :type config:  :class:`~qforecast.config.ExperimentConfig`

    :return: The report document
    :rtype:  ``dict``
    """
    series = load_series(config)
    plan = gap_kfold_split(len(series), config.k, config.gap_size, config.val_fraction)
    labels = [ModelLabel(config.scenario, variant, n_q) for n_q in sorted(set(config.grid))
              for variant in config.variants]
    labels = sorted(set(labels), key=lambda label: label.sort_key())
    results = {}
    if config.workers > 1 and len(labels) > 1:
        config_data = config.to_dict()
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as pool:
            futures = [pool.submit(_run_cell, config_data, label.token) for label in labels]
            for future in concurrent.futures.as_completed(futures):
                token, result = future.result()
                results[ModelLabel.parse(token)] = result
                logger.info('grid cell %s done (%d of %d)', token, len(results), len(labels))
                write_report(config, 'grid', series, plan, results, len(results) == len(labels))
    else:
        cache = _cache(config)
        for label in labels:
            results[label] = run_cross_validation(label, series, plan, config, cache)
            logger.info('grid cell %s done (%d of %d)', label.token, len(results), len(labels))
            write_report(config, 'grid', series, plan, results, len(results) == len(labels))
    document = read_report(os.path.join(config.output_dir, 'report.json'))
    return document


def summarize(document):
    """
    Returns the human-readable summary of a report.

    There is one line per model with the mean and standard deviation of each
    normalized metric, and the convergence epoch.

    :param document: The report document
    :type document:  ``dict``

    :return: The summary text
    :rtype:  ``str``
    """
    lines = ['%-18s %-24s %-24s %-24s %s' % ('model', 'MSE', 'MAE', 'R2', 'converged')]
    for model in document['models']:
        cells = []
        for metric in METRICS:
            entry = model['metrics']['summary'][metric]
            if entry['mean'] is None:
                cells.append('undefined')
            else:
                cells.append('%.4g +/- %.2g' % (entry['mean'], entry['std']))
        lines.append('%-18s %-24s %-24s %-24s epoch %d' % tuple([model['label']] + cells +
                                                                 [model['convergence_epoch']]))
    if document.get('complete') is False:
        lines.append('(partial report: the grid has not finished)')
    return '\n'.join(lines) + '\n'


def cmd_report(filename, output_dir=None, plots=True):
    """
    Prints the summary of a report and redraws its figures.

    :param filename: The report file
    :type filename:  ``str``

    :param output_dir: Where figures go (default: beside the report)
    :type output_dir:  ``str`` or ``None``

    :param plots: Whether to draw figures
    :type plots:  ``bool``

    :return: The summary text
    :rtype:  ``str``
    """
    document = read_report(filename)
    folder = output_dir or os.path.dirname(os.path.abspath(filename))
    text = summarize(document)
    print(text, end='')
    if plots:
        reports, histories = [], []
        for model in document['models']:
            metrics = dict(model['metrics'], config=document.get('config'))
            reports.append(MetricsReport.from_dict(metrics))
            histories.append(ConvergenceHistory.from_dict(model['history']))
        for name in _draw(reports, histories, document.get('consistency', {}), folder):
            logger.info('wrote %s', name)
    return text


pass
# #mark -
# #mark Parser

def _int_list(text):
    """
    Parses a comma separated list of integers. [INTERNAL]
    """
    try:
        return [int(item) for item in text.split(',') if item.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError('%s is not a comma separated list of integers' % repr(text))


def _str_list(text):
    """
    Parses a comma separated list of tokens. [INTERNAL]
    """
    return [item.strip() for item in text.split(',') if item.strip()]


# (flag, configuration field, type, help)
_CONFIG_FLAGS = (
    ('--csv', 'csv', str, 'read the series from this CSV file instead of generating it'),
    ('--n-days', 'n_days', int, 'days of synthetic data'),
    ('--peak-flow', 'peak_flow', float, 'synthetic peak flow (vehicles/hour)'),
    ('--base-flow', 'base_flow', float, 'synthetic base flow (vehicles/hour)'),
    ('--noise-std', 'noise_std', float, 'synthetic noise deviation'),
    ('--weekend-factor', 'weekend_factor', float, 'synthetic weekend scaling'),
    ('--origin', 'origin', str, 'synthetic first timestamp'),
    ('--scenario', 'scenario', str, 'scenario A or B'),
    ('--variant', 'variant', str, 'classic or hybrid (run)'),
    ('--n-q', 'n_q', int, 'qubit count (run, train-ae)'),
    ('--variants', 'variants', _str_list, 'comma separated variants (grid)'),
    ('--grid', 'grid', _int_list, 'comma separated qubit counts (grid)'),
    ('--window', 'window', int, 'window length w'),
    ('--epochs', 'epochs', int, 'regressor training epochs'),
    ('--batch-size', 'batch_size', int, 'windows per optimizer step'),
    ('--learning-rate', 'learning_rate', float, 'Adam learning rate'),
    ('--ae-epochs', 'ae_epochs', int, 'autoencoder training epochs'),
    ('--clip-norm', 'clip_norm', float, 'global gradient norm limit'),
    ('--k', 'k', int, 'number of folds'),
    ('--gap-size', 'gap_size', int, 'samples discarded on each side of a test fold'),
    ('--val-fraction', 'val_fraction', float, 'validation share of the series'),
    ('--angle-scale', 'angle_scale', float, 'embedding angle scale'),
    ('--layers-per-block', 'layers_per_block', int, 'entangling layers per circuit block'),
    ('--seed', 'seed', int, 'training seed'),
    ('--workers', 'workers', int, 'grid cells run at once'),
    ('--output-dir', 'output_dir', str, 'directory for every artifact'),
)


def _config_parent():
    """
    Returns the parser of the flags shared by the experiment subcommands. [INTERNAL]
    """
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--config', help='JSON configuration file')
    for flag, dest, kind, text in _CONFIG_FLAGS:
        parent.add_argument(flag, dest=dest, type=kind, default=None, help=text)
    parent.add_argument('--data-seed', dest='data_seed', type=int, default=None,
                        help='synthetic generator seed')
    parent.add_argument('--fill', action='store_const', const=True, default=None,
                        help='interpolate gaps in the CSV file')
    parent.add_argument('--sort', action='store_const', const=True, default=None,
                        help='sort out-of-order CSV rows')
    parent.add_argument('--fixed-timestamp', dest='fixed_timestamp', action='store_const', const=True,
                        default=None, help='write a fixed report time and zero runtimes')
    parent.add_argument('--no-plots', dest='plots', action='store_const', const=False, default=None,
                        help='skip the SVG figures')
    return parent


def build_parser():
    """
    :return: The argument parser of the tool
    :rtype:  ``argparse.ArgumentParser``
    """
    parser = argparse.ArgumentParser(prog='qforecast',
                                     description='Hybrid quantum-classical traffic flow forecasting experiments')
    parser.add_argument('--version', action='version', version='%(prog)s ' + __version__)
    parser.add_argument('--log-level', default='INFO', choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='logging threshold')
    commands = parser.add_subparsers(dest='command', metavar='command')
    commands.required = True
    parent = _config_parent()

    sub = commands.add_parser('synth', parents=[parent], help='write a synthetic series')
    sub.add_argument('--out', help='CSV file to write')
    sub = commands.add_parser('train-ae', parents=[parent], help='pre-train an autoencoder')
    sub.add_argument('--fold', type=int, default=0, help='fold whose training split is used')
    sub.add_argument('--out', help='checkpoint file to write')
    commands.add_parser('run', parents=[parent], help='cross-validate one model')
    commands.add_parser('grid', parents=[parent], help='cross-validate a grid of models')
    sub = commands.add_parser('report', help='summarize a report')
    sub.add_argument('report', help='report.json file')
    sub.add_argument('--output-dir', dest='output_dir', default=None, help='directory for the figures')
    sub.add_argument('--no-plots', dest='plots', action='store_false', help='skip the SVG figures')
    return parser


def config_from_args(args):
    """
    Returns the configuration of parsed arguments: the file, then the flags.

    :param args: The parsed command line
    :type args:  ``argparse.Namespace``

    :return: The validated configuration
    :rtype:  :class:`~qforecast.config.ExperimentConfig`
    """
    config = load_config(args.config) if args.config else ExperimentConfig()
    changes = {dest: getattr(args, dest) for flag, dest, kind, text in _CONFIG_FLAGS}
    for name in ('fill', 'sort', 'fixed_timestamp', 'plots'):
        changes[name] = getattr(args, name)
    result = config.override(**changes)
    if args.data_seed is not None:
        result.synthetic.seed = args.data_seed
    result.validate()
    return result


def main(argv=None):
    """
    Runs the tool and returns its exit code.

    :param argv: The arguments (default ``sys.argv[1:]``)
    :type argv:  ``list`` of ``str`` or ``None``

    :return: 0 on success, or the exit code of the error raised
    :rtype:  ``int``
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=getattr(logging, args.log_level), format=LOG_FORMAT, stream=sys.stderr)
    try:
        if args.command == 'report':
            cmd_report(args.report, args.output_dir, args.plots)
            return 0
        config = config_from_args(args)
        if args.command == 'synth':
            print(cmd_synth(config, args.out))
        elif args.command == 'train-ae':
            weights, filename = cmd_train_ae(config, args.fold, args.out)
            print(filename)
        elif args.command == 'run':
            print(summarize(cmd_run(config)), end='')
        elif args.command == 'grid':
            print(summarize(cmd_grid(config)), end='')
        else:
            raise InternalError('%s is not a command' % repr(args.command))
    except QForecastError as e:
        logger.error('%s', e)
        return e.exit_code
    except Exception:
        logger.exception('unexpected failure')
        return InternalError.exit_code
    return 0
