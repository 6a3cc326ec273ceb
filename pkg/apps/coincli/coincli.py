#!/usr/bin/env python3

#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Command line front end: synthesize, perturb, train, encode, evaluate, inspect.

Logs go to stderr, metric summaries (JSON) to stdout. Exit codes:
0 success, 2 usage/config/input, 3 numeric failure, 4 checkpoint mismatch.
"""

import logging
import os
import sys

import numpy as np
import pandas as pd

from coincept import config as cfgmod
from coincept.data import (StreamDataset, readCsvWide, readUcrTsv, synthClasses,
                           synthStream, synthToy, writeCsvWide, writeUcrTsv)
from coincept.errors import (ArtifactMismatchError, CheckpointError, ConfigError, InvalidArgumentError,
                             NumericError, TrainingAborted)
from coincept.handlers import ScorePlotHandler
from coincept.model import checkpoint as ck
from coincept.model import encoder as enc
from coincept.model import trainer
from coincept.signal.wavelet import perturb
from coincept.tasks import analysis, anomaly, classify, forecast, report
from coincept.tasks.features import poolSegment

logger = logging.getLogger('coincli')

CONFIG_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'config')
DEFAULT_CONFIG = os.path.join(CONFIG_DIR, 'default.ini')

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_ARTIFACT = 4


##
## helpers
##

def testPathFor(path):
    """Sibling test split of a UCR-style training file (x_TRAIN.tsv -> x_TEST.tsv)."""
    stem, ext = os.path.splitext(path)
    if stem.endswith('_TRAIN'):
        return stem[:-len('_TRAIN')] + '_TEST' + ext
    return stem + '_TEST' + ext


def isTsv(path):
    return path.lower().endswith('.tsv')


def loadTrainingSeries(path):
    if isTsv(path):
        return [x for x, _ in readUcrTsv(path).train]
    return [readCsvWide(path).values]


def loadBatch(path):
    """All series of a file as B x T x N."""
    if isTsv(path):
        return readUcrTsv(path).arrays('train')[0]
    return readCsvWide(path).values[None]


def emit(task, rc, metrics, **extra):
    doc = report.summary(task, rc.hash(), metrics)
    doc.update(extra)
    print(report.dumps(doc))
    return doc


def outDir(args):
    os.makedirs(args.outDir, exist_ok=True)
    return args.outDir


##
## commands
##

def doSynth(args, rc):
    if args.perClass is not None:
        rc.set('synth', 'perClass', args.perClass)
    if args.length is not None:
        key = {'toy': 'toyLength', 'classes': 'classLength', 'stream': 'streamLength'}[args.kind]
        rc.set('synth', key, args.length)
    logResolved(rc)

    if args.kind == 'toy':
        toy = synthToy(rc.toyConfig())
        writeCsvWide(args.out, StreamDataset(timestamps=np.arange(len(toy.values)), values=toy.values,
                                             columns=['value']))
        regions = [{'name': n, 'start': int(a), 'end': int(b)}
                   for n, (a, b) in zip(['noise1', 'shift', 'noise2'], toy.regions)]
        emit('synth', rc, [('rows', len(toy.values))], kind='toy', regions=regions)
    elif args.kind == 'classes':
        ds = synthClasses(rc.classesConfig())
        writeUcrTsv(args.out, ds.train)
        if ds.test:
            writeUcrTsv(testPathFor(args.out), ds.test)
        counts = np.bincount([y for _, y in ds.train], minlength=ds.nClasses)
        emit('synth', rc, [('rows', len(ds.train)), ('test_rows', len(ds.test))], kind='classes',
             labels={str(i): int(c) for i, c in enumerate(counts)})
    else:
        ds = synthStream(rc.streamConfig())
        writeCsvWide(args.out, ds)
        emit('synth', rc, [('rows', len(ds)), ('anomalies', int(ds.labels.sum()))], kind='stream')
    return EXIT_OK


def doPerturb(args, rc):
    if args.alpha is not None:
        rc.set('perturb', 'alpha', args.alpha)
    logResolved(rc)
    pcfg = rc.perturbConfig()
    ds = readCsvWide(args.inPath)
    values = perturb(ds.values, pcfg)
    writeCsvWide(args.out, StreamDataset(timestamps=ds.timestamps, values=values, columns=ds.columns,
                                         labels=ds.labels))
    removed = 1.0 - float(np.sum(values ** 2)) / max(float(np.sum(ds.values ** 2)), 1e-300)
    emit('perturb', rc, [('rows', len(ds)), ('energy_removed', removed)])
    return EXIT_OK


def doTrain(args, rc):
    if args.iters is not None:
        rc.set('train', 'iters', args.iters)
    series = loadTrainingSeries(args.data)
    n = series[0].shape[1]
    if rc.get('encoder', 'nFeatures') != n:
        logger.info("setting encoder.nFeatures = %u from %s", n, args.data)
        rc.set('encoder', 'nFeatures', n)
    logResolved(rc)
    encCfg = rc.encoderConfig()
    tcfg = rc.trainConfig()
    try:
        ckpt, trace = trainer.train(series, encCfg, tcfg)
    except TrainingAborted as e:
        logger.error("training aborted: %s", e)
        for name, value in sorted(e.terms.items()):
            logger.error("  last level term %s = %r", name, value)
        raise
    ck.save(ckpt, args.out)
    if args.trace:
        trainer.writeTrace(trace, args.trace)
    emit('train', rc, [('final_loss', trace[-1]), ('iterations', len(trace)),
                       ('parameters', enc.paramCount(encCfg))])
    return EXIT_OK


def doEncode(args, rc):
    logResolved(rc)
    ckpt = ck.load(args.ckpt)
    z = ckpt.encode(loadBatch(args.data))
    if args.pool:
        z = poolSegment(z)
    np.save(args.out, z)
    logger.info("wrote %s with shape %s", args.out, z.shape)
    emit('encode', rc, [('series', z.shape[0]), ('dims', z.shape[-1])])
    return EXIT_OK


def doEvalForecast(args, rc):
    logResolved(rc)
    spec = rc.forecastSpec()
    ckpt = ck.load(args.ckpt)
    ds = readCsvWide(args.data)
    results = forecast.forecastEval(ckpt, ds.values, spec)
    metrics = []
    for r in results:
        metrics += [('mse_h%u' % r.horizon, r.mse), ('mae_h%u' % r.horizon, r.mae),
                    ('penalty_h%u' % r.horizon, r.penalty)]
    if args.baseline:
        for r in forecast.baselineEval(ds.values, spec):
            metrics += [('baseline_mse_h%u' % r.horizon, r.mse), ('baseline_mae_h%u' % r.horizon, r.mae)]
    report.writeMetricsCsv(os.path.join(outDir(args), 'forecast_metrics.csv'), metrics)
    emit('forecast', rc, metrics)
    return EXIT_OK


def doEvalClassify(args, rc):
    logResolved(rc)
    spec = rc.classifySpec()
    ckpt = ck.load(args.ckpt)
    ds = readUcrTsv(args.data, args.test or testPathFor(args.data))
    acc, clf = classify.classifyEval(ckpt, ds, spec, seed=rc.get('train', 'seed'))
    metrics = [('accuracy', acc), ('gamma', clf.gamma), ('penalty', clf.penalty),
               ('n_train', len(ds.train)), ('n_test', len(ds.test))]
    report.writeMetricsCsv(os.path.join(outDir(args), 'classify_metrics.csv'), metrics)
    emit('classify', rc, metrics)
    return EXIT_OK


def doEvalAnomaly(args, rc):
    logResolved(rc)
    spec = rc.anomalySpec()
    ckpt = ck.load(args.ckpt)
    ds = readCsvWide(args.data)
    if ds.labels is None:
        raise InvalidArgumentError("%s has no 'is_anomaly' column" % args.data)
    handler = ScorePlotHandler(spec.trailingWindow, spec.beta) if args.plot else None
    res = anomaly.anomalyStreamEval(ckpt, ds.values, ds.labels, spec, handler)
    if handler is not None:
        handler.plot(args.plot)
        handler.close()
    metrics = [('precision', res.precision), ('recall', res.recall), ('f1', res.f1),
               ('flags', int(res.flags.sum()))]
    d = outDir(args)
    report.writeMetricsCsv(os.path.join(d, 'anomaly_metrics.csv'), metrics)
    pd.DataFrame({'step': np.arange(len(res.scores)), 'score': res.scores, 'flag': res.flags,
                  'adjusted': res.adjusted, 'label': res.labels}).to_csv(
        os.path.join(d, 'anomaly_scores.csv'), index=False)
    emit('anomaly', rc, metrics)
    return EXIT_OK


def doAnalyze(args, rc):
    logResolved(rc)
    ckpt = ck.load(args.ckpt)
    if isTsv(args.data):
        X = readUcrTsv(args.data).arrays('train')[0]
    else:
        values = readCsvWide(args.data).values
        n = len(values) // args.segment
        if n < 2:
            raise InvalidArgumentError("need at least 2 segments of %u steps" % args.segment)
        X = values[:n * args.segment].reshape(n, args.segment, values.shape[1])
    res = analysis.analyze(ckpt, X, alpha=rc.get('perturb', 'alpha'), bins=args.bins)
    metrics = [('alignment', res.alignment), ('uniformity', res.uniformity)]
    d = outDir(args)
    report.writeMetricsCsv(os.path.join(d, 'analysis_metrics.csv'), metrics)
    report.writeHistogramCsv(os.path.join(d, 'distance_histogram.csv'), res.centres, res.counts)
    emit('analyze', rc, metrics)
    return EXIT_OK


def doInspect(args, rc):
    logResolved(rc)
    cfg = rc.encoderConfig()
    rows, perBlock = enc.receptiveFieldTable(cfg)
    count = enc.paramCount(cfg)
    print("%5s %4s %6s %8s %15s" % ('block', 'unit', 'kernel', 'dilation', 'receptive field'), file=sys.stderr)
    for r in rows:
        print("%5u %4u %6u %8u %15u" % (r['block'], r['unit'], r['kernel'], r['dilation'], r['receptiveField']),
              file=sys.stderr)
    for b in perBlock:
        print("block %u: max receptive field %u" % (b['block'], b['maxReceptiveField']), file=sys.stderr)
    print("parameters: %u" % count, file=sys.stderr)
    emit('inspect', rc, [('parameters', count), ('max_receptive_field', enc.maxReceptiveField(cfg))],
         units=rows, blocks=perBlock)
    return EXIT_OK


cmdList = {
    "synth": {
        'func': doSynth,
        'param': [
            (('--kind',), dict(choices=['toy', 'classes', 'stream'], required=True, help='generator')),
            (('--out',), dict(required=True, help='output CSV (toy, stream) or TSV (classes)')),
            (('--per-class',), dict(type=int, dest='perClass', help='training series per class')),
            (('--length',), dict(type=int, help='series length')),
        ],
        'info': "Write a synthetic toy series, class archive or labeled spike stream"
    },
    "perturb": {
        'func': doPerturb,
        'param': [
            (('--in',), dict(required=True, dest='inPath', help='input CSV')),
            (('--out',), dict(required=True, help='output CSV')),
            (('--alpha',), dict(type=float, help='threshold fraction of max |x|')),
        ],
        'info': "Low-pass perturbation of every channel of a CSV series"
    },
    "train": {
        'func': doTrain,
        'param': [
            (('--data',), dict(required=True, help='training data (CSV or UCR TSV)')),
            (('--out',), dict(required=True, help='checkpoint path')),
            (('--trace',), dict(help='loss trace CSV')),
            (('--iters',), dict(type=int, help='training iterations')),
        ],
        'info': "Self-supervised training of an encoder"
    },
    "encode": {
        'func': doEncode,
        'param': [
            (('--ckpt',), dict(required=True, help='checkpoint')),
            (('--data',), dict(required=True, help='CSV or UCR TSV')),
            (('--out',), dict(required=True, help='output .npy')),
            (('--pool',), dict(action='store_true', help='max-pool over time')),
        ],
        'info': "Write representations (B x T x H, or B x H pooled)"
    },
    "eval-forecast": {
        'func': doEvalForecast,
        'param': [
            (('--ckpt',), dict(required=True, help='checkpoint')),
            (('--data',), dict(required=True, help='CSV series')),
            (('--out-dir',), dict(default='.', dest='outDir', help='directory for CSV output')),
            (('--baseline',), dict(action='store_true', help='also fit on raw windows')),
        ],
        'info': "Ridge forecasting on last-step representations"
    },
    "eval-classify": {
        'func': doEvalClassify,
        'param': [
            (('--ckpt',), dict(required=True, help='checkpoint')),
            (('--data',), dict(required=True, help='training TSV')),
            (('--test',), dict(help='test TSV (default: sibling _TEST file)')),
            (('--out-dir',), dict(default='.', dest='outDir', help='directory for CSV output')),
        ],
        'info': "RBF kernel classifier on pooled representations"
    },
    "eval-anomaly": {
        'func': doEvalAnomaly,
        'param': [
            (('--ckpt',), dict(required=True, help='checkpoint')),
            (('--data',), dict(required=True, help='labeled CSV stream')),
            (('--out-dir',), dict(default='.', dest='outDir', help='directory for CSV output')),
            (('--plot',), dict(help='write a score plot (PNG/PDF)')),
        ],
        'info': "Streaming anomaly detection with delay-adjusted P/R/F1"
    },
    "analyze": {
        'func': doAnalyze,
        'param': [
            (('--ckpt',), dict(required=True, help='checkpoint')),
            (('--data',), dict(required=True, help='UCR TSV or CSV series')),
            (('--out-dir',), dict(default='.', dest='outDir', help='directory for CSV output')),
            (('--bins',), dict(type=int, default=20, help='histogram bins')),
            (('--segment',), dict(type=int, default=64, help='segment length for CSV input')),
        ],
        'info': "Alignment, uniformity and positive-pair distance histogram"
    },
    "inspect": {
        'func': doInspect,
        'param': [],
        'info': "Receptive fields and parameter count of the configured encoder"
    },
}


def logResolved(rc):
    logger.info("resolved config (sha256 %s):\n%s", rc.hash(), rc.toIni().rstrip())


def buildParser():
    import argparse
    parser = argparse.ArgumentParser(
        prog='coincept',
        description="Self-supervised time series representations.",
        epilog="""NOTE: metrics are printed as JSON on stdout, logs go to stderr.""")
    sub = parser.add_subparsers(dest='cmd', metavar='command')
    sub.required = True
    for name in cmdList:
        p = sub.add_parser(name, help=cmdList[name]['info'], description=cmdList[name]['info'])
        p.add_argument('-c', '--config', type=str, default=DEFAULT_CONFIG, dest='confFile',
                       help='config file (default: config/default.ini)')
        p.add_argument('--set', action='append', default=[], dest='overrides', metavar='SECTION.KEY=VALUE',
                       help='override one config value (repeatable)')
        p.add_argument('--seed', type=int, help='master seed')
        p.add_argument('-v', '--verbose', action='store_true', help='debug logging')
        for flags, kw in cmdList[name]['param']:
            p.add_argument(*flags, **kw)
    return parser


def resolveConfig(args):
    rc = cfgmod.RunConfig()
    rc.read(args.confFile)
    for o in args.overrides:
        rc.override(o)
    if args.seed is not None:
        rc.set('train', 'seed', args.seed)
    return rc


_handler = None


def setupLogging(verbose):
    """One stderr handler on the root logger, replaced on every call."""
    global _handler
    root = logging.getLogger()
    if _handler is not None:
        root.removeHandler(_handler)
    _handler = logging.StreamHandler(sys.stderr)
    _handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root.addHandler(_handler)
    root.setLevel(logging.DEBUG if verbose else logging.INFO)
    return _handler


def main(argv=None):
    args = buildParser().parse_args(argv)
    setupLogging(args.verbose)
    try:
        rc = resolveConfig(args)
        return cmdList[args.cmd]['func'](args, rc)
    except (ConfigError, InvalidArgumentError, OSError) as e:
        logger.error("%s", e)
        return EXIT_USAGE
    except NumericError as e:
        logger.error("numeric failure: %s", e)
        return EXIT_NUMERIC
    except (CheckpointError, ArtifactMismatchError) as e:
        logger.error("%s", e)
        return EXIT_ARTIFACT


if __name__ == "__main__":
    sys.exit(main())

# EOF
