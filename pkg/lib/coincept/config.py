#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for run configuration.

One INI file with a section per component. Values take the type of their
built-in default: ints, floats, booleans (yes/no/true/false) and comma
separated lists (``baseKernels = 2, 5, 8``). Keys keep their camelCase.

Precedence, lowest first: built-in defaults, ``read(path)``, ``override``
calls (``--set section.key=value``), then ``set`` by dedicated flags.
"""

import collections
import configparser
import copy
import io
import logging

from coincept.data.synth import ClassesConfig, StreamConfig, ToyConfig
from coincept.errors import ConfigError, InvalidArgumentError
from coincept.model.encoder import EncoderConfig
from coincept.model.trainer import TrainConfig
from coincept.signal.wavelet import PerturbConfig
from coincept.tasks.anomaly import AnomalySpec
from coincept.tasks.classify import ClassifySpec
from coincept.tasks.forecast import RIDGE_GRID, ForecastSpec
from coincept.tasks.report import configHash

logger = logging.getLogger(__name__)

DEFAULTS = collections.OrderedDict([
    ('encoder', collections.OrderedDict([
        ('nFeatures', 1),
        ('hiddenDim', 64),
        ('outputDim', 320),
        ('nBlocks', 3),
        ('baseKernels', [2, 5, 8]),
        ('leakySlope', 0.01),
        ('blockType', 'inception'),
    ])),
    ('train', collections.OrderedDict([
        ('lr', 1e-3),
        ('batchSize', 8),
        ('iters', 600),
        ('seed', 0),
        ('windowLen', 256),
        ('precision', 'float32'),
        ('logEvery', 50),
    ])),
    ('sampler', collections.OrderedDict([
        ('minOverlap', 8),
        ('cropping', True),
        ('latentMask', 0.0),
    ])),
    ('perturb', collections.OrderedDict([
        ('alpha', 0.2),
        ('levels', 'auto'),
        ('views', True),
    ])),
    ('loss', collections.OrderedDict([
        ('epsilon', 0.7),
        ('zeta', 1.0),
        ('symmetric', False),
        ('triplet', True),
    ])),
    ('forecast', collections.OrderedDict([
        ('horizons', [24]),
        ('window', 64),
        ('ridgeGrid', [float(v) for v in RIDGE_GRID]),
        ('targets', 'all'),
    ])),
    ('classify', collections.OrderedDict([
        ('gamma', 'median'),
        ('penaltyGrid', [10.0 ** i for i in range(-4, 5)]),
        ('folds', 5),
    ])),
    ('anomaly', collections.OrderedDict([
        ('diffOrder', 0),
        ('trailingWindow', 100),
        ('beta', 4.0),
        ('delay', 7),
        ('window', 64),
        ('cleanContext', True),
    ])),
    ('synth', collections.OrderedDict([
        ('toyLength', 900),
        ('toyPeriod', 60.0),
        ('noiseAmp', 0.3),
        ('rampAmp', 2.0),
        ('perClass', 40),
        ('testPerClass', 40),
        ('classLength', 128),
        ('classPeriod', 32.0),
        ('sigma', 0.3),
        ('streamLength', 3000),
        ('nSpikes', 10),
        ('spikeAmp', 5.0),
        ('warmup', 300),
    ])),
])


def _convert(default, raw, where):
    raw = raw.strip()
    try:
        if isinstance(default, bool):
            states = configparser.ConfigParser.BOOLEAN_STATES
            if raw.lower() not in states:
                raise ValueError("not a boolean")
            return states[raw.lower()]
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
        if isinstance(default, list):
            elem = type(default[0]) if default else float
            return [elem(v.strip()) for v in raw.split(',') if v.strip()]
    except ValueError as e:
        raise ConfigError("%s: bad value '%s' (%s)" % (where, raw, e)) from None
    return raw


def _format(value):
    if isinstance(value, bool):
        return 'yes' if value else 'no'
    if isinstance(value, list):
        return ', '.join(repr(v) if isinstance(v, float) else str(v) for v in value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


class RunConfig:
    """Resolved configuration of one run."""

    def __init__(self):
        self.values = copy.deepcopy(DEFAULTS)
        self.sources = []

    def _check(self, section, key):
        if section not in self.values:
            raise ConfigError("unknown section [%s]" % section)
        if key is not None and key not in self.values[section]:
            raise ConfigError("unknown key '%s' in [%s]" % (key, section))

    def get(self, section, key):
        self._check(section, key)
        return self.values[section][key]

    def set(self, section, key, value):
        """Set a typed value, strings are parsed like file values."""
        self._check(section, key)
        default = DEFAULTS[section][key]
        if isinstance(value, str) and not isinstance(default, str):
            value = _convert(default, value, "%s.%s" % (section, key))
        self.values[section][key] = value

    def readString(self, text, source='<string>'):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        try:
            parser.read_string(text, source=source)
        except configparser.Error as e:
            raise ConfigError("%s: %s" % (source, e)) from e
        for section in parser.sections():
            self._check(section, None)
            for key, raw in parser[section].items():
                self._check(section, key)
                self.values[section][key] = _convert(DEFAULTS[section][key], raw,
                                                     "%s: %s.%s" % (source, section, key))
        self.sources.append(source)
        return self

    def read(self, path):
        try:
            with open(path, 'r') as f:
                text = f.read()
        except OSError as e:
            raise ConfigError("cannot read config %s: %s" % (path, e)) from e
        logger.debug("reading config %s", path)
        return self.readString(text, source=path)

    def override(self, assignment):
        """Apply one ``section.key=value``."""
        lhs, sep, raw = assignment.partition('=')
        section, dot, key = lhs.strip().partition('.')
        if not sep or not dot:
            raise ConfigError("override must look like section.key=value, got '%s'" % assignment)
        self.set(section, key, raw.strip())
        return self

    def toIni(self):
        parser = configparser.ConfigParser(interpolation=None)
        parser.optionxform = str
        for section, keys in self.values.items():
            parser[section] = {k: _format(v) for k, v in keys.items()}
        buf = io.StringIO()
        parser.write(buf)
        return buf.getvalue()

    def hash(self):
        return configHash(self.toIni())

    ##
    ## component configs
    ##

    def _build(self, fn, what):
        try:
            return fn().validate()
        except InvalidArgumentError as e:
            raise ConfigError("[%s] %s" % (what, e)) from e

    def encoderConfig(self):
        e = self.values['encoder']
        return self._build(lambda: EncoderConfig(
            nFeatures=e['nFeatures'], hiddenDim=e['hiddenDim'], outputDim=e['outputDim'],
            nBlocks=e['nBlocks'], baseKernels=list(e['baseKernels']), leakySlope=e['leakySlope'],
            blockType=e['blockType']), 'encoder')

    def trainConfig(self):
        t, s, p, lo = (self.values[k] for k in ('train', 'sampler', 'perturb', 'loss'))
        return self._build(lambda: TrainConfig(
            lr=t['lr'], batchSize=t['batchSize'], iters=t['iters'], seed=t['seed'],
            windowLen=t['windowLen'], minOverlap=s['minOverlap'], alphaThresh=p['alpha'],
            epsilon=lo['epsilon'], zeta=lo['zeta'], precision=t['precision'],
            symmetric=lo['symmetric'], logEvery=t['logEvery'], triplet=lo['triplet'],
            perturbViews=p['views'], cropping=s['cropping'], latentMask=s['latentMask']), 'train')

    def perturbConfig(self):
        p = self.values['perturb']
        levels = p['levels'] if p['levels'] == 'auto' else _convert(0, p['levels'], 'perturb.levels')
        return self._build(lambda: PerturbConfig(alpha=p['alpha'], levels=levels), 'perturb')

    def forecastSpec(self):
        f = self.values['forecast']
        targets = None if f['targets'] == 'all' else _convert([0], f['targets'], 'forecast.targets')
        return self._build(lambda: ForecastSpec(horizons=list(f['horizons']), ridgeGrid=list(f['ridgeGrid']),
                                                window=f['window'], targets=targets), 'forecast')

    def classifySpec(self):
        c = self.values['classify']
        gamma = c['gamma'] if c['gamma'] == 'median' else _convert(0.0, c['gamma'], 'classify.gamma')
        return self._build(lambda: ClassifySpec(gamma=gamma, penaltyGrid=list(c['penaltyGrid']),
                                                folds=c['folds']), 'classify')

    def anomalySpec(self):
        a = self.values['anomaly']
        return self._build(lambda: AnomalySpec(diffOrder=a['diffOrder'], trailingWindow=a['trailingWindow'],
                                               beta=a['beta'], delay=a['delay'], window=a['window'],
                                               cleanContext=a['cleanContext'],
                                               alpha=self.values['perturb']['alpha']), 'anomaly')

    def toyConfig(self):
        s = self.values['synth']
        return ToyConfig(length=s['toyLength'], period=s['toyPeriod'], noiseAmp=s['noiseAmp'],
                         rampAmp=s['rampAmp'], seed=self.values['train']['seed'])

    def classesConfig(self):
        s = self.values['synth']
        return ClassesConfig(perClass=s['perClass'], testPerClass=s['testPerClass'], length=s['classLength'],
                             period=s['classPeriod'], sigma=s['sigma'], seed=self.values['train']['seed'])

    def streamConfig(self):
        s = self.values['synth']
        return StreamConfig(length=s['streamLength'], nSpikes=s['nSpikes'], spikeAmp=s['spikeAmp'],
                            warmup=s['warmup'], seed=self.values['train']['seed'])

# EOF
