#
# Copyright 2024
#
# coincept contributors.
# All rights reserved.
#
# Distributed under the BSD 3-clause license, see LICENSE.
#

"""Module for synthetic data.

All generators are pure functions of their config; randomness comes from
the ``synth`` stream of ``cfg.seed``.
"""

import collections
from dataclasses import dataclass

import numpy as np
from scipy import signal as sps

from coincept import seeds
from coincept.data.csvwide import StreamDataset
from coincept.data.ucr import LabeledDataset
from coincept.errors import InvalidArgumentError

ToySeries = collections.namedtuple('ToySeries', ['values', 'regions'])


@dataclass
class ToyConfig:
    length: int = 900
    period: float = 60.0
    noiseFreq1: float = 0.3     # cycles per step
    noiseFreq2: float = 0.42
    noiseAmp: float = 0.3
    rampAmp: float = 2.0
    seed: int = 0


@dataclass
class ClassesConfig:
    perClass: int = 40
    testPerClass: int = 40
    length: int = 128
    period: float = 32.0
    sigma: float = 0.3
    seed: int = 0


@dataclass
class StreamConfig:
    length: int = 3000
    nSpikes: int = 10
    spikeAmp: float = 5.0
    warmup: int = 300
    sigma: float = 0.05
    seed: int = 0


def synthToy(cfg):
    """Sine with noise at both ends and a rising level shift in between.

    Returns the M x 1 series and the three [start, end) regions.
    """
    if cfg.length < 3:
        raise InvalidArgumentError("toy series needs at least 3 steps")
    rng = seeds.generator(cfg.seed, seeds.SYNTH)
    phase, ph1, ph2 = rng.uniform(0.0, 2.0 * np.pi, size=3)
    M = cfg.length
    t = np.arange(M, dtype=np.float64)
    x = np.sin(2.0 * np.pi * t / cfg.period + phase)

    c1, c2 = M // 3, 2 * M // 3
    regions = [(0, c1), (c1, c2), (c2, M)]
    x[:c1] += cfg.noiseAmp * np.sin(2.0 * np.pi * cfg.noiseFreq1 * t[:c1] + ph1)
    x[c1:c2] += np.linspace(0.0, cfg.rampAmp, c2 - c1)
    x[c2:] += cfg.noiseAmp * np.sin(2.0 * np.pi * cfg.noiseFreq2 * t[c2:] + ph2)
    return ToySeries(values=x[:, None], regions=regions)


WAVEFORMS = {
    0: lambda arg: np.sin(arg),
    1: lambda arg: sps.square(arg),
    2: lambda arg: sps.sawtooth(arg),
}


def classWaveform(label, t, period, phase):
    return WAVEFORMS[label](2.0 * np.pi * t / period + phase)


def synthClasses(cfg):
    """Sine / square / sawtooth classes with random phase and white noise."""
    rng = seeds.generator(cfg.seed, seeds.SYNTH)
    t = np.arange(cfg.length, dtype=np.float64)

    def draw(n):
        rows = []
        for label in sorted(WAVEFORMS):
            for _ in range(n):
                phase = rng.uniform(0.0, 2.0 * np.pi)
                x = classWaveform(label, t, cfg.period, phase) + cfg.sigma * rng.standard_normal(cfg.length)
                rows.append((x[:, None], label))
        return rows

    train = draw(cfg.perClass)
    test = draw(cfg.testPerClass)
    return LabeledDataset(train=train, test=test, nClasses=len(WAVEFORMS),
                          classLabels=sorted(WAVEFORMS))


def synthStream(cfg):
    """Smooth two-tone stream with single-step spikes after the warm-up.

    Spikes sit in equal slots of the post-warm-up range, one per slot, away
    from the slot borders; ``labels`` marks them.
    """
    if cfg.warmup + 4 * cfg.nSpikes > cfg.length:
        raise InvalidArgumentError("stream too short for %u spikes after %u warm-up steps"
                                   % (cfg.nSpikes, cfg.warmup))
    rng = seeds.generator(cfg.seed, seeds.SYNTH)
    M = cfg.length
    t = np.arange(M, dtype=np.float64)
    ph1, ph2 = rng.uniform(0.0, 2.0 * np.pi, size=2)
    x = np.sin(2.0 * np.pi * t / 50.0 + ph1) + 0.5 * np.sin(2.0 * np.pi * t / 120.0 + ph2)
    x += cfg.sigma * rng.standard_normal(M)

    labels = np.zeros(M, dtype=int)
    slot = (M - cfg.warmup) // max(cfg.nSpikes, 1)
    for i in range(cfg.nSpikes):
        lo = cfg.warmup + i * slot
        pos = lo + int(rng.integers(slot // 4, slot - slot // 4))
        x[pos] += cfg.spikeAmp * rng.choice([-1.0, 1.0])
        labels[pos] = 1
    return StreamDataset(timestamps=np.arange(M), values=x[:, None], columns=['value'], labels=labels)

# EOF
