"""Builders shared by the test modules"""

from typing import Callable, Sequence

import numpy as np

from src.mpb import Landscape, MPBSettings
from src.swarm_core import Cluster, Particle


class CountingFunction:
    """Wraps a fitness function and counts calls"""

    def __init__(self, fn: Callable[[np.ndarray], float]):
        self.fn = fn
        self.calls = 0

    def __call__(self, x) -> float:
        self.calls += 1
        return float(self.fn(np.asarray(x, dtype=float)))


def make_landscape(heights: Sequence[float], widths: Sequence[float], locations, **settings) -> Landscape:
    """Landscape with hand-placed peaks"""
    locations = np.atleast_2d(np.asarray(locations, dtype=float))
    mpb = MPBSettings(dims=locations.shape[1], n_peaks=len(heights), **settings)
    return Landscape(
        settings=mpb,
        heights=np.asarray(heights, dtype=float),
        widths=np.asarray(widths, dtype=float),
        locations=locations,
        velocities=np.zeros_like(locations),
        rng=np.random.default_rng(0),
    )


def particle(position, fitness: float = 0.0) -> Particle:
    return Particle.at_rest(np.atleast_1d(np.asarray(position, dtype=float)), fitness)


def cluster_of(positions, fitnesses=None) -> Cluster:
    fitnesses = fitnesses if fitnesses is not None else [0.0] * len(positions)
    return Cluster.from_members([particle(p, f) for p, f in zip(positions, fitnesses)])


def separable(targets) -> Callable[[np.ndarray], float]:
    """Additively separable maximization function with optimum at `targets`"""
    targets = np.asarray(targets, dtype=float)
    return lambda x: -float(((np.asarray(x) - targets) ** 2).sum())
