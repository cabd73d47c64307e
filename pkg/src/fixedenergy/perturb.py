"""Reproducible perturbation of phase-shift data.

The generator is SplitMix64 so that the stream is trivial to reproduce in any
language:

    state += 0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out = z ^ (z >> 31)                      (all arithmetic mod 2^64)

A uniform double on [0, 1) is ``(out >> 11) * 2^-53`` and the perturbation is
``magnitude * (2 u - 1)``; one draw is consumed per perturbed index, in
increasing l.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def uniform(self) -> float:
        return (self.next_u64() >> 11) * 2.0**-53


@dataclass(frozen=True)
class PerturbationSpec:
    start_l: int = 5
    magnitude: float = 1e-5
    seed: int = 42

    def __post_init__(self):
        if self.start_l < 0:
            raise ValueError("start_l must be non-negative")
        if not self.magnitude >= 0.0:
            raise ValueError("magnitude must be non-negative")


def perturbation_offsets(n: int, spec: PerturbationSpec) -> np.ndarray:
    """Offsets ``u_l`` for l = 0..n-1; zero below ``spec.start_l``."""
    rng = SplitMix64(spec.seed)
    out = np.zeros(n)
    for l in range(spec.start_l, n):
        out[l] = spec.magnitude * (2.0 * rng.uniform() - 1.0)
    return out


def perturb(deltas, spec: PerturbationSpec) -> np.ndarray:
    deltas = np.asarray(deltas, dtype=float)
    return deltas + perturbation_offsets(deltas.size, spec)
