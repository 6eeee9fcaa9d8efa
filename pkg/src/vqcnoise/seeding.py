"""Deterministic seed derivation for experiment cells and RNG substreams.

Every random draw in the harness comes from a numpy Generator seeded with an
integer derived here, so results are reproducible for a fixed base seed and
independent of worker count or thread schedule.  Derivation is a splitmix64
chain over (base_seed, tag, indices...): each component is absorbed with the
golden-gamma increment and finalized with the splitmix64 mixer.
"""

from __future__ import annotations

_MASK = (1 << 64) - 1
_GAMMA = 0x9E3779B97F4A7C15

# Purpose tags keep unrelated substreams disjoint even for equal indices.
SPLIT = 0x01
INIT = 0x02
DATASET_NOISE_TRAIN = 0x03
DATASET_NOISE_TEST = 0x04
ANGLE_NOISE_TRAIN = 0x05
ANGLE_NOISE_TEST = 0x06
SHOTS = 0x07
CELL = 0x08


def _mix(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK
    return z ^ (z >> 31)


def derive(base: int, *indices: int) -> int:
    """Derive a 64-bit seed from a base seed and a tuple of indices."""
    state = base & _MASK
    for idx in indices:
        state = (state + _GAMMA) & _MASK
        state = _mix(state ^ (idx & _MASK))
    return _mix((state + _GAMMA) & _MASK)
