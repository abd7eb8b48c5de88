# core/seeding.py
"""
Seed derivation for replications.

child_seed(base, index) is a SplitMix64 finaliser applied to
base XOR (GOLDEN_GAMMA * (index + 1)), all arithmetic modulo 2**64:

    z = (base ^ (0x9E3779B97F4A7C15 * (index + 1))) mod 2**64
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    z =  z ^ (z >> 31)

Any implementation following these lines reproduces the per-row seeds.
The per-run draws come from numpy's default generator seeded with the
child seed.
"""
import numpy as np

MASK64 = 0xFFFFFFFFFFFFFFFF
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX_1 = 0xBF58476D1CE4E5B9
MIX_2 = 0x94D049BB133111EB


def child_seed(base, index):
    z = ((base & MASK64) ^ ((GOLDEN_GAMMA * (index + 1)) & MASK64)) & MASK64
    z = ((z ^ (z >> 30)) * MIX_1) & MASK64
    z = ((z ^ (z >> 27)) * MIX_2) & MASK64
    return z ^ (z >> 31)


def make_rng(seed):
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)
